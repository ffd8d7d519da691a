"""广义纯化：复 λ 的成对真空、Bogoliubov 系数、两片量子比特广义态、弱值与赝熵。

截断策略：n_max 取到 e^{−Reλ·n_max} 低于配置上界；Re λ < 0.5 时不再物化向量，
标量检查改用闭式几何级数（closed_form_overlap / closed_form_occupancy）。
多模态的因子布局为 [系统模 1..M, 环境模 1..M]。
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.sparse import linalg as sparse_linalg

from models import DEFAULT_POLICY, NumericPolicy
from operator_core import (
    GeneralizedState,
    Operator,
    ShapeError,
    StateVector,
    XtqmError,
    check_dimension,
    eig_spectrum,
    matrix_exp,
)

logger = logging.getLogger(__name__)

MIN_MATERIALIZED_REAL_PART = 0.5


class SpectrumError(XtqmError):
    """λ 的实部不为正"""
    pass


class TruncationError(XtqmError):
    """Fock 截断不满足误差上界"""

    def __init__(self, message: str, required_n_max: int | None = None):
        super().__init__(message)
        self.required_n_max = required_n_max


class TraceError(XtqmError):
    """输入矩阵的迹偏离 1"""
    pass


@dataclass(frozen=True)
class ModeSpectrum:
    lambdas: Tuple[complex, ...]

    def __post_init__(self):
        lambdas = tuple(complex(lam) for lam in self.lambdas)
        if not lambdas:
            raise SpectrumError("模谱不能为空")
        bad = [lam for lam in lambdas if lam.real <= 0]
        if bad:
            raise SpectrumError(f"λ 的实部必须为正: {bad}")
        object.__setattr__(self, "lambdas", lambdas)

    @property
    def modes(self) -> int:
        return len(self.lambdas)


@dataclass(frozen=True)
class BogoliubovPair:
    u: complex
    v: complex

    @property
    def hyperbolic_residual(self) -> float:
        """| |u|² − |v|² − 1 |"""
        return abs(abs(self.u) ** 2 - abs(self.v) ** 2 - 1.0)


@dataclass(frozen=True)
class TruncatedFockSpace:
    n_max: int
    modes: int = 1
    policy: NumericPolicy = DEFAULT_POLICY

    def __post_init__(self):
        if self.n_max < 1 or self.modes < 1:
            raise ShapeError(f"非法截断空间 n_max={self.n_max}, modes={self.modes}")
        check_dimension(self.level_count ** (2 * self.modes), self.policy)

    @property
    def level_count(self) -> int:
        return self.n_max + 1

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.level_count,) * (2 * self.modes)


def annihilation_matrix(n_max: int) -> np.ndarray:
    """截断湮灭算符 a|n⟩ = √n|n−1⟩"""
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), k=1).astype(complex)


def number_operator(n_max: int) -> Operator:
    return Operator(np.diag(np.arange(n_max + 1, dtype=float)).astype(complex), (n_max + 1,))


def required_n_max(lam: complex, bound: float) -> int:
    """使 e^{−Reλ·n_max} < bound 的最小 n_max"""
    return max(1, math.floor(-math.log(bound) / complex(lam).real) + 1)


def closed_form_overlap(spectrum: ModeSpectrum) -> complex:
    """Πₖ 1/(1 − e^{−λₖ})"""
    return complex(np.prod([1.0 / (1.0 - np.exp(-lam)) for lam in spectrum.lambdas]))


def truncated_overlap(spectrum: ModeSpectrum, n_max: int) -> complex:
    """Πₖ Σ_{n≤n_max} e^{−λₖn}（闭式）"""
    return complex(np.prod([(1.0 - np.exp(-lam * (n_max + 1))) / (1.0 - np.exp(-lam)) for lam in spectrum.lambdas]))


def closed_form_occupancy(lam: complex) -> complex:
    """玻色-爱因斯坦形式 1/(e^λ − 1)"""
    return complex(1.0 / (np.exp(lam) - 1.0))


def occupancy_truncation_bound(lam: complex, n_max: int) -> float:
    """截断占据数与 1/(e^λ−1) 之差的上界"""
    x = abs(np.exp(-complex(lam)))
    return float(4.0 * (n_max + 3) * x ** (n_max + 1) / (1.0 - x) ** 2)


def _mode_weights(lam: complex, n_max: int) -> np.ndarray:
    return np.exp(-lam * np.arange(n_max + 1) / 2.0)


def _paired_vector(weights: Sequence[np.ndarray]) -> np.ndarray:
    """Σ_n wₖ(n)|n⟩|ñ⟩ 的直积，轴顺序重排为 [系统..., 环境...]"""
    tensor = np.ones((), dtype=complex)
    for w in weights:
        tensor = np.multiply.outer(tensor, np.diag(w))
    m = len(weights)
    order = [2 * k for k in range(m)] + [2 * k + 1 for k in range(m)]
    return np.transpose(tensor, order).reshape(-1)


def purified_vacua(spectrum: ModeSpectrum, fock: TruncatedFockSpace) -> GeneralizedState:
    """|0_λ⟩⟩ = ⊗ₖ Σ e^{−λₖn/2}|n⟩|ñ⟩ 与 |0̄_λ⟩⟩（λ → λ*），未归一化

    重叠 ⟨⟨0̄_λ|0_λ⟩⟩ = Πₖ Σ_{n≤n_max} e^{−λₖn}。
    """
    if spectrum.modes != fock.modes:
        raise ShapeError(f"模数不一致: 谱 {spectrum.modes} vs 截断空间 {fock.modes}")
    for lam in spectrum.lambdas:
        needed = required_n_max(lam, fock.policy.truncation_bound)
        if lam.real < MIN_MATERIALIZED_REAL_PART:
            raise TruncationError(
                f"Re λ = {lam.real:.3g} < {MIN_MATERIALIZED_REAL_PART}，不物化向量，请使用闭式几何级数", needed)
        if math.exp(-lam.real * fock.n_max) >= fock.policy.truncation_bound:
            raise TruncationError(f"λ = {lam} 需要 n_max ≥ {needed}，当前 {fock.n_max}", needed)
    ket = _paired_vector([_mode_weights(lam, fock.n_max) for lam in spectrum.lambdas])
    bra = _paired_vector([_mode_weights(lam.conjugate(), fock.n_max) for lam in spectrum.lambdas])
    shape = fock.shape
    return GeneralizedState(StateVector(ket, shape), StateVector(bra, shape), spectrum.modes, policy=fock.policy)


def bogoliubov_coeffs(lam: complex) -> BogoliubovPair:
    """u = 1/√(1 − e^{−Reλ})，v = −e^{−λ/2}·u"""
    lam = complex(lam)
    if lam.real <= 0:
        raise SpectrumError(f"Re λ 必须为正，实际 {lam}")
    u = 1.0 / math.sqrt(-math.expm1(-lam.real))
    v = -np.exp(-lam / 2.0) * u
    return BogoliubovPair(complex(u), complex(v))


def _apply_on_axis(tensor: np.ndarray, matrix: np.ndarray, axis: int) -> np.ndarray:
    moved = np.tensordot(matrix, tensor, axes=([1], [axis]))
    return np.moveaxis(moved, 0, axis)


def _ladder_residual(vector: StateVector, pair: BogoliubovPair, n_max: int, mode: int, modes: int) -> float:
    tensor = vector.data.reshape(vector.shape)
    a = annihilation_matrix(n_max)
    image = pair.u * _apply_on_axis(tensor, a, mode) + pair.v * _apply_on_axis(tensor, a.conj().T, modes + mode)
    return float(np.linalg.norm(image) / np.linalg.norm(tensor))


def annihilation_check(state: GeneralizedState, lam: complex, fock: TruncatedFockSpace, mode: int = 0) -> float:
    """‖(u a⊗I + v I⊗ã†)|0_λ⟩⟩‖ / ‖|0_λ⟩⟩‖（截断梯算符，非零仅来自截断）"""
    return _ladder_residual(state.ket, bogoliubov_coeffs(lam), fock.n_max, mode, fock.modes)


def conjugate_annihilation_check(state: GeneralizedState, lam: complex, fock: TruncatedFockSpace,
                                 mode: int = 0) -> float:
    """ā′ = ū a + v̄ ã†（由 λ* 构造）作用在 |0̄_λ⟩⟩ 上的相对残差"""
    return _ladder_residual(state.bra, bogoliubov_coeffs(complex(lam).conjugate()), fock.n_max, mode, fock.modes)


def _as_matrices(state: GeneralizedState) -> Tuple[np.ndarray, np.ndarray]:
    sys_dim = int(np.prod(state.system_shape)) if state.n_system else 1
    return state.ket.data.reshape(sys_dim, -1), state.bra.data.reshape(sys_dim, -1)


def reduced_state(state: GeneralizedState) -> Operator:
    """Tr_E R，不物化整个 R"""
    if state.n_system == 0:
        return Operator(np.array([[1.0]]), (1,))
    psi, phi = _as_matrices(state)
    return Operator(psi @ phi.conj().T / state.overlap, state.system_shape)


def weak_value(state: GeneralizedState, obs: Operator) -> complex:
    """⟨⟨Φ|O⊗1_E|Ψ⟩⟩/⟨⟨Φ|Ψ⟩⟩，O 只作用在系统因子上"""
    psi, phi = _as_matrices(state)
    if obs.side != psi.shape[0]:
        raise ShapeError(f"可观测量边长 {obs.side} 与系统维度 {psi.shape[0]} 不符")
    return complex(np.vdot(phi, obs.data @ psi) / state.overlap)


def qubit_generalized_state(h: Operator, eps: float, psi: StateVector | None = None) -> GeneralizedState:
    """两片离散作用量的广义纯化

    |Ψ⟩⟩ = |ψ⟩(Σₖ|kk⟩)/√d，|Φ⟩⟩ = (e^{iεH}⊗e^{iεH}⊗I)(Σₖ|k⟩|ψ⟩|k⟩)/√d，
    Tr_E |Ψ⟩⟩⟨⟨Φ| = ρ̄/d，因而 Tr_E R = ρ̄/Tr ρ̄。ψ 默认 |0⟩。
    """
    d = h.side
    psi = StateVector.basis(0, (d,)) if psi is None else psi
    if psi.dim != d:
        raise ShapeError(f"初态维度 {psi.dim} 与 H 边长 {d} 不符")
    bell = np.eye(d, dtype=complex).reshape(-1) / math.sqrt(d)
    ket = np.kron(psi.data, bell)
    swapped = np.einsum("j,kl->kjl", psi.data, np.eye(d, dtype=complex))
    v = matrix_exp(h, 1j * eps).data
    bra = np.kron(np.kron(v, v), np.eye(d)) @ (swapped.reshape(-1) / math.sqrt(d))
    shape = (d, d, d)
    return GeneralizedState(StateVector(ket, shape), StateVector(bra, shape), 2)


def purify_operator(x: Operator) -> GeneralizedState:
    """任意迹非零方阵 X 的广义纯化：|Ψ⟩⟩ = Σₖ X|k⟩|k⟩，|Φ⟩⟩ = Σₖ |k⟩|k⟩，Tr_E R = X/Tr X"""
    side = x.side
    ket = x.data.reshape(side, side)
    bra = np.eye(side, dtype=complex)
    shape = x.shape + (side,)
    return GeneralizedState(StateVector(ket.reshape(-1), shape), StateVector(bra.reshape(-1), shape), len(x.shape))


SMALL_STATE_DIM = 64


def leading_eigenvalue(state: GeneralizedState) -> complex:
    """Arnoldi 求 R = |Ψ⟩⟩⟨⟨Φ|/o 模最大的本征值，只用 R 的矩阵-向量乘，不构造 R"""
    ket, bra = state.ket.data, state.bra.data

    def matvec(v: np.ndarray) -> np.ndarray:
        return ket * (np.vdot(bra, np.ravel(v)) / state.overlap)

    operator = sparse_linalg.LinearOperator((ket.size, ket.size), matvec=matvec, dtype=complex)
    values = sparse_linalg.eigs(operator, k=1, v0=ket, return_eigenvectors=False)
    return complex(values[0])


def pseudo_entropy(source, policy: NumericPolicy = DEFAULT_POLICY) -> complex:
    """S = −Σ λ log λ（主值分支，|λ| < eig_zero_tol 的本征值记 0）

    source 可以是 GeneralizedState（整体 R）、Operator 或数组（约化矩阵）。
    """
    if isinstance(source, GeneralizedState):
        if source.ket.dim <= SMALL_STATE_DIM:
            values = eig_spectrum(source.matrix())
        else:
            # 秩一：其余本征值为零
            values = np.array([leading_eigenvalue(source)])
    else:
        matrix = source if isinstance(source, Operator) else Operator.from_matrix(source)
        trace = matrix.trace()
        if abs(trace - 1.0) > 1e-8:
            raise TraceError(f"赝熵输入的迹 {trace:.6g} 不为 1")
        values = eig_spectrum(matrix)
    values = values[np.abs(values) >= policy.eig_zero_tol]
    return complex(-np.sum(values * np.log(values.astype(complex))))


def thermal_target(lam: complex, n_max: int) -> np.ndarray:
    """截断空间上的 e^{−λa†a}/Z"""
    weights = np.exp(-complex(lam) * np.arange(n_max + 1))
    return np.diag(weights / weights.sum())
