"""Dirac 场的叶状形式（矩阵层面）：γ 代数、叶状相关的 Dirac 动量、协变哈密顿密度、
旋量 boost，以及协变 Hamilton 方程在平面波旋量上还原 Dirac 方程的检查。

场是 c 数旋量；π 与 ψ̄ 为行旋量，变换规则 n → Λn、p → Λp、u → Su、π → πS⁻¹。
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import linalg

from foliation import BoostMatrix, Foliation, metric
from models import DEFAULT_POLICY, NumericPolicy
from operator_core import PAULIS

logger = logging.getLogger(__name__)

ETA4 = metric(4)


@dataclass(frozen=True)
class GammaSet:
    gammas: Tuple[np.ndarray, ...]

    @classmethod
    def standard(cls) -> "GammaSet":
        """Dirac 表示：γ⁰ = diag(I, −I)，γᵏ = [[0, σₖ], [−σₖ, 0]]"""
        zero = np.zeros((2, 2), dtype=complex)
        eye = np.eye(2, dtype=complex)
        gamma0 = np.block([[eye, zero], [zero, -eye]])
        spatial = [np.block([[zero, s], [-s, zero]]) for s in PAULIS[1:]]
        return cls((gamma0, *spatial))

    def similar(self, transform: np.ndarray) -> "GammaSet":
        """表示变换 γ → TγT⁻¹"""
        inverse = np.linalg.inv(transform)
        return GammaSet(tuple(transform @ g @ inverse for g in self.gammas))

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.gammas[mu]

    def clifford_residual(self) -> float:
        """max_{μν} ‖{γᵘ, γᵛ} − 2ηᵘᵛI‖"""
        eye = np.eye(4)
        worst = 0.0
        for mu in range(4):
            for nu in range(mu, 4):
                anti = self[mu] @ self[nu] + self[nu] @ self[mu]
                worst = max(worst, float(np.abs(anti - 2 * ETA4[mu, nu] * eye).max()))
        return worst

    def slash(self, v) -> np.ndarray:
        """γᵘv_μ，v 为上指标分量"""
        lowered = ETA4 @ np.asarray(v)
        return sum(lowered[mu] * self[mu] for mu in range(4))

    @property
    def gamma5(self) -> np.ndarray:
        return 1j * self[0] @ self[1] @ self[2] @ self[3]

    def commutator(self, mu: int, nu: int) -> np.ndarray:
        return self[mu] @ self[nu] - self[nu] @ self[mu]


STANDARD = GammaSet.standard()


def _require_4d(fol: Foliation) -> None:
    if fol.dim != 4:
        raise ValueError(f"Dirac 模块需要 3+1 维叶状，实际 {fol.dim}")


def gamma_prime0(fol: Foliation, gammas: GammaSet = STANDARD,
                 policy: NumericPolicy = DEFAULT_POLICY) -> np.ndarray:
    """γ′⁰ = γ·n，要求 ‖n‖ = 1"""
    _require_4d(fol)
    fol.require_unit(policy.equality_tol)
    return gammas.slash(fol.n)


def slash_square_residual(fol: Foliation, gammas: GammaSet = STANDARD) -> float:
    """‖(γ·n)² − ‖n‖²I‖，任意范数的类时 n"""
    _require_4d(fol)
    g = gammas.slash(fol.n)
    return float(np.abs(g @ g - fol.norm_sq * np.eye(4)).max())


def dirac_bar(psi: np.ndarray, gammas: GammaSet = STANDARD) -> np.ndarray:
    return np.asarray(psi).conj() @ gammas[0]


def dirac_momentum(psi_bar: np.ndarray, fol: Foliation, gammas: GammaSet = STANDARD) -> np.ndarray:
    """π = iψ̄γ·n"""
    return 1j * np.asarray(psi_bar) @ gamma_prime0(fol, gammas)


def dirac_pi_to_psibar(pi: np.ndarray, fol: Foliation, gammas: GammaSet = STANDARD) -> np.ndarray:
    """ψ̄ = −iπγ·n"""
    return -1j * np.asarray(pi) @ gamma_prime0(fol, gammas)


@dataclass(frozen=True)
class SpinorBoost:
    """S_Λ = exp(⅛ω_{μν}[γᵘ, γᵛ])，对应 Λ = exp(η·ω)"""
    omega: np.ndarray
    gammas: GammaSet = STANDARD

    def __post_init__(self):
        omega = np.array(self.omega, dtype=float)
        if omega.shape != (4, 4) or np.abs(omega + omega.T).max() > 0:
            raise ValueError("ω_{μν} 必须是 4×4 反对称矩阵")
        object.__setattr__(self, "omega", omega)

    @classmethod
    def from_omega(cls, omega, gammas: GammaSet = STANDARD) -> "SpinorBoost":
        return cls(np.asarray(omega, dtype=float), gammas)

    @classmethod
    def boost(cls, rapidity: float, axis: int = 1) -> "SpinorBoost":
        omega = np.zeros((4, 4))
        omega[0, axis], omega[axis, 0] = rapidity, -rapidity
        return cls(omega)

    @classmethod
    def rotation(cls, angle: float, plane: Tuple[int, int] = (1, 2)) -> "SpinorBoost":
        i, j = plane
        omega = np.zeros((4, 4))
        omega[i, j], omega[j, i] = angle, -angle
        return cls(omega)

    @property
    def matrix(self) -> np.ndarray:
        generator = sum(self.omega[mu, nu] * self.gammas.commutator(mu, nu)
                        for mu in range(4) for nu in range(4))
        return linalg.expm(generator / 8.0)

    def vector_transform(self) -> BoostMatrix:
        return BoostMatrix.from_generator(self.omega)

    def inverse(self) -> "SpinorBoost":
        return SpinorBoost(-self.omega, self.gammas)

    def covariance_residual(self) -> float:
        """max_μ ‖S⁻¹γᵘS − Λᵘ_νγᵛ‖"""
        s = self.matrix
        s_inv = np.linalg.inv(s)
        lam = self.vector_transform().matrix
        worst = 0.0
        for mu in range(4):
            rhs = sum(lam[mu, nu] * self.gammas[nu] for nu in range(4))
            worst = max(worst, float(np.abs(s_inv @ self.gammas[mu] @ s - rhs).max()))
        return worst

    def unitarity_defect(self) -> float:
        s = self.matrix
        return float(np.abs(s.conj().T @ s - np.eye(4)).max())


def composition_residual(first: SpinorBoost, second: SpinorBoost) -> float:
    """‖S(ω₁+ω₂) − S(ω₁)S(ω₂)‖，生成元对易时应为舍入级"""
    combined = SpinorBoost(first.omega + second.omega, first.gammas)
    return float(np.abs(combined.matrix - first.matrix @ second.matrix).max())


@dataclass(frozen=True)
class SpinorReport:
    covariance_residual: float
    unitarity_defect: float
    clifford_residual: float
    rotation_only: bool


def spinor_boost_checks(omega) -> SpinorReport:
    boost = SpinorBoost.from_omega(omega)
    rotation_only = bool(np.all(boost.omega[0, :] == 0.0))
    report = SpinorReport(boost.covariance_residual(), boost.unitarity_defect(),
                          boost.gammas.clifford_residual(), rotation_only)
    logger.debug(f"旋量 boost 检查: {report}")
    return report


def random_omega(rng: np.random.Generator, scale: float = 1.0, rotations_only: bool = False) -> np.ndarray:
    upper = rng.uniform(-scale, scale, size=(4, 4))
    if rotations_only:
        upper[0, :] = 0.0
    omega = np.triu(upper, 1)
    return omega - omega.T


def on_shell_energy(p, m: float) -> float:
    return math.sqrt(float(np.sum(np.asarray(p, dtype=float)[1:] ** 2)) + m ** 2)


def plane_wave_spinor(p, m: float, branch: int = 0, gammas: GammaSet = STANDARD) -> np.ndarray:
    """u(p) = (γ·p + m)e_s/√(E+m)，s ∈ {0, 1}，归一为 ūu = 2m"""
    if branch not in (0, 1):
        raise ValueError(f"旋量分支必须是 0 或 1，实际 {branch}")
    p = np.asarray(p, dtype=float)
    basis = np.zeros(4, dtype=complex)
    basis[branch] = 1.0
    return (gammas.slash(p) + m * np.eye(4)) @ basis / math.sqrt(p[0] + m)


def dirac_residual(p, branch: int, fol: Foliation, m: float,
                   gammas: GammaSet = STANDARD) -> Tuple[float, bool]:
    """n·∂ψ − ∂ℋ/∂π = −iγ·n(iγ·∂ − m)ψ 在平面波 u(p)e^{−ipx} 上的范数 ‖−iγ·n(γ·p − m)u‖

    返回 (残差, 是否在壳)；离壳时不报错，只做标记。
    """
    p = np.asarray(p, dtype=float)
    on_shell = abs(p[0] - on_shell_energy(p, m)) <= 1e-12 * max(1.0, abs(p[0]))
    if not on_shell:
        logger.info(f"dirac_residual: p = {p.tolist()} 离壳")
    u = plane_wave_spinor(p, m, branch, gammas)
    value = -1j * gamma_prime0(fol, gammas) @ (gammas.slash(p) - m * np.eye(4)) @ u
    return float(np.linalg.norm(value)), on_shell


def derivative_kernel(fol: Foliation, gammas: GammaSet = STANDARD) -> Tuple[np.ndarray, ...]:
    """Kᵘ = nᵘ − (γ·n)γᵘ"""
    g_n = gamma_prime0(fol, gammas)
    return tuple(fol.n[mu] * np.eye(4) - g_n @ gammas[mu] for mu in range(4))


def derivative_kernel_residual(fol: Foliation, gammas: GammaSet = STANDARD) -> float:
    """‖Kᵘn_μ‖：导数核不含沿 n 的导数"""
    n_lower = ETA4 @ fol.n
    kernel = derivative_kernel(fol, gammas)
    return float(np.abs(sum(n_lower[mu] * kernel[mu] for mu in range(4))).max())


def dirac_hamiltonian_density(psi: np.ndarray, pi: np.ndarray, fol: Foliation, m: float, p,
                              gammas: GammaSet = STANDARD) -> complex:
    """ℋ_D = π[(nᵘ − γ·nγᵘ)∂_μ − imγ·n]ψ，平面波 ∂_μ → −ip_μ"""
    p_lower = ETA4 @ np.asarray(p, dtype=float)
    kernel = derivative_kernel(fol, gammas)
    operator = sum(kernel[mu] * (-1j * p_lower[mu]) for mu in range(4)) - 1j * m * gamma_prime0(fol, gammas)
    return complex(np.asarray(pi) @ operator @ np.asarray(psi))


def hamiltonian_invariance(psi: np.ndarray, pi: np.ndarray, fol: Foliation, m: float, p,
                           boost: SpinorBoost) -> float:
    """|ℋ(Sψ, πS⁻¹, Λn, Λp) − ℋ(ψ, π, n, p)|"""
    lam = boost.vector_transform()
    s = boost.matrix
    before = dirac_hamiltonian_density(psi, pi, fol, m, p, boost.gammas)
    after = dirac_hamiltonian_density(s @ psi, pi @ np.linalg.inv(s), fol.boosted(lam), m,
                                      lam.apply(p), boost.gammas)
    return abs(after - before)


def momentum_covariance_residual(psi_bar: np.ndarray, fol: Foliation, boost: SpinorBoost) -> float:
    """交换图：dirac_momentum(ψ̄S⁻¹, Λn) 与 dirac_momentum(ψ̄, n)·S⁻¹"""
    s_inv = np.linalg.inv(boost.matrix)
    lam = boost.vector_transform()
    transformed = dirac_momentum(psi_bar @ s_inv, fol.boosted(lam), boost.gammas)
    return float(np.abs(transformed - dirac_momentum(psi_bar, fol, boost.gammas) @ s_inv).max())


def rest_density(m: float, branch: int = 0) -> Tuple[complex, float]:
    """静止系正能旋量：(ℋ_D, m·ψ†ψ)"""
    p = np.array([m, 0.0, 0.0, 0.0])
    psi = plane_wave_spinor(p, m, branch)
    fol = Foliation.canonical(4)
    pi = dirac_momentum(dirac_bar(psi), fol)
    return dirac_hamiltonian_density(psi, pi, fol, m, p), m * float(np.vdot(psi, psi).real)


