"""扩展关联函数 Tr[ρ₀ e^{iS} ⊗ᵢOᵢ] 与独立的常规量子力学对照（逐步幺正演化）。

顺序约定：常规乘积中最左的因子是最晚的时间片。时间片 i 位于 tᵢ = (i−1)ε，
带初态 ψ 时扩展关联函数等于 ⟨ψ|U_N O_N ⋯ U₁ O₁|ψ⟩。N=2、H=0 时即
SWAP 测试：Tr[e^{iS}(A⊗B)] = Tr[BA]。
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
from scipy import linalg

from extended import (
    DiscreteAction,
    ExtendedSpace,
    build_action,
    build_action_timedep,
    embed_at_slice,
)
from models import DEFAULT_POLICY, ActionKind, NumericPolicy
from operator_core import (
    DegenerateNormalizationError,
    Operator,
    PAULIS,
    ShapeError,
    StateVector,
    XtqmError,
    partial_trace,
)
from utils import random_hermitian, random_matrix, random_unit_vector

logger = logging.getLogger(__name__)


class ActionKindError(XtqmError):
    """作用量种类不符合操作要求"""
    pass


@dataclass(frozen=True)
class InsertionList:
    """(时间片, 算符) 列表，每片至多一个，片号严格递增"""
    items: Tuple[Tuple[int, Operator], ...] = ()

    def __post_init__(self):
        items = tuple((int(s), op) for s, op in self.items)
        slices = [s for s, _ in items]
        if any(b <= a for a, b in zip(slices, slices[1:])):
            raise ShapeError(f"插入时间片必须严格递增: {slices}")
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, *items: Tuple[int, Operator]) -> "InsertionList":
        return cls(tuple(sorted(items, key=lambda item: item[0])))

    def as_dict(self):
        return dict(self.items)

    def shifted(self, offset: int, slices: int) -> "InsertionList":
        """所有片号平移 offset（模 N）"""
        moved = [((s - 1 + offset) % slices + 1, op) for s, op in self.items]
        return InsertionList.of(*moved)

    def validate(self, space: ExtendedSpace) -> None:
        for s, op in self.items:
            if not 1 <= s <= space.slices:
                raise ShapeError(f"插入时间片 {s} 超出范围 1..{space.slices}")
            if op.side != space.local_dim:
                raise ShapeError(f"插入算符边长 {op.side} 与局部维度 {space.local_dim} 不符")


@dataclass(frozen=True)
class CorrelatorReport:
    extended_value: complex
    oracle_value: complex
    abs_diff: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.abs_diff < self.tolerance


def _check_initial(initial: StateVector | None, d: int, policy: NumericPolicy) -> None:
    if initial is None:
        return
    if initial.dim != d:
        raise ShapeError(f"初态维度 {initial.dim} 与局部维度 {d} 不符")
    if abs(initial.norm() - 1.0) > policy.norm_tol:
        raise ShapeError(f"初态范数 {initial.norm():.12f} 不为 1")


def _single_register(action: DiscreteAction) -> None:
    if action.space.foliation_dim != 1:
        raise ShapeError("受控作用量需先用 condition_on_foliation 条件化到单一叶状")


def extended_correlator(action: DiscreteAction, ins: InsertionList,
                        initial: StateVector | None = None,
                        policy: NumericPolicy = DEFAULT_POLICY) -> complex:
    """Tr[P_ψ · e^{iS} · ⊗ᵢOᵢ]，P_ψ 嵌入在第 1 片；无初态时 P_ψ 取单位"""
    _single_register(action)
    space = action.space
    ins.validate(space)
    _check_initial(initial, space.local_dim, policy)
    product = action.matrix.data
    for s, op in ins.items:
        product = product @ embed_at_slice(space, op, s).data
    if initial is not None:
        projector = Operator(np.outer(initial.data, initial.data.conj()), (space.local_dim,))
        product = embed_at_slice(space, projector, 1).data @ product
    return complex(np.trace(product))


def normalized_correlator(action: DiscreteAction, ins: InsertionList,
                          initial: StateVector | None = None,
                          policy: NumericPolicy = DEFAULT_POLICY) -> complex:
    """Tr[ρ₀e^{iS}O]/Tr[ρ₀e^{iS}]；带初态时即 ⟨ψ,T|…|ψ⟩/⟨ψ,T|ψ⟩"""
    denominator = extended_correlator(action, InsertionList(), initial, policy)
    if abs(denominator) < policy.degenerate_tol:
        raise DegenerateNormalizationError(f"|Tr e^{{iS}}| = {abs(denominator):.3e} 过小，无法归一化")
    return extended_correlator(action, ins, initial, policy) / denominator


def _slice_propagators(h, eps: float, n: int, wick: bool) -> List[np.ndarray]:
    h_list = list(h) if isinstance(h, (list, tuple)) else [h] * n
    if len(h_list) != n:
        raise ShapeError(f"哈密顿量列表长度 {len(h_list)} 与时间片数 {n} 不符")
    factor = -eps if wick else -1j * eps
    return [linalg.expm(factor * np.asarray(getattr(hi, "data", hi), dtype=complex)) for hi in h_list]


def heisenberg_oracle(h, psi: StateVector | None, ins: InsertionList, eps: float, n: int,
                      wick: bool = False) -> complex:
    """常规对照：φ ← O₁ψ，φ ← U₁φ，…，φ ← U_Nφ，返回 ⟨ψ|φ⟩

    即 ⟨ψ,T| T̂ Πᵢ Oᵢ(tᵢ) |ψ⟩。psi=None 时对一组正交基求和（迹）；
    wick=True 时 Uᵢ = e^{−εHᵢ}（虚时演化）。
    """
    propagators = _slice_propagators(h, eps, n, wick)
    d = propagators[0].shape[0]
    inserted = ins.as_dict()
    if any(not 1 <= s <= n for s in inserted):
        raise ShapeError(f"插入时间片超出范围 1..{n}")
    phi = np.eye(d, dtype=complex) if psi is None else psi.data.copy()
    for i in range(1, n + 1):
        if i in inserted:
            phi = inserted[i].data @ phi
        phi = propagators[i - 1] @ phi
    if psi is None:
        return complex(np.trace(phi))
    return complex(np.vdot(psi.data, phi))


def thermal_oracle(h, ins: InsertionList, eps: float, n: int) -> complex:
    """Tr[e^{−εH}O_N ⋯ e^{−εH}O₁]：虚时编序的热关联函数 Tr[e^{−βH} T̂_θ Π O_H(θᵢ)]"""
    return heisenberg_oracle(h, None, ins, eps, n, wick=True)


def spectral_partition(h: Operator, beta: float) -> float:
    """Σ_λ e^{−βλ}（H 的谱）"""
    values = linalg.eigvalsh(h.data)
    return float(np.sum(np.exp(-beta * values)))


def _draw_insertions(rng: np.random.Generator, d: int, n: int) -> InsertionList:
    count = int(rng.integers(0, n + 1))
    slices = sorted(rng.choice(np.arange(1, n + 1), size=count, replace=False).tolist())
    return InsertionList.of(*[(s, Operator(random_matrix(rng, d), (d,))) for s in slices])


def _run_trial(space: ExtendedSpace, h, time_dependent: bool, seed_seq: np.random.SeedSequence,
               tolerance: float) -> CorrelatorReport:
    rng = np.random.default_rng(seed_seq)
    d, n = space.local_dim, space.slices
    if h is None:
        if time_dependent:
            h = [Operator(random_hermitian(rng, d), (d,)) for _ in range(n)]
        else:
            h = Operator(random_hermitian(rng, d), (d,))
    if isinstance(h, (list, tuple)):
        action = build_action_timedep(space, h_list=list(h))
    else:
        action = build_action(space, h)
    psi = StateVector.from_array(random_unit_vector(rng, d))
    ins = _draw_insertions(rng, d, n)
    extended_value = extended_correlator(action, ins, psi)
    oracle_value = heisenberg_oracle(h, psi, ins, space.step, n)
    return CorrelatorReport(extended_value, oracle_value, abs(extended_value - oracle_value), tolerance)


def verify_map(space: ExtendedSpace, h=None, trials: int = 100, seed: int = 0,
               time_dependent: bool = False, tolerance: float | None = None,
               workers: int = 1) -> List[CorrelatorReport]:
    """随机抽取 (H, ψ, 插入) 比较扩展关联函数与常规对照；失败只记录不抛出

    h 为 None 时每次试验重新抽取随机厄米 H（time_dependent=True 时抽取 N 个）。
    每次试验使用 SeedSequence 派生的独立随机流，结果按试验序号排列。
    """
    tolerance = space.policy.equality_tol if tolerance is None else tolerance
    children = np.random.SeedSequence(seed).spawn(trials)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(lambda s: _run_trial(space, h, time_dependent, s, tolerance), children))
    else:
        reports = [_run_trial(space, h, time_dependent, s, tolerance) for s in children]
    failed = sum(1 for r in reports if not r.passed)
    worst = max((r.abs_diff for r in reports), default=0.0)
    logger.info(f"对应关系验证：{trials} 次试验，失败 {failed} 次，最大偏差 {worst:.3e}")
    return reports


def thermal_reduction(action: DiscreteAction) -> Operator:
    """对第 2..N 片求偏迹，Wick 转动作用量给出 e^{−βH}"""
    if action.kind is not ActionKind.WICK_ROTATED:
        raise ActionKindError(f"热约化需要 wick_rotated 作用量，实际 {action.kind.value}")
    return partial_trace(action.matrix, keep=[0])


def extended_density(action: DiscreteAction, psi: StateVector) -> Operator:
    """ρ̄ = (|ψ⟩⟨ψ|⊗I)·e^{iS}"""
    _single_register(action)
    space = action.space
    _check_initial(psi, space.local_dim, space.policy)
    projector = Operator(np.outer(psi.data, psi.data.conj()), (space.local_dim,))
    return embed_at_slice(space, projector, 1) @ action.matrix


def pauli_extended_state(h: Operator, eps: float,
                         psi: StateVector | None = None) -> Tuple[Operator, np.ndarray]:
    """单量子比特两片情形的 ρ̄ 及其 Pauli 系数 c[i, j] = Tr[ρ̄ Pᵢ⊗Pⱼ]

    ρ̄ = ¼ Σ c[i, j] Pᵢ⊗Pⱼ，且 c[i, j] = ⟨ψ,T|Pⱼ(ε)Pᵢ|ψ⟩。
    """
    if h.side != 2:
        raise ShapeError("pauli_extended_state 只适用于 2×2 哈密顿量")
    psi = StateVector.basis(0, (2,)) if psi is None else psi
    action = build_action(ExtendedSpace(2, 2, eps), h)
    rho_bar = extended_density(action, psi)
    coefficients = np.empty((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            coefficients[i, j] = np.trace(rho_bar.data @ np.kron(PAULIS[i], PAULIS[j]))
    return rho_bar, coefficients


def pauli_reconstruction_residual(rho_bar: Operator, coefficients: np.ndarray) -> float:
    rebuilt = sum(coefficients[i, j] * np.kron(PAULIS[i], PAULIS[j]) for i in range(4) for j in range(4)) / 4.0
    return float(np.abs(rebuilt - rho_bar.data).max())


def pauli_oracle_table(h: Operator, eps: float, psi: StateVector | None = None) -> np.ndarray:
    """用 heisenberg_oracle 逐项计算 ⟨ψ,T|Pⱼ(ε)Pᵢ|ψ⟩"""
    psi = StateVector.basis(0, (2,)) if psi is None else psi
    table = np.empty((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            ins = InsertionList.of((1, Operator(PAULIS[i], (2,))), (2, Operator(PAULIS[j], (2,))))
            table[i, j] = heisenberg_oracle(h, psi, ins, eps, 2)
    return table
