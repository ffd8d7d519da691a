"""离散扩展 Hilbert 空间 ⊗ᵢhᵢ：循环平移 e^{iεP₀}、时间片嵌入与离散量子作用量 e^{iS}。

平移方向：时间片 i 的内容移到时间片 i+1，即 |n₁n₂…n_N⟩ ↦ |n_N n₁ … n_{N−1}⟩。
以 N=3, d=2 为例：|011⟩ ↦ |101⟩，|001⟩ ↦ |100⟩。
"""

import logging
from dataclasses import dataclass, field
from typing import Sequence, Tuple

import numpy as np

from models import DEFAULT_POLICY, ActionKind, NumericPolicy
from operator_core import (
    Operator,
    ShapeError,
    StateVector,
    check_dimension,
    identity,
    is_hermitian,
    matrix_exp,
    permutation_operator,
    tensor_all,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExtendedSpace:
    """局部维度 d、时间片数 N、时间步 ε、叶状寄存器维度 K（K=1 表示无寄存器）"""
    local_dim: int
    slices: int
    step: float
    foliation_dim: int = 1
    policy: NumericPolicy = DEFAULT_POLICY

    def __post_init__(self):
        if self.local_dim < 2:
            raise ShapeError(f"局部维度必须 ≥ 2，实际 {self.local_dim}")
        if self.slices < 1:
            raise ShapeError(f"时间片数必须 ≥ 1，实际 {self.slices}")
        if self.foliation_dim < 1:
            raise ShapeError(f"叶状寄存器维度必须 ≥ 1，实际 {self.foliation_dim}")
        if self.step < 0:
            raise ShapeError(f"时间步必须非负，实际 {self.step}")
        check_dimension(self.dim, self.policy)

    @property
    def matter_shape(self) -> Tuple[int, ...]:
        return (self.local_dim,) * self.slices

    @property
    def shape(self) -> Tuple[int, ...]:
        if self.foliation_dim > 1:
            return self.matter_shape + (self.foliation_dim,)
        return self.matter_shape

    @property
    def matter_dim(self) -> int:
        return self.local_dim ** self.slices

    @property
    def dim(self) -> int:
        return self.matter_dim * self.foliation_dim

    @property
    def total_time(self) -> float:
        return self.slices * self.step

    def without_register(self) -> "ExtendedSpace":
        return ExtendedSpace(self.local_dim, self.slices, self.step, 1, self.policy)


@dataclass(frozen=True)
class DiscreteAction:
    """e^{iS} 的矩阵表示及其构造信息"""
    space: ExtendedSpace
    matrix: Operator
    kind: ActionKind
    slice_hamiltonians: Tuple[Operator, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.matrix.shape != self.space.shape:
            raise ShapeError(f"作用量形状 {self.matrix.shape} 与空间形状 {self.space.shape} 不符")


def cyclic_shift(space: ExtendedSpace) -> Operator:
    """e^{iεP₀}：直接按基矢置换构造，N 次幂为单位"""
    n = space.slices
    return permutation_operator(space.matter_shape, [(k + 1) % n for k in range(n)])


def embed_at_slice(space: ExtendedSpace, op: Operator, slice_index: int) -> Operator:
    """I⊗…⊗op⊗…⊗I，op 位于第 slice_index 片（从 1 计）；有寄存器时在最右补 I_K"""
    d, n = space.local_dim, space.slices
    if op.side != d:
        raise ShapeError(f"嵌入算符边长 {op.side} 与局部维度 {d} 不符")
    if not 1 <= slice_index <= n:
        raise ShapeError(f"时间片 {slice_index} 超出范围 1..{n}")
    left = np.eye(d ** (slice_index - 1), dtype=complex)
    right = np.eye(d ** (n - slice_index) * space.foliation_dim, dtype=complex)
    return Operator(np.kron(np.kron(left, op.data), right), space.shape)


def _require_single_register(space: ExtendedSpace) -> None:
    if space.foliation_dim != 1:
        raise ShapeError("带叶状寄存器的空间请使用 build_controlled_action")


def _check_generator(space: ExtendedSpace, h: Operator) -> None:
    if h.side != space.local_dim:
        raise ShapeError(f"哈密顿量边长 {h.side} 与局部维度 {space.local_dim} 不符")


def _product_action(space: ExtendedSpace, unitaries: Sequence[Operator]) -> Operator:
    local = tensor_all([Operator(u.data, (space.local_dim,)) for u in unitaries], space.policy)
    return cyclic_shift(space) @ Operator(local.data, space.matter_shape)


def build_action(space: ExtendedSpace, h: Operator) -> DiscreteAction:
    """e^{iS} = e^{iεP₀}·⊗ᵢ e^{−iεH}

    非厄米 H 仍照常构造（对应关系对非厄米 H 也成立），此时结果不再是酉的，
    种类记为 time_dependent 而非 unitary。
    """
    _require_single_register(space)
    _check_generator(space, h)
    hermitian = is_hermitian(h, space.policy.hermitian_tol)
    if not hermitian:
        logger.warning("build_action: H 非厄米，e^{iS} 将不是酉算符")
    u = matrix_exp(h, -1j * space.step)
    matrix = _product_action(space, [u] * space.slices)
    kind = ActionKind.UNITARY if hermitian else ActionKind.TIME_DEPENDENT
    return DiscreteAction(space, matrix, kind, (h,) * space.slices)


def build_action_timedep(space: ExtendedSpace, h_list: Sequence[Operator] | None = None,
                         unitaries: Sequence[Operator] | None = None) -> DiscreteAction:
    """e^{iS} = e^{iεP₀}·⊗ᵢUᵢ，Uᵢ = e^{−iεHᵢ}；也可直接传入预先算好的 Uᵢ"""
    _require_single_register(space)
    if (h_list is None) == (unitaries is None):
        raise ShapeError("h_list 与 unitaries 必须且只能提供一个")
    if h_list is not None:
        if len(h_list) != space.slices:
            raise ShapeError(f"哈密顿量列表长度 {len(h_list)} 与时间片数 {space.slices} 不符")
        for h in h_list:
            _check_generator(space, h)
        unitaries = [matrix_exp(h, -1j * space.step) for h in h_list]
        generators = tuple(h_list)
    else:
        if len(unitaries) != space.slices:
            raise ShapeError(f"酉算符列表长度 {len(unitaries)} 与时间片数 {space.slices} 不符")
        for u in unitaries:
            _check_generator(space, u)
        generators = ()
    return DiscreteAction(space, _product_action(space, unitaries), ActionKind.TIME_DEPENDENT, generators)


def build_action_wick(space: ExtendedSpace, h: Operator) -> DiscreteAction:
    """Wick 转动 H → −iH：e^{iS} = e^{iεP₀}·⊗ᵢ e^{−εH}，总时长 Nε 即 β"""
    _require_single_register(space)
    _check_generator(space, h)
    if not is_hermitian(h, space.policy.hermitian_tol):
        logger.warning("build_action_wick: H 非厄米，热约化不再对应 e^{−βH} 的物理解释")
    u = matrix_exp(h, -space.step)
    return DiscreteAction(space, _product_action(space, [u] * space.slices),
                          ActionKind.WICK_ROTATED, (h,) * space.slices)


def build_controlled_action(space: ExtendedSpace, h_family: Sequence[Operator]) -> DiscreteAction:
    """受控作用量 Σₖ e^{iS(Hₖ)} ⊗ |k⟩⟨k|，寄存器为最后一个因子"""
    if len(h_family) != space.foliation_dim:
        raise ShapeError(f"哈密顿量族大小 {len(h_family)} 与寄存器维度 {space.foliation_dim} 不符")
    branch_space = space.without_register()
    k_dim = space.foliation_dim
    matrix = np.zeros((space.dim, space.dim), dtype=complex)
    for k, h in enumerate(h_family):
        branch = build_action(branch_space, h).matrix.data
        projector = np.zeros((k_dim, k_dim), dtype=complex)
        projector[k, k] = 1.0
        matrix += np.kron(branch, projector)
    return DiscreteAction(space, Operator(matrix, space.shape), ActionKind.CONTROLLED, tuple(h_family))


def condition_on_foliation(action: DiscreteAction, k: int) -> DiscreteAction:
    """把寄存器投影到 |k⟩，得到固定叶状下的作用量 (I⊗⟨k|) e^{iS} (I⊗|k⟩)"""
    space = action.space
    if space.foliation_dim == 1:
        return action
    if not 0 <= k < space.foliation_dim:
        raise ShapeError(f"寄存器分支 {k} 超出范围 0..{space.foliation_dim - 1}")
    dm, kd = space.matter_dim, space.foliation_dim
    block = action.matrix.data.reshape(dm, kd, dm, kd)[:, k, :, k]
    branch_space = space.without_register()
    h = action.slice_hamiltonians[k] if action.slice_hamiltonians else None
    kind = ActionKind.UNITARY if h is not None and is_hermitian(h) else ActionKind.TIME_DEPENDENT
    generators = (h,) * space.slices if h is not None else ()
    return DiscreteAction(branch_space, Operator(block, branch_space.shape), kind, generators)


def controlled_operator(ops: Sequence[Operator]) -> Operator:
    """Σₖ Aₖ ⊗ Πₖ"""
    k_dim = len(ops)
    shape = ops[0].shape
    matrix = np.zeros((ops[0].side * k_dim, ops[0].side * k_dim), dtype=complex)
    for k, op in enumerate(ops):
        if op.shape != shape:
            raise ShapeError("受控算符各分支形状必须一致")
        projector = np.zeros((k_dim, k_dim), dtype=complex)
        projector[k, k] = 1.0
        matrix += np.kron(op.data, projector)
    return Operator(matrix, shape + (k_dim,))


def history_state(states: Sequence[StateVector]) -> StateVector:
    """Σₖ |Ωₖ⟩|k⟩"""
    k_dim = len(states)
    shape = states[0].shape
    vector = np.zeros(states[0].dim * k_dim, dtype=complex)
    for k, state in enumerate(states):
        if state.shape != shape:
            raise ShapeError("历史态各分支形状必须一致")
        register = np.zeros(k_dim, dtype=complex)
        register[k] = 1.0
        vector += np.kron(state.data, register)
    return StateVector(vector, shape + (k_dim,))


def cyclicity_residual(action: DiscreteAction, op: Operator) -> float:
    """|Tr[e^{iS}O] − Tr[O e^{iS}]|"""
    m = action.matrix.data
    return abs(np.trace(m @ op.data) - np.trace(op.data @ m))


def shift_power_residual(space: ExtendedSpace) -> float:
    """‖C^N − I‖（置换运算下精确为 0）"""
    shift = cyclic_shift(space).data
    power = np.linalg.matrix_power(shift, space.slices)
    return float(np.abs(power - identity(space.matter_shape).data).max())

