"""稠密复线性代数底座：带张量因子形状的算符/态矢、张量积、偏迹、矩阵指数、本征谱。

因子排序约定：时间片 1 是最高位（最左）因子，叶状寄存器（若有）在最右。
"""

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np
from scipy import linalg

from models import DEFAULT_POLICY, NumericPolicy

logger = logging.getLogger(__name__)


class XtqmError(Exception):
    """本项目所有数值/输入异常的基类"""
    pass


class ShapeError(XtqmError):
    """形状或维度不匹配、索引越界"""
    pass


class ResourceLimitError(XtqmError):
    """稠密维度超过配置上限"""
    pass


class NumericError(XtqmError):
    """出现非有限数值"""
    pass


class DegenerateNormalizationError(XtqmError):
    """归一化分母（迹、重叠）在容差内为零"""
    pass


def _as_shape(shape: Iterable[int]) -> Tuple[int, ...]:
    result = tuple(int(s) for s in shape)
    if not result:
        raise ShapeError("因子形状不能为空")
    if any(s < 1 for s in result):
        raise ShapeError(f"因子维度必须 ≥ 1: {result}")
    return result


def check_dimension(side: int, policy: NumericPolicy = DEFAULT_POLICY) -> None:
    if side > policy.dimension_cap:
        raise ResourceLimitError(f"维度 {side} 超过上限 {policy.dimension_cap}")


@dataclass(frozen=True)
class Operator:
    """稠密复方阵 + 因子形状 [d₁,…,d_M]，Πdᵢ 等于矩阵边长"""
    data: np.ndarray
    shape: Tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex)
        shape = _as_shape(self.shape)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise ShapeError(f"算符矩阵必须是方阵，实际 {data.shape}")
        if data.shape[0] != int(np.prod(shape)):
            raise ShapeError(f"矩阵边长 {data.shape[0]} 与因子形状 {shape} 的乘积不符")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def from_matrix(cls, matrix, shape: Sequence[int] | None = None) -> "Operator":
        matrix = np.asarray(matrix, dtype=complex)
        return cls(matrix, tuple(shape) if shape is not None else (matrix.shape[0],))

    @property
    def side(self) -> int:
        return self.data.shape[0]

    @property
    def dagger(self) -> "Operator":
        return Operator(self.data.conj().T, self.shape)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def __matmul__(self, other: "Operator") -> "Operator":
        if not isinstance(other, Operator):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeError(f"算符形状不一致: {self.shape} vs {other.shape}")
        return Operator(self.data @ other.data, self.shape)

    def __add__(self, other: "Operator") -> "Operator":
        if self.shape != other.shape:
            raise ShapeError(f"算符形状不一致: {self.shape} vs {other.shape}")
        return Operator(self.data + other.data, self.shape)

    def __sub__(self, other: "Operator") -> "Operator":
        if self.shape != other.shape:
            raise ShapeError(f"算符形状不一致: {self.shape} vs {other.shape}")
        return Operator(self.data - other.data, self.shape)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.data * complex(scalar), self.shape)

    __rmul__ = __mul__


@dataclass(frozen=True)
class StateVector:
    """复向量 + 因子形状"""
    data: np.ndarray
    shape: Tuple[int, ...]

    def __post_init__(self):
        data = np.asarray(self.data, dtype=complex).reshape(-1)
        shape = _as_shape(self.shape)
        if data.size != int(np.prod(shape)):
            raise ShapeError(f"向量长度 {data.size} 与因子形状 {shape} 的乘积不符")
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "shape", shape)

    @classmethod
    def from_array(cls, vector, shape: Sequence[int] | None = None) -> "StateVector":
        vector = np.asarray(vector, dtype=complex).reshape(-1)
        return cls(vector, tuple(shape) if shape is not None else (vector.size,))

    @classmethod
    def basis(cls, index: int, shape: Sequence[int]) -> "StateVector":
        shape = _as_shape(shape)
        vector = np.zeros(int(np.prod(shape)), dtype=complex)
        vector[index] = 1.0
        return cls(vector, shape)

    @property
    def dim(self) -> int:
        return self.data.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.data))

    def normalized(self) -> "StateVector":
        norm = self.norm()
        if norm == 0.0:
            raise DegenerateNormalizationError("零向量无法归一化")
        return StateVector(self.data / norm, self.shape)

    def projector(self) -> Operator:
        return Operator(np.outer(self.data, self.data.conj()), self.shape)


@dataclass(frozen=True)
class GeneralizedState:
    """广义态 R = |Ψ⟩⟩⟨⟨Φ|/⟨⟨Φ|Ψ⟩⟩

    ket、bra 都以未归一化的列向量存储（bra 存的是 |Φ⟩⟩ 本身，使用时取共轭），
    overlap 缓存 ⟨⟨Φ|Ψ⟩⟩；归一化只在求值时折算。n_system 为系统因子个数，
    其余因子属于环境。
    """
    ket: StateVector
    bra: StateVector
    n_system: int
    overlap: complex = 0j
    policy: NumericPolicy = DEFAULT_POLICY

    def __post_init__(self):
        if self.ket.shape != self.bra.shape:
            raise ShapeError(f"ket/bra 形状不一致: {self.ket.shape} vs {self.bra.shape}")
        if not 0 <= self.n_system <= len(self.ket.shape):
            raise ShapeError(f"系统因子数 {self.n_system} 越界")
        overlap = complex(np.vdot(self.bra.data, self.ket.data))
        scale = self.ket.norm() * self.bra.norm()
        if abs(overlap) <= self.policy.overlap_tol * scale:
            raise DegenerateNormalizationError(f"广义态重叠 |⟨⟨Φ|Ψ⟩⟩| = {abs(overlap):.3e} 过小")
        object.__setattr__(self, "overlap", overlap)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.ket.shape

    @property
    def system_shape(self) -> Tuple[int, ...]:
        return self.ket.shape[:self.n_system]

    @property
    def environment_shape(self) -> Tuple[int, ...]:
        return self.ket.shape[self.n_system:]

    def matrix(self) -> Operator:
        """显式构造 R（维度平方的存储，仅用于小系统）"""
        check_dimension(self.ket.dim, self.policy)
        return Operator(np.outer(self.ket.data, self.bra.data.conj()) / self.overlap, self.ket.shape)

    def projector_residuals(self) -> Tuple[float, float]:
        """(‖R² − R‖, |Tr R − 1|)"""
        r = self.matrix().data
        return float(np.linalg.norm(r @ r - r)), abs(np.trace(r) - 1.0)


def identity(shape: Sequence[int]) -> Operator:
    shape = _as_shape(shape)
    return Operator(np.eye(int(np.prod(shape)), dtype=complex), shape)


PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def pauli(k: int) -> Operator:
    """P₀ = I, P₁ = σ_x, P₂ = σ_y, P₃ = σ_z"""
    return Operator(PAULIS[k].copy(), (2,))


def is_hermitian(op: Operator, tol: float = DEFAULT_POLICY.hermitian_tol) -> bool:
    return bool(np.linalg.norm(op.data - op.data.conj().T) <= tol * max(1.0, np.linalg.norm(op.data)))


def is_unitary(op: Operator, tol: float = DEFAULT_POLICY.unitarity_tol) -> bool:
    return unitarity_error(op) <= tol


def unitarity_error(op: Operator) -> float:
    return float(np.linalg.norm(op.data @ op.data.conj().T - np.eye(op.side)))


def commutator(a: Operator, b: Operator) -> Operator:
    return a @ b - b @ a


def tensor_product(a: Operator, b: Operator, policy: NumericPolicy = DEFAULT_POLICY) -> Operator:
    """(a⊗b)[(i,k),(j,l)] = a[i,j]·b[k,l]，形状拼接"""
    check_dimension(a.side * b.side, policy)
    return Operator(np.kron(a.data, b.data), a.shape + b.shape)


def tensor_all(ops: Sequence[Operator], policy: NumericPolicy = DEFAULT_POLICY) -> Operator:
    if not ops:
        raise ShapeError("张量积至少需要一个算符")
    result = ops[0]
    for op in ops[1:]:
        result = tensor_product(result, op, policy)
    return result


def tensor_vectors(vectors: Sequence[StateVector]) -> StateVector:
    data = vectors[0].data
    shape = vectors[0].shape
    for vector in vectors[1:]:
        data = np.kron(data, vector.data)
        shape = shape + vector.shape
    return StateVector(data, shape)


def partial_trace(op: Operator, keep: Iterable[int]) -> Operator:
    """保留 keep 中的因子（按原顺序），其余因子求迹；keep 为空时返回 1×1 的 [Tr op]"""
    n = len(op.shape)
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ShapeError(f"保留因子 {keep} 超出范围 0..{n - 1}")
    if not keep:
        return Operator(np.array([[op.trace()]]), (1,))
    tensor = op.data.reshape(op.shape + op.shape)
    rows = list(range(n))
    cols = [i if i not in keep else n + i for i in range(n)]
    out = keep + [n + k for k in keep]
    reduced = np.einsum(tensor, rows + cols, out)
    kept_shape = tuple(op.shape[k] for k in keep)
    side = int(np.prod(kept_shape))
    return Operator(reduced.reshape(side, side), kept_shape)


def permutation_operator(shape: Sequence[int], destination: Sequence[int]) -> Operator:
    """因子置换：输入第 k 个因子移到输出位置 destination[k]

    要求置换后形状不变（所有被交换的因子维度相同）。
    """
    shape = _as_shape(shape)
    m = len(shape)
    if sorted(destination) != list(range(m)):
        raise ShapeError(f"非法置换 {destination}")
    out_shape = [0] * m
    for k, dest in enumerate(destination):
        out_shape[dest] = shape[k]
    if tuple(out_shape) != shape:
        raise ShapeError(f"置换改变了因子形状: {shape} -> {tuple(out_shape)}")
    side = int(np.prod(shape))
    digits = np.indices(shape).reshape(m, side)
    out_digits = np.empty_like(digits)
    for k, dest in enumerate(destination):
        out_digits[dest] = digits[k]
    out_index = np.ravel_multi_index(tuple(out_digits), shape)
    matrix = np.zeros((side, side), dtype=complex)
    matrix[out_index, np.arange(side)] = 1.0
    return Operator(matrix, shape)


def _is_normal(a: np.ndarray) -> bool:
    scale = max(1.0, np.linalg.norm(a) ** 2)
    return bool(np.linalg.norm(a @ a.conj().T - a.conj().T @ a) <= 1e-12 * scale)


def matrix_exp(op: Operator, scale: complex) -> Operator:
    """exp(scale·op)：厄米矩阵走 eigh，一般正规矩阵走复 Schur 对角化，其余走 scaling-and-squaring"""
    if not np.all(np.isfinite(op.data)):
        raise NumericError("矩阵指数输入含非有限元素")
    scale = complex(scale)
    if scale == 0:
        return identity(op.shape)
    a = op.data
    if np.allclose(a, a.conj().T, rtol=0.0, atol=1e-14 * max(1.0, np.abs(a).max())):
        values, vectors = linalg.eigh((a + a.conj().T) / 2.0)
        result = (vectors * np.exp(scale * values)) @ vectors.conj().T
    elif _is_normal(a):
        t, z = linalg.schur(a, output="complex")
        result = (z * np.exp(scale * np.diag(t))) @ z.conj().T
    else:
        result = linalg.expm(scale * a)
    if not np.all(np.isfinite(result)):
        raise NumericError(f"矩阵指数溢出（scale={scale}）")
    return Operator(result, op.shape)


def eig_spectrum(op: Operator, vectors: bool = False):
    """本征值按实部降序、再按虚部降序排列；vectors=True 时同时返回对应列向量"""
    if not np.all(np.isfinite(op.data)):
        raise NumericError("本征分解输入含非有限元素")
    if is_hermitian(op):
        values, vecs = linalg.eigh((op.data + op.data.conj().T) / 2.0)
        values = values.astype(complex)
    else:
        values, vecs = linalg.eig(op.data)
    order = np.lexsort((-values.imag, -values.real))
    values = values[order]
    if vectors:
        return values, vecs[:, order]
    return values
