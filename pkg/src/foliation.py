"""叶状向量 nᵘ、正交标架与 Lorentz 变换（度规 (+,−,…,−)）。"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy import linalg

from operator_core import XtqmError

logger = logging.getLogger(__name__)

SUPPORTED_DIMS = (2, 3, 4)


class FoliationError(XtqmError):
    """叶状向量非类时，或要求 ‖n‖=1 时不满足"""
    pass


class BoostError(XtqmError):
    """矩阵不是固有 Lorentz 变换"""
    pass


def metric(dim: int) -> np.ndarray:
    eta = -np.eye(dim)
    eta[0, 0] = 1.0
    return eta


def minkowski_dot(a, b):
    a = np.asarray(a)
    b = np.asarray(b)
    return a[..., 0] * b[..., 0] - np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def lower(v) -> np.ndarray:
    """v_μ = η_{μν}vᵛ"""
    v = np.array(v, dtype=float)
    v[..., 1:] *= -1.0
    return v


def pure_boost(unit: np.ndarray) -> np.ndarray:
    """把 (1,0,…,0) 变到单位类时向量 unit 的纯 boost"""
    gamma = unit[0]
    w = unit[1:]
    dim = unit.size
    boost = np.empty((dim, dim))
    boost[0, 0] = gamma
    boost[0, 1:] = w
    boost[1:, 0] = w
    boost[1:, 1:] = np.eye(dim - 1) + np.outer(w, w) / (1.0 + gamma)
    return boost


@dataclass(frozen=True)
class Foliation:
    """类时、指向未来的叶状向量 nᵘ；不假设 ‖n‖ = 1"""
    n: np.ndarray

    def __post_init__(self):
        n = np.array(self.n, dtype=float).reshape(-1)
        if n.size not in SUPPORTED_DIMS:
            raise FoliationError(f"只支持 {SUPPORTED_DIMS} 维时空，实际 {n.size}")
        if not np.all(np.isfinite(n)):
            raise FoliationError(f"叶状向量含非有限分量: {n}")
        if minkowski_dot(n, n) <= 0 or n[0] <= 0:
            raise FoliationError(f"叶状向量必须类时且指向未来: n = {n}")
        n.setflags(write=False)
        object.__setattr__(self, "n", n)

    @classmethod
    def canonical(cls, dim: int = 2) -> "Foliation":
        n = np.zeros(dim)
        n[0] = 1.0
        return cls(n)

    @classmethod
    def from_rapidity(cls, eta: float, dim: int = 2, direction: Sequence[float] | None = None,
                      norm: float = 1.0) -> "Foliation":
        direction = np.eye(dim - 1)[0] if direction is None else np.asarray(direction, dtype=float)
        direction = direction / np.linalg.norm(direction)
        return cls(norm * np.concatenate([[math.cosh(eta)], math.sinh(eta) * direction]))

    @property
    def dim(self) -> int:
        return self.n.size

    @property
    def norm_sq(self) -> float:
        return float(minkowski_dot(self.n, self.n))

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_sq)

    @property
    def unit(self) -> np.ndarray:
        return self.n / self.norm

    def frame(self) -> np.ndarray:
        """空间标架 nᵢ（按行），nᵢ·n = 0，nᵢ·nⱼ = −‖n‖²δᵢⱼ"""
        return self.norm * pure_boost(self.unit)[:, 1:].T

    def frame_residuals(self) -> Tuple[float, float]:
        """(正交残差, 完备性残差)：后者检查 nᵘnᵛ − Σnᵢᵘnᵢᵛ = ‖n‖²ηᵘᵛ"""
        frame = self.frame()
        eta = metric(self.dim)
        gram = frame @ eta @ frame.T
        orth = max(float(np.abs(frame @ eta @ self.n).max()),
                   float(np.abs(gram + self.norm_sq * np.eye(self.dim - 1)).max()))
        resolution = np.outer(self.n, self.n) - frame.T @ frame - self.norm_sq * eta
        return orth, float(np.abs(resolution).max())

    def scaled(self, s: float) -> "Foliation":
        return Foliation(s * self.n)

    def boosted(self, boost: "BoostMatrix") -> "Foliation":
        return Foliation(boost.matrix @ self.n)

    def require_unit(self, tol: float = 1e-12) -> None:
        if abs(self.norm - 1.0) > tol:
            raise FoliationError(f"此处要求 ‖n‖ = 1，实际 {self.norm:.15g}")


@dataclass(frozen=True)
class BoostMatrix:
    """固有 Lorentz 变换 Λᵘ_ν"""
    matrix: np.ndarray
    rapidities: Tuple[float, ...] = ()

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        dim = m.shape[0]
        if m.shape != (dim, dim) or dim not in SUPPORTED_DIMS:
            raise BoostError(f"Lorentz 矩阵形状非法: {m.shape}")
        eta = metric(dim)
        scale = max(1.0, float(np.abs(m).max()) ** 2)
        if np.abs(m.T @ eta @ m - eta).max() > 1e-12 * scale:
            raise BoostError("矩阵不保度规 ΛᵀηΛ ≠ η")
        if abs(np.linalg.det(m) - 1.0) > 1e-10 * scale or m[0, 0] < 1.0 - 1e-12:
            raise BoostError("矩阵不是固有保时向 Lorentz 变换")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "rapidities", tuple(float(r) for r in self.rapidities))

    @classmethod
    def identity(cls, dim: int = 2) -> "BoostMatrix":
        return cls(np.eye(dim), (0.0,))

    @classmethod
    def from_rapidity(cls, rapidity: Sequence[float]) -> "BoostMatrix":
        """沿快度向量方向的纯 boost，|rapidity| 为快度"""
        vec = np.atleast_1d(np.asarray(rapidity, dtype=float))
        eta = float(np.linalg.norm(vec))
        if eta == 0.0:
            return cls.identity(vec.size + 1)
        unit = np.concatenate([[math.cosh(eta)], math.sinh(eta) * vec / eta])
        return cls(pure_boost(unit), (eta,))

    @classmethod
    def rotation(cls, angle: float, plane: Tuple[int, int] = (1, 2), dim: int = 4) -> "BoostMatrix":
        i, j = plane
        m = np.eye(dim)
        m[i, i] = m[j, j] = math.cos(angle)
        m[i, j] = -math.sin(angle)
        m[j, i] = math.sin(angle)
        return cls(m, (0.0,))

    @classmethod
    def from_generator(cls, omega: np.ndarray) -> "BoostMatrix":
        """Λ = exp(η·ω)，ω 为反对称的下指标分量 ω_{μν}"""
        omega = np.asarray(omega, dtype=float)
        return cls(linalg.expm(metric(omega.shape[0]) @ omega))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rapidity(self) -> float:
        """总快度 acosh(Λ⁰₀)"""
        return math.acosh(max(1.0, float(self.matrix[0, 0])))

    def inverse(self) -> "BoostMatrix":
        eta = metric(self.dim)
        return BoostMatrix(eta @ self.matrix.T @ eta, tuple(-r for r in self.rapidities))

    def compose(self, other: "BoostMatrix") -> "BoostMatrix":
        """self ∘ other"""
        return BoostMatrix(self.matrix @ other.matrix)

    def apply(self, v) -> np.ndarray:
        return self.matrix @ np.asarray(v, dtype=float)


def random_boost(rng: np.random.Generator, max_rapidity: float, dim: int = 2) -> BoostMatrix:
    """快度均匀取自 [0, max_rapidity]、方向随机的纯 boost"""
    eta = float(rng.uniform(0.0, max_rapidity))
    direction = rng.standard_normal(dim - 1)
    direction /= np.linalg.norm(direction)
    return BoostMatrix.from_rapidity(eta * direction)


def random_timelike(rng: np.random.Generator, dim: int = 2, max_rapidity: float = 1.0) -> Foliation:
    """随机范数、随机快度的类时叶状向量"""
    norm = float(rng.uniform(0.5, 2.0))
    boost = random_boost(rng, max_rapidity, dim)
    return Foliation(norm * boost.matrix[:, 0])


def lorentz_generator(mu: int, nu: int, dim: int) -> np.ndarray:
    """(M_{μν})ᵅ_β = δᵅ_μ η_{νβ} − δᵅ_ν η_{μβ}，作用在 nᵘ 上"""
    eta = metric(dim)
    m = np.zeros((dim, dim))
    m[mu, :] += eta[nu, :]
    m[nu, :] -= eta[mu, :]
    return m


def lorentz_algebra_residual(dim: int) -> float:
    """max ‖[M_{μν}, M_{ρσ}] − (η_{νρ}M_{μσ} − η_{νσ}M_{μρ} − η_{μρ}M_{νσ} + η_{μσ}M_{νρ})‖"""
    eta = metric(dim)
    gens = {(a, b): lorentz_generator(a, b, dim) for a in range(dim) for b in range(dim)}
    worst = 0.0
    for (mu, nu), m1 in gens.items():
        for (rho, sigma), m2 in gens.items():
            lhs = m1 @ m2 - m2 @ m1
            rhs = (eta[nu, rho] * gens[(mu, sigma)] - eta[nu, sigma] * gens[(mu, rho)]
                   - eta[mu, rho] * gens[(nu, sigma)] + eta[mu, sigma] * gens[(nu, rho)])
            worst = max(worst, float(np.abs(lhs - rhs).max()))
    return worst
