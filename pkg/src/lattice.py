"""1+1 维经典扩展相空间格点：协变 Legendre 变换后的哈密顿密度、沿 nᵘ 的 Hamilton 方程、
约束残差、ℋ 的标量协变检查，以及二次泛函的扩展 Poisson 括号（P₀、ℒ₀₁、自由作用量 S）。

格点约定：x 方向周期，t 方向开边界；场数组形状 (Nt, Nx)，第一轴为时间。
中心差分只在内部时间行 1..Nt−2 上给出，导数数组形状 (Nt−2, Nx)。
离散括号 {φᵢ, πⱼ} = δᵢⱼ/(ΔtΔx)，与连续极限的 δ 归一一致。
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.interpolate import RectBivariateSpline

from constants import LatticeDefaults
from foliation import BoostMatrix, Foliation, metric, minkowski_dot
from operator_core import XtqmError

logger = logging.getLogger(__name__)


class LatticeError(XtqmError):
    """格点输入非法"""
    pass


class BoundaryError(LatticeError):
    """请求的格点没有中心差分所需的邻居"""
    pass


class StabilityError(LatticeError):
    """演化中场范数增长超过阈值"""
    pass


class ProbeError(LatticeError):
    """协变检查的探针落在块外"""
    pass


class GridMismatchError(LatticeError):
    """两个泛函定义在不同格点上"""
    pass


@dataclass(frozen=True)
class Grid1p1:
    nt: int
    nx: int
    dt: float
    dx: float
    t0: float = 0.0
    x0: float | None = None

    def __post_init__(self):
        if self.nt < 3 or self.nx < 3:
            raise LatticeError(f"格点太小: Nt={self.nt}, Nx={self.nx}")
        if self.dt <= 0 or self.dx <= 0:
            raise LatticeError(f"格距必须为正: Δt={self.dt}, Δx={self.dx}")
        if self.x0 is None:
            object.__setattr__(self, "x0", -0.5 * self.nx * self.dx)

    @classmethod
    def periodic(cls, nx: int, length: float, t_span: float, dt_ratio: float = 1.0) -> "Grid1p1":
        """x ∈ [−L/2, L/2)、t ∈ [−T/2, T/2]，Δt ≈ dt_ratio·Δx（取整使 T 恰好落在格点上）"""
        dx = length / nx
        nt = max(3, int(round(t_span / (dt_ratio * dx)))) + 1
        return cls(nt, nx, t_span / (nt - 1), dx, -0.5 * t_span, -0.5 * length)

    @property
    def length(self) -> float:
        return self.nx * self.dx

    @property
    def duration(self) -> float:
        return (self.nt - 1) * self.dt

    @property
    def cell(self) -> float:
        return self.dt * self.dx

    @property
    def shape(self) -> Tuple[int, int]:
        return self.nt, self.nx

    @property
    def size(self) -> int:
        return self.nt * self.nx

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.nt)

    @property
    def positions(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.nx)

    @property
    def center(self) -> Tuple[float, float]:
        return self.t0 + 0.5 * self.duration, self.x0 + 0.5 * self.length

    def mesh(self) -> Tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.times, self.positions, indexing="ij")

    def refined(self) -> "Grid1p1":
        """格距减半，原格点全部保留（细格 [::2, ::2] 即粗格）"""
        return Grid1p1(2 * self.nt - 1, 2 * self.nx, self.dt / 2, self.dx / 2, self.t0, self.x0)

    def index_of(self, t: float, x: float, tol: float = 1e-9) -> Tuple[int, int]:
        j = int(round((t - self.t0) / self.dt))
        i = int(round((x - self.x0) / self.dx))
        if abs(self.t0 + j * self.dt - t) > tol or abs(self.x0 + i * self.dx - x) > tol:
            raise ProbeError(f"探针 ({t}, {x}) 不在格点上")
        return j, i


@dataclass
class LatticeField:
    phi: np.ndarray
    pi: np.ndarray
    grid: Grid1p1
    lam_pot: float = 0.0

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=float)
        self.pi = np.asarray(self.pi, dtype=float)
        if self.phi.shape != self.grid.shape or self.pi.shape != self.grid.shape:
            raise LatticeError(f"场形状 {self.phi.shape}/{self.pi.shape} 与格点 {self.grid.shape} 不符")

    def stacked(self) -> np.ndarray:
        """z = (φ 各点, π 各点)，按时间主序展平"""
        return np.concatenate([self.phi.ravel(), self.pi.ravel()])


def potential(phi, lam: float):
    """𝒱(φ) = λφ⁴/4!"""
    return lam * phi ** 4 / 24.0


def potential_prime(phi, lam: float):
    return lam * phi ** 3 / 6.0


def spatial_projector(fol: Foliation) -> np.ndarray:
    """Pᵘᵛ = nᵘnᵛ/‖n‖² − ηᵘᵛ"""
    return np.outer(fol.n, fol.n) / fol.norm_sq - metric(fol.dim)


def frame_foliation(fol: Foliation) -> Foliation:
    """n 的静止系中 n 的分量 (‖n‖, 0)"""
    return Foliation(np.array([fol.norm, 0.0]))


def _require_1p1(fol: Foliation) -> None:
    if fol.dim != 2:
        raise LatticeError(f"格点模块只支持 1+1 维，实际叶状维度 {fol.dim}")


def _d_t(a: np.ndarray, g: Grid1p1) -> np.ndarray:
    return (a[2:] - a[:-2]) / (2 * g.dt)


def _d_x(a: np.ndarray, g: Grid1p1) -> np.ndarray:
    return (np.roll(a, -1, axis=1) - np.roll(a, 1, axis=1)) / (2 * g.dx)


def _d_tt(a: np.ndarray, g: Grid1p1) -> np.ndarray:
    return (a[2:] - 2 * a[1:-1] + a[:-2]) / g.dt ** 2


def _d_xx(a: np.ndarray, g: Grid1p1) -> np.ndarray:
    return (np.roll(a, -1, axis=1) - 2 * a + np.roll(a, 1, axis=1)) / g.dx ** 2


def gradient(a: np.ndarray, g: Grid1p1) -> Tuple[np.ndarray, np.ndarray]:
    """内部行上的 (∂₀a, ∂₁a)"""
    return _d_t(a, g), _d_x(a, g)[1:-1]


def hessian(a: np.ndarray, g: Grid1p1) -> np.ndarray:
    """内部行上的 ∂_μ∂_νa，形状 (2, 2, Nt−2, Nx)"""
    cross = _d_t(_d_x(a, g), g)
    return np.array([[_d_tt(a, g), cross], [cross, _d_xx(a, g)[1:-1]]])


def n_derivative(a: np.ndarray, g: Grid1p1, fol: Foliation) -> np.ndarray:
    d0, d1 = gradient(a, g)
    return fol.n[0] * d0 + fol.n[1] * d1


def hamiltonian_density_field(field: LatticeField, fol: Foliation, m: float) -> np.ndarray:
    """ℋ = ‖n‖²π²/2 + ½Pᵘᵛ∂_μφ∂_νφ + ½m²φ² + 𝒱(φ)，内部行"""
    _require_1p1(fol)
    g = field.grid
    d = gradient(field.phi, g)
    proj = spatial_projector(fol)
    quad = sum(proj[a, b] * d[a] * d[b] for a in range(2) for b in range(2))
    phi, pi = field.phi[1:-1], field.pi[1:-1]
    return 0.5 * fol.norm_sq * pi ** 2 + 0.5 * quad + 0.5 * m ** 2 * phi ** 2 + potential(phi, field.lam_pot)


def hamiltonian_density(field: LatticeField, fol: Foliation, m: float, at: Tuple[int, int]) -> float:
    j, i = at
    if not 1 <= j <= field.grid.nt - 2:
        raise BoundaryError(f"时间行 {j} 在边界上，中心差分不可用")
    return float(hamiltonian_density_field(field, fol, m)[j - 1, i % field.grid.nx])


def stress_energy_density(field: LatticeField, fol: Foliation, m: float) -> np.ndarray:
    """从拉氏量独立组装 Tᵘᵛ = ∂ᵘφ∂ᵛφ − ηᵘᵛℒ，返回 n_μn_νTᵘᵛ/‖n‖²（不使用 π）"""
    _require_1p1(fol)
    eta = metric(2)
    g = field.grid
    d_lower = np.array(gradient(field.phi, g))
    d_upper = np.einsum("ab,b...->a...", eta, d_lower)
    phi = field.phi[1:-1]
    lagrangian = (0.5 * (d_lower[0] * d_upper[0] + d_lower[1] * d_upper[1])
                  - 0.5 * m ** 2 * phi ** 2 - potential(phi, field.lam_pot))
    tensor = np.einsum("a...,b...->ab...", d_upper, d_upper) - eta[:, :, None, None] * lagrangian
    n_lower = eta @ fol.n
    return np.einsum("a,b,ab...->...", n_lower, n_lower, tensor) / fol.norm_sq


def energy_functional(field: LatticeField, fol: Foliation, m: float) -> np.ndarray:
    """每个内部时间行上的 Σₓℋ·Δx"""
    return hamiltonian_density_field(field, fol, m).sum(axis=1) * field.grid.dx


def hamilton_rhs(field: LatticeField, fol: Foliation, m: float) -> Tuple[np.ndarray, np.ndarray]:
    """n·∂φ = ‖n‖²π 与 n·∂π = Pᵘᵛ∂_μ∂_νφ − m²φ − 𝒱′(φ) 的右端，内部行"""
    _require_1p1(fol)
    proj = spatial_projector(fol)
    hess = hessian(field.phi, field.grid)
    phi = field.phi[1:-1]
    dphi = fol.norm_sq * field.pi[1:-1]
    dpi = np.einsum("ab,ab...->...", proj, hess) - m ** 2 * phi - potential_prime(phi, field.lam_pot)
    return dphi, dpi


@dataclass(frozen=True)
class ConstraintResidual:
    """{φ, S} 与 {π, S} 两个约束场（内部行）"""
    phi: np.ndarray
    pi: np.ndarray

    @property
    def max(self) -> float:
        return max(float(np.abs(self.phi).max()), float(np.abs(self.pi).max()))


def physical_constraint_residual(field: LatticeField, fol: Foliation, m: float) -> ConstraintResidual:
    dphi, dpi = hamilton_rhs(field, fol, m)
    g = field.grid
    return ConstraintResidual(n_derivative(field.phi, g, fol) - dphi, n_derivative(field.pi, g, fol) - dpi)


def plane_wave(grid: Grid1p1, wavenumber: float, m: float, fol: Foliation) -> LatticeField:
    """在壳平面波 φ = cos(kx − E t)，π = n·∂φ/‖n‖²（解析导数）"""
    _require_1p1(fol)
    cycles = wavenumber * grid.length / (2 * math.pi)
    if abs(cycles - round(cycles)) > 1e-9:
        logger.warning(f"波数 {wavenumber} 与周期 L={grid.length:.6g} 不相容，x 边界处不连续")
    energy = math.sqrt(wavenumber ** 2 + m ** 2)
    t, x = grid.mesh()
    phase = wavenumber * x - energy * t
    n_dphi = (fol.n[0] * energy - fol.n[1] * wavenumber) * np.sin(phase)
    return LatticeField(np.cos(phase), n_dphi / fol.norm_sq, grid)


def convergence_order(err_coarse: float, err_fine: float) -> float:
    """log₂(粗/细)，Δ 减半时的观测阶"""
    return math.log2(err_coarse / err_fine)


def residual_convergence(grid: Grid1p1, wavenumber: float, m: float,
                         fol: Foliation) -> Tuple[float, float, float]:
    """平面波在 grid 与 grid.refined() 上的约束残差（公共粗格点上的最大值）及观测阶"""
    coarse = physical_constraint_residual(plane_wave(grid, wavenumber, m, fol), fol, m)
    fine = physical_constraint_residual(plane_wave(grid.refined(), wavenumber, m, fol), fol, m)
    err_coarse = coarse.max
    err_fine = max(float(np.abs(fine.phi[1::2, ::2]).max()), float(np.abs(fine.pi[1::2, ::2]).max()))
    return err_coarse, err_fine, convergence_order(err_coarse, err_fine)


def evolve_along_n(phi0, pi0, fol: Foliation, m: float, steps: int, dx: float, dt: float | None = None,
                   lam_pot: float = 0.0,
                   growth_factor: float = LatticeDefaults.GROWTH_FACTOR) -> LatticeField:
    """在 n 的静止系坐标 (t′, x′) 中用 kick-drift-kick 蛙跳演化 steps 步

    初值给在 n 正交的超曲面 t′ = 0 上；∂_{t′}φ = ‖n‖π，∂_{t′}π = (∂²_{x′}φ − m²φ − 𝒱′)/‖n‖。
    返回的场定义在静止系格点上，其 Hamilton 残差应以 frame_foliation(fol) 计算。
    """
    _require_1p1(fol)
    phi = np.array(phi0, dtype=float)
    pi = np.array(pi0, dtype=float)
    if phi.ndim != 1 or phi.shape != pi.shape:
        raise LatticeError("初值必须是同长的一维数组")
    nx = phi.size
    dt = 0.5 * dx if dt is None else dt
    grid = Grid1p1(steps + 1, nx, dt, dx)
    norm = fol.norm

    def force(values: np.ndarray) -> np.ndarray:
        laplacian = (np.roll(values, -1) - 2 * values + np.roll(values, 1)) / dx ** 2
        return (laplacian - m ** 2 * values - potential_prime(values, lam_pot)) / norm

    reference = max(float(np.abs(phi).max()), float(np.abs(pi).max()))
    phi_rows, pi_rows = [phi.copy()], [pi.copy()]
    for step in range(steps):
        pi = pi + 0.5 * dt * force(phi)
        phi = phi + dt * norm * pi
        pi = pi + 0.5 * dt * force(phi)
        size = max(float(np.abs(phi).max()), float(np.abs(pi).max()))
        if not math.isfinite(size) or (reference > 0 and size > growth_factor * reference):
            raise StabilityError(f"第 {step + 1} 步场范数 {size:.3e} 超过初值的 {growth_factor:g} 倍")
        phi_rows.append(phi.copy())
        pi_rows.append(pi.copy())
    logger.debug(f"evolve_along_n: {steps} 步, Δt′={dt:.4g}, Δx′={dx:.4g}")
    return LatticeField(np.array(phi_rows), np.array(pi_rows), grid, lam_pot)


def _periodic_spline(grid: Grid1p1, values: np.ndarray, order: int = LatticeDefaults.SPLINE_ORDER) -> RectBivariateSpline:
    pad = order + 1
    x_ext = grid.x0 + grid.dx * np.arange(-pad, grid.nx + pad)
    extended = np.concatenate([values[:, -pad:], values, values[:, :pad]], axis=1)
    return RectBivariateSpline(grid.times, x_ext, extended, kx=order, ky=order)


def transform_field(field: LatticeField, boost: BoostMatrix) -> LatticeField:
    """φ′(x) = φ(Λ⁻¹x)、π′(x) = π(Λ⁻¹x)，SPLINE_ORDER 阶样条重采样；原像超出时间范围处置为 NaN"""
    g = field.grid
    t, x = g.mesh()
    source = np.einsum("ab,bij->aij", boost.inverse().matrix, np.array([t, x]))
    src_t = source[0]
    src_x = g.x0 + np.mod(source[1] - g.x0, g.length)
    inside = (src_t >= g.times[0]) & (src_t <= g.times[-1])
    clipped_t = np.clip(src_t, g.times[0], g.times[-1])
    phi = _periodic_spline(g, field.phi).ev(clipped_t, src_x)
    pi = _periodic_spline(g, field.pi).ev(clipped_t, src_x)
    phi[~inside] = np.nan
    pi[~inside] = np.nan
    return LatticeField(phi, pi, g, field.lam_pot)


def image_band(grid: Grid1p1, boost: BoostMatrix) -> Tuple[float, float]:
    """boost 后 ℋ′ 整行有限的时间带 [t_lo, t_hi]

    与 transform_field 的 NaN 规则一致：内部行 j 有限当且仅当 j−1、j、j+1 三行的原像全在时间范围内。
    """
    t, x = grid.mesh()
    src_t = np.einsum("ab,bij->aij", boost.inverse().matrix, np.array([t, x]))[0]
    row_ok = np.all((src_t >= grid.times[0]) & (src_t <= grid.times[-1]), axis=1)
    rows = np.flatnonzero(row_ok[:-2] & row_ok[1:-1] & row_ok[2:]) + 1
    if rows.size <= LatticeDefaults.SPLINE_ORDER or np.any(np.diff(rows) != 1):
        raise ProbeError("boost 后的有效时间带过窄，无法插值")
    return float(grid.times[rows[0]]), float(grid.times[rows[-1]])


def default_probes(grid: Grid1p1, count: int = 5, boost: BoostMatrix | None = None) -> List[Tuple[float, float]]:
    """块中央的格点探针，|x − x_c| ≤ L/6

    不给 boost 时时间取中间三分之一；给定 boost 时只保留像点距 image_band 边缘至少一行的时间行。
    """
    t_mid, x_mid = grid.center
    cols = [i for i in range(grid.nx) if abs(grid.positions[i] - x_mid) <= grid.length / 6]
    cols = [cols[k] for k in np.unique(np.round(np.linspace(0, len(cols) - 1, count)).astype(int))]
    if boost is None:
        rows = np.unique(np.round(np.linspace(grid.nt / 3, 2 * grid.nt / 3, count)).astype(int))
    else:
        lo, hi = image_band(grid, boost)
        xs = grid.positions[cols]
        candidates = [j for j in range(1, grid.nt - 1)
                      if all(lo + grid.dt <= boost.apply([grid.times[j], x])[0] <= hi - grid.dt for x in xs)]
        if not candidates:
            raise ProbeError(f"快度 {boost.rapidity:.3g} 下没有像点落在有效时间带内的采样行")
        rows = [candidates[k] for k in np.unique(np.round(np.linspace(0, len(candidates) - 1, count)).astype(int))]
    return [(float(grid.times[j]), float(grid.positions[i])) for j in rows for i in cols]


def scalar_covariance_check(field: LatticeField, fol: Foliation, boost: BoostMatrix, m: float,
                            probes: Iterable[Tuple[float, float]] | None = None,
                            probe_fraction: float = LatticeDefaults.PROBE_FRACTION) -> float:
    """max |ℋ[φ, π, n](x) − ℋ[φ′, π′, Λn](Λx)|

    ℋ′ 只在全行有限的时间带上做周期样条，在 Λx 处取值。
    """
    g = field.grid
    probes = default_probes(g, boost=boost) if probes is None else list(probes)
    density = hamiltonian_density_field(field, fol, m)
    transformed = transform_field(field, boost)
    density_prime = hamiltonian_density_field(transformed, fol.boosted(boost), m)
    finite_rows = np.flatnonzero(np.all(np.isfinite(density_prime), axis=1))
    if finite_rows.size <= LatticeDefaults.SPLINE_ORDER or np.any(np.diff(finite_rows) != 1):
        raise ProbeError("boost 后的有效时间带过窄，无法插值")
    band_times = g.times[1:-1][finite_rows]
    band = Grid1p1(finite_rows.size, g.nx, g.dt, g.dx, float(band_times[0]), g.x0)
    spline = _periodic_spline(band, density_prime[finite_rows])
    _, x_mid = g.center
    worst = 0.0
    for t, x in probes:
        if abs(x - x_mid) > probe_fraction * g.length:
            raise ProbeError(f"探针 x={x} 超出 |x| ≤ {probe_fraction:.3g}·L")
        j, i = g.index_of(t, x)
        if not 1 <= j <= g.nt - 2:
            raise ProbeError(f"探针 t={t} 在块边界上")
        image = boost.apply([t, x])
        image[1] = g.x0 + np.mod(image[1] - g.x0, g.length)
        if not band_times[0] <= image[0] <= band_times[-1]:
            raise ProbeError(f"探针 ({t:.4g}, {x:.4g}) 经 boost 后落在块外: {image.tolist()}")
        value = float(spline.ev(image[0], image[1]))
        worst = max(worst, abs(density[j - 1, i] - value))
    return worst


# ---- 二次泛函与扩展 Poisson 括号 ----

def _symmetrized(a: sparse.spmatrix) -> sparse.csr_matrix:
    return ((a + a.T) * 0.5).tocsr()


@dataclass(frozen=True)
class LinearFunctional:
    """F(z) = cᵀz（例如单点 φ 取值）"""
    coeffs: np.ndarray
    grid: Grid1p1
    label: str = ""

    def evaluate(self, z: np.ndarray) -> float:
        return float(self.coeffs @ z)


@dataclass(frozen=True)
class QuadraticFunctional:
    """F(z) = ½zᵀAz，A 实对称（稀疏）"""
    matrix: sparse.csr_matrix
    grid: Grid1p1
    label: str = ""

    def __post_init__(self):
        a = sparse.csr_matrix(self.matrix)
        if a.shape != (2 * self.grid.size, 2 * self.grid.size):
            raise GridMismatchError(f"二次型形状 {a.shape} 与格点 {self.grid.shape} 不符")
        scale = max(float(abs(a).max()) if a.nnz else 0.0, 1.0)
        if a.nnz and float(abs(a - a.T).max()) > 1e-12 * scale:
            raise LatticeError(f"二次型 {self.label} 不对称")
        object.__setattr__(self, "matrix", a)

    def evaluate(self, z: np.ndarray) -> float:
        return 0.5 * float(z @ (self.matrix @ z))

    def __add__(self, other: "QuadraticFunctional") -> "QuadraticFunctional":
        _check_same_grid(self, other)
        return QuadraticFunctional(self.matrix + other.matrix, self.grid, f"{self.label}+{other.label}")


def _check_same_grid(f, g) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f"泛函定义在不同格点上: {f.grid} vs {g.grid}")


def symplectic_form(size: int) -> sparse.csr_matrix:
    """Ω = [[0, I], [−I, 0]]，size 为格点数"""
    eye = sparse.identity(size, format="csr")
    return sparse.bmat([[None, eye], [-eye, None]], format="csr")


def extended_pb(f, g):
    """{F, G} = ∇FᵀΩ∇G/(ΔtΔx)

    二次-二次 → QuadraticFunctional（½zᵀ((AΩB − BΩA)/h)z）；
    线性-二次 → LinearFunctional；线性-线性 → 常数。
    """
    _check_same_grid(f, g)
    grid = f.grid
    h = grid.cell
    omega = symplectic_form(grid.size)
    label = f"{{{f.label},{g.label}}}"
    if isinstance(f, QuadraticFunctional) and isinstance(g, QuadraticFunctional):
        a, b = f.matrix, g.matrix
        return QuadraticFunctional(_symmetrized((a @ omega @ b - b @ omega @ a) / h), grid, label)
    if isinstance(f, LinearFunctional) and isinstance(g, QuadraticFunctional):
        return LinearFunctional(np.asarray(g.matrix.T @ (omega.T @ f.coeffs)).ravel() / h, grid, label)
    if isinstance(f, QuadraticFunctional) and isinstance(g, LinearFunctional):
        flipped = extended_pb(g, f)
        return LinearFunctional(-flipped.coeffs, grid, label)
    if isinstance(f, LinearFunctional) and isinstance(g, LinearFunctional):
        return float(f.coeffs @ (omega @ g.coeffs)) / h
    raise TypeError(f"不支持的泛函类型: {type(f).__name__}, {type(g).__name__}")


def _one_dim_difference(n: int, step: float, periodic: bool) -> sparse.csr_matrix:
    d = sparse.diags([-np.ones(n - 1), np.ones(n - 1)], [-1, 1], format="lil")
    if periodic:
        d[0, n - 1] = -1.0
        d[n - 1, 0] = 1.0
    else:
        d[0, 0], d[0, 1] = -2.0, 2.0
        d[n - 1, n - 2], d[n - 1, n - 1] = -2.0, 2.0
    return (d.tocsr() / (2 * step)).tocsr()


def difference_operators(grid: Grid1p1) -> Tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """展平场上的 (D_t, D_x)：t 开边界（端点单侧差分），x 周期中心差分"""
    d_t = sparse.kron(_one_dim_difference(grid.nt, grid.dt, False), sparse.identity(grid.nx), format="csr")
    d_x = sparse.kron(sparse.identity(grid.nt), _one_dim_difference(grid.nx, grid.dx, True), format="csr")
    return d_t, d_x


def _directional(grid: Grid1p1, v: Sequence[float]) -> sparse.csr_matrix:
    d_t, d_x = difference_operators(grid)
    return (v[0] * d_t + v[1] * d_x).tocsr()


def _canonical_pairing(grid: Grid1p1, kernel: sparse.spmatrix, label: str) -> QuadraticFunctional:
    """h·πᵀKφ 的二次型 h[[0, Kᵀ], [K, 0]]"""
    h = grid.cell
    return QuadraticFunctional(sparse.bmat([[None, h * kernel.T], [h * kernel, None]], format="csr"),
                               grid, label)


def _gradient_form(grid: Grid1p1, proj: np.ndarray) -> sparse.csr_matrix:
    ops = difference_operators(grid)
    total = sparse.csr_matrix((grid.size, grid.size))
    for a in range(2):
        for b in range(2):
            if proj[a, b] != 0.0:
                total = total + proj[a, b] * (ops[a].T @ ops[b])
    return _symmetrized(total)


def phi_evaluation(grid: Grid1p1, j: int, i: int) -> LinearFunctional:
    coeffs = np.zeros(2 * grid.size)
    coeffs[j * grid.nx + i] = 1.0
    return LinearFunctional(coeffs, grid, f"φ[{j},{i}]")


def pi_evaluation(grid: Grid1p1, j: int, i: int) -> LinearFunctional:
    coeffs = np.zeros(2 * grid.size)
    coeffs[grid.size + j * grid.nx + i] = 1.0
    return LinearFunctional(coeffs, grid, f"π[{j},{i}]")


def p0_functional(grid: Grid1p1, fol: Foliation) -> QuadraticFunctional:
    """P₀ = ∫π n·∂φ"""
    _require_1p1(fol)
    return _canonical_pairing(grid, _directional(grid, fol.n), "P0")


def free_action_functional(grid: Grid1p1, fol: Foliation, m: float) -> QuadraticFunctional:
    """S = ∫(π n·∂φ − ‖n‖²π²/2 − ½Pᵘᵛ∂φ∂φ − ½m²φ²)"""
    _require_1p1(fol)
    h = grid.cell
    eye = sparse.identity(grid.size, format="csr")
    d_n = _directional(grid, fol.n)
    phiphi = -h * (_gradient_form(grid, spatial_projector(fol)) + m ** 2 * eye)
    pipi = -h * fol.norm_sq * eye
    matrix = sparse.bmat([[phiphi, h * d_n.T], [h * d_n, pipi]], format="csr")
    return QuadraticFunctional(_symmetrized(matrix), grid, "S")


def boost_kernel(grid: Grid1p1) -> sparse.csr_matrix:
    """K = t·D_x + x·D_t（0-1 平面 boost 在标量场上的作用）"""
    t, x = grid.mesh()
    d_t, d_x = difference_operators(grid)
    return (sparse.diags(t.ravel()) @ d_x + sparse.diags(x.ravel()) @ d_t).tocsr()


def lorentz_generator_functional(grid: Grid1p1, mu: int = 0, nu: int = 1) -> QuadraticFunctional:
    """ℒ_{μν} = ∫π(x_μ∂_ν − x_ν∂_μ)φ；1+1 维只有 ℒ₀₁ = −ℒ₁₀"""
    if {mu, nu} != {0, 1}:
        raise LatticeError(f"1+1 维只有 (0,1) 生成元，实际 ({mu},{nu})")
    kernel = boost_kernel(grid) if (mu, nu) == (0, 1) else -boost_kernel(grid)
    return _canonical_pairing(grid, kernel, f"L{mu}{nu}")


def boost_direction(fol: Foliation) -> np.ndarray:
    """ℒ₀₁ 的流 φ → φ∘Λ_s 对应 n → Λ_s⁻¹n，一阶 δn = −(n¹, n⁰)"""
    return -np.array([fol.n[1], fol.n[0]])


def action_foliation_derivative(grid: Grid1p1, fol: Foliation, m: float, dn) -> QuadraticFunctional:
    """(∂S/∂n)·δn 的二次型，对 n 解析求导"""
    _require_1p1(fol)
    dn = np.asarray(dn, dtype=float)
    h = grid.cell
    n = fol.n
    n_dn = float(minkowski_dot(n, dn))
    d_proj = ((np.outer(dn, n) + np.outer(n, dn)) / fol.norm_sq
              - 2.0 * n_dn * np.outer(n, n) / fol.norm_sq ** 2)
    eye = sparse.identity(grid.size, format="csr")
    d_dn = _directional(grid, dn)
    phiphi = -h * _gradient_form(grid, d_proj)
    pipi = -h * 2.0 * n_dn * eye
    matrix = sparse.bmat([[phiphi, h * d_dn.T], [h * d_dn, pipi]], format="csr")
    return QuadraticFunctional(_symmetrized(matrix), grid, "dS/dn")


def total_boost_bracket(grid: Grid1p1, fol: Foliation, m: float) -> QuadraticFunctional:
    """{S, ℒ₀₁} + (∂S/∂n)·δn：连续极限下恒为零（紧支撑构型上），格点上为 O(Δ²)"""
    action = free_action_functional(grid, fol, m)
    bracket = extended_pb(action, lorentz_generator_functional(grid))
    return bracket + action_foliation_derivative(grid, fol, m, boost_direction(fol))


def bump_configuration(grid: Grid1p1, width: float = 0.5) -> np.ndarray:
    """光滑、在格点内部实际紧支撑的测试构型 z"""
    t, x = grid.mesh()
    t_mid, x_mid = grid.center
    phi = np.exp(-((t - t_mid) ** 2 + (x - x_mid) ** 2) / width ** 2)
    pi = 0.5 * np.exp(-((t - t_mid - 0.1) ** 2 + (x - x_mid + 0.2) ** 2) / width ** 2)
    return np.concatenate([phi.ravel(), pi.ravel()])


def phi_bracket_field(g: QuadraticFunctional, z: np.ndarray) -> np.ndarray:
    """所有格点的 {φᵢ, G}(z) = (ΩAz)ᵢ/h，形状 (Nt, Nx)"""
    grid = g.grid
    values = symplectic_form(grid.size) @ (g.matrix @ z) / grid.cell
    return np.asarray(values[:grid.size]).reshape(grid.shape)


def lorentz_flow(field: LatticeField, fol: Foliation, s: float,
                 steps: int | None = None) -> Tuple[LatticeField, Foliation]:
    """ℒ₀₁ 生成的离散流 dφ/ds = Kφ、dπ/ds = Kπ（RK4），叶状同步变为 Λ_s⁻¹n"""
    _require_1p1(fol)
    g = field.grid
    kernel = boost_kernel(g)
    if steps is None:
        rate = np.abs(g.times).max() / g.dx + np.abs(g.positions).max() / g.dt
        steps = max(1, math.ceil(abs(s) * rate))
    ds = s / steps
    state = np.stack([field.phi.ravel(), field.pi.ravel()], axis=1)
    for _ in range(steps):
        k1 = kernel @ state
        k2 = kernel @ (state + 0.5 * ds * k1)
        k3 = kernel @ (state + 0.5 * ds * k2)
        k4 = kernel @ (state + ds * k3)
        state = state + ds / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    inverse_boost = np.array([[math.cosh(s), -math.sinh(s)], [-math.sinh(s), math.cosh(s)]])
    flowed = LatticeField(state[:, 0].reshape(g.shape), state[:, 1].reshape(g.shape), g, field.lam_pot)
    return flowed, Foliation(inverse_boost @ fol.n)


def central_max(values: np.ndarray, grid: Grid1p1, fraction: float = 1.0 / 3.0) -> float:
    """内部行数组在块中央 |t−t_c| ≤ fraction·T/2、|x−x_c| ≤ fraction·L/2 区域内的最大绝对值"""
    t_mid, x_mid = grid.center
    t, x = grid.mesh()
    t, x = t[1:-1], x[1:-1]
    mask = (np.abs(t - t_mid) <= fraction * grid.duration / 2) & (np.abs(x - x_mid) <= fraction * grid.length / 2)
    return float(np.abs(values[mask]).max())
