"""Klein–Gordon 模式引擎（动力学叶状）：E_p(n)、正规频率、离壳动量关联函数、
Feynman 传播子恢复、Matsubara 关联函数、叶状间 Bogoliubov 关系与真空能标度。

所有公式都使用一般 ‖n‖ 形式，从不默认 ‖n‖ = 1。
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
from scipy import integrate, linalg, special

from constants import PropagatorDefaults
from extended import ExtendedSpace, cyclic_shift
from foliation import BoostMatrix, Foliation, minkowski_dot
from operator_core import XtqmError

logger = logging.getLogger(__name__)


class SingularityError(XtqmError):
    """动量关联函数撞到极点"""

    def __init__(self, message: str, momentum=None):
        super().__init__(message)
        self.momentum = momentum


class AccuracyError(XtqmError):
    """求积或截尾误差超过容差"""

    def __init__(self, message: str, achieved: float | None = None):
        super().__init__(message)
        self.achieved = achieved


class CutoffError(XtqmError):
    """boost 后超出截断允许范围"""
    pass


@dataclass(frozen=True)
class PropagatorConfig:
    mass: float = PropagatorDefaults.MASS
    tau: float = PropagatorDefaults.TAU
    eps_reg: float = PropagatorDefaults.EPS_REG
    cutoff: float | None = None
    resolution: int = PropagatorDefaults.RESOLUTION
    dim: int = 2
    quad_tol: float = PropagatorDefaults.QUAD_TOL
    pole_tol: float = PropagatorDefaults.POLE_TOL
    light_cone_margin: float = PropagatorDefaults.LIGHT_CONE_MARGIN
    max_rapidity: float = PropagatorDefaults.MAX_RAPIDITY

    def __post_init__(self):
        if self.mass <= 0 or self.tau <= 0 or self.eps_reg <= 0:
            raise ValueError("mass、tau、eps_reg 必须为正")
        if self.dim not in (2, 3):
            raise ValueError(f"传播子只支持 1+1 与 2+1 维，实际 D={self.dim}")
        if self.resolution < 8 or self.resolution % 2:
            raise ValueError("resolution 必须是 ≥ 8 的偶数（误差估计需要减半网格）")
        if self.cutoff is None:
            object.__setattr__(self, "cutoff", PropagatorDefaults.CUTOFF_FACTOR * self.mass)

    @property
    def small_tau_bound(self) -> float:
        """O(τ) 余项相对首项的上界 τΛ_p/2"""
        return 0.5 * self.tau * self.cutoff

    def with_resolution(self, resolution: int) -> "PropagatorConfig":
        return PropagatorConfig(self.mass, self.tau, self.eps_reg, self.cutoff, resolution, self.dim,
                                self.quad_tol, self.pole_tol, self.light_cone_margin, self.max_rapidity)


def energy_Ep(p, fol: Foliation, m: float):
    """E_p(n) = ‖n‖√((nᵘnᵛ/‖n‖² − ηᵘᵛ)p_μp_ν + m²)，p 可带批量前导轴"""
    p = np.asarray(p, dtype=float)
    pn = minkowski_dot(p, fol.n)
    projected = pn ** 2 / fol.norm_sq - minkowski_dot(p, p)
    return fol.norm * np.sqrt(np.maximum(projected, 0.0) + m ** 2)


def energy_Ep_frame(p, fol: Foliation, m: float):
    """标架求和形式 ‖n‖√(Σᵢ(nᵢ·p/‖n‖)²/‖n‖² + m²)"""
    p = np.asarray(p, dtype=float)
    frame = fol.frame()
    components = np.stack([minkowski_dot(p, ni) for ni in frame], axis=-1) / fol.norm
    return fol.norm * np.sqrt(np.sum(components ** 2, axis=-1) + m ** 2)


def normal_frequency(p, fol: Foliation, cfg: PropagatorConfig):
    """(p·n − E_p(n))/‖n‖² − iε_reg"""
    omega = (minkowski_dot(np.asarray(p, dtype=float), fol.n) - energy_Ep(p, fol, cfg.mass)) / fol.norm_sq
    return omega - 1j * cfg.eps_reg


def leading_correlator(p, fol: Foliation, cfg: PropagatorConfig) -> complex:
    """τ·⟨a†a⟩ 的首项 i/(ω + iε)"""
    omega = normal_frequency(p, fol, cfg).real
    return complex(1j / (omega + 1j * cfg.eps_reg))


def momentum_correlator(p, fol: Foliation, cfg: PropagatorConfig, k=None) -> complex:
    """1/(exp{−iτ(ω + iε)} − 1)，已剥去 (2π)ᴰδ 因子；k ≠ p 时为 0"""
    p = np.asarray(p, dtype=float)
    if k is not None and not np.array_equal(np.asarray(k, dtype=float), p):
        return 0j
    omega = normal_frequency(p, fol, cfg).real
    denominator = np.expm1(-1j * cfg.tau * (omega + 1j * cfg.eps_reg))
    if abs(denominator) < cfg.pole_tol:
        raise SingularityError(f"动量 p = {p.tolist()} 处正规频率落在极点 2πk/τ 上", p)
    value = complex(1.0 / denominator)
    if logger.isEnabledFor(logging.DEBUG):
        remainder = cfg.tau * value - 1j / (omega + 1j * cfg.eps_reg)
        logger.debug(f"小 τ 检查: p={p.tolist()} τ·value − i/(ω+iε) = {remainder:.3e}")
    return value


def small_tau_remainder(p, fol: Foliation, cfg: PropagatorConfig,
                        taus: Sequence[float]) -> Tuple[List[float], float]:
    """各 τ 下 |τ·value − i/(ω+iε)| 及其对 τ 的对数斜率（线性收敛时约为 1）"""
    lead = leading_correlator(p, fol, cfg)
    remainders = []
    for tau in taus:
        cfg_tau = PropagatorConfig(cfg.mass, tau, cfg.eps_reg, cfg.cutoff, cfg.resolution, cfg.dim,
                                   cfg.quad_tol, cfg.pole_tol, cfg.light_cone_margin, cfg.max_rapidity)
        remainders.append(abs(tau * momentum_correlator(p, fol, cfg_tau) - lead))
    slope = math.log(remainders[-1] / remainders[0]) / math.log(taus[-1] / taus[0])
    return remainders, slope


def partial_fraction_identity(p, m: float, eps: float, mode: str = "exact"):
    """i/(p⁰−E+iε) − i/(p⁰+E−iε) 与协变形式的比较，返回 (lhs, rhs, 相对差)

    exact：极点位移 E → E − iε 精确匹配，rhs = 2(E−iε)·i/(p²−m²+2iEε+ε²)，差为舍入级；
    leading：rhs = 2E·i/(p²−m²+iε′)，ε′ = 2Eε，差为 O(ε)。
    p 可带批量前导轴（最后一轴为 (p⁰, p¹, …)）。
    """
    p = np.asarray(p, dtype=float)
    p0 = p[..., 0]
    energy = np.sqrt(np.sum(p[..., 1:] ** 2, axis=-1) + m ** 2)
    if np.any(energy <= 0):
        raise SingularityError("E_p 必须为正（m = 0 且空间动量为零）", p)
    lhs = 1j / (p0 - energy + 1j * eps) - 1j / (p0 + energy - 1j * eps)
    p_sq = minkowski_dot(p, p)
    if mode == "exact":
        rhs = 2.0 * (energy - 1j * eps) * 1j / (p_sq - m ** 2 + 2j * energy * eps + eps ** 2)
    elif mode == "leading":
        rhs = 2.0 * energy * 1j / (p_sq - m ** 2 + 2j * energy * eps)
    else:
        raise ValueError(f"未知的 ε 匹配方式: {mode}")
    diff = np.abs(lhs - rhs) / np.abs(lhs)
    return lhs, rhs, diff


@dataclass(frozen=True)
class PropagatorEstimate:
    value: complex
    quadrature_error: float
    tail_bound: float
    invariant: float       # Δ² = t′² − |x′|²


def frame_components(delta, fol: Foliation) -> Tuple[float, np.ndarray]:
    """Δ 在 n 标架中的分量：t′ = n·Δ/‖n‖，x′ᵢ = −nᵢ·Δ/‖n‖"""
    delta = np.asarray(delta, dtype=float)
    t_prime = float(minkowski_dot(fol.n, delta)) / fol.norm
    x_prime = -np.array([minkowski_dot(ni, delta) for ni in fol.frame()]) / fol.norm
    return t_prime, x_prime


def _trapezoid_with_estimate(f, a: float, b: float, nodes: int) -> Tuple[complex, float]:
    x = np.linspace(a, b, nodes + 1)
    y = f(x)
    fine = integrate.trapezoid(y, x)
    coarse = integrate.trapezoid(y[::2], x[::2])
    return complex(fine), abs(fine - coarse) / 3.0


def _hyperplane_integrals_2d(delta: np.ndarray, fol: Foliation, invariant: float,
                             cfg: PropagatorConfig) -> Tuple[complex, float, float]:
    """n 的正交超平面上 ∫dq e^{−iq·Δ − iε_q|t′|}/(2π·2ε_q)，以实验室空间动量 u 参数化

    超平面点 q = (u·n¹/n⁰, u)，固有长度元 b·du，b = ‖n‖/n⁰，ε(u) = √(m² + b²u²)，
    相位 e^{icu}，c = Δ¹ − Δ⁰n¹/n⁰。两条半射线 u = s·e^{iθ₁}、u = −s·e^{iθ₂}（0 ≤ s ≤ Λ_p）
    按被积函数指数衰减的方向转动：类空时 θ₁ = −θ₂ = sign(c)·φ，类时时 θ₁ = θ₂ = −φ。
    截尾项按射线上的衰减率 a·sin φ 估计。
    """
    m = cfg.mass
    n0, n1 = fol.n
    b = fol.norm / n0
    c = float(delta[1] - delta[0] * n1 / n0)
    t_abs = abs(float(minkowski_dot(fol.n, delta))) / fol.norm
    phi = PropagatorDefaults.CONTOUR_ANGLE
    if invariant < 0:
        sigma = 1.0 if c >= 0 else -1.0
        angles = (sigma * phi, -sigma * phi)
        rates = (abs(c) - b * t_abs, abs(c) + b * t_abs)
    else:
        angles = (-phi, -phi)
        rates = (b * t_abs - c, b * t_abs + c)
    rays = (np.exp(1j * angles[0]), -np.exp(1j * angles[1]))

    def integrand(u):
        energy = np.sqrt(m * m + (b * u) ** 2)
        return b * np.exp(1j * c * u - 1j * t_abs * energy) / (4 * math.pi * energy)

    def along_rays(s):
        return integrand(s * rays[0]) * np.exp(1j * angles[0]) + integrand(s * rays[1]) * np.exp(1j * angles[1])

    value, err = _trapezoid_with_estimate(along_rays, 0.0, cfg.cutoff, cfg.resolution)
    tail = sum(abs(integrand(cfg.cutoff * ray)) / (rate * math.sin(phi)) for ray, rate in zip(rays, rates))
    # 首项 i/(ω + iε_reg) 的极点留数带来 e^{−ε_reg‖n‖|t′|}
    damping = math.exp(-cfg.eps_reg * fol.norm * t_abs)
    return damping * value, damping * err, damping * tail


def _proper_time_integrals_3d(invariant: float, cfg: PropagatorConfig) -> Tuple[complex, float, float]:
    m = cfg.mass
    if invariant < 0:
        r = math.sqrt(-invariant)
        # σ = e^y：∫dσ (4πσ)^{-3/2} e^{−m²σ − r²/4σ}，两端双指数衰减
        margin = 40.0
        y_lo = math.log(r * r / (4.0 * margin))
        y_hi = math.log(margin / (m * m))

        def integrand(y):
            sigma = np.exp(y)
            return sigma * (4 * math.pi * sigma) ** -1.5 * np.exp(-m * m * sigma - r * r / (4 * sigma))

        value, err = _trapezoid_with_estimate(integrand, y_lo, y_hi, cfg.resolution)
        return value, err, math.exp(-margin)
    s = math.sqrt(invariant)
    # 能量围道 E = m − iu
    integral, err = _trapezoid_with_estimate(lambda u: np.exp(-u * s), 0.0, cfg.cutoff, cfg.resolution)
    prefactor = -1j * np.exp(-1j * m * s) / (4 * math.pi)
    tail = math.exp(-cfg.cutoff * s) / s / (4 * math.pi)
    return prefactor * integral, abs(prefactor) * err, tail


def propagator_estimate(delta, fol: Foliation, cfg: PropagatorConfig) -> PropagatorEstimate:
    """模式和首项 τ·⟨√τφ(x)√τφ(y)⟩ 的数值求积

    p = κ·n/‖n‖ + q（q ⊥ n）时 E_p(n) = ‖n‖ε_q、ω = (κ − ε_q)/‖n‖。模式权重 1/(2E_p(n)) 与首项
    i/(ω+iε) 相乘后，带极点的 κ 轴按留数积出，给出时间上的 Heaviside θ 与阻尼 e^{−ε‖n‖|t′|}；
    1+1 维剩下的超平面积分在实验室动量上对 n 逐点求积（见 _hyperplane_integrals_2d）。
    2+1 维只做结构性计算：空间积分化为只依赖 Δ² 的固有时/能量围道积分。
    """
    delta = np.asarray(delta, dtype=float)
    if delta.size != cfg.dim or fol.dim != cfg.dim:
        raise ValueError(f"Δ 维度 {delta.size}、叶状维度 {fol.dim} 与配置 D={cfg.dim} 不一致")
    if cfg.small_tau_bound > cfg.quad_tol:
        raise AccuracyError(f"τΛ_p/2 = {cfg.small_tau_bound:.3e} 超过容差，O(τ) 余项不可忽略",
                            cfg.small_tau_bound)
    t_prime, x_prime = frame_components(delta, fol)
    invariant = t_prime ** 2 - float(np.sum(x_prime ** 2))
    if abs(invariant) < cfg.light_cone_margin:
        raise AccuracyError(f"Δ² = {invariant:.3e} 过于靠近光锥，求积无法分辨", abs(invariant))
    if cfg.dim == 2:
        value, err, tail = _hyperplane_integrals_2d(delta, fol, invariant, cfg)
    else:
        value, err, tail = _proper_time_integrals_3d(invariant, cfg)
    bound = (err + tail) / max(abs(value), 1e-300)
    if bound > cfg.quad_tol:
        raise AccuracyError(f"传播子求积误差 {bound:.3e} 超过容差 {cfg.quad_tol:.1e}", bound)
    return PropagatorEstimate(value, err, tail, invariant)


def feynman_propagator(x_minus_y, fol: Foliation, cfg: PropagatorConfig) -> complex:
    return propagator_estimate(x_minus_y, fol, cfg).value


def feynman_oracle(delta, m: float, dim: int = 2) -> complex:
    """独立对照：1+1 类空用 QAWF 傅里叶求积 (1/2π)∫₀^∞ cos(kr)/√(k²+m²) dk，
    类时用 −(i/4)H₀⁽²⁾(ms)；2+1 用闭式 e^{−mr}/(4πr) 与 −i e^{−ims}/(4πs)
    """
    delta = np.asarray(delta, dtype=float)
    invariant = float(minkowski_dot(delta, delta))
    if dim == 2:
        if invariant < 0:
            r = math.sqrt(-invariant)
            value, _ = integrate.quad(lambda k: 1.0 / (2 * math.pi * math.sqrt(k * k + m * m)),
                                      0.0, np.inf, weight="cos", wvar=r)
            return complex(value)
        return complex(-0.25j * special.hankel2(0, m * math.sqrt(invariant)))
    if invariant < 0:
        r = math.sqrt(-invariant)
        return complex(math.exp(-m * r) / (4 * math.pi * r))
    s = math.sqrt(invariant)
    return complex(-1j * np.exp(-1j * m * s) / (4 * math.pi * s))


def bessel_crosscheck(r: float, m: float) -> float:
    """QAWF 对照与 K₀(mr)/2π 的差"""
    return abs(feynman_oracle([0.0, r], m).real - special.k0(m * r) / (2 * math.pi))


def resolution_study(delta, fol: Foliation, cfg: PropagatorConfig) -> Tuple[float, float]:
    """同一 Δ 在 resolution 与 2·resolution 下的误差估计"""
    coarse = propagator_estimate(delta, fol, cfg).quadrature_error
    fine = propagator_estimate(delta, fol, cfg.with_resolution(2 * cfg.resolution)).quadrature_error
    return coarse, fine


def covariance_check(x, y, fol: Foliation, boost: BoostMatrix,
                     cfg: PropagatorConfig) -> Tuple[complex, complex, float]:
    """比较 (x, y, n) 与 (Λx, Λy, Λn) 下的传播子，返回 (value_n, value_Λn, 相对差)

    两侧各自在自己的叶状上求积，差别来自超平面参数化随 n 变化的求积误差。
    只支持 1+1 维（2+1 维的积分只依赖 Δ²）。
    """
    if cfg.dim != 2:
        raise ValueError(f"协变检查只支持 1+1 维，实际 D={cfg.dim}")
    if boost.rapidity > cfg.max_rapidity:
        raise CutoffError(f"boost 快度 {boost.rapidity:.3f} 超过上限 {cfg.max_rapidity}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    value_n = feynman_propagator(x - y, fol, cfg)
    value_boosted = feynman_propagator(boost.apply(x) - boost.apply(y), fol.boosted(boost), cfg)
    return value_n, value_boosted, abs(value_boosted - value_n) / abs(value_n)


def thermal_oscillator(theta: float, energy: float, beta: float) -> float:
    """(1/2E)[(1+n_B)e^{−Eθ} + n_B e^{Eθ}]，n_B = 1/(e^{βE}−1)"""
    n_b = 1.0 / math.expm1(beta * energy)
    return ((1.0 + n_b) * math.exp(-energy * theta) + n_b * math.exp(energy * theta)) / (2.0 * energy)


def matsubara_tail_bound(energy: float, beta: float, mode_cap: int) -> float:
    return 2.0 * energy ** 2 / beta * (beta / (2 * math.pi)) ** 4 / (3.0 * mode_cap ** 3)


def matsubara_correlator(theta: float, beta: float, mode_cap: int, energy: float | None = None,
                         mass: float | None = None, momentum: float = 0.0, tol: float = 1e-8) -> complex:
    """G(θ) = (1/β)Σₙ e^{−iwₙθ}/(wₙ² + E²)，wₙ = 2πn/β，|n| ≤ mode_cap

    1/wₙ² 部分用 Bernoulli 多项式闭式求和，剩余 E²/(wₙ²(wₙ²+E²)) 按 1/M³ 收敛。
    """
    if energy is None:
        if mass is None:
            raise ValueError("需要给出单模能量 E 或质量 m")
        energy = math.sqrt(momentum ** 2 + mass ** 2)
    if not 0.0 <= theta <= beta:
        raise ValueError(f"θ = {theta} 不在 [0, β] 内")
    bound = matsubara_tail_bound(energy, beta, mode_cap)
    if bound > tol:
        raise AccuracyError(f"Matsubara 截尾误差 {bound:.3e} 超过容差 {tol:.1e}", bound)
    x = theta / beta
    n = np.arange(1, mode_cap + 1, dtype=float)
    w = 2 * math.pi * n / beta
    remainder = np.sum(2.0 * np.cos(w * theta) * energy ** 2 / (w ** 2 * (w ** 2 + energy ** 2)))
    bernoulli = 0.5 * beta ** 2 * (x * x - x + 1.0 / 6.0)
    return complex((1.0 / energy ** 2 + bernoulli - remainder) / beta)


def foliation_bogoliubov(p, fol_a: Foliation, fol_b: Foliation, m: float) -> Tuple[float, float]:
    """匹配两套展开 (a, a†) = M_n (φ, π)，M_n = [[√(E/2), i/√(2E)], [√(E/2), −i/√(2E)]]

    解 [a_b; a_b†] = M_b M_a⁻¹ [a_a; a_a†]，返回 a_b = α a_a + β a_a† 的 (α, β)。
    """
    def matching(energy: float) -> np.ndarray:
        return np.array([[math.sqrt(energy / 2), 1j / math.sqrt(2 * energy)],
                         [math.sqrt(energy / 2), -1j / math.sqrt(2 * energy)]])

    m_a = matching(float(energy_Ep(p, fol_a, m)))
    m_b = matching(float(energy_Ep(p, fol_b, m)))
    transfer = np.linalg.solve(m_a.T, m_b.T).T
    alpha, beta = transfer[0, 0], transfer[0, 1]
    if max(abs(alpha.imag), abs(beta.imag)) > 1e-12:
        logger.warning(f"Bogoliubov 系数出现虚部: α={alpha}, β={beta}")
    return float(alpha.real), float(beta.real)


def momentum_grid(cutoff: float, points: int, dim: int = 2) -> Tuple[np.ndarray, float]:
    """[−Λ, Λ]ᴰ 上的均匀离壳动量网格，返回 (点集 (P, D), 单元体积)"""
    axis = np.linspace(-cutoff, cutoff, points)
    spacing = axis[1] - axis[0]
    mesh = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    return mesh, spacing ** dim


def vacuum_energy_scaling(fol: Foliation, s: float, grid: Tuple[np.ndarray, float],
                          m: float) -> Tuple[float, float, float]:
    """ρ(n) = ½Σ_grid E_p(n)·ΔV 与 ρ(s·n)，比值应为 s"""
    points, volume = grid
    rho = 0.5 * float(np.sum(energy_Ep(points, fol, m))) * volume
    rho_scaled = 0.5 * float(np.sum(energy_Ep(points, fol.scaled(s), m))) * volume
    return rho, rho_scaled, rho_scaled / rho


def single_particle_shift(n: int) -> np.ndarray:
    """N 片单激发子空间上的移位矩阵 C[i+1, i] = 1（循环）"""
    shift = np.zeros((n, n))
    for i in range(n):
        shift[(i + 1) % n, i] = 1.0
    return shift


def discrete_p0_modes(n: int, eps: float) -> Tuple[np.ndarray, float, np.ndarray]:
    """P₀ = Σωₖa†ₖaₖ，ωₖ = 2πk/(Nε)；F·diag(e^{iεωₖ})·F† 与纯循环置换比较

    返回 (频率, 残差, 重建矩阵)。
    """
    if n < 1:
        raise ValueError("N 必须 ≥ 1")
    omegas = 2 * math.pi * np.arange(n) / (n * eps)
    fourier = linalg.dft(n) / math.sqrt(n)
    rebuilt = fourier @ np.diag(np.exp(1j * eps * omegas)) @ fourier.conj().T
    residual = float(np.abs(rebuilt - single_particle_shift(n)).max())
    return omegas, residual, rebuilt


def extended_single_particle_shift(n: int, eps: float) -> np.ndarray:
    """把扩展空间（d=2）的循环平移限制到单激发基 |0…1ᵢ…0⟩ 上"""
    shift = cyclic_shift(ExtendedSpace(2, n, eps)).data.real
    indices = [2 ** (n - i) for i in range(1, n + 1)]
    return shift[np.ix_(indices, indices)]
