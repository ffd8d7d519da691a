"""数值默认值与实验注册名常量（容差、资源上限、传播子/格点默认参数）。"""

import math


class NumericDefaults:
    """数值容差默认值：NumericPolicy 的唯一来源，配置文件 NUMERIC 节可逐项覆盖"""
    EQUALITY_TOL = 1e-10        # 单位归一数据上的相等判据（绝对）
    UNITARITY_TOL = 1e-12
    HERMITIAN_TOL = 1e-12
    OVERLAP_TOL = 1e-12         # 乘以两向量范数
    DEGENERATE_TOL = 1e-12      # |Tr e^{iS}| 低于此值视为退化归一化
    EIG_ZERO_TOL = 1e-13        # 赝熵中视为零的本征值
    TRUNCATION_BOUND = 1e-12    # Fock 截断误差上界
    NORM_TOL = 1e-10            # 初态单位范数判据
    DIMENSION_CAP = 2 ** 14     # 稠密矩阵边长上限 d^N·K


class PropagatorDefaults:
    """KG 模式引擎默认参数"""
    MASS = 1.0
    TAU = 1e-6                  # τΛ_p/2 须低于 QUAD_TOL
    EPS_REG = 1e-3
    CUTOFF_FACTOR = 40.0        # Λ_p = 40·m
    RESOLUTION = 8000           # 每条转动射线上的梯形节点数
    CONTOUR_ANGLE = math.pi / 3  # 超平面积分射线相对实轴的转角
    QUAD_TOL = 1e-4             # 积分误差估计上限（相对）
    POLE_TOL = 1e-12            # |e^{...} − 1| 低于此值视为撞极点
    MAX_RAPIDITY = 1.0
    LIGHT_CONE_MARGIN = 1e-3    # |Δ²| 小于此值拒绝计算


class LatticeDefaults:
    """经典格点默认参数"""
    GROWTH_FACTOR = 1e3         # 场范数增长超过该倍数判定数值不稳定
    PROBE_FRACTION = 1.0 / 3.0  # 标量协变检查的探针只取 |x| ≤ L/3
    SPLINE_ORDER = 5            # 重采样样条阶数，插值误差 O(Δ⁶) 低于差分误差 O(Δ²)


class ExperimentNames:
    """注册实验名（CLI 与配置文件共用）"""
    MAP = "map"
    TIMEDEP_MAP = "timedep-map"
    THERMAL = "thermal"
    QUBIT = "qubit-appendix-d"
    PURIFY = "purify"
    PROPAGATOR = "propagator"
    MATSUBARA = "matsubara"
    COVARIANCE = "covariance"
    BOGOLIUBOV = "bogoliubov"
    VACUUM_SCALING = "vacuum-scaling"
    CLASSICAL_KG = "classical-kg"
    PB_GENERATORS = "pb-generators"
    DIRAC = "dirac"
    P0_MODES = "p0-modes"


class CheckTolerances:
    """实验验收判据中固定的容差（与 NumericPolicy 无关的那部分）"""
    SWAP = 1e-12
    QUBIT = 1e-12
    THERMAL_TRACE = 1e-12       # 相对
    PURIFICATION = 1e-12
    ANNIHILATION = 1e-8         # e^{−λn_max/2}·√n_max 量级
    ENTROPY = 1e-10
    PROPAGATOR_REL = 1e-2
    PARTIAL_FRACTION = 1e-9
    MATSUBARA = 1e-6
    COVARIANCE_REL = 1e-3
    FOLIATION = 1e-12
    CLIFFORD = 1e-14
    SPINOR = 1e-12
    DIRAC_RESIDUAL = 1e-10
    ORDER_TARGET = 2.0
    ORDER_WINDOW = 0.1          # 观测阶须落在 2 ± 0.1
    SHRINK_RATIO = 4.0          # Δ 减半时二阶误差的缩小倍数
    SHRINK_WINDOW = 0.1         # sin(kΔ)/kΔ 的 Δ⁴ 项使比值从下方趋于 4
    JACOBI_REL = 1e-9
