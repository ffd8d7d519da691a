"""共享数据模型：数值策略、作用量种类枚举、检查记录与运行报告。"""

from dataclasses import dataclass, field, fields, replace
from enum import Enum
from typing import Any, Dict, List, Mapping, Sequence

from constants import NumericDefaults


class ActionKind(Enum):
    """离散作用量 e^{iS} 的构造方式"""
    UNITARY = "unitary"
    TIME_DEPENDENT = "time_dependent"
    WICK_ROTATED = "wick_rotated"
    CONTROLLED = "controlled"


class CheckMode(Enum):
    """检查判据"""
    ABS = "abs"    # |measured − expected| ≤ tolerance
    MAX = "max"    # measured ≤ tolerance
    MIN = "min"    # measured ≥ tolerance


@dataclass(frozen=True)
class NumericPolicy:
    """集中管理的数值容差"""
    equality_tol: float = NumericDefaults.EQUALITY_TOL
    unitarity_tol: float = NumericDefaults.UNITARITY_TOL
    hermitian_tol: float = NumericDefaults.HERMITIAN_TOL
    overlap_tol: float = NumericDefaults.OVERLAP_TOL
    degenerate_tol: float = NumericDefaults.DEGENERATE_TOL
    eig_zero_tol: float = NumericDefaults.EIG_ZERO_TOL
    truncation_bound: float = NumericDefaults.TRUNCATION_BOUND
    norm_tol: float = NumericDefaults.NORM_TOL
    dimension_cap: int = NumericDefaults.DIMENSION_CAP

    @classmethod
    def from_mapping(cls, overrides: Mapping[str, Any] | None) -> "NumericPolicy":
        """用配置中的覆盖项构造策略；未知键抛 ValueError（由配置层转成 ConfigError）"""
        if not overrides:
            return cls()
        known = {f.name: f.type for f in fields(cls)}
        unknown = sorted(set(overrides) - set(known))
        if unknown:
            raise ValueError(f"未知的数值策略项: {', '.join(unknown)}")
        values = {}
        for key, value in overrides.items():
            values[key] = int(value) if key == "dimension_cap" else float(value)
        return replace(cls(), **values)


DEFAULT_POLICY = NumericPolicy()


@dataclass
class CheckRecord:
    """单条检查记录（名称、实测、期望、容差、是否通过）"""
    name: str
    measured: float
    expected: float = 0.0
    tolerance: float = 0.0
    mode: CheckMode = CheckMode.ABS

    @property
    def passed(self) -> bool:
        if self.mode is CheckMode.MAX:
            return bool(self.measured <= self.tolerance)
        if self.mode is CheckMode.MIN:
            return bool(self.measured >= self.tolerance)
        return bool(abs(self.measured - self.expected) <= self.tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "measured": float(self.measured),
            "expected": float(self.expected),
            "tolerance": float(self.tolerance),
            "mode": self.mode.value,
            "pass": self.passed,
        }


@dataclass
class DataTable:
    """CSV 数据表：固定表头 + 行（复数须已拆成 re/im 两列）"""
    name: str
    header: List[str]
    rows: List[Sequence[Any]] = field(default_factory=list)

    def add_row(self, *values: Any) -> None:
        if len(values) != len(self.header):
            raise ValueError(f"表 {self.name} 行长度 {len(values)} 与表头 {len(self.header)} 不一致")
        self.rows.append(tuple(values))


@dataclass
class ExperimentResult:
    """实验函数的返回值：检查记录 + 数据表"""
    checks: List[CheckRecord] = field(default_factory=list)
    tables: List[DataTable] = field(default_factory=list)

    def check(self, name: str, measured: float, expected: float = 0.0,
              tolerance: float = 0.0, mode: CheckMode = CheckMode.ABS) -> CheckRecord:
        record = CheckRecord(name, float(measured), float(expected), float(tolerance), mode)
        self.checks.append(record)
        return record


@dataclass
class RunReport:
    """一次 `xtqm run` 的完整报告"""
    experiment: str
    parameters: Dict[str, Any]
    checks: List[CheckRecord]
    wall_time: float = 0.0
    artifacts: List[str] = field(default_factory=list)

    @property
    def overall_pass(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failed_checks(self) -> List[CheckRecord]:
        return [check for check in self.checks if not check.passed]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "experiment": self.experiment,
            "parameters": self.parameters,
            "overall_pass": self.overall_pass,
            "checks": [check.to_dict() for check in self.checks],
            "wall_time": self.wall_time,
            "artifacts": list(self.artifacts),
        }
