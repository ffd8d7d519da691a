"""通用工具函数：随机抽样与数值格式化（纯函数、无状态）。"""

import logging
import os
from typing import Any

import numpy as np

logger = logging.getLogger(__name__)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    """高斯随机厄米矩阵（GUE 型），scale 控制谱宽。"""
    a = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    return scale * (a + a.conj().T) / 2.0


def random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    """一般复矩阵（插入算符用，不要求厄米）。"""
    return (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0 * dim)


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar 随机酉矩阵：复高斯矩阵 QR 分解后修正相位。"""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_density_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    """满秩随机密度矩阵 ρ = AA†/Tr(AA†)。"""
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def format_number(value: Any) -> str:
    """CSV 单元格格式：浮点 17 位有效数字，整数/字符串原样。

    复数不在这里处理，调用方必须先拆成 (re, im) 两列。
    """
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, (complex, np.complexfloating)):
        raise TypeError("复数必须拆成 re/im 两列后再写入 CSV")
    return str(value)


def to_jsonable(value: Any) -> Any:
    """把 numpy 标量/数组、复数转换成 JSON 可序列化对象（复数 → [re, im]）。"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def thread_cap(default: int = 1) -> int:
    """XTQM_THREADS 环境变量给出的并行上限（非法值回退默认值）。"""
    raw = os.environ.get("XTQM_THREADS", "").strip()
    if not raw:
        return default
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"XTQM_THREADS={raw!r} 不是整数，使用默认值 {default}")
        return default
    return max(1, value)
