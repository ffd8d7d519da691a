"""测试公共设置：src/ 下的模块以顶层名导入（与 python src/main.py 的运行方式一致）。"""

import sys
from pathlib import Path

import numpy as np
import pytest

SRC = Path(__file__).resolve().parent.parent / "src"
if str(SRC) not in sys.path:
    sys.path.insert(0, str(SRC))


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)
