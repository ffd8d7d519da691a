"""运行结果落盘：OUTPUT_DIR/<实验名>/report.json 与各数据表 CSV。"""

import csv
import json
import logging
from pathlib import Path
from typing import List, Sequence

from models import DataTable, RunReport
from utils import format_number, to_jsonable

logger = logging.getLogger(__name__)


def split_complex(value) -> tuple:
    """复数 → (re, im) 两列"""
    value = complex(value)
    return value.real, value.imag


def write_table(table: DataTable, directory: Path) -> Path:
    path = directory / f"{table.name}.csv"
    # newline='' 且固定 lineterminator，保证同样输入逐字节一致
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([format_number(v) for v in row])
    return path


def write_report(report: RunReport, tables: Sequence[DataTable], output_dir: Path) -> List[Path]:
    """写出全部数据表与 report.json，返回写出的文件列表（report.json 在最后）"""
    directory = Path(output_dir) / report.experiment
    directory.mkdir(parents=True, exist_ok=True)
    written = [write_table(table, directory) for table in tables]
    report.artifacts = [str(path) for path in written]
    report_path = directory / "report.json"
    report.artifacts.append(str(report_path))
    with open(report_path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(report.to_dict()), f, ensure_ascii=False, indent=2)
    logger.info(f"报告已写出: {report_path}（数据表 {len(written)} 个）")
    return written + [report_path]
