"""检查记录判定、CSV/JSON 落盘格式与 Bark 运行摘要。"""

import json

import numpy as np
import pytest

import bark
from bark import BarkNotifier
from models import CheckMode, CheckRecord, DataTable, RunReport
from report import split_complex, write_report
from utils import format_number, to_jsonable


def test_check_modes():
    assert CheckRecord("abs", 1.0 + 1e-13, 1.0, 1e-12).passed
    assert not CheckRecord("abs", 1.1, 1.0, 1e-12).passed
    assert CheckRecord("max", 1e-13, tolerance=1e-12, mode=CheckMode.MAX).passed
    assert not CheckRecord("max", 1e-11, tolerance=1e-12, mode=CheckMode.MAX).passed
    assert CheckRecord("min", 4.0, tolerance=3.5, mode=CheckMode.MIN).passed
    assert not CheckRecord("min", 3.0, tolerance=3.5, mode=CheckMode.MIN).passed


def test_nan_measurement_fails():
    assert not CheckRecord("nan", float("nan"), 0.0, 1.0).passed
    assert not CheckRecord("nan", float("nan"), tolerance=1.0, mode=CheckMode.MAX).passed


def test_number_format():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(np.float64(2.5)) == "2.5"
    assert format_number(7) == "7"
    assert format_number(True) == "1"
    with pytest.raises(TypeError):
        format_number(1 + 2j)


def test_jsonable_conversion():
    data = to_jsonable({"z": 1 - 2j, "arr": np.arange(2), "flag": np.bool_(True), 3: np.float32(0.5)})
    assert data == {"z": [1.0, -2.0], "arr": [0, 1], "flag": True, "3": 0.5}
    assert split_complex(3 + 4j) == (3.0, 4.0)


def test_table_row_length():
    table = DataTable("t", ["a", "b"])
    with pytest.raises(ValueError):
        table.add_row(1)


def _report():
    checks = [CheckRecord("ok", 0.0, tolerance=1e-12, mode=CheckMode.MAX),
              CheckRecord("bad", 1.0, 0.0, 1e-12)]
    return RunReport("demo", {"seed": 3, "eps": 0.1}, checks, 0.25)


def test_write_report(tmp_path):
    table = DataTable("values", ["i", "re", "im"])
    for i, z in enumerate([1 + 2j, 0.1 - 0.3j]):
        table.add_row(i, *split_complex(z))
    report = _report()
    written = write_report(report, [table], tmp_path)

    assert [p.name for p in written] == ["values.csv", "report.json"]
    text = (tmp_path / "demo" / "values.csv").read_bytes().decode("utf-8")
    assert text == "i,re,im\n0,1,2\n1,0.10000000000000001,-0.29999999999999999\n"

    payload = json.loads((tmp_path / "demo" / "report.json").read_text(encoding="utf-8"))
    assert payload["experiment"] == "demo"
    assert payload["overall_pass"] is False
    assert [c["pass"] for c in payload["checks"]] == [True, False]
    assert payload["parameters"] == {"seed": 3, "eps": 0.1}
    assert payload["artifacts"][-1].endswith("report.json")


def test_write_report_is_reproducible(tmp_path):
    table = DataTable("values", ["x"], [(1 / 3,), (2 / 3,)])
    write_report(_report(), [table], tmp_path / "a")
    write_report(_report(), [table], tmp_path / "b")
    assert (tmp_path / "a" / "demo" / "values.csv").read_bytes() == (tmp_path / "b" / "demo" / "values.csv").read_bytes()


def test_bark_disabled_without_url(monkeypatch):
    def fail(*args, **kwargs):
        raise AssertionError("不应发送请求")

    monkeypatch.setattr(bark.requests, "post", fail)
    assert BarkNotifier("").send_run_report(_report()) is False


def test_bark_sends_summary(monkeypatch):
    sent = {}

    class Response:
        def raise_for_status(self):
            pass

    def fake_post(url, params, timeout):
        sent.update(url=url, **params)
        return Response()

    monkeypatch.setattr(bark.requests, "post", fake_post)
    assert BarkNotifier("https://bark.example/key/").send_run_report(_report()) is True
    assert sent["url"] == "https://bark.example/key/"
    assert "失败1项" in sent["body"]
    assert "bad" in sent["body"]


def test_bark_failure_is_swallowed(monkeypatch):
    def broken(*args, **kwargs):
        raise ConnectionError("down")

    monkeypatch.setattr(bark.requests, "post", broken)
    assert BarkNotifier("https://bark.example/key/").send_notification("t", "c") is False
