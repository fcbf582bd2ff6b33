import json
import logging

from bosonlab.core.models import CheckResult
from bosonlab.monitoring.logging import ThirdPartyFilter
from bosonlab.monitoring.metrics import RunRecorder
from bosonlab.utils.display import check_table, format_duration, format_float, shorten


class TestRunRecorder:
    def test_stages_are_recorded_in_order(self):
        recorder = RunRecorder("check")
        with recorder.stage("guards"):
            pass
        with recorder.stage("compute", items=3):
            pass
        summary = recorder.summary()
        assert summary["command"] == "check"
        assert [s["name"] for s in summary["stages"]] == ["guards", "compute"]
        assert summary["stages"][1]["items"] == 3
        assert summary["peak_rss_mb"] > 0

    def test_stage_is_kept_when_the_body_raises(self):
        recorder = RunRecorder("evolve")
        try:
            with recorder.stage("compute"):
                raise RuntimeError("boom")
        except RuntimeError:
            pass
        assert [s.name for s in recorder.stages] == ["compute"]

    def test_flush_appends_json_lines(self, tmp_path):
        for command in ("compile", "tvd"):
            RunRecorder(command, out_dir=tmp_path / "logs").flush()
        lines = (tmp_path / "logs" / "metrics.jsonl").read_text().splitlines()
        assert [json.loads(line)["command"] for line in lines] == ["compile", "tvd"]

    def test_flush_without_directory_writes_nothing(self, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        record = RunRecorder("sample").flush()
        assert record["command"] == "sample"
        assert list(tmp_path.iterdir()) == []


def test_third_party_filter():
    keep = logging.LogRecord("bosonlab.core", logging.DEBUG, __file__, 1, "msg", None, None)
    noisy = logging.LogRecord("numba.core.ssa", logging.DEBUG, __file__, 1, "msg", None, None)
    check = ThirdPartyFilter()
    assert check.filter(keep)
    assert not check.filter(noisy)


class TestDisplay:
    def test_durations(self):
        assert format_duration(None) == "—"
        assert format_duration(0.25) == "250ms"
        assert format_duration(12.34) == "12.3s"
        assert format_duration(245) == "4m 05s"
        assert format_duration(7260) == "2h 01m"

    def test_floats(self):
        assert format_float(0.5) == "0.5"
        assert format_float(1.5e-12) == "1.500e-12"
        assert format_float(float("inf")) == "inf"
        assert format_float(float("nan")) == "nan"
        assert format_float(0.0) == "0"

    def test_shorten(self):
        assert shorten("  a   b  ") == "a b"
        assert shorten("x" * 100, limit=10) == "x" * 9 + "…"

    def test_failing_checks_come_first(self):
        rows = [
            CheckResult("lr", {"t": 1.0}, 0.0, 1e-12, 0.9, True),
            CheckResult("tvd_binomial", {"t": 1.0}, 0.4, 0.3, 1.33, False),
        ]
        table = check_table(rows, limit=1)
        assert table.row_count == 1
        assert list(table.columns[0].cells) == ["tvd_binomial"]
        assert table.caption == "1 more rows in the report CSV"
