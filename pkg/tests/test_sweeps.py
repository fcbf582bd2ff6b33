import math

import numpy as np
import pytest

from bosonlab.core.dynamics import beamsplitter_schedule
from bosonlab.core.models import BoundParams
from bosonlab.experiments.config import ExperimentConfig
from bosonlab.experiments.sweeps import (
    PHASE_COLUMNS,
    grid_units,
    lattice_sum_battery,
    phase_diagram,
    run_checks,
    run_units,
)
from bosonlab.monitoring.metrics import RunRecorder
from bosonlab.storage.formats import matrix_to_text, schedule_to_text
from bosonlab.utils.exceptions import DimensionMismatchError, ScheduleViolationError


@pytest.fixture
def hom_config():
    return ExperimentConfig(n=2, separations=(1,), times=(math.pi / 4,))


class TestGrid:
    def test_order_is_lattice_then_seed(self):
        config = ExperimentConfig(source="anderson", W=1.0, separations=(2, 3), seeds=(5, 6), times=(1.0,))
        units = grid_units(config, config.lattices())
        assert [(u.separation, u.seed) for u in units] == [(2, 5), (2, 6), (3, 5), (3, 6)]
        assert [u.index for u in units] == [0, 1, 2, 3]
        assert units[0].labels() == {"m": 3, "L": 1.0, "seed": 5, "separation": 2}

    def test_run_units_keeps_order(self):
        config = ExperimentConfig(source="random", separations=(1, 2, 3), seeds=(0, 1), times=(1.0,))
        units = grid_units(config, config.lattices())
        serial = run_units(units, lambda u: [u.index, -u.index], threads=1)
        pooled = run_units(units, lambda u: [u.index, -u.index], threads=4)
        assert serial == pooled == [0, 0, 1, -1, 2, -2, 3, -3, 4, -4, 5, -5]


class TestPhaseDiagram:
    def test_hong_ou_mandel_point(self, hom_config):
        recorder = RunRecorder("phase-diagram")
        (row,) = phase_diagram(hom_config, recorder=recorder)
        assert set(row) == set(PHASE_COLUMNS)
        assert row["tvd"] == pytest.approx(0.5)
        assert row["path_bound"] == pytest.approx(0.5)
        assert row["m"] == 2
        assert row["L"] == pytest.approx(0.5)
        assert (row["c_low"], row["c_high"]) == (0.0, 2.0)
        assert [stage.name for stage in recorder.stages] == ["guards", "compute"]

    def test_rows_follow_the_time_grid(self):
        config = ExperimentConfig(n=2, separations=(3,), padding=1, times=(0.0, 0.5, 1.0))
        rows = phase_diagram(config)
        assert [row["t"] for row in rows] == [0.0, 0.5, 1.0]
        assert rows[0]["tvd"] == pytest.approx(0.0, abs=1e-12)
        assert all(row["tvd"] <= row["path_bound"] + 1e-10 for row in rows)

    def test_thread_count_does_not_change_rows(self):
        config = ExperimentConfig(n=2, source="anderson", W=2.0, seeds=(0, 1, 2), separations=(2,), padding=1, times=(0.3, 0.9))
        one = phase_diagram(config.with_overrides(threads=1))
        many = phase_diagram(config.with_overrides(threads=3))
        assert [(r["seed"], r["t"], r["tvd"]) for r in one] == [(r["seed"], r["t"], r["tvd"]) for r in many]

    def test_schedule_file_source(self, tmp_path):
        path = tmp_path / "bs.txt"
        path.write_text(schedule_to_text(beamsplitter_schedule(0, 1, 2)))
        config = ExperimentConfig(n=2, separations=(1,), source="file", schedule_file=path)
        (row,) = phase_diagram(config)
        assert row["t"] == pytest.approx(math.pi / 4)
        assert row["tvd"] == pytest.approx(0.5)

    def test_long_range_hopping_file_is_refused(self, tmp_path):
        J = np.zeros((4, 4))
        J[0, 3] = J[3, 0] = 0.5
        path = tmp_path / "J.txt"
        path.write_text(matrix_to_text(J))
        config = ExperimentConfig(n=2, separations=(3,), source="file", hopping_file=path, times=(1.0,))
        with pytest.raises(ScheduleViolationError, match="adjacency") as info:
            phase_diagram(config)
        assert info.value.violations

    def test_hopping_file_of_wrong_size(self, tmp_path):
        path = tmp_path / "J.txt"
        path.write_text(matrix_to_text(np.zeros((3, 3))))
        config = ExperimentConfig(n=2, separations=(1,), source="file", hopping_file=path, times=(1.0,))
        with pytest.raises(DimensionMismatchError):
            phase_diagram(config)


class TestChecks:
    def test_batteries_come_out_in_configured_order(self):
        config = ExperimentConfig(
            n=2, separations=(6,), padding=4, times=(0.5, 1.0), checks=("tvd_bound", "lr", "lemma_s2")
        )
        results = run_checks(config)
        names = [row.check for row in results]
        assert names == ["tvd_path_sum", "tvd_binomial"] * 2 + ["lr"] * 2 + ["lemma_s2"] * 2
        assert all(row.passed for row in results)

    def test_lr_rows_carry_grid_labels(self):
        config = ExperimentConfig(n=2, separations=(10,), padding=5, times=(2.0,), checks=("lr",))
        (row,) = run_checks(config)
        assert row.params["separation"] == 10
        assert row.params["violations"] == 0
        assert row.envelope == pytest.approx(1e-12)

    def test_localization_on_strong_disorder(self):
        config = ExperimentConfig(
            n=2, source="anderson", W=10.0, separations=(10,), padding=10, times=(20.0, 40.0), checks=("localization",)
        )
        rows = run_checks(config)
        assert len(rows) == 2
        assert all(0 < row.measured < 3.0 for row in rows)
        assert all(row.params["median_xi"] > 0 for row in rows)

    def test_lattice_sums_pass(self):
        rows = lattice_sum_battery(ExperimentConfig(times=(1.0,)), BoundParams.default(1))
        failing = [row for row in rows if not row.passed]
        assert failing == []
        checks = {row.check for row in rows}
        assert checks == {"tail_sum", "tail_sum_closed_form", "tail_sum_spread", "scaled_sum", "scaled_sum_spread"}

    def test_lattice_sums_need_no_lattice(self):
        config = ExperimentConfig(n=9, d=3, beta=3.0, times=(1.0,), checks=("lattice_sums",))
        rows = run_checks(config)
        assert rows and all(row.check.startswith(("tail_sum", "scaled_sum")) for row in rows)
