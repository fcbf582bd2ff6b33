"""Grid sweeps: the phase-diagram table and the bound-check batteries.

A sweep is a list of work units, one per (lattice, seed). Each unit
diagonalises its hopping matrix once and walks the whole time grid. Units
run on a thread pool; results are merged back in grid order, so the output
never depends on the worker count.
"""

from __future__ import annotations

import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Optional, Sequence, TypeVar

import numpy as np

from bosonlab.core.bosonic import exact_distribution
from bosonlab.core.bounds import (
    LATTICE_POINT_LIMIT,
    binomial_bound,
    hard_timescale,
    interference_matrix,
    lattice_tail_integral,
    lattice_tail_sum,
    lemma1_bound,
    lemma_s2_check,
    localization_check,
    lr_envelope_check,
    path_sum_bound,
    phase_exponents,
    scaled_lattice_sum,
    tvd,
)
from bosonlab.core.classical import dp_distribution, markov_matrix
from bosonlab.core.dynamics import (
    anderson_hopping,
    clean_hopping,
    evolve,
    quench,
    random_hopping,
    validate_schedule,
)
from bosonlab.core.lattice import initial_configuration
from bosonlab.core.models import (
    BoundParams,
    CheckResult,
    HoppingSchedule,
    LatticeSpec,
    Propagator,
)
from bosonlab.experiments.config import ExperimentConfig, load_matrix_file, load_schedule_file
from bosonlab.monitoring.logging import get_logger
from bosonlab.monitoring.metrics import RunRecorder
from bosonlab.utils.config import Config, get_config
from bosonlab.utils.exceptions import DimensionMismatchError, ScheduleViolationError

logger = get_logger(__name__)

T = TypeVar("T")

PHASE_COLUMNS = (
    "n",
    "m",
    "L",
    "t",
    "vt_over_L",
    "tvd",
    "lemma1_bound",
    "t_easy",
    "t_hard_scale",
    "c_low",
    "c_high",
    "d",
    "beta",
    "c1",
    "source",
    "W",
    "seed",
    "v",
    "xi",
    "path_bound",
)

LOCALIZATION_SPREAD = 0.2
SPREAD_LIMIT = 3.0
SCALED_SPREAD_FROM = 2.0
SCALED_RATIO_LIMIT = 2.1
CLOSED_FORM_TOL = 1e-9
BOUND_SLACK = 1e-10


@dataclass(frozen=True)
class GridUnit:
    """One (lattice, seed) pair of a sweep."""

    index: int
    spec: LatticeSpec
    seed: int
    separation: Optional[int] = None

    def labels(self) -> dict[str, Any]:
        labels: dict[str, Any] = {"m": self.spec.m, "L": self.spec.L, "seed": self.seed}
        if self.separation is not None:
            labels["separation"] = self.separation
        return labels


def grid_units(config: ExperimentConfig, specs: Sequence[LatticeSpec]) -> list[GridUnit]:
    """Lattices outermost, then seeds."""
    separations: Sequence[Optional[int]] = config.separations or [None] * len(specs)
    units = []
    for spec, separation in zip(specs, separations):
        for seed in config.run_seeds:
            units.append(GridUnit(len(units), spec, seed, separation))
    return units


def hopping_matrix(config: ExperimentConfig, spec: LatticeSpec, seed: int) -> np.ndarray:
    if config.source == "anderson":
        return anderson_hopping(spec, config.W, seed)
    if config.source == "random":
        return random_hopping(spec, seed)
    if config.source == "file":
        J = load_matrix_file(config.hopping_file)
        if J.shape != (spec.m, spec.m):
            raise DimensionMismatchError("hopping file does not match the lattice", (spec.m, spec.m), J.shape)
        _require_valid(HoppingSchedule.constant(J, 1.0), spec, str(config.hopping_file))
        return J
    return clean_hopping(spec)


def _require_valid(sched: HoppingSchedule, spec: LatticeSpec, origin: str) -> None:
    report = validate_schedule(sched, spec)
    if not report.ok:
        first = report.violations[0]
        raise ScheduleViolationError(
            f"{origin}: {len(report.violations)} violation(s), first {first.kind.value} at "
            f"segment {first.segment} ({first.i}, {first.j})",
            report.violations,
        )


def unit_propagators(config: ExperimentConfig, unit: GridUnit) -> list[Propagator]:
    """R(t) for every time of the grid, or the single R of a schedule file."""
    if config.schedule_file is not None:
        sched = load_schedule_file(config.schedule_file)
        if sched.m != unit.spec.m:
            raise DimensionMismatchError("schedule file does not match the lattice", unit.spec.m, sched.m)
        _require_valid(sched, unit.spec, str(config.schedule_file))
        return [evolve(sched)]
    return quench(hopping_matrix(config, unit.spec, unit.seed), config.times)


def run_units(units: Sequence[GridUnit], worker: Callable[[GridUnit], list[T]], threads: int) -> list[T]:
    """Apply ``worker`` to every unit and concatenate the results in grid order."""
    if threads > 1 and len(units) > 1:
        with ThreadPoolExecutor(max_workers=min(threads, len(units))) as pool:
            chunks = list(pool.map(worker, units))
    else:
        chunks = [worker(unit) for unit in units]
    return [item for chunk in chunks for item in chunk]


# phase diagram -------------------------------------------------------------


def phase_diagram(
    config: ExperimentConfig,
    settings: Optional[Config] = None,
    recorder: Optional[RunRecorder] = None,
) -> list[dict[str, Any]]:
    """One row per (lattice, seed, t) with the exact-versus-classical distance."""
    settings = settings or get_config()
    recorder = recorder or RunRecorder("phase-diagram")
    params = config.bound_params(settings)
    limit = settings.guard("enumeration_limit")
    max_particles = settings.guard("max_particles")
    markov_tol = settings.tolerance("markov_input_unitarity")
    easy_fraction = float(settings.bounds.easy_fraction)

    with recorder.stage("guards"):
        specs = config.check_guards(settings)
    units = grid_units(config, specs)

    def worker(unit: GridUnit) -> list[dict[str, Any]]:
        spec = unit.spec
        r = initial_configuration(spec)
        rows = []
        c_low, c_high = phase_exponents(spec.beta, spec.d)
        for R in unit_propagators(config, unit):
            exact = exact_distribution(R, r, enumeration_limit=limit, max_particles=max_particles)
            classical = dp_distribution(markov_matrix(R, markov_tol), r, enumeration_limit=limit, max_particles=max_particles)
            vt = params.v * R.t
            rows.append(
                {
                    "n": spec.n,
                    "m": spec.m,
                    "L": spec.L,
                    "t": R.t,
                    "vt_over_L": vt / spec.L,
                    "tvd": tvd(exact, classical),
                    "lemma1_bound": lemma1_bound(spec.L, vt, params.xi, spec.d),
                    "t_easy": math.inf if params.v == 0 else easy_fraction * spec.L / params.v,
                    "t_hard_scale": hard_timescale(spec.n, spec.beta, spec.d),
                    "c_low": c_low,
                    "c_high": c_high,
                    "d": spec.d,
                    "beta": spec.beta,
                    "c1": spec.c1,
                    "source": config.source,
                    "W": config.W,
                    "seed": unit.seed,
                    "v": params.v,
                    "xi": params.xi,
                    "path_bound": path_sum_bound(R, r),
                }
            )
        logger.info("sweep.point.done", unit=unit.index, m=spec.m, L=spec.L, seed=unit.seed, rows=len(rows))
        return rows

    with recorder.stage("compute", items=len(units)):
        rows = run_units(units, worker, settings.threads(config.threads))
    logger.info("sweep.phase_diagram.done", units=len(units), rows=len(rows))
    return rows


# check batteries -----------------------------------------------------------


def _labels(unit: GridUnit, t: float, params: BoundParams) -> dict[str, Any]:
    return {**unit.labels(), "t": t, "v": params.v, "xi": params.xi}


def lr_battery(unit: GridUnit, props: Sequence[Propagator], params: BoundParams, settings: Config) -> list[CheckResult]:
    tol = settings.tolerance("envelope")
    floor = settings.tolerance("fit_floor")
    rows = []
    for R in props:
        report = lr_envelope_check(R, R.t, params, unit.spec, tol, floor)
        rows.append(
            CheckResult(
                check="lr",
                params={**_labels(unit, R.t, params), "violations": len(report.violations)},
                measured=report.max_excess,
                envelope=tol,
                ratio=report.fitted_xi / params.xi,
                passed=report.passed,
            )
        )
    return rows


def localization_battery(
    unit: GridUnit, props: Sequence[Propagator], params: BoundParams, settings: Config
) -> list[CheckResult]:
    """Fitted decay length per time, judged against its median over the time grid."""
    tol = settings.tolerance("envelope")
    floor = settings.tolerance("fit_floor")
    reports = [localization_check(R, unit.spec, tol=tol, fit_floor=floor) for R in props]
    usable = [rep.fitted_xi for rep in reports if math.isfinite(rep.fitted_xi) and rep.fitted_xi > 0]
    centre = statistics.median(usable) if usable else math.nan
    rows = []
    for R, report in zip(props, reports):
        ratio = report.fitted_xi / centre if usable else math.nan
        rows.append(
            CheckResult(
                check="localization",
                params={**_labels(unit, R.t, params), "median_xi": centre},
                measured=report.fitted_xi,
                envelope=report.critical_xi if report.critical_xi is not None else math.nan,
                ratio=ratio,
                passed=math.isfinite(ratio) and abs(ratio - 1.0) <= LOCALIZATION_SPREAD,
            )
        )
    return rows


def lemma_s2_battery(
    unit: GridUnit, props: Sequence[Propagator], params: BoundParams, settings: Config
) -> list[CheckResult]:
    r = initial_configuration(unit.spec)
    rows = []
    for R in props:
        result = lemma_s2_check(R, r, unit.spec, params, R.t)
        rows.append(result._replace(params={**unit.labels(), **result.params}))
    return rows


def _bound_row(check: str, params: dict[str, Any], measured: float, bound: float) -> CheckResult:
    if bound > 0:
        ratio = measured / bound
    else:
        ratio = 0.0 if measured <= BOUND_SLACK else math.inf
    return CheckResult(check, params, measured, bound, ratio, measured <= bound + BOUND_SLACK)


def tvd_bound_battery(
    unit: GridUnit, props: Sequence[Propagator], params: BoundParams, settings: Config
) -> list[CheckResult]:
    """Measured distance against the path-sum and binomial bounds."""
    r = initial_configuration(unit.spec)
    limit = settings.guard("enumeration_limit")
    max_particles = settings.guard("max_particles")
    markov_tol = settings.tolerance("markov_input_unitarity")
    rows = []
    for R in props:
        distance = tvd(
            exact_distribution(R, r, enumeration_limit=limit, max_particles=max_particles),
            dp_distribution(markov_matrix(R, markov_tol), r, enumeration_limit=limit, max_particles=max_particles),
        )
        labels = _labels(unit, R.t, params)
        M = interference_matrix(R, r)
        strength = float((M.sum(axis=1) - np.diag(M)).max(initial=0.0))
        rows.append(_bound_row("tvd_path_sum", labels, distance, path_sum_bound(R, r)))
        rows.append(_bound_row("tvd_binomial", {**labels, "c": strength}, distance, binomial_bound(strength, r.n)))
    return rows


UNIT_BATTERIES: dict[str, Callable[[GridUnit, Sequence[Propagator], BoundParams, Config], list[CheckResult]]] = {
    "lr": lr_battery,
    "localization": localization_battery,
    "lemma_s2": lemma_s2_battery,
    "tvd_bound": tvd_bound_battery,
}


def _spread_row(check: str, params: dict[str, Any], ratios: Iterable[float]) -> CheckResult:
    values = [x for x in ratios if x > 0]
    spread = max(values) / min(values) if values else math.nan
    return CheckResult(check, params, spread, SPREAD_LIMIT, spread / SPREAD_LIMIT, spread < SPREAD_LIMIT)


def _closed_form_tail_ratio(L: float, xi: float) -> float:
    """Exact d = 1 ratio of Σ_{|x| ≥ L} e^{−|x|/ξ} to ξ·e^{−L/ξ}."""
    first = math.ceil(L - 1e-12 * L)
    return 2.0 * math.exp((L - first) / xi) / (xi * (1.0 - math.exp(-1.0 / xi)))


def lattice_sum_battery(
    config: ExperimentConfig, params: BoundParams, max_points: int = LATTICE_POINT_LIMIT
) -> list[CheckResult]:
    """Tail sums and scaled nearest-shell sums in d = 1, 2, 3.

    Lengths are taken in units of ξ. d = 1 is compared with its closed
    forms; d = 2, 3 are judged by the spread of the ratio across lengths.
    """
    xi = params.xi
    rows: list[CheckResult] = []
    for d in (1, 2, 3):
        tail_ratios = []
        for x in config.tail_lengths:
            L = x * xi
            result = lattice_tail_sum(L, xi, d, max_points=max_points)
            _, certified = lattice_tail_integral(L, xi, d)
            envelope = xi * L ** (d - 1) * math.exp(-L / xi)
            labels = {"d": d, "L": L, "xi": xi}
            rows.append(
                CheckResult("tail_sum", labels, result.total, envelope, result.ratio, result.total <= certified)
            )
            tail_ratios.append(result.ratio)
            if d == 1:
                exact = _closed_form_tail_ratio(L, xi)
                rel = result.ratio / exact
                rows.append(
                    CheckResult("tail_sum_closed_form", labels, result.ratio, exact, rel, abs(rel - 1) < CLOSED_FORM_TOL)
                )
        if tail_ratios:
            rows.append(_spread_row("tail_sum_spread", {"d": d, "xi": xi}, tail_ratios))

        scaled_ratios = []
        for x in config.scaled_lengths:
            L = x * xi
            total, ratio = scaled_lattice_sum(L, xi, d, max_points=max_points)
            labels = {"d": d, "L": L, "xi": xi}
            if d == 1:
                exact = 2.0 / (1.0 - math.exp(-2.0 * x))
                passed = abs(ratio / exact - 1) < CLOSED_FORM_TOL and (x < 3 or ratio <= SCALED_RATIO_LIMIT)
                rows.append(CheckResult("scaled_sum", labels, total, math.exp(-2.0 * x), ratio, passed))
            else:
                rows.append(CheckResult("scaled_sum", labels, total, math.exp(-2.0 * x), ratio, math.isfinite(ratio)))
                if x >= SCALED_SPREAD_FROM:
                    scaled_ratios.append(ratio)
        if scaled_ratios:
            rows.append(_spread_row("scaled_sum_spread", {"d": d, "xi": xi}, scaled_ratios))
    logger.info("sweep.lattice_sums.done", rows=len(rows))
    return rows


def run_checks(
    config: ExperimentConfig,
    settings: Optional[Config] = None,
    recorder: Optional[RunRecorder] = None,
) -> list[CheckResult]:
    """Run every configured battery; rows come out battery by battery in grid order."""
    settings = settings or get_config()
    recorder = recorder or RunRecorder("check")
    params = config.bound_params(settings)
    batteries = [name for name in config.checks if name in UNIT_BATTERIES]

    units: list[GridUnit] = []
    if batteries:
        with recorder.stage("guards"):
            specs = config.check_guards(settings)
        units = grid_units(config, specs)

    def worker(unit: GridUnit) -> list[tuple[str, CheckResult]]:
        props = unit_propagators(config, unit)
        tagged = []
        for name in batteries:
            tagged.extend((name, row) for row in UNIT_BATTERIES[name](unit, props, params, settings))
        logger.info("sweep.point.done", unit=unit.index, m=unit.spec.m, seed=unit.seed, rows=len(tagged))
        return tagged

    results: list[CheckResult] = []
    with recorder.stage("compute", items=len(units)):
        tagged = run_units(units, worker, settings.threads(config.threads)) if units else []
        for name in config.checks:
            if name == "lattice_sums":
                results.extend(lattice_sum_battery(config, params, settings.guard("lattice_points")))
            else:
                results.extend(row for tag, row in tagged if tag == name)
    failed = sum(not row.passed for row in results)
    logger.info("sweep.checks.done", rows=len(results), failed=failed)
    return results


__all__ = [
    "PHASE_COLUMNS",
    "GridUnit",
    "grid_units",
    "hopping_matrix",
    "lattice_sum_battery",
    "phase_diagram",
    "run_checks",
    "run_units",
    "unit_propagators",
]
