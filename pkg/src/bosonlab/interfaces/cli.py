"""Command line interface for bosonlab."""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from rich.console import Console

from bosonlab.core.bosonic import exact_distribution, sample_exact
from bosonlab.core.bounds import tvd
from bosonlab.core.classical import markov_matrix, sample_dp_batch
from bosonlab.core.compiler import (
    circuit_to_schedule,
    clements_decompose,
    compile_on_lattice,
    depth_report,
    reconstruct,
    verify_schedule,
)
from bosonlab.core.dynamics import evolve, validate_schedule
from bosonlab.core.lattice import initial_configuration
from bosonlab.core.models import Configuration, Propagator
from bosonlab.experiments.config import (
    ExperimentConfig,
    load_experiment_config,
    load_matrix_file,
    load_schedule_file,
    read_input,
)
from bosonlab.experiments.sweeps import PHASE_COLUMNS, grid_units, phase_diagram, run_checks, unit_propagators
from bosonlab.monitoring.logging import configure_logging, get_logger
from bosonlab.monitoring.metrics import RunRecorder
from bosonlab.storage.formats import (
    circuit_to_text,
    distribution_from_csv,
    lattice_from_text,
    matrix_to_text,
    report_to_csv,
    samples_to_text,
    schedule_to_text,
    table_to_csv,
)
from bosonlab.storage.results import ResultWriter
from bosonlab.utils.config import Config, get_config
from bosonlab.utils.display import check_table, format_duration, format_float, print_summary
from bosonlab.utils.exceptions import BosonLabError, ScheduleViolationError, ValidationError

logger = get_logger(__name__)

console = Console(stderr=True, soft_wrap=True)

DEPTH_COLUMNS = ("m", "layers", "two_mode_gates", "sequential_depth", "hopping_time", "total_time", "t_hard_scale")


def _experiment(args: argparse.Namespace) -> ExperimentConfig:
    if not args.config:
        raise ValidationError(f"{args.command} needs --config <file>")
    return load_experiment_config(args.config).with_overrides(seed=args.seed, out=args.out, threads=args.threads)


def _writer(args: argparse.Namespace, config: Optional[ExperimentConfig] = None) -> ResultWriter:
    target = args.out or (config.out if config is not None else None)
    return ResultWriter(target)


def _single_point(config: ExperimentConfig) -> tuple[Propagator, Configuration]:
    """The propagator and input of a config that describes exactly one grid point."""
    units = grid_units(config, config.check_guards())
    props = unit_propagators(config, units[0]) if len(units) == 1 else []
    if len(units) != 1 or len(props) != 1:
        raise ValidationError("config must describe a single point: one lattice, one seed and one time")
    return props[0], initial_configuration(units[0].spec)


def _unitary_propagator(path: Path, settings: Config) -> Propagator:
    R = Propagator(load_matrix_file(path))
    error = R.unitarity_error()
    if error > settings.tolerance("markov_input_unitarity"):
        raise ValidationError(f"{path} is not unitary: max |R†R − I| = {error:.3e}")
    return R


def _written(writer: ResultWriter) -> str:
    return ", ".join(str(p) for p in writer.written) or "stdout"


def command_phase_diagram(args: argparse.Namespace, settings: Config, recorder: RunRecorder) -> int:
    config = _experiment(args)
    rows = phase_diagram(config, settings, recorder)
    writer = _writer(args, config)
    with recorder.stage("write", items=len(rows)):
        writer.write(table_to_csv(PHASE_COLUMNS, rows))
    tvds = [row["tvd"] for row in rows]
    print_summary(
        console,
        "Phase diagram",
        [
            ("Rows", str(len(rows))),
            ("Max TVD", format_float(max(tvds, default=math.nan))),
            ("Output", _written(writer)),
            ("Wall time", format_duration(recorder.summary()["total_seconds"])),
        ],
    )
    return 0


def command_check(args: argparse.Namespace, settings: Config, recorder: RunRecorder) -> int:
    config = _experiment(args)
    results = run_checks(config, settings, recorder)
    writer = _writer(args, config)
    with recorder.stage("write", items=len(results)):
        writer.write(report_to_csv(results))
    failed = sum(not row.passed for row in results)
    console.print(check_table(results))
    print_summary(
        console,
        "Checks",
        [
            ("Rows", str(len(results))),
            ("Passed", f"[green]{len(results) - failed}[/]"),
            ("Failed", f"[red]{failed}[/]" if failed else "0"),
            ("Output", _written(writer)),
            ("Wall time", format_duration(recorder.summary()["total_seconds"])),
        ],
    )
    return 0 if failed == 0 else 1


def command_compile(args: argparse.Namespace, settings: Config, recorder: RunRecorder) -> int:
    tol = settings.tolerance("unitary")
    max_modes = settings.guard("compile_max_modes")
    U = load_matrix_file(args.unitary)
    with recorder.stage("decompose", items=U.shape[0]):
        if args.lattice:
            spec = lattice_from_text(read_input(args.lattice, "lattice"))
            circuit, schedule, path = compile_on_lattice(U, spec, tol, max_modes)
            n, beta, d = spec.n, spec.beta, spec.d
            relabel = np.asarray(path)
            error = float(np.max(np.abs(reconstruct(circuit) - U[np.ix_(relabel, relabel)])))
            report = validate_schedule(schedule, spec)
            if not report.ok:
                raise ScheduleViolationError(f"compiled schedule breaks the lattice: {len(report)} violation(s)", report.violations)
            schedule_error = float(np.max(np.abs(evolve(schedule).R - U)))
        else:
            circuit = clements_decompose(U, tol, max_modes)
            schedule = circuit_to_schedule(circuit)
            n, beta, d = args.n, args.beta, 1
            error = float(np.max(np.abs(reconstruct(circuit) - U)))
            schedule_error = verify_schedule(circuit, schedule)
    depth = depth_report(circuit, n, beta, d, schedule)
    logger.info("compile.reconstruct", m=circuit.m, gates=circuit.gate_count, error=error, schedule_error=schedule_error)

    writer = ResultWriter(args.out)
    writer.write(circuit_to_text(circuit))
    writer.write(schedule_to_text(schedule), suffix=".schedule")
    writer.write(table_to_csv(DEPTH_COLUMNS, [depth._asdict()]), suffix=".depth.csv")
    print_summary(
        console,
        "Compile",
        [
            ("Modes", str(circuit.m)),
            ("Gates", str(circuit.gate_count)),
            ("Layers", str(circuit.depth)),
            ("Hopping time", format_float(depth.hopping_time)),
            ("Reconstruction error", f"{error:.3e}"),
            ("Schedule error", f"{schedule_error:.3e}"),
            ("Output", _written(writer)),
        ],
    )
    return 0


def command_evolve(args: argparse.Namespace, settings: Config, recorder: RunRecorder) -> int:
    config: Optional[ExperimentConfig] = None
    with recorder.stage("evolve"):
        if args.schedule:
            sched = load_schedule_file(args.schedule)
            if args.lattice:
                spec = lattice_from_text(read_input(args.lattice, "lattice"))
                report = validate_schedule(sched, spec, settings.tolerance("hermitian"))
                if not report.ok:
                    raise ScheduleViolationError(f"{args.schedule}: {len(report)} violation(s)", report.violations)
            R = evolve(sched, settings.tolerance("hermitian"))
        else:
            config = _experiment(args)
            R, _ = _single_point(config)
    writer = _writer(args, config)
    writer.write(matrix_to_text(R.R))
    print_summary(
        console,
        "Evolve",
        [
            ("Modes", str(R.m)),
            ("Time", format_float(R.t)),
            ("Unitarity error", f"{R.unitarity_error():.3e}"),
            ("Output", _written(writer)),
        ],
    )
    return 0


def command_sample(args: argparse.Namespace, settings: Config, recorder: RunRecorder) -> int:
    config: Optional[ExperimentConfig] = None
    if args.propagator:
        if not args.input:
            raise ValidationError("sampling from a propagator file needs --input, e.g. 1-0-1-0")
        R = _unitary_propagator(args.propagator, settings)
        r = Configuration.parse(args.input)
    else:
        config = _experiment(args)
        R, r = _single_point(config)
    seed = args.seed if args.seed is not None else (config.seeds[0] if config is not None else 0)
    count = args.count if args.count is not None else int(settings.sampling.count)
    threads = settings.threads(args.threads)

    with recorder.stage(f"sample.{args.sampler}", items=count):
        if args.sampler == "exact":
            dist = exact_distribution(
                R,
                r,
                threads=threads,
                enumeration_limit=settings.guard("enumeration_limit"),
                max_particles=settings.guard("max_particles"),
            )
            samples = sample_exact(dist, seed, count)
        else:
            P = markov_matrix(R, settings.tolerance("markov_input_unitarity"))
            samples = sample_dp_batch(P, r, seed, count)
    writer = _writer(args, config)
    writer.write(samples_to_text(samples))
    print_summary(
        console,
        "Sample",
        [
            ("Sampler", args.sampler),
            ("Samples", str(len(samples))),
            ("Seed", str(seed)),
            ("Output", _written(writer)),
        ],
    )
    return 0


def command_tvd(args: argparse.Namespace, settings: Config, recorder: RunRecorder) -> int:
    p = distribution_from_csv(read_input(args.first, "distribution"))
    q = distribution_from_csv(read_input(args.second, "distribution"))
    value = tvd(p, q)
    ResultWriter(args.out).write(f"{value!r}\n")
    return 0


COMMANDS: dict[str, Callable[[argparse.Namespace, Config, RunRecorder], int]] = {
    "phase-diagram": command_phase_diagram,
    "check": command_check,
    "compile": command_compile,
    "evolve": command_evolve,
    "sample": command_sample,
    "tvd": command_tvd,
}


def _common(parser: argparse.ArgumentParser, config: bool = True) -> None:
    if config:
        parser.add_argument("--config", type=Path, help="Experiment config file (key: value lines)")
        parser.add_argument("--seed", type=int, help="Replace the config's seed list with this seed")
        parser.add_argument("--threads", type=int, help="Worker threads (default: physical cores)")
    parser.add_argument("--out", type=Path, help="Output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    """Construct the CLI argument parser."""

    parser = argparse.ArgumentParser(prog="bosonlab", description="Free-boson sampling laboratory")
    parser.add_argument("-v", "--verbose", action="store_true", help="INFO logging and full tracebacks")
    subparsers = parser.add_subparsers(dest="command", required=True)

    phase = subparsers.add_parser("phase-diagram", help="Sweep TVD between exact and classical sampling")
    _common(phase)

    check = subparsers.add_parser("check", help="Run the bound-check batteries; exit 1 if any row fails")
    _common(check)

    comp = subparsers.add_parser("compile", help="Compile a unitary into a nearest-neighbour hopping schedule")
    comp.add_argument("unitary", type=Path, help="Matrix file holding the target unitary")
    comp.add_argument("--out", type=Path, required=True, help="Circuit file; .schedule and .depth.csv are written beside it")
    comp.add_argument("--lattice", type=Path, help="Lattice file; compile along a snake path through its sites")
    comp.add_argument("--n", type=int, default=1, help="Boson count for the hardness time scale (chain mode)")
    comp.add_argument("--beta", type=float, default=1.0, help="Sparsity exponent for the hardness time scale (chain mode)")

    evo = subparsers.add_parser("evolve", help="Evolve a schedule file (or a single-point config) to R")
    evo.add_argument("schedule", nargs="?", type=Path, help="Schedule file")
    evo.add_argument("--lattice", type=Path, help="Lattice file to validate the schedule against")
    _common(evo)

    smp = subparsers.add_parser("sample", help="Draw output configurations")
    smp.add_argument("propagator", nargs="?", type=Path, help="Matrix file holding R (else use --config)")
    smp.add_argument("--input", help="Input occupation, e.g. 1-0-1-0 (with a propagator file)")
    smp.add_argument("--sampler", choices=("exact", "dp"), default="exact")
    smp.add_argument("--count", type=int, help="Number of samples (default from settings)")
    _common(smp)

    dist = subparsers.add_parser("tvd", help="Total variation distance between two distribution CSVs")
    dist.add_argument("first", type=Path)
    dist.add_argument("second", type=Path)
    _common(dist, config=False)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """Main entry point for the CLI."""

    parser = build_parser()
    args = parser.parse_args(argv)

    settings = get_config()
    configure_logging("INFO" if args.verbose else settings.logging.get("level"), settings.logging.get("log_dir"), force=True)
    log_dir = settings.logging.get("log_dir")
    recorder = RunRecorder(args.command, Path(log_dir).expanduser() if log_dir else None)
    started = time.perf_counter()

    try:
        code = COMMANDS[args.command](args, settings, recorder)
    except BosonLabError as exc:
        if args.verbose:
            console.print_exception()
        print(f"error: {exc}", file=sys.stderr)
        logger.info("cli.failed", command=args.command, exit_code=exc.exit_code, error=type(exc).__name__)
        return exc.exit_code
    finally:
        recorder.flush()
    logger.info("cli.done", command=args.command, exit_code=code, seconds=time.perf_counter() - started)
    return code


if __name__ == "__main__":  # pragma: no cover - manual execution
    sys.exit(main())
