"""Command-line front end: ``qga <subcommand> CONFIG [options]``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import simulator
from .config import ConfigError, RunSettings, format_config, load_config
from .evolution import random_genome
from .experiments import CsvSink, ExperimentSpec, ResultTable, emit_json, iter_experiment
from .fitness import BENCHMARKS, get_objective, rastrigin
from .gateset import GateSet
from .genome import deserialize_population, serialize_population
from .oracle import reference_state


def _int_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _overrides(pairs: Sequence[str]) -> dict[str, str]:
    out = {}
    for item in pairs:
        if "=" not in item:
            raise ConfigError(item, "override must look like key=value")
        key, value = item.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _load(args) -> RunSettings:
    return load_config(args.config, _overrides(args.set))


def _execute(spec: ExperimentSpec, prefix: str, args) -> ResultTable:
    """Run ``spec`` and stream rows to ``<prefix>.csv``; keeps finished rows on Ctrl-C."""
    csv_path = Path(prefix + ".csv")
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    initial = None
    if getattr(args, "restore", None):
        initial = deserialize_population(Path(args.restore).read_text(), spec.config.gate_set)
    dump = getattr(args, "dump_population", False)
    table = ResultTable()
    with CsvSink(csv_path) as sink:
        try:
            runs = iter_experiment(spec, args.jobs, initial, keep_populations=dump)
            for index, (rows, population) in enumerate(runs):
                sink.write(rows)
                table.rows.extend(rows)
                if population is not None:
                    Path(f"{prefix}_population_{index}.txt").write_text(serialize_population(population))
        except KeyboardInterrupt:
            print(f"interrupted; {len(table)} rows kept in {csv_path}", file=sys.stderr)
            raise
    if args.json:
        emit_json(table, prefix + ".json")
    print(f"wrote {len(table)} rows to {csv_path}")
    return table


def cmd_run(args) -> int:
    settings = _load(args)
    spec = ExperimentSpec.from_settings(settings)
    _execute(spec, args.out or settings.output, args)
    return 0


def cmd_sweep_depth(args) -> int:
    settings = _load(args)
    spec = ExperimentSpec.from_settings(settings, sweep="depth", sweep_values=args.depths)
    _execute(spec, args.out or settings.output, args)
    return 0


def cmd_sweep_generations(args) -> int:
    settings = _load(args)
    spec = ExperimentSpec.from_settings(settings, sweep="generations", sweep_values=args.generations,
                                        rows=args.rows)
    _execute(spec, args.out or settings.output, args)
    return 0


def _compare(args, factor: str, arms: Sequence[str]) -> int:
    settings = _load(args)
    prefix = args.out or settings.output
    for arm in arms:
        config = settings.evolution.replace(**{factor: arm})
        spec = ExperimentSpec.from_settings(settings, config=config)
        _execute(spec, f"{prefix}_{arm}", args)
    return 0


def cmd_compare_gatesets(args) -> int:
    return _compare(args, "gate_set", [GateSet.CLASSICAL.value, GateSet.QUANTUM.value])


def cmd_compare_entanglement(args) -> int:
    return _compare(args, "entanglement", ["none", "pairwise"])


def cmd_validate_config(args) -> int:
    settings = _load(args)
    ExperimentSpec.from_settings(settings)
    sys.stdout.write(format_config(settings))
    return 0


def _check(label: str, ok: bool) -> bool:
    print(f"{'ok  ' if ok else 'FAIL'} {label}")
    return ok


def cmd_selftest(args) -> int:
    rng = np.random.default_rng(args.seed)
    results = []
    for trial in range(args.trials):
        q = int(rng.integers(1, 6))
        genome = random_genome(q, int(rng.integers(1, 6)), GateSet.QUANTUM, rng)
        expected = reference_state(genome)
        for backend in ("python", "compiled"):
            if backend == "compiled" and not simulator.compiled_available():
                continue
            previous = simulator.BACKEND
            simulator.set_backend(backend)
            try:
                got = simulator.run_circuit(genome).amplitudes
            finally:
                simulator.set_backend(previous)
            results.append(_check(f"statevector vs full unitary ({backend}, trial {trial}, q={q})",
                                  np.allclose(got, expected, atol=1e-10)))
    for name, (_, (lo, hi), opt) in BENCHMARKS.items():
        objective = get_objective(name, 2)
        results.append(_check(f"{name} is 0 at its optimum", abs(objective(objective.optimum())) < 1e-12))
    results.append(_check("rastrigin(1, 0) == 1", abs(rastrigin([1.0, 0.0]) - 1.0) < 1e-12))
    print(f"backend: {simulator.BACKEND}")
    return 0 if all(results) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qga", description="Gate-based quantum genetic algorithm experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def with_config(name: str, help_text: str, func) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", help="flat key = value config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
        p.add_argument("--out", help="output prefix (default: the config's output key)")
        p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--json", action="store_true", help="also write <prefix>.json")
        p.set_defaults(func=func)
        return p

    run = with_config("run", "run R seeded repetitions", cmd_run)
    run.add_argument("--dump-population", action="store_true",
                     help="write each repetition's final population to <prefix>_population_<r>.txt")
    run.add_argument("--restore", metavar="FILE", help="start every repetition from a dumped population")

    depth = with_config("sweep-depth", "sweep the fixed circuit depth", cmd_sweep_depth)
    depth.add_argument("--depths", type=_int_list, default=(1, 2, 3, 4, 5, 6, 7, 8))

    gens = with_config("sweep-generations", "sweep the generation budget", cmd_sweep_generations)
    gens.add_argument("--generations", type=_int_list, default=(10, 20, 50, 100))
    gens.add_argument("--rows", choices=("all", "final"), default="final",
                      help="emit every generation or only the last one per budget")

    with_config("compare-gatesets", "classical vs quantum gate set", cmd_compare_gatesets)
    with_config("compare-entanglement", "independent vs pairwise-entangled evaluation",
                cmd_compare_entanglement)
    with_config("validate-config", "parse and print the effective configuration", cmd_validate_config)

    selftest = sub.add_parser("selftest", help="check the simulator against a reference construction")
    selftest.add_argument("--trials", type=int, default=20)
    selftest.add_argument("--seed", type=int, default=0)
    selftest.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error in {exc.key}: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
