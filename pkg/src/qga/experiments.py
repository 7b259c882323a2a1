"""Batch runner: seeded repetitions, parameter sweeps and CSV/JSON tables."""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Iterator, Sequence

from .config import EvolutionConfig, RunSettings
from .evolution import EvolutionResult, GenerationRecord, run_evolution
from .fitness import get_objective
from .genome import CircuitGenome

CSV_HEADER = ("sweep", "generation", "rep", "best_fitness", "mean_fitness",
              "best_entropy", "depth_hist", "elapsed_ms")


@dataclass(frozen=True)
class ExperimentSpec:
    objective: str
    config: EvolutionConfig
    repetitions: int = 1
    sweep: str = "none"                  # none | depth | generations
    sweep_values: tuple[int, ...] = ()
    num_variables: int = 2
    rows: str = "all"                    # all generations, or only the final one
    timing: bool = False
    output: str = "qga_out"

    def __post_init__(self) -> None:
        object.__setattr__(self, "sweep_values", tuple(int(v) for v in self.sweep_values))
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.sweep not in ("none", "depth", "generations"):
            raise ValueError(f"unknown sweep axis {self.sweep!r}")
        if self.sweep != "none" and not self.sweep_values:
            raise ValueError("a sweep needs at least one value")
        if any(v < 1 for v in self.sweep_values):
            raise ValueError("sweep values must be positive")
        if self.rows not in ("all", "final"):
            raise ValueError(f"rows must be 'all' or 'final', got {self.rows!r}")
        get_objective(self.objective, self.num_variables)

    @classmethod
    def from_settings(cls, settings: RunSettings, **changes) -> ExperimentSpec:
        base = dict(objective=settings.objective, config=settings.evolution,
                    repetitions=settings.repetitions, num_variables=settings.num_variables,
                    timing=settings.timing, output=settings.output)
        base.update(changes)
        return cls(**base)

    def points(self) -> tuple[int, ...]:
        return self.sweep_values if self.sweep != "none" else (0,)


@dataclass(frozen=True)
class ResultRow:
    sweep: int
    generation: int
    rep: int
    best_fitness: float
    mean_fitness: float
    best_entropy: float
    depth_hist: str
    elapsed_ms: int


@dataclass
class ResultTable:
    rows: list[ResultRow] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def __eq__(self, other) -> bool:
        return isinstance(other, ResultTable) and self.rows == other.rows

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.rows]


def format_depth_hist(hist: Sequence[tuple[int, int]]) -> str:
    return ";".join(f"{d}:{c}" for d, c in hist)


def parse_depth_hist(text: str) -> dict[int, int]:
    if not text:
        return {}
    return {int(d): int(c) for d, c in (item.split(":") for item in text.split(";"))}


def _row(point: int, rep: int, rec: GenerationRecord, elapsed_ms: int) -> ResultRow:
    return ResultRow(point, rec.generation, rep, float(rec.best_fitness), float(rec.mean_fitness),
                     float(rec.best_entropy), format_depth_hist(rec.depth_histogram), elapsed_ms)


@dataclass(frozen=True)
class _Task:
    spec: ExperimentSpec
    point: int
    rep: int
    initial: tuple[CircuitGenome, ...] | None = None
    keep_population: bool = False


def _task_config(spec: ExperimentSpec, point: int, rep: int) -> EvolutionConfig:
    cfg = spec.config.replace(seed=spec.config.seed + rep)
    if spec.sweep == "depth":
        cfg = cfg.replace(depth=point, depth_mode="fixed")
    elif spec.sweep == "generations":
        cfg = cfg.replace(max_generations=point)
    return cfg


def _run_task(task: _Task) -> tuple[list[ResultRow], list[CircuitGenome] | None]:
    spec = task.spec
    cfg = _task_config(spec, task.point, task.rep)
    objective = get_objective(spec.objective, spec.num_variables)
    start = time.perf_counter()
    result: EvolutionResult = run_evolution(cfg, objective, initial_population=task.initial)
    elapsed = int(round((time.perf_counter() - start) * 1000)) if spec.timing else 0
    records = result.records if spec.rows == "all" else result.records[-1:]
    rows = [_row(task.point, task.rep, rec, elapsed) for rec in records]
    return rows, (list(result.population.individuals) if task.keep_population else None)


def iter_experiment(
    spec: ExperimentSpec,
    jobs: int = 1,
    initial_population: Sequence[CircuitGenome] | None = None,
    keep_populations: bool = False,
) -> Iterator[tuple[list[ResultRow], list[CircuitGenome] | None]]:
    """Yield each run's rows in (sweep, rep) order, whatever ``jobs`` is."""
    initial = tuple(initial_population) if initial_population is not None else None
    tasks = [_Task(spec, p, r, initial, keep_populations)
             for p in spec.points() for r in range(spec.repetitions)]
    if jobs <= 1:
        for t in tasks:
            yield _run_task(t)
        return
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        yield from pool.map(_run_task, tasks)


def run_experiment(spec: ExperimentSpec, jobs: int = 1) -> ResultTable:
    table = ResultTable()
    for rows, _ in iter_experiment(spec, jobs):
        table.rows.extend(rows)
    return table


def _fmt(value) -> str:
    return format(value, ".17g") if isinstance(value, float) else str(value)


class CsvSink:
    """Writes rows as they arrive so an interrupted run keeps its finished part."""

    def __init__(self, path: str | Path):
        self._fh = open(path, "w", newline="")
        self._writer = csv.writer(self._fh, lineterminator="\n")
        self._writer.writerow(CSV_HEADER)

    def write(self, rows: Sequence[ResultRow]) -> None:
        for r in rows:
            self._writer.writerow([_fmt(getattr(r, name)) for name in CSV_HEADER])
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> CsvSink:
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def emit_csv(table: ResultTable, path: str | Path) -> None:
    with CsvSink(path) as sink:
        sink.write(table.rows)


def read_csv(path: str | Path) -> ResultTable:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        kinds = {f.name: f.type for f in fields(ResultRow)}
        rows = []
        for raw in reader:
            values = {}
            for k, v in raw.items():
                values[k] = int(v) if kinds[k] == "int" else float(v) if kinds[k] == "float" else v
            rows.append(ResultRow(**values))
    return ResultTable(rows)


def emit_json(table: ResultTable, path: str | Path) -> None:
    payload = {"columns": list(CSV_HEADER), "rows": [asdict(r) for r in table.rows]}
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def read_json(path: str | Path) -> ResultTable:
    payload = json.loads(Path(path).read_text())
    return ResultTable([ResultRow(**r) for r in payload["rows"]])
