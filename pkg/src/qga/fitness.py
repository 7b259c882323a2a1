"""Benchmark objectives and sampling-based fitness of circuit genomes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .encoding import EncodingSpec, VariableDomain, decode_indices
from .genome import CircuitGenome
from .simulator import (
    OutputDistribution,
    draw,
    expected_decoded_output,
    output_distribution,
    shannon_entropy,
)


def rastrigin(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def sphere(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(x * x))


def ackley(x, a: float = 20.0, b: float = 0.2, c: float = 2.0 * np.pi) -> float:
    x = np.asarray(x, dtype=float)
    d = x.size
    s1 = np.sqrt(np.sum(x * x) / d)
    s2 = np.sum(np.cos(c * x)) / d
    return float(-a * np.exp(-b * s1) - np.exp(s2) + a + np.e)


def griewank(x) -> float:
    x = np.asarray(x, dtype=float)
    i = np.arange(1, x.size + 1)
    return float(1.0 + np.sum(x * x) / 4000.0 - np.prod(np.cos(x / np.sqrt(i))))


def rosenbrock(x, a: float = 1.0, b: float = 100.0) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(b * (x[1:] - x[:-1] ** 2) ** 2 + (a - x[:-1]) ** 2))


# name -> (function, standard box, global optimum coordinate)
BENCHMARKS: dict[str, tuple[Callable, tuple[float, float], float]] = {
    "Rastrigin": (rastrigin, (-5.12, 5.12), 0.0),
    "Sphere": (sphere, (-5.12, 5.12), 0.0),
    "Ackley": (ackley, (-32.768, 32.768), 0.0),
    "Griewank": (griewank, (-600.0, 600.0), 0.0),
    "Rosenbrock": (rosenbrock, (-2.048, 2.048), 1.0),
}


@dataclass(frozen=True)
class ObjectiveFunction:
    name: str
    num_variables: int
    domains: tuple[VariableDomain, ...]
    func: Callable = field(repr=False, compare=False)

    def __call__(self, x) -> float:
        return self.func(x)

    def optimum(self) -> np.ndarray:
        return np.full(self.num_variables, BENCHMARKS[self.name][2])

    def encoding(self, qubits_per_variable: int) -> EncodingSpec:
        return EncodingSpec(self.num_variables, qubits_per_variable, self.domains)


def benchmark_names() -> list[str]:
    return list(BENCHMARKS)


def get_objective(name: str, num_variables: int = 2) -> ObjectiveFunction:
    lookup = {k.lower(): k for k in BENCHMARKS}
    key = lookup.get(name.lower())
    if key is None:
        raise KeyError(f"unknown benchmark {name!r}; choose from {', '.join(BENCHMARKS)}")
    if key == "Rosenbrock" and num_variables < 2:
        raise ValueError("Rosenbrock needs at least two variables")
    func, (lo, hi), _ = BENCHMARKS[key]
    domains = tuple(VariableDomain(lo, hi) for _ in range(num_variables))
    return ObjectiveFunction(key, num_variables, domains, func)


@dataclass(frozen=True)
class FitnessRecord:
    mean_vector: tuple[float, ...]
    fitness: float
    shots_used: int  # 0 marks an exact (unsampled) evaluation
    entropy: float | None = None  # None: not computed

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean_vector", tuple(float(v) for v in self.mean_vector))


def _check_dims(num_qubits: int, spec: EncodingSpec) -> None:
    if num_qubits != spec.num_qubits:
        raise ValueError(f"genome has {num_qubits} qubits, encoding needs {spec.num_qubits}")


def fitness_from_distribution(
    dist: OutputDistribution,
    objective: ObjectiveFunction,
    spec: EncodingSpec,
    shots: int,
    rng: np.random.Generator,
    with_entropy: bool = True,
) -> FitnessRecord:
    """Sample ``shots`` outcomes, decode each shot and apply the objective to the mean."""
    _check_dims(dist.num_qubits, spec)
    draws = draw(dist, shots, rng)
    if dist.outcomes.size == 1:
        # a deterministic circuit must reproduce its decoded point bit-exactly
        mean = decode_indices(dist.outcomes, spec)[0]
    else:
        mean = decode_indices(draws, spec).mean(axis=0)
    h = shannon_entropy(dist) if with_entropy else None
    return FitnessRecord(tuple(mean), objective(mean), shots, h)


def evaluate_fitness(
    genome: CircuitGenome,
    objective: ObjectiveFunction,
    spec: EncodingSpec,
    shots: int,
    rng: np.random.Generator,
    with_entropy: bool = True,
) -> FitnessRecord:
    _check_dims(genome.num_qubits, spec)
    if shots < 1:
        raise ValueError("shots must be >= 1")
    return fitness_from_distribution(
        output_distribution(genome), objective, spec, shots, rng, with_entropy
    )


def evaluate_fitness_exact(
    genome: CircuitGenome, objective: ObjectiveFunction, spec: EncodingSpec
) -> FitnessRecord:
    _check_dims(genome.num_qubits, spec)
    dist = output_distribution(genome)
    mean = expected_decoded_output(dist, spec)
    return FitnessRecord(tuple(mean), objective(mean), 0, shannon_entropy(dist))
