from __future__ import annotations

import math

import numpy as np
import pytest

from qga.encoding import decode_indices
from qga.evolution import random_genome
from qga.fitness import (
    BENCHMARKS,
    ackley,
    evaluate_fitness,
    evaluate_fitness_exact,
    get_objective,
    griewank,
    rastrigin,
    rosenbrock,
    sphere,
)
from qga.gateset import Gate, GateSet
from qga.genome import CircuitGenome, Instruction, Layer
from qga.simulator import output_distribution


@pytest.mark.parametrize("name, m", [
    (name, m) for name in BENCHMARKS for m in (1, 2, 5) if not (name == "Rosenbrock" and m == 1)
])
def test_zero_at_optimum(name, m):
    obj = get_objective(name, m)
    assert abs(obj(obj.optimum())) < 1e-12


# reference values worked out by hand from the closed forms
@pytest.mark.parametrize("func, x, expected", [
    (rastrigin, [1.0, 0.0], 1.0),
    (rastrigin, [0.5, 0.5], 2 * (0.25 + 10.0 + 10.0)),
    (sphere, [1.0, 2.0], 5.0),
    (ackley, [1.0, 1.0], 20.0 - 20.0 * math.exp(-0.2)),
    (griewank, [math.pi, 0.0], 1.0 + math.pi ** 2 / 4000.0 - math.cos(math.pi)),
    (rosenbrock, [0.0, 0.0], 1.0),
    (rosenbrock, [1.0, 2.0], 100.0),
])
def test_reference_values(func, x, expected):
    assert func(x) == pytest.approx(expected, abs=1e-12)


def test_rastrigin_origin_exact():
    assert rastrigin([0.0, 0.0]) == 0.0


def test_objective_lookup():
    obj = get_objective("rAsTrIgIn", 3)
    assert obj.name == "Rastrigin" and obj.num_variables == 3
    assert obj.domains[0].lower == -5.12
    assert get_objective("ackley").domains[1].upper == 32.768
    with pytest.raises(KeyError):
        get_objective("Himmelblau")
    with pytest.raises(ValueError):
        get_objective("Rosenbrock", 1)


def _deterministic(bits):
    q = len(bits)
    return CircuitGenome(q, (Layer((Instruction(Gate.I, (0,)),)),), bits)


def test_deterministic_circuit_scores_its_decoded_point():
    obj = get_objective("Rastrigin", 2)
    spec = obj.encoding(4)
    bits = (0, 1, 1, 0, 1, 1, 1, 1)
    rec = evaluate_fitness(_deterministic(bits), obj, spec, 17, np.random.default_rng(0))
    point = decode_indices(np.array([int("".join(map(str, bits)), 2)]), spec)[0]
    assert rec.mean_vector == tuple(point)
    assert rec.fitness == obj(point)
    assert rec.shots_used == 17 and rec.entropy == 0.0


def test_sampled_mean_approaches_exact():
    obj = get_objective("Sphere", 2)
    spec = obj.encoding(3)
    g = random_genome(6, 3, GateSet.QUANTUM, np.random.default_rng(4))
    exact = evaluate_fitness_exact(g, obj, spec)
    sampled = evaluate_fitness(g, obj, spec, 200_000, np.random.default_rng(5))
    np.testing.assert_allclose(sampled.mean_vector, exact.mean_vector, atol=0.05)
    assert exact.shots_used == 0
    assert exact.entropy == pytest.approx(sampled.entropy)


def test_same_stream_same_record():
    obj = get_objective("Ackley", 2)
    spec = obj.encoding(4)
    g = random_genome(8, 4, GateSet.QUANTUM, np.random.default_rng(1))
    a = evaluate_fitness(g, obj, spec, 64, np.random.default_rng(11))
    b = evaluate_fitness(g, obj, spec, 64, np.random.default_rng(11))
    assert a == b


def test_entropy_can_be_skipped():
    obj = get_objective("Sphere", 1)
    g = random_genome(4, 2, GateSet.QUANTUM, np.random.default_rng(0))
    rec = evaluate_fitness(g, obj, obj.encoding(4), 8, np.random.default_rng(0), with_entropy=False)
    assert rec.entropy is None


def test_dimension_and_shot_checks():
    obj = get_objective("Sphere", 2)
    with pytest.raises(ValueError):
        evaluate_fitness(_deterministic((0, 0, 0)), obj, obj.encoding(4), 8, np.random.default_rng(0))
    with pytest.raises(ValueError):
        evaluate_fitness(_deterministic((0,) * 8), obj, obj.encoding(4), 0, np.random.default_rng(0))


def test_exact_uses_distribution_mean():
    obj = get_objective("Sphere", 1)
    spec = obj.encoding(2)
    g = CircuitGenome(2, (Layer((Instruction(Gate.H, (0,)),)),), (0, 0))  # z in {0, 2}
    rec = evaluate_fitness_exact(g, obj, spec)
    lo, w = -5.12, 10.24
    expected = 0.5 * lo + 0.5 * (lo + 2 / 3 * w)
    assert rec.mean_vector[0] == pytest.approx(expected)
    assert rec.entropy == pytest.approx(1.0)
    assert output_distribution(g).outcomes.tolist() == [0, 2]
