"""Pairwise inter-individual entanglement.

Two individuals A and B of ``q = m*n`` qubits are simulated together on
``2q`` qubits: A on qubits ``[0, q)``, B on ``[q, 2q)``.  In entangled mode
the joint register starts as a product of Bell pairs between qubit ``j`` of A
and qubit ``j`` of B, replacing the individuals' own basis states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .config import EvolutionConfig
from .encoding import EncodingSpec, bits_to_index, decode_indices
from .evolution import EvolutionResult, IndependentEvaluator, run_evolution
from .fitness import FitnessRecord, ObjectiveFunction
from .genome import CircuitGenome, validate
from .rng import stream
from .simulator import (
    OutputDistribution,
    SimulationError,
    StateVector,
    apply_layer,
    basis_amplitudes,
    check_cap,
    draw,
    exact_distribution,
    marginal,
    shannon_entropy,
)


@dataclass(frozen=True)
class PairingPlan:
    pairs: tuple[tuple[int, int], ...]

    def partner(self, i: int) -> int:
        for a, b in self.pairs:
            if a == i:
                return b
            if b == i:
                return a
        raise KeyError(i)


def make_pairing(population_size: int, rng: np.random.Generator) -> PairingPlan:
    """Uniform random perfect matching of ``range(population_size)``."""
    if population_size % 2:
        raise ValueError("pairing needs an even population size")
    order = [int(i) for i in rng.permutation(population_size)]
    pairs = tuple(
        tuple(sorted((order[2 * t], order[2 * t + 1]))) for t in range(population_size // 2)
    )
    return PairingPlan(tuple(sorted(pairs)))


def bell_product_amplitudes(num_qubits: int) -> np.ndarray:
    """Amplitudes of the Bell-pair product across two ``num_qubits`` halves."""
    check_cap(2 * num_qubits)
    amps = np.zeros(1 << (2 * num_qubits), dtype=np.complex128)
    a = np.arange(1 << num_qubits, dtype=np.int64)
    amps[(a << num_qubits) | a] = 2.0 ** (-num_qubits / 2)
    return amps


def joint_initial_state(genome_a: CircuitGenome, genome_b: CircuitGenome) -> StateVector:
    if genome_a.num_qubits != genome_b.num_qubits:
        raise ValueError("paired genomes must act on the same number of qubits")
    q = genome_a.num_qubits
    return StateVector(2 * q, bell_product_amplitudes(q))


def product_initial_state(genome_a: CircuitGenome, genome_b: CircuitGenome) -> StateVector:
    q = genome_a.num_qubits
    check_cap(2 * q)
    index = (bits_to_index(genome_a.initial_state) << q) | bits_to_index(genome_b.initial_state)
    return StateVector(2 * q, basis_amplitudes(2 * q, index))


def entanglement_entropy(state: StateVector, num_qubits_a: int) -> float:
    """Von Neumann entropy (bits) across the cut after the first ``num_qubits_a`` qubits."""
    rest = state.num_qubits - num_qubits_a
    s = np.linalg.svd(state.amplitudes.reshape(1 << num_qubits_a, 1 << rest), compute_uv=False)
    p = s ** 2
    p = p[p > 1e-15]
    return float(-np.sum(p * np.log2(p)))


def run_joint(genome_a: CircuitGenome, genome_b: CircuitGenome, entangled: bool = True) -> StateVector:
    """Evolve the joint register; the shorter circuit is padded with identity layers."""
    for g in (genome_a, genome_b):
        violation = validate(g)
        if violation is not None:
            raise SimulationError(f"invalid genome: {violation}")
    init = joint_initial_state if entangled else product_initial_state
    state = init(genome_a, genome_b)
    q = genome_a.num_qubits
    amps = state.amplitudes
    for t in range(max(genome_a.depth, genome_b.depth)):
        if t < genome_a.depth:
            apply_layer(amps, 2 * q, genome_a.layers[t], 0)
        if t < genome_b.depth:
            apply_layer(amps, 2 * q, genome_b.layers[t], q)
    return state


@dataclass(frozen=True, eq=False)
class JointEvaluation:
    pair: tuple[int, int]
    draws: np.ndarray  # joint outcome index per shot
    record_a: FitnessRecord
    record_b: FitnessRecord

    def halves(self, num_qubits: int) -> tuple[np.ndarray, np.ndarray]:
        return self.draws >> num_qubits, self.draws & ((1 << num_qubits) - 1)


def _half_record(
    half_draws: np.ndarray,
    half_dist: OutputDistribution,
    objective: ObjectiveFunction,
    spec: EncodingSpec,
    shots: int,
) -> FitnessRecord:
    if half_dist.outcomes.size == 1:
        mean = decode_indices(half_dist.outcomes, spec)[0]
    else:
        mean = decode_indices(half_draws, spec).mean(axis=0)
    return FitnessRecord(tuple(mean), objective(mean), shots, shannon_entropy(half_dist))


def evaluate_pair(
    genome_a: CircuitGenome,
    genome_b: CircuitGenome,
    objective: ObjectiveFunction,
    spec: EncodingSpec,
    shots: int,
    rng: np.random.Generator,
    entangled: bool = True,
    pair: tuple[int, int] = (0, 1),
) -> JointEvaluation:
    """Sample the joint register; each shot's first half scores A, second half B."""
    q = spec.num_qubits
    if genome_a.num_qubits != q or genome_b.num_qubits != q:
        raise ValueError(f"paired genomes must have {q} qubits")
    joint = exact_distribution(run_joint(genome_a, genome_b, entangled))
    draws = draw(joint, shots, rng)
    dist_a = marginal(joint, range(q))
    dist_b = marginal(joint, range(q, 2 * q))
    return JointEvaluation(
        pair,
        draws,
        _half_record(draws >> q, dist_a, objective, spec, shots),
        _half_record(draws & ((1 << q) - 1), dist_b, objective, spec, shots),
    )


def evaluate_pair_exact(
    genome_a: CircuitGenome,
    genome_b: CircuitGenome,
    objective: ObjectiveFunction,
    spec: EncodingSpec,
    entangled: bool = True,
) -> tuple[FitnessRecord, FitnessRecord]:
    q = spec.num_qubits
    joint = exact_distribution(run_joint(genome_a, genome_b, entangled))
    out = []
    for half in (range(q), range(q, 2 * q)):
        dist = marginal(joint, half)
        mean = dist.probabilities @ decode_indices(dist.outcomes, spec)
        out.append(FitnessRecord(tuple(mean), objective(mean), 0, shannon_entropy(dist)))
    return out[0], out[1]


@dataclass
class PairwiseEvaluator:
    """Evaluates a population through a perfect matching of its slots.

    Pairs holding at least one stale individual are simulated jointly; cached
    records (elites) are never overwritten.  With ``entangled=False`` the
    joint state is a product, so each individual is scored on its own stream,
    reproducing the independent evaluator exactly.
    """

    config: EvolutionConfig
    objective: ObjectiveFunction
    spec: EncodingSpec
    entangled: bool = True

    def __post_init__(self) -> None:
        if self.config.population_size % 2:
            raise ValueError("pairwise evaluation needs an even population size")
        self._independent = IndependentEvaluator(self.config, self.objective, self.spec)
        self.last_pairing: PairingPlan | None = None

    def pairing(self, generation: int) -> PairingPlan:
        g = generation if self.config.pairing == "per-generation" else 0
        return make_pairing(self.config.population_size, stream(self.config.seed, "pairing", 0, g))

    def evaluate(self, genomes: Sequence[CircuitGenome], stale, generation: int) -> dict[int, FitnessRecord]:
        plan = self.pairing(generation)
        self.last_pairing = plan
        if not self.entangled:
            return self._independent.evaluate(genomes, stale, generation)
        stale = set(stale)
        out: dict[int, FitnessRecord] = {}
        for a, b in plan.pairs:
            if a not in stale and b not in stale:
                continue
            if self.config.fitness_mode == "exact":
                ra, rb = evaluate_pair_exact(genomes[a], genomes[b], self.objective, self.spec)
            else:
                rng = stream(self.config.seed, "pair", a, generation)
                ev = evaluate_pair(genomes[a], genomes[b], self.objective, self.spec,
                                   self.config.shots, rng, pair=(a, b))
                ra, rb = ev.record_a, ev.record_b
            if a in stale:
                out[a] = ra
            if b in stale:
                out[b] = rb
        return out


def run_entangled_evolution(
    config: EvolutionConfig,
    objective: ObjectiveFunction,
    spec: EncodingSpec | None = None,
    entangled: bool = True,
) -> EvolutionResult:
    mode = "pairwise" if entangled else "product"
    return run_evolution(config.replace(entanglement=mode), objective, spec)
