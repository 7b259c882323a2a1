"""Population initialization, genetic operators and the generation loop."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Protocol, Sequence

import numpy as np

from .config import EvolutionConfig
from .encoding import EncodingSpec
from .fitness import FitnessRecord, ObjectiveFunction, evaluate_fitness, evaluate_fitness_exact
from .gateset import Gate, GateSet, members
from .genome import CircuitGenome, Instruction, Layer, validate
from .rng import stream
from .simulator import output_distribution, shannon_entropy


def _pick(rng: np.random.Generator, options: Sequence):
    return options[int(rng.integers(len(options)))]


# --- initialization -------------------------------------------------------

def random_basis_state(num_qubits: int, rng: np.random.Generator) -> tuple[int, ...]:
    return tuple(int(b) for b in rng.integers(0, 2, size=num_qubits))


def fill_random_layer(num_qubits: int, gate_set: GateSet, rng: np.random.Generator) -> Layer:
    """Visit qubits in random order and put a uniformly drawn gate on every free one.

    Extra operands of multi-qubit gates come from the still-free qubits; when
    too few remain a uniform one-qubit gate is used instead.
    """
    gates = members(gate_set)
    singles = members(gate_set, 1)
    occupied = [False] * num_qubits
    out = []
    for q in rng.permutation(num_qubits):
        q = int(q)
        if occupied[q]:
            continue
        gate = _pick(rng, gates)
        extras: tuple[int, ...] = ()
        if gate.arity > 1:
            free = [p for p in range(num_qubits) if not occupied[p] and p != q]
            if len(free) < gate.arity - 1:
                gate = _pick(rng, singles)
            else:
                extras = tuple(int(p) for p in rng.choice(free, size=gate.arity - 1, replace=False))
        ins = Instruction(gate, (q,) + extras)
        for p in ins.qubits:
            occupied[p] = True
        out.append(ins)
    return Layer(tuple(out))


def hadamard_layer(num_qubits: int, rng: np.random.Generator) -> Layer:
    k = int(rng.integers(1, num_qubits + 1))
    chosen = rng.choice(num_qubits, size=k, replace=False)
    return Layer(tuple(Instruction(Gate.H, (int(q),)) for q in chosen))


def random_genome(num_qubits: int, depth: int, gate_set: GateSet, rng: np.random.Generator) -> CircuitGenome:
    initial = random_basis_state(num_qubits, rng)
    layers = []
    if GateSet(gate_set) is GateSet.QUANTUM:
        layers.append(hadamard_layer(num_qubits, rng))
    while len(layers) < depth:
        layers.append(fill_random_layer(num_qubits, gate_set, rng))
    return CircuitGenome(num_qubits, tuple(layers), initial)


@dataclass
class Population:
    individuals: list[CircuitGenome]
    records: list[FitnessRecord | None]
    generation: int = 0

    def __post_init__(self) -> None:
        if len(self.individuals) != len(self.records):
            raise ValueError("individuals and records must be aligned")

    def __len__(self) -> int:
        return len(self.individuals)

    @property
    def fitness(self) -> np.ndarray:
        return np.array([r.fitness for r in self.records])

    def best_index(self) -> int:
        return int(np.argmin(self.fitness))


def init_population(
    config: EvolutionConfig, spec: EncodingSpec, rng: np.random.Generator | None = None
) -> Population:
    """Unevaluated random population; each individual uses its own stream unless
    a single ``rng`` is supplied."""
    genomes = []
    for i in range(config.population_size):
        r = rng if rng is not None else stream(config.seed, "init", i, 0)
        if config.variable_depth:
            depth = int(r.integers(config.d_min, config.d_max + 1))
        else:
            depth = config.depth
        genomes.append(random_genome(spec.num_qubits, depth, config.gate_set, r))
    return Population(genomes, [None] * len(genomes), 0)


def restore_population(
    genomes: Sequence[CircuitGenome], config: EvolutionConfig, spec: EncodingSpec
) -> Population:
    """Unevaluated population from existing genomes, checked against ``config``."""
    genomes = list(genomes)
    if len(genomes) != config.population_size:
        raise ValueError(f"restored population has {len(genomes)} genomes, "
                         f"population_size is {config.population_size}")
    allowed = set(members(config.gate_set))
    for i, g in enumerate(genomes):
        if g.num_qubits != spec.num_qubits:
            raise ValueError(f"genome {i} has {g.num_qubits} qubits, encoding needs {spec.num_qubits}")
        violation = validate(g)
        if violation is not None:
            raise ValueError(f"genome {i} is invalid: {violation}")
        if not g.gates_used() <= allowed:
            raise ValueError(f"genome {i} uses gates outside the {config.gate_set.value} set")
    return Population(genomes, [None] * len(genomes), 0)


# --- selection ------------------------------------------------------------

def elite_count(population_size: int, elite_fraction: float) -> int:
    return max(1, math.floor(elite_fraction * population_size + 0.5))


def select_elites(records: Sequence[FitnessRecord], elite_fraction: float) -> tuple[list[int], list[int]]:
    """Indices of the best ``elite_count`` individuals (stable on ties) and of the rest."""
    order = sorted(range(len(records)), key=lambda i: records[i].fitness)
    e = elite_count(len(records), elite_fraction)
    return order[:e], order[e:]


# --- crossover ------------------------------------------------------------

def exchange_region(num_qubits: int, qubits_per_variable: int, k: int) -> frozenset[int]:
    """The ``k`` least significant qubits of every register."""
    n = qubits_per_variable
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}]")
    return frozenset(
        q for i in range(num_qubits // n) for q in range(i * n + n - k, i * n + n)
    )


def _collides(ins: Instruction, others) -> bool:
    support = set(ins.qubits)
    return any(support.intersection(o.qubits) for o in others)


def exchange_layers(a: Layer, b: Layer, region: frozenset[int]) -> tuple[Layer, Layer]:
    """Swap the instructions supported entirely inside ``region``.

    Instructions only partly inside stay put.  An incoming instruction that
    would overlap something staying on the receiving side is not swapped and
    remains with its parent; this is iterated to a fixed point.
    """
    inside_a = [g for g in a if set(g.qubits) <= region]
    inside_b = [g for g in b if set(g.qubits) <= region]
    keep_a = [g for g in a if g not in inside_a]
    keep_b = [g for g in b if g not in inside_b]
    blocked_a: list[Instruction] = []
    blocked_b: list[Instruction] = []
    changed = True
    while changed:
        changed = False
        for g in list(inside_b):
            if g not in blocked_b and _collides(g, keep_a + blocked_a):
                blocked_b.append(g)
                changed = True
        for g in list(inside_a):
            if g not in blocked_a and _collides(g, keep_b + blocked_b):
                blocked_a.append(g)
                changed = True
    move_a = [g for g in inside_a if g not in blocked_a]
    move_b = [g for g in inside_b if g not in blocked_b]
    return (
        Layer(tuple(keep_a + blocked_a + move_b)),
        Layer(tuple(keep_b + blocked_b + move_a)),
    )


def crossover(
    parent1: CircuitGenome,
    parent2: CircuitGenome,
    config: EvolutionConfig,
    rng: np.random.Generator,
) -> tuple[CircuitGenome, CircuitGenome]:
    if parent1.num_qubits != parent2.num_qubits:
        raise ValueError("parents act on different qubit counts")
    if rng.random() >= config.crossover_rate:
        return parent1, parent2
    d = min(parent1.depth, parent2.depth)
    if d < 2:
        return parent1, parent2
    delta = int(rng.integers(math.ceil(d / 2) + 1, d + 1))  # 1-indexed layer
    k = int(rng.integers(1, config.qubits_per_variable + 1))
    return crossover_at(parent1, parent2, delta, k, config.qubits_per_variable)


def crossover_at(
    parent1: CircuitGenome, parent2: CircuitGenome, delta: int, k: int, qubits_per_variable: int
) -> tuple[CircuitGenome, CircuitGenome]:
    """Deterministic part of crossover: exchange at 1-indexed layer ``delta`` with ``k`` qubits."""
    idx = delta - 1
    region = exchange_region(parent1.num_qubits, qubits_per_variable, k)
    l1, l2 = exchange_layers(parent1.layers[idx], parent2.layers[idx], region)
    return parent1.replace_layer(idx, l1), parent2.replace_layer(idx, l2)


# --- mutation -------------------------------------------------------------

def _single_holders(present: dict[int, Instruction], exclude: Instruction) -> list[int]:
    return sorted(q for q, g in present.items() if g is not exclude and g.gate.arity == 1)


def _mutate_gene(
    ins: Instruction,
    drawn: Gate,
    present: dict[int, Instruction],
    gate_set: GateSet,
    rng: np.random.Generator,
) -> tuple[list[Instruction], list[int]]:
    """Apply the arity-change case selected by ``drawn``.

    Returns the replacement instructions and the qubits whose one-qubit gates
    are absorbed into the new gate.
    """
    a, b = ins.gate.arity, drawn.arity
    qs = ins.qubits

    def same_arity() -> tuple[list[Instruction], list[int]]:
        return [Instruction(_pick(rng, members(gate_set, a)), qs)], []

    if a == b:
        return [Instruction(drawn, qs)], []
    singles = members(gate_set, 1)
    if a == 1 and b == 2:
        holders = _single_holders(present, ins)
        if not holders:
            return same_arity()
        t = int(_pick(rng, holders))
        return [Instruction(drawn, (qs[0], t))], [t]
    if a == 1 and b == 3:
        holders = _single_holders(present, ins)
        if len(holders) < 2:
            return same_arity()
        t1, t2 = (int(t) for t in rng.choice(holders, size=2, replace=False))
        return [Instruction(drawn, (qs[0], t1, t2))], [t1, t2]
    if b == 1:  # two- or three-qubit gate split into one-qubit gates
        out = [Instruction(drawn, (qs[0],))]
        out += [Instruction(_pick(rng, singles), (q,)) for q in qs[1:]]
        return out, []
    if a == 2 and b == 3:
        holders = _single_holders(present, ins)
        if not holders:
            return same_arity()
        keep = int(rng.integers(2))
        t = int(_pick(rng, holders))
        return [Instruction(drawn, (qs[keep], qs[1 - keep], t))], [t]
    # a == 3, b == 2
    pair = rng.choice(3, size=2, replace=False)
    return [Instruction(drawn, (qs[int(pair[0])], qs[int(pair[1])]))], []


def mutate_layer(layer: Layer, config: EvolutionConfig, rng: np.random.Generator) -> Layer:
    gates = members(config.gate_set)
    present: dict[int, Instruction] = {}
    for g in layer:
        for q in g.qubits:
            present[q] = g
    for ins in layer.instructions:
        if present.get(ins.qubits[0]) is not ins:
            continue  # absorbed by an earlier mutation in this layer
        if rng.random() >= config.mutation_rate:
            continue
        drawn = _pick(rng, gates)
        new, absorbed = _mutate_gene(ins, drawn, present, config.gate_set, rng)
        for q in ins.qubits:
            del present[q]
        for q in absorbed:
            del present[q]
        for g in new:
            for q in g.qubits:
                present[q] = g
    unique = {id(g): g for g in present.values()}
    return Layer(tuple(unique.values()))


def mutate(genome: CircuitGenome, config: EvolutionConfig, rng: np.random.Generator) -> CircuitGenome:
    """Each gene mutates independently with probability ``mutation_rate``; depth is kept."""
    if config.mutation_rate <= 0.0:
        return genome
    return genome.with_layers([mutate_layer(l, config, rng) for l in genome.layers])


def mutate_depth(genome: CircuitGenome, config: EvolutionConfig, rng: np.random.Generator) -> CircuitGenome:
    """Insert a fresh random layer or delete one, clamped to ``[d_min, d_max]``."""
    if rng.random() >= config.depth_mutation_rate:
        return genome
    insert = rng.random() < 0.5
    d = genome.depth
    if insert and d >= config.d_max:
        insert = False
    elif not insert and d <= config.d_min:
        insert = True
    if (insert and d >= config.d_max) or (not insert and d <= config.d_min):
        return genome
    layers = list(genome.layers)
    if insert:
        pos = int(rng.integers(0, d + 1))
        layers.insert(pos, fill_random_layer(genome.num_qubits, config.gate_set, rng))
    else:
        del layers[int(rng.integers(0, d))]
    return genome.with_layers(layers)


# --- evaluation and the generation loop -------------------------------------

class Evaluator(Protocol):
    def evaluate(self, genomes: Sequence[CircuitGenome], stale: Sequence[int],
                 generation: int) -> dict[int, FitnessRecord]: ...


@dataclass
class IndependentEvaluator:
    """Each individual is simulated on its own, with stream ``("fitness", slot, generation)``."""

    config: EvolutionConfig
    objective: ObjectiveFunction
    spec: EncodingSpec

    def evaluate(self, genomes, stale, generation):
        out = {}
        for i in stale:
            if self.config.fitness_mode == "exact":
                out[i] = evaluate_fitness_exact(genomes[i], self.objective, self.spec)
            else:
                rng = stream(self.config.seed, "fitness", i, generation)
                # entropy is filled in lazily, only for the reported best
                out[i] = evaluate_fitness(genomes[i], self.objective, self.spec,
                                          self.config.shots, rng, with_entropy=False)
        return out


@dataclass(frozen=True)
class GenerationRecord:
    generation: int
    best_fitness: float
    mean_fitness: float
    best_entropy: float
    depth_histogram: tuple[tuple[int, int], ...]
    best_mean_vector: tuple[float, ...]
    best_genome: CircuitGenome = field(repr=False, compare=False)

    @property
    def mean_depth(self) -> float:
        total = sum(c for _, c in self.depth_histogram)
        return sum(d * c for d, c in self.depth_histogram) / total


def summarize(population: Population) -> GenerationRecord:
    best = population.best_index()
    rec = population.records[best]
    hist = Counter(g.depth for g in population.individuals)
    return GenerationRecord(
        generation=population.generation,
        best_fitness=rec.fitness,
        mean_fitness=float(np.mean(population.fitness)),
        best_entropy=rec.entropy,
        depth_histogram=tuple(sorted(hist.items())),
        best_mean_vector=rec.mean_vector,
        best_genome=population.individuals[best],
    )


def _evaluate(population: Population, stale: Sequence[int], evaluator: Evaluator) -> None:
    for i, rec in evaluator.evaluate(population.individuals, stale, population.generation).items():
        population.records[i] = rec


def step_generation(
    population: Population,
    config: EvolutionConfig,
    objective: ObjectiveFunction,
    spec: EncodingSpec,
    evaluator: Evaluator | None = None,
) -> tuple[Population, GenerationRecord]:
    """Elites carry over with their cached fitness; the other slots are filled
    by crossover of uniformly drawn parent pairs followed by mutation."""
    evaluator = evaluator or IndependentEvaluator(config, objective, spec)
    gen = population.generation + 1
    rng = stream(config.seed, "breed", 0, gen)
    size = len(population)
    elites, _ = select_elites(population.records, config.elite_fraction)

    offspring: list[CircuitGenome] = []
    while len(offspring) < size - len(elites):
        i, j = (int(x) for x in rng.choice(size, size=2, replace=False))
        offspring.extend(crossover(population.individuals[i], population.individuals[j], config, rng))
    offspring = offspring[: size - len(elites)]
    for c, child in enumerate(offspring):
        child = mutate(child, config, rng)
        if config.variable_depth:
            child = mutate_depth(child, config, rng)
        offspring[c] = child

    nxt = Population(
        [population.individuals[i] for i in elites] + offspring,
        [population.records[i] for i in elites] + [None] * len(offspring),
        gen,
    )
    _evaluate(nxt, range(len(elites), size), evaluator)
    return nxt, _record(nxt)


def _record(population: Population) -> GenerationRecord:
    best = population.best_index()
    rec = population.records[best]
    if rec.entropy is None:
        rec = replace(rec, entropy=shannon_entropy(output_distribution(population.individuals[best])))
        population.records[best] = rec
    return summarize(population)


@dataclass
class EvolutionResult:
    records: list[GenerationRecord]
    population: Population

    @property
    def best_fitness(self) -> list[float]:
        return [r.best_fitness for r in self.records]


def make_evaluator(config: EvolutionConfig, objective: ObjectiveFunction, spec: EncodingSpec) -> Evaluator:
    if config.entanglement == "none":
        return IndependentEvaluator(config, objective, spec)
    from .entanglement import PairwiseEvaluator
    return PairwiseEvaluator(config, objective, spec, entangled=config.entanglement == "pairwise")


def run_evolution(
    config: EvolutionConfig,
    objective: ObjectiveFunction,
    spec: EncodingSpec | None = None,
    evaluator: Evaluator | None = None,
    initial_population: Sequence[CircuitGenome] | None = None,
) -> EvolutionResult:
    """Initial evaluation plus ``max_generations`` steps; deterministic in ``config.seed``.

    ``initial_population`` replaces the random generation-0 individuals (for
    example genomes restored from a population dump).
    """
    spec = spec or objective.encoding(config.qubits_per_variable)
    evaluator = evaluator or make_evaluator(config, objective, spec)
    if initial_population is None:
        population = init_population(config, spec)
    else:
        population = restore_population(initial_population, config, spec)
    _evaluate(population, range(len(population)), evaluator)
    records = [_record(population)]
    for _ in range(config.max_generations):
        population, rec = step_generation(population, config, objective, spec, evaluator)
        records.append(rec)
    return EvolutionResult(records, population)
