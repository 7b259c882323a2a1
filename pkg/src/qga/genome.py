"""Layered circuit genomes.

A genome is an immutable value: ``num_qubits``, a tuple of layers and the
initial computational basis state.  Qubits not touched by a layer carry an
implicit identity.

Text format::

    <num_qubits> <depth> <initial bits>
    H(0) CNOT(1,2)
    -

one line per layer, ``-`` for an empty layer.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .gateset import Gate, GateSet, members


class GenomeError(ValueError):
    """Malformed or structurally invalid genome."""


@dataclass(frozen=True)
class Instruction:
    gate: Gate
    qubits: tuple[int, ...]  # controls first, targets last

    def __post_init__(self) -> None:
        object.__setattr__(self, "gate", Gate(self.gate))
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))

    def __str__(self) -> str:
        return f"{self.gate.value}({','.join(map(str, self.qubits))})"

    def shifted(self, offset: int) -> Instruction:
        return Instruction(self.gate, tuple(q + offset for q in self.qubits))


def _layer_key(ins: Instruction) -> tuple:
    return (min(ins.qubits) if ins.qubits else -1, ins.qubits, ins.gate.value)


@dataclass(frozen=True)
class Layer:
    """Instructions applied in parallel; stored sorted by lowest qubit so that
    equality does not depend on insertion order."""

    instructions: tuple[Instruction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "instructions", tuple(sorted(self.instructions, key=_layer_key))
        )

    def __iter__(self):
        return iter(self.instructions)

    def __len__(self) -> int:
        return len(self.instructions)

    def __str__(self) -> str:
        return " ".join(map(str, self.instructions)) or "-"


@dataclass(frozen=True)
class Violation:
    layer: int | None
    qubits: tuple[int, ...]
    message: str

    def __str__(self) -> str:
        where = "genome" if self.layer is None else f"layer {self.layer}"
        return f"{where}: {self.message}"


@dataclass(frozen=True)
class CircuitGenome:
    num_qubits: int
    layers: tuple[Layer, ...]
    initial_state: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "layers", tuple(
            l if isinstance(l, Layer) else Layer(tuple(l)) for l in self.layers
        ))
        object.__setattr__(self, "initial_state", tuple(int(b) for b in self.initial_state))

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def gate_count(self) -> int:
        return sum(len(l) for l in self.layers)

    def instructions(self) -> Iterable[Instruction]:
        for layer in self.layers:
            yield from layer

    def gates_used(self) -> set[Gate]:
        return {ins.gate for ins in self.instructions()}

    def with_layers(self, layers: Sequence[Layer]) -> CircuitGenome:
        return CircuitGenome(self.num_qubits, tuple(layers), self.initial_state)

    def replace_layer(self, index: int, layer: Layer) -> CircuitGenome:
        layers = list(self.layers)
        layers[index] = layer
        return self.with_layers(layers)


def validate_layer(layer: Layer, num_qubits: int, index: int | None = None) -> Violation | None:
    seen: set[int] = set()
    for ins in layer:
        if len(ins.qubits) != ins.gate.arity:
            return Violation(index, ins.qubits, f"{ins.gate} expects {ins.gate.arity} qubits")
        if len(set(ins.qubits)) != len(ins.qubits):
            return Violation(index, ins.qubits, f"repeated qubit in {ins}")
        bad = tuple(q for q in ins.qubits if not 0 <= q < num_qubits)
        if bad:
            return Violation(index, bad, f"qubit index out of range in {ins}")
        clash = tuple(q for q in ins.qubits if q in seen)
        if clash:
            return Violation(index, clash, f"qubit {clash[0]} used by more than one gate")
        seen.update(ins.qubits)
    return None


def validate(genome: CircuitGenome) -> Violation | None:
    """Return the first violated structural rule, or None when the genome is valid."""
    q = genome.num_qubits
    if q < 1:
        return Violation(None, (), "num_qubits must be >= 1")
    if genome.depth < 1:
        return Violation(None, (), "depth must be >= 1")
    if len(genome.initial_state) != q or any(b not in (0, 1) for b in genome.initial_state):
        return Violation(None, (), f"initial state must be {q} binary digits")
    for i, layer in enumerate(genome.layers):
        v = validate_layer(layer, q, i)
        if v is not None:
            return v
    if genome.gate_count > genome.depth * q:
        return Violation(None, (), "gate count exceeds depth * num_qubits")
    return None


def qubit_occupancy(layer: Layer, num_qubits: int) -> list[Instruction | None]:
    occ: list[Instruction | None] = [None] * num_qubits
    for ins in layer:
        for q in ins.qubits:
            occ[q] = ins
    return occ


def serialize(genome: CircuitGenome) -> str:
    bits = "".join(map(str, genome.initial_state))
    lines = [f"{genome.num_qubits} {genome.depth} {bits}"]
    lines.extend(str(layer) for layer in genome.layers)
    return "\n".join(lines) + "\n"


_INSTR = re.compile(r"^([A-Za-z]+)\(([0-9,\s]*)\)$")


def _parse_instruction(token: str, allowed: set[Gate] | None) -> Instruction:
    match = _INSTR.match(token)
    if not match:
        raise GenomeError(f"malformed instruction {token!r}")
    name, args = match.groups()
    try:
        gate = Gate(name)
    except ValueError:
        raise GenomeError(f"unknown gate {name!r}") from None
    if allowed is not None and gate not in allowed:
        raise GenomeError(f"gate {name} is not in the declared gate set")
    try:
        qubits = tuple(int(a) for a in args.split(",") if a.strip())
    except ValueError:
        raise GenomeError(f"bad qubit list in {token!r}") from None
    return Instruction(gate, qubits)


def deserialize(text: str, gate_set: GateSet | str | None = None) -> CircuitGenome:
    lines = [l.strip() for l in text.strip().splitlines()]
    if not lines:
        raise GenomeError("empty genome record")
    header = lines[0].split()
    if len(header) != 3:
        raise GenomeError(f"bad header {lines[0]!r}")
    try:
        num_qubits, depth = int(header[0]), int(header[1])
    except ValueError:
        raise GenomeError(f"bad header {lines[0]!r}") from None
    if set(header[2]) - {"0", "1"}:
        raise GenomeError("initial state must be a bitstring")
    if len(lines) - 1 != depth:
        raise GenomeError(f"header declares depth {depth}, found {len(lines) - 1} layers")
    allowed = set(members(gate_set)) if gate_set is not None else None
    layers = []
    for line in lines[1:]:
        if line == "-":
            layers.append(Layer())
        else:
            layers.append(Layer(tuple(_parse_instruction(t, allowed) for t in line.split())))
    genome = CircuitGenome(num_qubits, tuple(layers), tuple(int(c) for c in header[2]))
    violation = validate(genome)
    if violation is not None:
        raise GenomeError(str(violation))
    return genome


def serialize_population(genomes: Sequence[CircuitGenome]) -> str:
    return "\n".join(serialize(g) for g in genomes)


def deserialize_population(text: str, gate_set: GateSet | str | None = None) -> list[CircuitGenome]:
    blocks = [b for b in re.split(r"\n\s*\n", text.strip()) if b.strip()]
    return [deserialize(b, gate_set) for b in blocks]
