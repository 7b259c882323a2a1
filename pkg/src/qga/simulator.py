"""Exact statevector simulation of circuit genomes.

The gate kernels come from the compiled ``qga._kernels`` extension when it is
importable and from the numpy fallback otherwise.  ``QGA_BACKEND=python``
forces the fallback, ``QGA_BACKEND=compiled`` makes a missing extension an
error.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import _kernels_py
from .encoding import EncodingSpec, bits_to_index, decode_indices, index_to_bits
from .gateset import Gate, gate_unitary, monomial_form
from .genome import CircuitGenome, Instruction, Layer, validate

DEFAULT_QUBIT_CAP = 26


class SimulationError(RuntimeError):
    pass


def _load_backend(choice: str):
    if choice == "python":
        return "python", _kernels_py
    try:
        from . import _kernels
    except ImportError:
        if choice == "compiled":
            raise
        return "python", _kernels_py
    return "compiled", _kernels


BACKEND, _kern = _load_backend(os.environ.get("QGA_BACKEND", "auto"))


def set_backend(choice: str) -> str:
    """Switch kernels at runtime (``auto``, ``compiled`` or ``python``)."""
    global BACKEND, _kern
    BACKEND, _kern = _load_backend(choice)
    return BACKEND


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True


def qubit_cap() -> int:
    raw = os.environ.get("QGA_SIM_QUBIT_CAP")
    return int(raw) if raw else DEFAULT_QUBIT_CAP


def check_cap(num_qubits: int) -> None:
    cap = qubit_cap()
    if num_qubits > cap:
        raise SimulationError(f"{num_qubits} qubits exceeds simulation cap of {cap}")


@dataclass(frozen=True, eq=False)
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)


@dataclass(frozen=True, eq=False)
class OutputDistribution:
    """Nonzero-probability outcomes (ascending basis indices) and their weights."""

    num_qubits: int
    outcomes: np.ndarray
    probabilities: np.ndarray

    def as_dict(self) -> dict[str, float]:
        q = self.num_qubits
        return {
            format(int(i), f"0{q}b"): float(p)
            for i, p in zip(self.outcomes, self.probabilities)
        }

    def dense(self) -> np.ndarray:
        out = np.zeros(1 << self.num_qubits)
        out[self.outcomes] = self.probabilities
        return out


@dataclass(frozen=True, eq=False)
class SampleCounts:
    num_qubits: int
    draws: np.ndarray  # outcome index of every shot, in draw order

    @property
    def total(self) -> int:
        return int(self.draws.shape[0])

    def as_dict(self) -> dict[str, int]:
        values, counts = np.unique(self.draws, return_counts=True)
        q = self.num_qubits
        return {format(int(v), f"0{q}b"): int(c) for v, c in zip(values, counts)}


@lru_cache(maxsize=None)
def _compiled_gate(gate: Gate):
    mono = monomial_form(gate)
    if mono is None:
        return "dense", np.ascontiguousarray(gate_unitary(gate))
    perm, phase = mono
    return "monomial", (np.array(perm, dtype=np.int64), np.array(phase, dtype=np.complex128))


def apply_instruction(amps: np.ndarray, num_qubits: int, ins: Instruction, offset: int = 0) -> None:
    if ins.gate is Gate.I:
        return
    qubits = np.array(ins.qubits, dtype=np.int64) + offset
    kind, data = _compiled_gate(ins.gate)
    if kind == "dense":
        _kern.apply_dense(amps, num_qubits, qubits, data)
    else:
        _kern.apply_monomial(amps, num_qubits, qubits, data[0], data[1])


def apply_layer(amps: np.ndarray, num_qubits: int, layer: Layer, offset: int = 0) -> None:
    for ins in layer:
        apply_instruction(amps, num_qubits, ins, offset)


def basis_amplitudes(num_qubits: int, index: int) -> np.ndarray:
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[index] = 1.0
    return amps


def _checked(genome: CircuitGenome) -> None:
    violation = validate(genome)
    if violation is not None:
        raise SimulationError(f"invalid genome: {violation}")
    check_cap(genome.num_qubits)


def iter_layer_states(genome: CircuitGenome) -> Iterator[np.ndarray]:
    """Yield a copy of the amplitudes after each layer."""
    _checked(genome)
    q = genome.num_qubits
    amps = basis_amplitudes(q, bits_to_index(genome.initial_state))
    for layer in genome.layers:
        apply_layer(amps, q, layer)
        yield amps.copy()


def run_circuit(genome: CircuitGenome) -> StateVector:
    _checked(genome)
    q = genome.num_qubits
    amps = basis_amplitudes(q, bits_to_index(genome.initial_state))
    for layer in genome.layers:
        apply_layer(amps, q, layer)
    return StateVector(q, amps)


def exact_distribution(state: StateVector | np.ndarray, num_qubits: int | None = None) -> OutputDistribution:
    if isinstance(state, StateVector):
        amps, q = state.amplitudes, state.num_qubits
    else:
        amps = np.asarray(state)
        q = num_qubits if num_qubits is not None else int(amps.shape[0]).bit_length() - 1
    probs = amps.real ** 2 + amps.imag ** 2
    outcomes = np.flatnonzero(probs)
    return OutputDistribution(q, outcomes, probs[outcomes])


def is_monomial_circuit(genome: CircuitGenome) -> bool:
    return all(monomial_form(g) is not None for g in genome.gates_used())


def _track_basis_index(genome: CircuitGenome) -> int:
    """Final basis index of a circuit whose gates all map basis states to basis states."""
    bits = list(genome.initial_state)
    for layer in genome.layers:
        for ins in layer:
            if ins.gate is Gate.I:
                continue
            perm, _ = monomial_form(ins.gate)
            local = 0
            for q in ins.qubits:
                local = (local << 1) | bits[q]
            out = perm[local]
            k = len(ins.qubits)
            for t, q in enumerate(ins.qubits):
                bits[q] = (out >> (k - 1 - t)) & 1
    return bits_to_index(bits)


def output_distribution(genome: CircuitGenome) -> OutputDistribution:
    """Exact output distribution of ``genome``.

    Circuits built only from monomial gates stay in a single basis state, so
    their distribution is found by tracking one bitstring instead of 2**q
    amplitudes.
    """
    if is_monomial_circuit(genome):
        _checked(genome)
        index = _track_basis_index(genome)
        return OutputDistribution(
            genome.num_qubits, np.array([index], dtype=np.int64), np.array([1.0])
        )
    return exact_distribution(run_circuit(genome))


def draw(dist: OutputDistribution, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Outcome indices of ``shots`` i.i.d. draws, by inverse-CDF lookup."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    cdf = np.cumsum(dist.probabilities)
    u = rng.random(shots) * cdf[-1]
    pick = np.searchsorted(cdf, u, side="right")
    np.minimum(pick, len(cdf) - 1, out=pick)
    return dist.outcomes[pick]


def sample(state: StateVector | OutputDistribution, shots: int, rng: np.random.Generator) -> SampleCounts:
    dist = state if isinstance(state, OutputDistribution) else exact_distribution(state)
    return SampleCounts(dist.num_qubits, draw(dist, shots, rng))


def shannon_entropy(dist: OutputDistribution) -> float:
    p = dist.probabilities[dist.probabilities > 0]
    if p.size <= 1:
        return 0.0
    return float(-np.sum(p * np.log2(p)))


def marginal(dist: OutputDistribution, qubits: Sequence[int]) -> OutputDistribution:
    """Distribution of a subset of qubits (listed most significant first)."""
    q = dist.num_qubits
    sub = np.zeros(dist.outcomes.shape, dtype=np.int64)
    for qb in qubits:
        sub = (sub << 1) | ((dist.outcomes >> (q - 1 - qb)) & 1)
    dense = np.bincount(sub, weights=dist.probabilities, minlength=1 << len(qubits))
    outcomes = np.flatnonzero(dense)
    return OutputDistribution(len(qubits), outcomes, dense[outcomes])


def expected_decoded_output(genome: CircuitGenome | OutputDistribution, spec: EncodingSpec) -> np.ndarray:
    dist = genome if isinstance(genome, OutputDistribution) else output_distribution(genome)
    if dist.num_qubits != spec.num_qubits:
        raise ValueError(f"distribution on {dist.num_qubits} qubits, encoding needs {spec.num_qubits}")
    return dist.probabilities @ decode_indices(dist.outcomes, spec)


def d_avg(u: CircuitGenome, v: CircuitGenome, spec: EncodingSpec) -> float:
    """Euclidean distance between the exact expected decoded outputs of two circuits."""
    return float(np.linalg.norm(expected_decoded_output(u, spec) - expected_decoded_output(v, spec)))


def total_variation(p: OutputDistribution, q: OutputDistribution) -> float:
    if p.num_qubits != q.num_qubits:
        raise ValueError("distributions over different qubit counts")
    keys = np.union1d(p.outcomes, q.outcomes)
    pa = np.zeros(keys.shape)
    qa = np.zeros(keys.shape)
    pa[np.searchsorted(keys, p.outcomes)] = p.probabilities
    qa[np.searchsorted(keys, q.outcomes)] = q.probabilities
    return 0.5 * float(np.abs(pa - qa).sum())


def bitstring(index: int, num_qubits: int) -> str:
    return "".join(map(str, index_to_bits(index, num_qubits)))
