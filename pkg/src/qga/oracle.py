"""Slow reference constructions used by ``qga selftest`` and the test-suite.

Everything here builds full ``2**q x 2**q`` matrices straight from the
definition of a gate acting on a subset of qubits, without touching the
strided kernels, so it can check them.
"""

from __future__ import annotations

import numpy as np

from .gateset import gate_unitary
from .genome import CircuitGenome, Instruction, Layer

MAX_ORACLE_QUBITS = 8


def embed(ins: Instruction, num_qubits: int) -> np.ndarray:
    """Full unitary of one instruction; global qubit 0 is the index MSB.

    Built as ``M kron I`` on a register reordered so the operands come first,
    then conjugated back to the natural qubit order.
    """
    if num_qubits > MAX_ORACLE_QUBITS:
        raise ValueError(f"oracle limited to {MAX_ORACLE_QUBITS} qubits")
    rest = [q for q in range(num_qubits) if q not in ins.qubits]
    order = list(ins.qubits) + rest
    reordered = kron_all([gate_unitary(ins.gate), np.eye(1 << len(rest))])
    # position of each natural-order basis index inside the reordered register
    dim = 1 << num_qubits
    perm = np.zeros(dim, dtype=np.int64)
    for idx in range(dim):
        for pos, q in enumerate(order):
            if (idx >> (num_qubits - 1 - q)) & 1:
                perm[idx] |= 1 << (num_qubits - 1 - pos)
    return reordered[np.ix_(perm, perm)]


def layer_unitary(layer: Layer, num_qubits: int) -> np.ndarray:
    u = np.eye(1 << num_qubits, dtype=np.complex128)
    for ins in layer.instructions:
        u = embed(ins, num_qubits) @ u
    return u


def circuit_unitary(genome: CircuitGenome) -> np.ndarray:
    u = np.eye(1 << genome.num_qubits, dtype=np.complex128)
    for layer in genome.layers:
        u = layer_unitary(layer, genome.num_qubits) @ u
    return u


def reference_state(genome: CircuitGenome) -> np.ndarray:
    index = int("".join(map(str, genome.initial_state)) or "0", 2)
    return circuit_unitary(genome)[:, index].copy()


def kron_all(mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for m in mats:
        out = np.kron(out, m)
    return out
