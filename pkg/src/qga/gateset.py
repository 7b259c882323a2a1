"""Gate kinds, their unitaries, and the classical / quantum gate sets."""

from __future__ import annotations

import enum
from functools import lru_cache

import numpy as np

_INV_SQRT2 = 1.0 / np.sqrt(2.0)
_T_PHASE = np.exp(1j * np.pi / 4)


class Gate(str, enum.Enum):
    I = "I"
    X = "X"
    Y = "Y"
    Z = "Z"
    H = "H"
    S = "S"
    Sdg = "Sdg"
    T = "T"
    Tdg = "Tdg"
    CNOT = "CNOT"
    SWAP = "SWAP"
    Toffoli = "Toffoli"
    Fredkin = "Fredkin"

    @property
    def arity(self) -> int:
        return _ARITY[self]

    @property
    def matrix(self) -> np.ndarray:
        return gate_unitary(self)

    def __str__(self) -> str:
        return self.value


_ARITY = {
    Gate.I: 1, Gate.X: 1, Gate.Y: 1, Gate.Z: 1, Gate.H: 1,
    Gate.S: 1, Gate.Sdg: 1, Gate.T: 1, Gate.Tdg: 1,
    Gate.CNOT: 2, Gate.SWAP: 2,
    Gate.Toffoli: 3, Gate.Fredkin: 3,
}


def _permutation(n: int, mapping: dict[int, int]) -> np.ndarray:
    perm = list(range(n))
    for src, dst in mapping.items():
        perm[src] = dst
    out = np.zeros((n, n), dtype=np.complex128)
    out[perm, range(n)] = 1.0
    return out


_MATRICES = {
    Gate.I: np.eye(2, dtype=np.complex128),
    Gate.X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    Gate.Y: np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    Gate.Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
    Gate.H: np.array([[1, 1], [1, -1]], dtype=np.complex128) * _INV_SQRT2,
    Gate.S: np.array([[1, 0], [0, 1j]], dtype=np.complex128),
    Gate.Sdg: np.array([[1, 0], [0, -1j]], dtype=np.complex128),
    Gate.T: np.array([[1, 0], [0, _T_PHASE]], dtype=np.complex128),
    Gate.Tdg: np.array([[1, 0], [0, np.conj(_T_PHASE)]], dtype=np.complex128),
    # local index: first listed qubit is the most significant bit
    Gate.CNOT: _permutation(4, {2: 3, 3: 2}),
    Gate.SWAP: _permutation(4, {1: 2, 2: 1}),
    Gate.Toffoli: _permutation(8, {6: 7, 7: 6}),
    Gate.Fredkin: _permutation(8, {5: 6, 6: 5}),
}
for _m in _MATRICES.values():
    _m.setflags(write=False)


def gate_unitary(kind: Gate | str) -> np.ndarray:
    """Return the read-only ``2**arity`` square unitary of ``kind``."""
    return _MATRICES[Gate(kind)]


def is_basis_preserving(kind: Gate | str) -> bool:
    """True iff every entry of the unitary is exactly 0 or 1."""
    m = gate_unitary(kind)
    return bool(np.all((m == 0) | (m == 1)))


@lru_cache(maxsize=None)
def monomial_form(kind: Gate) -> tuple[tuple[int, ...], tuple[complex, ...]] | None:
    """Decompose a monomial unitary as ``U|j> = phase[j] |perm[j]>``.

    Returns None for gates with more than one nonzero per column (only H here).
    """
    m = gate_unitary(kind)
    perm, phase = [], []
    for col in range(m.shape[1]):
        rows = np.flatnonzero(m[:, col])
        if len(rows) != 1:
            return None
        perm.append(int(rows[0]))
        phase.append(complex(m[rows[0], col]))
    return tuple(perm), tuple(phase)


class GateSet(str, enum.Enum):
    CLASSICAL = "classical"
    QUANTUM = "quantum"

    def __str__(self) -> str:
        return self.value


_CLASSICAL = (Gate.I, Gate.X, Gate.CNOT, Gate.SWAP, Gate.Toffoli, Gate.Fredkin)
_QUANTUM = _CLASSICAL + (Gate.H, Gate.T, Gate.Tdg, Gate.S, Gate.Sdg, Gate.Y, Gate.Z)
_MEMBERS = {GateSet.CLASSICAL: _CLASSICAL, GateSet.QUANTUM: _QUANTUM}


def members(gate_set: GateSet | str, arity: int | None = None) -> tuple[Gate, ...]:
    """Gates of ``gate_set`` in stable listing order, optionally filtered by arity."""
    gates = _MEMBERS[GateSet(gate_set)]
    if arity is None:
        return gates
    if arity not in (1, 2, 3):
        raise ValueError(f"arity must be 1, 2, 3 or None, got {arity!r}")
    return tuple(g for g in gates if g.arity == arity)
