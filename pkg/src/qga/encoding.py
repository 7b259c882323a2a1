"""Binary discretization of real variables.

Register ``i`` occupies qubits ``[i*n, (i+1)*n)`` and qubit ``i*n`` is its most
significant bit.  Global qubit 0 is the most significant bit of a basis index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class VariableDomain:
    lower: float
    upper: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lower) and math.isfinite(self.upper)):
            raise ValueError("domain bounds must be finite")
        if not self.lower < self.upper:
            raise ValueError(f"empty domain [{self.lower}, {self.upper}]")

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class EncodingSpec:
    num_variables: int
    qubits_per_variable: int
    domains: tuple[VariableDomain, ...]

    def __post_init__(self) -> None:
        if self.num_variables < 1 or self.qubits_per_variable < 1:
            raise ValueError("num_variables and qubits_per_variable must be >= 1")
        object.__setattr__(self, "domains", tuple(self.domains))
        if len(self.domains) != self.num_variables:
            raise ValueError(
                f"expected {self.num_variables} domains, got {len(self.domains)}"
            )

    @classmethod
    def uniform(cls, m: int, n: int, lower: float, upper: float) -> EncodingSpec:
        return cls(m, n, tuple(VariableDomain(lower, upper) for _ in range(m)))

    @property
    def num_qubits(self) -> int:
        return self.num_variables * self.qubits_per_variable

    def register(self, i: int) -> range:
        n = self.qubits_per_variable
        return range(i * n, (i + 1) * n)


def bits_to_integer(bits: Sequence[int]) -> int:
    z = 0
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"non-binary digit {b!r}")
        z = (z << 1) | int(b)
    return z


def integer_to_real(z: int, domain: VariableDomain, n: int) -> float:
    top = (1 << n) - 1
    if not 0 <= z <= top:
        raise ValueError(f"z={z} outside [0, {top}]")
    return domain.lower + (z / top) * (domain.upper - domain.lower)


def decode_global_bitstring(bits: Sequence[int], spec: EncodingSpec) -> np.ndarray:
    n = spec.qubits_per_variable
    if len(bits) != spec.num_qubits:
        raise ValueError(f"expected {spec.num_qubits} bits, got {len(bits)}")
    return np.array([
        integer_to_real(bits_to_integer(bits[i * n:(i + 1) * n]), d, n)
        for i, d in enumerate(spec.domains)
    ])


def register_values(indices: np.ndarray, spec: EncodingSpec) -> np.ndarray:
    """Split basis indices into per-register integers, shape ``(len(indices), m)``."""
    n, m = spec.qubits_per_variable, spec.num_variables
    idx = np.asarray(indices, dtype=np.int64)
    shifts = np.array([(m - 1 - i) * n for i in range(m)], dtype=np.int64)
    return (idx[:, None] >> shifts[None, :]) & ((1 << n) - 1)


def decode_indices(indices: np.ndarray, spec: EncodingSpec) -> np.ndarray:
    """Vectorized decoding of basis-state indices to real vectors, shape ``(N, m)``."""
    z = register_values(indices, spec)
    top = (1 << spec.qubits_per_variable) - 1
    lower = np.array([d.lower for d in spec.domains])
    upper = np.array([d.upper for d in spec.domains])
    return lower + (z / top) * (upper - lower)


def index_to_bits(index: int, num_qubits: int) -> tuple[int, ...]:
    return tuple((index >> (num_qubits - 1 - q)) & 1 for q in range(num_qubits))


def bits_to_index(bits: Sequence[int]) -> int:
    return bits_to_integer(bits)
