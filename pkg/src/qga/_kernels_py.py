"""Pure numpy fallback for the compiled gate kernels; same signatures and
in-place semantics as ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np


def apply_dense(state: np.ndarray, num_qubits: int, qubits, matrix: np.ndarray) -> None:
    qubits = [int(q) for q in qubits]
    k = len(qubits)
    if not 1 <= k <= 3:
        raise ValueError("gates act on 1 to 3 qubits")
    if any(not 0 <= q < num_qubits for q in qubits):
        raise ValueError("qubit index out of range")
    if state.shape[0] != 1 << num_qubits:
        raise ValueError("state length does not match num_qubits")
    matrix = np.asarray(matrix)
    if matrix.shape != (1 << k, 1 << k):
        raise ValueError("matrix shape does not match gate arity")
    psi = state.reshape((2,) * num_qubits)
    u = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(u, psi, axes=(list(range(k, 2 * k)), qubits))
    out = np.moveaxis(out, list(range(k)), qubits)
    state[:] = out.reshape(-1)


def apply_monomial(state: np.ndarray, num_qubits: int, qubits, perm, phase) -> None:
    dim = len(perm)
    matrix = np.zeros((dim, dim), dtype=np.complex128)
    matrix[np.asarray(perm), np.arange(dim)] = np.asarray(phase)
    apply_dense(state, num_qubits, qubits, matrix)
