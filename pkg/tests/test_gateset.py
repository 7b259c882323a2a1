from __future__ import annotations

import numpy as np
import pytest

from qga.gateset import Gate, GateSet, gate_unitary, is_basis_preserving, members, monomial_form

ALL_GATES = list(Gate)


@pytest.mark.parametrize("gate", ALL_GATES)
def test_unitary(gate):
    u = gate_unitary(gate)
    assert u.shape == (1 << gate.arity,) * 2
    np.testing.assert_allclose(u @ u.conj().T, np.eye(u.shape[0]), atol=1e-15)


@pytest.mark.parametrize("gate", ALL_GATES)
def test_matrices_are_read_only(gate):
    with pytest.raises(ValueError):
        gate_unitary(gate)[0, 0] = 5


def test_set_sizes_and_nesting():
    assert len(members(GateSet.CLASSICAL)) == 6
    assert len(members(GateSet.QUANTUM)) == 13
    assert set(members("classical")) < set(members("quantum"))


@pytest.mark.parametrize("gate_set", list(GateSet))
@pytest.mark.parametrize("arity", [1, 2, 3])
def test_arity_filter(gate_set, arity):
    chosen = members(gate_set, arity)
    assert chosen and all(g.arity == arity for g in chosen)


@pytest.mark.parametrize("arity", [0, 4, -1])
def test_bad_arity_rejected(arity):
    with pytest.raises(ValueError):
        members(GateSet.QUANTUM, arity)


def test_classical_set_is_basis_preserving():
    assert all(is_basis_preserving(g) for g in members(GateSet.CLASSICAL))
    extras = set(members(GateSet.QUANTUM)) - set(members(GateSet.CLASSICAL))
    assert not any(is_basis_preserving(g) for g in extras)


# hand-written with the first listed qubit as the most significant local bit
CNOT_REF = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
SWAP_REF = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])


def _basis_map(gate: Gate) -> dict[int, int]:
    u = gate_unitary(gate)
    return {j: int(np.flatnonzero(u[:, j])[0]) for j in range(u.shape[1])}


def test_two_qubit_permutations():
    np.testing.assert_array_equal(gate_unitary(Gate.CNOT), CNOT_REF)
    np.testing.assert_array_equal(gate_unitary(Gate.SWAP), SWAP_REF)


def test_toffoli_flips_target_when_both_controls_set():
    m = _basis_map(Gate.Toffoli)
    assert m[0b110] == 0b111 and m[0b111] == 0b110
    assert all(m[j] == j for j in range(6))


def test_fredkin_swaps_targets_when_control_set():
    m = _basis_map(Gate.Fredkin)
    assert m[0b101] == 0b110 and m[0b110] == 0b101
    assert all(m[j] == j for j in (0, 1, 2, 3, 4, 7))


def test_phase_gate_algebra():
    t, s, z = (gate_unitary(g) for g in (Gate.T, Gate.S, Gate.Z))
    np.testing.assert_allclose(t @ t, s, atol=1e-15)
    np.testing.assert_allclose(s @ s, z, atol=1e-15)
    np.testing.assert_allclose(gate_unitary(Gate.Tdg), t.conj().T, atol=1e-15)
    np.testing.assert_allclose(gate_unitary(Gate.Sdg), s.conj().T, atol=1e-15)
    h = gate_unitary(Gate.H)
    np.testing.assert_allclose(h @ h, np.eye(2), atol=1e-15)
    # Y = i X Z
    np.testing.assert_allclose(gate_unitary(Gate.Y), 1j * gate_unitary(Gate.X) @ z, atol=1e-15)


@pytest.mark.parametrize("gate", ALL_GATES)
def test_monomial_form_reconstructs_matrix(gate):
    form = monomial_form(gate)
    if gate is Gate.H:
        assert form is None
        return
    perm, phase = form
    u = np.zeros_like(gate_unitary(gate))
    for j, (i, p) in enumerate(zip(perm, phase)):
        u[i, j] = p
    np.testing.assert_array_equal(u, gate_unitary(gate))
