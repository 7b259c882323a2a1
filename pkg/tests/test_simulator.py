from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

from conftest import BACKENDS, genomes
from qga import _kernels_py, simulator
from qga.encoding import EncodingSpec
from qga.evolution import random_genome
from qga.gateset import Gate, GateSet, gate_unitary, monomial_form
from qga.genome import CircuitGenome, Instruction, Layer
from qga.oracle import circuit_unitary, embed, kron_all, reference_state
from qga.simulator import (
    OutputDistribution,
    SimulationError,
    d_avg,
    draw,
    exact_distribution,
    expected_decoded_output,
    iter_layer_states,
    marginal,
    output_distribution,
    run_circuit,
    sample,
    shannon_entropy,
    total_variation,
)


def _g(q, layers, init=None):
    layers = tuple(Layer(tuple(Instruction(Gate(n), qs) for n, qs in l)) for l in layers)
    return CircuitGenome(q, layers, init or (0,) * q)


def test_oracle_embedding_matches_kronecker():
    # adjacent, ordered operands: the embedding is a plain tensor product
    h, i2 = gate_unitary(Gate.H), np.eye(2)
    np.testing.assert_array_equal(embed(Instruction(Gate.H, (1,)), 3), kron_all([i2, h, i2]))
    cnot = gate_unitary(Gate.CNOT)
    np.testing.assert_array_equal(embed(Instruction(Gate.CNOT, (1, 2)), 3), kron_all([i2, cnot]))


def test_x_on_qubit_zero_sets_msb(backend):
    state = run_circuit(_g(3, [[("X", (0,))]]))
    assert np.flatnonzero(state.amplitudes).tolist() == [0b100]


def test_bell_pair(backend):
    state = run_circuit(_g(2, [[("H", (0,))], [("CNOT", (0, 1))]]))
    np.testing.assert_allclose(state.amplitudes, [2 ** -0.5, 0, 0, 2 ** -0.5], atol=1e-15)


def test_reversed_cnot(backend):
    # control on the less significant qubit: |01> -> |11>
    state = run_circuit(_g(2, [[("CNOT", (1, 0))]], (0, 1)))
    assert np.flatnonzero(state.amplitudes).tolist() == [0b11]


def _embed_by_definition(ins, q):
    local = gate_unitary(ins.gate)
    k = len(ins.qubits)
    u = np.zeros((1 << q, 1 << q), dtype=complex)
    for row in range(1 << q):
        for col in range(1 << q):
            bits_r = [(row >> (q - 1 - i)) & 1 for i in range(q)]
            bits_c = [(col >> (q - 1 - i)) & 1 for i in range(q)]
            if any(bits_r[i] != bits_c[i] for i in range(q) if i not in ins.qubits):
                continue
            lr = int("".join(str(bits_r[i]) for i in ins.qubits), 2)
            lc = int("".join(str(bits_c[i]) for i in ins.qubits), 2)
            u[row, col] = local[lr, lc]
    assert k == ins.gate.arity
    return u


@pytest.mark.parametrize("ins", [
    Instruction(Gate.Fredkin, (2, 0, 3)), Instruction(Gate.Toffoli, (3, 1, 0)),
    Instruction(Gate.CNOT, (3, 0)), Instruction(Gate.H, (2,)), Instruction(Gate.Y, (0,)),
])
def test_oracle_embedding_scattered_operands(ins):
    np.testing.assert_array_equal(embed(ins, 4), _embed_by_definition(ins, 4))


@given(genomes(max_qubits=5, max_depth=6))
def test_matches_full_unitary(g):
    for name in BACKENDS:
        simulator.set_backend(name)
        np.testing.assert_allclose(run_circuit(g).amplitudes, reference_state(g), atol=1e-10)
    simulator.set_backend("auto")


@given(genomes(max_qubits=6, max_depth=5))
def test_layers_preserve_norm(g):
    for amps in iter_layer_states(g):
        assert abs(np.vdot(amps, amps).real - 1.0) < 1e-12


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernels not built")
@pytest.mark.parametrize("gate", list(Gate))
def test_backends_agree_on_random_states(gate):
    from qga import _kernels

    rng = np.random.default_rng(7)
    q = 6
    for _ in range(10):
        state = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
        qubits = rng.choice(q, size=gate.arity, replace=False).astype(np.int64)
        a, b = state.copy(), state.copy()
        _kernels_py.apply_dense(a, q, qubits, np.ascontiguousarray(gate_unitary(gate)))
        _kernels.apply_dense(b, q, qubits, np.ascontiguousarray(gate_unitary(gate)))
        np.testing.assert_allclose(a, b, atol=1e-12)
        form = monomial_form(gate)
        if form is not None:
            c = state.copy()
            _kernels.apply_monomial(c, q, qubits, np.array(form[0], dtype=np.int64),
                                    np.array(form[1], dtype=np.complex128))
            np.testing.assert_allclose(a, c, atol=1e-12)


@pytest.mark.parametrize("bad", [np.array([0, 0]), np.array([0, 9])])
def test_kernel_rejects_bad_operands(backend, bad):
    kern = simulator._kern
    state = np.zeros(8, dtype=np.complex128)
    with pytest.raises((ValueError, IndexError)):
        kern.apply_dense(state, 3, bad.astype(np.int64), np.eye(4, dtype=np.complex128))


@given(genomes(max_qubits=6, max_depth=6, gate_set=GateSet.CLASSICAL))
def test_fast_path_matches_dense_classical(g):
    fast = output_distribution(g)
    dense = exact_distribution(run_circuit(g))
    assert fast.outcomes.tolist() == dense.outcomes.tolist()
    np.testing.assert_allclose(fast.probabilities, dense.probabilities, atol=1e-12)


def test_fast_path_covers_phase_gates():
    g = _g(3, [[("X", (0,)), ("T", (1,)), ("Y", (2,))], [("Toffoli", (0, 2, 1))], [("S", (1,))]])
    assert simulator.is_monomial_circuit(g)
    fast = output_distribution(g)
    dense = exact_distribution(run_circuit(g))
    assert fast.outcomes.tolist() == dense.outcomes.tolist() == [0b111]


@pytest.mark.parametrize("k", range(1, 9))
def test_hadamard_entropy(k):
    g = _g(9, [[("H", (q,)) for q in range(k)]])
    assert shannon_entropy(output_distribution(g)) == pytest.approx(k, abs=1e-12)


def test_entropy_of_basis_state_is_zero():
    assert shannon_entropy(output_distribution(_g(3, [[("X", (1,))]]))) == 0.0


def test_draw_is_inverse_cdf():
    dist = OutputDistribution(2, np.array([1, 3]), np.array([0.25, 0.75]))

    class Fixed:
        def random(self, n):
            return np.array([0.0, 0.2499, 0.25, 0.9999])[:n]

    assert draw(dist, 4, Fixed()).tolist() == [1, 1, 3, 3]


def test_sample_frequencies_chi_square():
    g = _g(2, [[("H", (0,)), ("H", (1,))]])
    counts = sample(run_circuit(g), 8000, np.random.default_rng(3)).as_dict()
    observed = [counts.get(format(i, "02b"), 0) for i in range(4)]
    assert sum(observed) == 8000
    assert stats.chisquare(observed).pvalue > 1e-3


def test_sample_is_seed_deterministic():
    g = random_genome(5, 4, GateSet.QUANTUM, np.random.default_rng(0))
    a = draw(output_distribution(g), 100, np.random.default_rng(9))
    b = draw(output_distribution(g), 100, np.random.default_rng(9))
    assert a.tolist() == b.tolist()


def test_marginal_of_bell_pair_is_uniform():
    dist = output_distribution(_g(2, [[("H", (0,))], [("CNOT", (0, 1))]]))
    m = marginal(dist, [1])
    assert m.outcomes.tolist() == [0, 1]
    np.testing.assert_allclose(m.probabilities, [0.5, 0.5])


def test_marginal_reorders_qubits():
    dist = output_distribution(_g(3, [[("X", (0,))]]))  # |100>
    assert marginal(dist, [2, 0]).outcomes.tolist() == [0b01]


def test_expected_output_and_d_avg():
    spec = EncodingSpec.uniform(1, 2, 0.0, 3.0)
    plus = _g(2, [[("H", (1,))]])          # z in {0, 1} equally likely
    three = _g(2, [[("X", (0,)), ("X", (1,))]])  # z = 3
    np.testing.assert_allclose(expected_decoded_output(plus, spec), [0.5])
    assert d_avg(plus, three, spec) == pytest.approx(2.5)
    assert d_avg(three, plus, spec) == d_avg(plus, three, spec)
    assert d_avg(plus, plus, spec) == 0.0


def test_total_variation():
    p = OutputDistribution(2, np.array([0, 1]), np.array([0.5, 0.5]))
    q = OutputDistribution(2, np.array([1, 2]), np.array([0.5, 0.5]))
    assert total_variation(p, q) == pytest.approx(0.5)
    assert total_variation(p, p) == 0.0


def test_invalid_genome_raises():
    bad = _g(2, [[("X", (0,)), ("H", (0,))]])
    with pytest.raises(SimulationError):
        run_circuit(bad)
    with pytest.raises(SimulationError):
        output_distribution(bad)


def test_qubit_cap(monkeypatch):
    monkeypatch.setenv("QGA_SIM_QUBIT_CAP", "4")
    with pytest.raises(SimulationError, match="cap"):
        run_circuit(_g(5, [[("H", (0,))]]))


def test_full_unitary_is_unitary():
    g = random_genome(4, 5, GateSet.QUANTUM, np.random.default_rng(2))
    u = circuit_unitary(g)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(16), atol=1e-12)


@given(st.integers(0, 2**32 - 1))
def test_unitary_with_scattered_operands(seed):
    rng = np.random.default_rng(seed)
    gate = Gate(rng.choice([g.value for g in Gate]))
    q = 5
    qubits = tuple(int(x) for x in rng.choice(q, size=gate.arity, replace=False))
    g = CircuitGenome(q, (Layer((Instruction(gate, qubits),)),), tuple(int(b) for b in rng.integers(0, 2, q)))
    np.testing.assert_allclose(run_circuit(g).amplitudes, reference_state(g), atol=1e-12)
