from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qga.encoding import (
    EncodingSpec,
    VariableDomain,
    bits_to_index,
    bits_to_integer,
    decode_global_bitstring,
    decode_indices,
    index_to_bits,
    integer_to_real,
)

RASTRIGIN_BOX = VariableDomain(-5.12, 5.12)


def test_midpoint_value():
    # exact rational evaluation of lower + z/(2^n - 1) * width
    expected = Fraction(-512, 100) + Fraction(128, 255) * Fraction(1024, 100)
    assert float(expected) == pytest.approx(0.020078431372549, abs=1e-14)
    assert integer_to_real(128, RASTRIGIN_BOX, 8) == pytest.approx(float(expected), abs=1e-14)


@pytest.mark.parametrize("n", [1, 4, 8, 16])
def test_endpoints(n):
    assert integer_to_real(0, RASTRIGIN_BOX, n) == -5.12
    assert integer_to_real((1 << n) - 1, RASTRIGIN_BOX, n) == pytest.approx(5.12, abs=1e-15)


@pytest.mark.parametrize("bits, value", [
    ((1, 0, 0, 0), 8),
    ((0, 0, 0, 1), 1),
    ((1, 0, 1, 1), 11),
    ((), 0),
])
def test_msb_first(bits, value):
    assert bits_to_integer(bits) == value


def test_two_register_layout():
    spec = EncodingSpec.uniform(2, 4, -1.0, 1.0)
    x = decode_global_bitstring((0, 0, 0, 1, 1, 1, 1, 1), spec)
    np.testing.assert_allclose(x, [-1.0 + 2.0 / 15.0, 1.0], atol=1e-15)
    assert list(spec.register(1)) == [4, 5, 6, 7]


@given(st.integers(1, 3), st.integers(1, 5), st.data())
def test_vectorized_decoding_matches_scalar(m, n, data):
    spec = EncodingSpec(m, n, tuple(VariableDomain(-i - 1.5, 2.0 * i + 1.0) for i in range(m)))
    idx = data.draw(st.lists(st.integers(0, (1 << spec.num_qubits) - 1), min_size=1, max_size=8))
    got = decode_indices(np.array(idx), spec)
    for row, index in zip(got, idx):
        np.testing.assert_array_equal(row, decode_global_bitstring(index_to_bits(index, spec.num_qubits), spec))


@given(st.integers(1, 20), st.data())
def test_bits_round_trip(q, data):
    index = data.draw(st.integers(0, (1 << q) - 1))
    assert bits_to_index(index_to_bits(index, q)) == index


@given(st.integers(1, 12), st.data())
def test_decoded_values_stay_in_domain(n, data):
    z = data.draw(st.integers(0, (1 << n) - 1))
    assert -5.12 <= integer_to_real(z, RASTRIGIN_BOX, n) <= 5.12 + 1e-15


@pytest.mark.parametrize("z", [-1, 256])
def test_out_of_range_integer(z):
    with pytest.raises(ValueError):
        integer_to_real(z, RASTRIGIN_BOX, 8)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        bits_to_integer((0, 2))
    with pytest.raises(ValueError):
        VariableDomain(1.0, 1.0)
    with pytest.raises(ValueError):
        VariableDomain(0.0, float("inf"))
    with pytest.raises(ValueError):
        EncodingSpec(2, 4, (RASTRIGIN_BOX,))
    with pytest.raises(ValueError):
        decode_global_bitstring((0, 1), EncodingSpec.uniform(1, 4, 0, 1))
