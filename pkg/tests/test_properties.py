"""Hypothesis property tests for quasi-norm axioms and exact round trips."""

from fractions import Fraction

import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from tfquasi.lattice import dft, idft, tf_shift
from tfquasi.opnorms import pqr_condition
from tfquasi.quant import kernel_of_symbol, symbol_of_kernel
from tfquasi.spaces import Exponent, MatrixOperator, ModSpec, lp_weighted_norm, modnorm, up_matrix_norm
from tfquasi.timefreq import istft, stft
from tfquasi.weights import Weight, shifted_weight, standard_weight

N = 8
EXPONENTS = ["1/3", "1/2", "2/3", "1", "2", "inf"]
finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def csignals(shape):
    return st.tuples(arrays(float, shape, elements=finite), arrays(float, shape, elements=finite)).map(
        lambda t: t[0] + 1j * t[1]
    )


exponent = st.sampled_from(EXPONENTS)
scalar = st.complex_numbers(max_magnitude=100, allow_nan=False, allow_infinity=False)


def _pmin(p):
    return min(float(Exponent(p)), 1.0)


def assert_p_triangle(norm, f, g, p):
    s = _pmin(p)
    lhs = norm(f + g) ** s
    rhs = norm(f) ** s + norm(g) ** s
    assert lhs <= rhs * (1 + 1e-12) + 1e-12


@given(csignals(N), csignals(N), exponent, exponent)
def test_modnorm_p_subadditive(f, g, p, q):
    spec = ModSpec(p, q, standard_weight("polynomial", N, 2, 1.0))
    norm = lambda h: modnorm(h, spec)
    # the p-triangle uses the smaller exponent
    s = min(_pmin(p), _pmin(q))
    assert norm(f + g) ** s <= (norm(f) ** s + norm(g) ** s) * (1 + 1e-12) + 1e-12


@given(csignals(N), csignals(N), exponent)
def test_lp_p_subadditive(f, g, p):
    assert_p_triangle(lambda h: lp_weighted_norm(h, p), f, g, p)


@given(csignals((3, 4)), csignals((3, 4)), exponent)
def test_up_matrix_norm_p_subadditive(A, B, p):
    w1, w2 = np.arange(1, 5.0), np.arange(2, 5.0)
    norm = lambda M: up_matrix_norm(MatrixOperator(M, w1, w2), p)
    assert_p_triangle(norm, A, B, p)


@given(csignals(N), scalar, exponent)
def test_modnorm_homogeneous(f, c, p):
    spec = ModSpec(p)
    np.testing.assert_allclose(modnorm(c * f, spec), abs(c) * modnorm(f, spec), rtol=1e-10, atol=1e-10)


@given(csignals(N), exponent)
def test_modnorm_nondegenerate(f, p):
    value = modnorm(f, ModSpec(p))
    assert value >= 0
    assert (value == 0) == (not np.any(f))


@given(st.sampled_from(EXPONENTS[:-1]), st.sampled_from(EXPONENTS[:-1]), st.sampled_from(EXPONENTS[:-1]))
def test_pqr_monotone(p, q, r):
    ok, slack = pqr_condition(p, q, r)
    assert ok == (slack >= 0)
    # shrinking r relaxes the condition; enlarging p or q tightens it
    smaller_r = Exponent(r).inv + 1
    _, slack_r = pqr_condition(p, q, str(1 / smaller_r))
    assert slack_r == slack + 1
    _, slack_p = pqr_condition(str(Exponent(p).value * 2), q, r) if Exponent(p).inv else (None, slack)
    assert slack_p >= slack


@given(st.integers(0, N - 1), st.integers(0, N - 1), st.floats(0.5, 3))
def test_shifted_weight_inverse(x, xi, s):
    w = standard_weight("polynomial", N, 2, s)
    back = shifted_weight(shifted_weight(w, (x, xi)), (-x, -xi))
    np.testing.assert_array_equal(back.values, w.values)


@given(csignals(N))
def test_dft_round_trip(f):
    np.testing.assert_allclose(idft(dft(f)), f, atol=1e-10)
    np.testing.assert_allclose(np.linalg.norm(dft(f)), np.linalg.norm(f), rtol=1e-12, atol=1e-12)


@given(csignals(N), st.integers(0, N - 1), st.integers(0, N - 1))
def test_stft_round_trip_and_shift(f, x, xi):
    phi = np.exp(-np.minimum(np.arange(N), N - np.arange(N)) ** 2 / 4.0)
    np.testing.assert_allclose(istft(stft(f, phi), phi), f, atol=1e-9)
    # the weighted norm of the shifted signal against the shifted weight is X-independent
    w = Weight(standard_weight("polynomial", N, 2, 1.0).values)
    base = modnorm(f, ModSpec("1/2", weight=w, window=phi))
    moved = modnorm(tf_shift(f, (x, xi)), ModSpec("1/2", weight=shifted_weight(w, (x, xi)), window=phi))
    np.testing.assert_allclose(moved, base, rtol=1e-10, atol=1e-10)


@given(csignals((N, N)), st.sampled_from(["0", "1", "3"]))
def test_symbol_kernel_round_trip(a, A):
    np.testing.assert_allclose(symbol_of_kernel(kernel_of_symbol(a, A), A), a, atol=1e-9)


def test_exponent_exact():
    assert Exponent("0.5").inv == Fraction(2)
    assert Exponent("inf").inv == 0
