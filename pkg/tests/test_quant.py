import numpy as np
import pytest

from conftest import cgauss
from oracles import kernel_direct, kohn_nirenberg, op_double_sum, svd_oracle
from tfquasi.lattice import inner
from tfquasi.qmatrix import QuantMatrix, as_quant
from tfquasi.quant import (
    apply_op,
    change_quantization,
    kernel_of_symbol,
    pad_kernel,
    rank_one_symbol,
    symbol_of_kernel,
)

DELTA4 = np.array([1, 0, 0, 0], dtype=complex)


def test_quant_matrix_parsing():
    assert QuantMatrix.parse("1/2", N=5).entries == ((3,),)
    assert QuantMatrix.parse("[[1, 2], [0, 1]]", N=5, d=2).array.tolist() == [[1, 2], [0, 1]]
    assert QuantMatrix.parse("0", N=4, d=2).is_zero()
    with pytest.raises(ValueError, match="not defined mod 4"):
        QuantMatrix.parse("1/2", N=4)
    with pytest.raises(ValueError):
        as_quant(QuantMatrix.parse("1", N=5), 7)


def test_kernel_constant_symbol():
    np.testing.assert_allclose(kernel_of_symbol(np.ones((4, 4)), "0"), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(kernel_of_symbol(np.ones((3,) * 4), "1"), np.eye(9), atol=1e-14)


def test_kernel_multiplication_symbol(rng):
    g = cgauss(rng, 4)
    np.testing.assert_allclose(kernel_of_symbol(np.repeat(g[:, None], 4, axis=1), "0"), np.diag(g), atol=1e-14)


def test_kernel_matches_kohn_nirenberg(rng):
    N = 8
    a, f = cgauss(rng, (N, N)), cgauss(rng, N)
    np.testing.assert_allclose(kernel_of_symbol(a, "0") @ f, kohn_nirenberg(a, f), atol=1e-10)


@pytest.mark.parametrize("A,Aint", [("0", 0), ("1", 1), ("1/2", 3), ("2", 2)])
def test_kernel_matches_direct(rng, A, Aint):
    a = cgauss(rng, (5, 5))
    np.testing.assert_allclose(kernel_of_symbol(a, A), kernel_direct(a, Aint), atol=1e-12)


def test_symbol_of_kernel_examples(rng):
    np.testing.assert_allclose(symbol_of_kernel(np.eye(4), "0"), np.ones((4, 4)), atol=1e-14)
    g = cgauss(rng, 4)
    np.testing.assert_allclose(symbol_of_kernel(np.diag(g), "0"), np.repeat(g[:, None], 4, axis=1), atol=1e-14)
    K = cgauss(rng, (5, 5))
    np.testing.assert_allclose(kernel_of_symbol(symbol_of_kernel(K, "3"), "3"), K, atol=1e-12)
    with pytest.raises(ValueError):
        symbol_of_kernel(np.ones((4, 5)), "0")


def test_round_trip_d2(rng):
    a = cgauss(rng, (3,) * 4)
    for A in ("0", "1", "1/2", [[1, 2], [0, 1]]):
        np.testing.assert_allclose(symbol_of_kernel(kernel_of_symbol(a, A), A, d=2), a, atol=1e-12)


def test_apply_op_examples(rng):
    f = cgauss(rng, 4)
    np.testing.assert_allclose(apply_op(np.ones((4, 4)), "0", f), f, atol=1e-14)
    h = np.zeros((4, 4))
    h[:, 0] = 1
    np.testing.assert_allclose(apply_op(h, "0", f), np.full(4, f.mean()), atol=1e-14)


@pytest.mark.parametrize("A,Aint", [("0", 0), ("1", 1), ("3", 3)])
def test_apply_op_double_sum(rng, A, Aint):
    a, f = cgauss(rng, (8, 8)), cgauss(rng, 8)
    np.testing.assert_allclose(apply_op(a, A, f), op_double_sum(a, Aint, f), atol=1e-10)


def test_change_quantization_examples(rng):
    a = cgauss(rng, (5, 5))
    assert np.array_equal(change_quantization(a, "1/2", "1/2"), a)
    for A1, A2 in [("0", "1/2"), ("1", "0"), ("2", "1/2")]:
        np.testing.assert_allclose(change_quantization(np.ones((5, 5)), A1, A2), np.ones((5, 5)), atol=1e-13)
        back = change_quantization(change_quantization(a, A1, A2), A2, A1)
        np.testing.assert_allclose(back, a, atol=1e-12)
        np.testing.assert_allclose(
            kernel_of_symbol(change_quantization(a, A1, A2), A2), kernel_of_symbol(a, A1), atol=1e-12
        )


def test_change_quantization_exponential_symbol():
    # a1 = exp(2 pi i (u x + v xi)/N): a2 is a unimodular multiple of a1
    N, u, v = 5, 2, 3
    x, xi = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    a1 = np.exp(2j * np.pi * (u * x + v * xi) / N)
    K1 = kernel_direct(a1, 0)
    K2 = kernel_direct(a1, 3)  # Op_{1/2}(a1) by brute force
    nz = np.abs(K2) > 1e-9
    c = (K1[nz] / K2[nz])[0]
    np.testing.assert_allclose(K1[nz] / K2[nz], c, atol=1e-12)
    assert abs(c) == pytest.approx(1.0)
    np.testing.assert_allclose(change_quantization(a1, "0", "1/2"), c * a1, atol=1e-12)


def test_hilbert_schmidt_factor(rng):
    for shape, A in [((6, 6), "1"), ((5, 5), "1/2"), ((3,) * 4, "0")]:
        a = cgauss(rng, shape)
        d = len(shape) // 2
        K = kernel_of_symbol(a, A)
        assert np.linalg.norm(K) * shape[0] ** (d / 2) == pytest.approx(np.linalg.norm(a), rel=1e-12)


def test_rank_one_examples(rng):
    g = cgauss(rng, 4)
    out = apply_op(rank_one_symbol(DELTA4, DELTA4, "0"), "0", g)
    np.testing.assert_allclose(out, 0.5 * g[0] * DELTA4, atol=1e-14)
    a0 = rank_one_symbol(cgauss(rng, 4), np.zeros(4), "0")
    assert not np.any(np.abs(kernel_of_symbol(a0, "0")) > 0)


@pytest.mark.parametrize("N,A", [(5, "0"), (5, "1"), (5, "1/2"), (9, "1/2")])
def test_rank_one_identity(rng, N, A):
    f1, f2, g = cgauss(rng, N), cgauss(rng, N), cgauss(rng, N)
    a = rank_one_symbol(f1, f2, A)
    lhs = apply_op(a, A, g)
    rhs = inner(g, f2) * f1 / np.sqrt(N)
    assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(rhs)
    s = svd_oracle(kernel_of_symbol(a, A))
    assert s[1] <= 1e-10 * s[0]


def test_invalid_quantization_errors():
    with pytest.raises(ValueError):
        kernel_of_symbol(np.ones((4, 4)), "1/2")
    with pytest.raises(ValueError):
        apply_op(np.ones((4, 4)), "1/2", np.ones(4))
    with pytest.raises(ValueError):
        change_quantization(np.ones((4, 4)), "0", "1/2")
    with pytest.raises(ValueError):
        rank_one_symbol(np.ones(4), np.ones(4), "1/2")


def test_pad_kernel(rng):
    K = cgauss(rng, (4, 4))
    np.testing.assert_array_equal(pad_kernel(K, np.ones(4)), K)
    f, g, phi = cgauss(rng, 16), cgauss(rng, 4), cgauss(rng, 4)
    K0 = pad_kernel(np.outer(f, np.conj(g)), phi, "col")
    np.testing.assert_allclose(K0, np.outer(f, np.conj(np.kron(g, np.conj(phi)))), atol=1e-14)
    R = cgauss(rng, (16, 4))
    s = svd_oracle(R)
    s0 = svd_oracle(pad_kernel(R, phi))
    np.testing.assert_allclose(s0[:4], np.linalg.norm(phi) * s, rtol=1e-12)
    assert np.all(s0[4:] <= 1e-12 * s0[0])
    Rt = cgauss(rng, (4, 16))
    np.testing.assert_allclose(svd_oracle(pad_kernel(Rt, phi))[:4], np.linalg.norm(phi) * svd_oracle(Rt), rtol=1e-12)
    with pytest.raises(ValueError):
        pad_kernel(R, np.zeros(4))
