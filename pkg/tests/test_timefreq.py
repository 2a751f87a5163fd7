import numpy as np
import pytest

from conftest import cgauss
from oracles import stft_direct, wigner_direct
from tfquasi.lattice import dft, tf_shift
from tfquasi.timefreq import cross_wigner_A, istft, stft

DELTA4 = np.array([1, 0, 0, 0])


def test_stft_delta_window(rng):
    f = cgauss(rng, 4)
    V = stft(f, DELTA4)
    np.testing.assert_allclose(np.abs(V), np.abs(f)[:, None] / 2 * np.ones((4, 4)), atol=1e-15)


def test_stft_delta_delta():
    V = stft(DELTA4, DELTA4)
    expected = np.zeros((4, 4))
    expected[0, :] = 0.5
    np.testing.assert_allclose(V, expected, atol=1e-15)


@pytest.mark.parametrize("shape", [(8,), (16,), (3, 3)])
def test_stft_matches_direct_sum(rng, shape):
    if shape == (16,):
        shape = (6,)  # the direct oracle is cubic; keep it small
    f, phi = cgauss(rng, shape), cgauss(rng, shape)
    np.testing.assert_allclose(stft(f, phi), stft_direct(f, phi), atol=1e-12)


def test_stft_d3_matches_direct(rng):
    f, phi = cgauss(rng, (2, 2, 2)), cgauss(rng, (2, 2, 2))
    np.testing.assert_allclose(stft(f, phi), stft_direct(f, phi), atol=1e-12)


def test_moyal(rng):
    f, phi = cgauss(rng, 16), cgauss(rng, 16)
    V = stft(f, phi)
    lhs = np.sum(np.abs(V) ** 2)
    assert lhs == pytest.approx(np.linalg.norm(f) ** 2 * np.linalg.norm(phi) ** 2, rel=1e-10)


def test_istft_round_trip(rng):
    g = np.exp(-np.pi * np.minimum(np.arange(8), 8 - np.arange(8)) ** 2 / 8)
    np.testing.assert_allclose(istft(stft(np.eye(8)[0], g), g), np.eye(8)[0], atol=1e-12)
    np.testing.assert_allclose(istft(np.zeros((8, 8)), g), np.zeros(8))
    phi = cgauss(rng, 16)
    err = max(np.abs(istft(stft(f, phi), phi) - f).max() for f in (cgauss(rng, 16) for _ in range(100)))
    assert err < 1e-10


def test_errors():
    with pytest.raises(ValueError, match="nonzero"):
        stft(np.ones(4), np.zeros(4))
    with pytest.raises(ValueError, match="nonzero"):
        istft(np.zeros((4, 4)), np.zeros(4))
    with pytest.raises(ValueError):
        stft(np.ones(4), np.ones(5))
    with pytest.raises(ValueError):
        cross_wigner_A(np.ones(4), np.ones(4), "1/2")


def test_stft_covariance(rng):
    N = 8
    f, phi = cgauss(rng, N), cgauss(rng, N)
    X = (3, 5)
    lhs = np.abs(stft(tf_shift(f, X), phi))
    rhs = np.roll(np.abs(stft(f, phi)), X, axis=(0, 1))
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_wigner_rihaczek_form(rng):
    N = 4
    f1, f2 = cgauss(rng, N), cgauss(rng, N)
    x, xi = np.meshgrid(np.arange(N), np.arange(N), indexing="ij")
    expected = f1[x] * np.conj(dft(f2))[xi] * np.exp(-2j * np.pi * x * xi / N)
    W = cross_wigner_A(f1, f2, "0")
    np.testing.assert_allclose(W, expected, atol=1e-12)
    np.testing.assert_allclose(W, wigner_direct(f1, f2, 0), atol=1e-12)


def test_wigner_delta():
    W = cross_wigner_A(DELTA4, DELTA4, "0")
    expected = np.zeros((4, 4))
    expected[0] = 0.5
    np.testing.assert_allclose(W, expected, atol=1e-15)


@pytest.mark.parametrize("A", ["0", "1", "1/2", "2"])
def test_wigner_isometry_and_direct(rng, A):
    N = 5
    f1, f2 = cgauss(rng, N), cgauss(rng, N)
    W = cross_wigner_A(f1, f2, A)
    assert np.linalg.norm(W) == pytest.approx(np.linalg.norm(f1) * np.linalg.norm(f2), rel=1e-12)
    a_int = {"0": 0, "1": 1, "1/2": 3, "2": 2}[A]
    np.testing.assert_allclose(W, wigner_direct(f1, f2, a_int), atol=1e-12)


def test_wigner_weyl_conjugate_symmetry(rng):
    # for 2A = I, W_{f2,f1} = conj(W_{f1,f2}) pointwise
    for N in (5, 9):
        f1, f2 = cgauss(rng, N), cgauss(rng, N)
        np.testing.assert_allclose(cross_wigner_A(f2, f1, "1/2"), np.conj(cross_wigner_A(f1, f2, "1/2")), atol=1e-12)


def test_wigner_swap_general_A(rng):
    # W^A_{f2,f1}(x, xi) = conj(W^{I-A}_{f1,f2}(x, xi))
    N = 7
    f1, f2 = cgauss(rng, N), cgauss(rng, N)
    np.testing.assert_allclose(cross_wigner_A(f2, f1, "2"), np.conj(cross_wigner_A(f1, f2, "-1")), atol=1e-12)
