import itertools
import math
from fractions import Fraction

import numpy as np
import pytest

import tfquasi.spaces as spaces
from conftest import cgauss
from oracles import stft_direct
from tfquasi.errors import ConfigError, NotAFrameError
from tfquasi.gabor import GaborLattice, GaborSystem, gaussian_window
from tfquasi.lattice import tf_shift
from tfquasi.spaces import (
    Exponent,
    MatrixOperator,
    ModSpec,
    atomic_norm_upper,
    embedding_check,
    lattice_atoms,
    lattice_modnorm,
    lp_weighted_norm,
    merge_atoms,
    mixed_lpq_norm,
    modnorm,
    tensor_norm_upper,
    up_matrix_norm,
)
from tfquasi.weights import shifted_weight, standard_weight

DELTA4 = np.array([1, 0, 0, 0], dtype=complex)


def test_exponent_arithmetic():
    assert Exponent("2/3").value == Fraction(2, 3)
    assert Exponent(0.5) == Exponent("1/2")
    assert Exponent("inf").inv == 0 and Exponent(math.inf).is_inf
    assert Exponent(2).conjugate() == Exponent(2)
    assert Exponent(1).conjugate().is_inf
    assert Exponent("1/2") < Exponent(1) < Exponent("inf")
    with pytest.raises(ValueError):
        Exponent(0)
    with pytest.raises(ValueError):
        Exponent("1/2").conjugate()
    assert str(Exponent("inf")) == "inf" and float(Exponent("3/4")) == 0.75


def test_lp_weighted_norm_examples():
    for p in ("1/3", "1/2", "1", "2", "inf"):
        assert lp_weighted_norm([5], p) == pytest.approx(5)
    assert lp_weighted_norm([3, 4], 1) == 7
    assert lp_weighted_norm([3, 4], "inf") == 4
    assert lp_weighted_norm([3, 4], "1/2") == pytest.approx(7 + 4 * np.sqrt(3))
    assert lp_weighted_norm([3, 4], 2, [2, 1]) == pytest.approx(np.sqrt(52))


def test_mixed_norm_examples():
    V = np.zeros((4, 4), dtype=complex)
    V[1, 2] = 3 - 4j
    for p, q in [("1/2", "2"), ("1", "inf"), ("inf", "1/3")]:
        assert mixed_lpq_norm(V, p, q) == pytest.approx(5)
    assert mixed_lpq_norm(np.ones((4, 4)), 1, 1) == 16
    assert mixed_lpq_norm(np.ones((4, 4)), 2, "inf") == pytest.approx(2)


def test_mixed_norm_order_of_axes(rng):
    V = np.abs(cgauss(rng, (4, 4)))
    inner = (V**1).sum(axis=0)  # l^1 over time x for each xi
    assert mixed_lpq_norm(V, 1, "inf") == pytest.approx(inner.max())


def _modnorm_direct(f, phi, p, q):
    V = np.abs(stft_direct(f, phi))
    inner = V.max(axis=0) if math.isinf(p) else (V**p).sum(axis=0) ** (1 / p)
    return inner.max() if math.isinf(q) else (inner**q).sum() ** (1 / q)


def test_modnorm_delta_window_closed_form(rng):
    assert modnorm(DELTA4, ModSpec(1, 1, window=DELTA4)) == pytest.approx(2)
    f = cgauss(rng, 4)
    for p, q in [(1, 1), (0.5, 2), (2, 0.5)]:
        val = modnorm(f, ModSpec(p, q, window=DELTA4))
        closed = 4 ** (1 / q) * 4 ** -0.5 * lp_weighted_norm(f, p)
        assert val == pytest.approx(closed, rel=1e-12)
        assert val == pytest.approx(_modnorm_direct(f, DELTA4, p, q), rel=1e-12)


def test_modnorm_gaussian_window_direct(rng):
    f = cgauss(rng, 6)
    phi = gaussian_window(6)
    for p, q in [("1/2", "1/2"), ("1", "inf"), ("2", "1")]:
        assert modnorm(f, ModSpec(p, q)) == pytest.approx(_modnorm_direct(f, phi, float(Exponent(p)), float(Exponent(q))), rel=1e-12)


def test_modnorm_zero_and_errors():
    assert modnorm(np.zeros(8), ModSpec(1)) == 0
    with pytest.raises(ValueError):
        ModSpec(1, window=np.zeros(4))
    with pytest.raises(ValueError):
        modnorm(np.ones(8), ModSpec(1, window=np.ones(4)))


def test_modnorm_chunking(rng, monkeypatch):
    f = cgauss(rng, (4, 4))
    w = standard_weight("polynomial", 4, 4, 1)
    spec = ModSpec("1/2", "2", w)
    dense = modnorm(f, spec)
    monkeypatch.setattr(spaces, "_CHUNK", 16)
    assert modnorm(f, spec) == pytest.approx(dense, rel=1e-13)


def test_lattice_modnorm_delta_window(rng):
    N = 4
    sys = GaborSystem(DELTA4, GaborLattice(1, 1, N))
    assert lattice_modnorm(DELTA4, sys, 1) == pytest.approx(1.0)
    # coefficients <f, pi(lambda) delta/N> = N^(-1/2) V_delta f on the full grid
    f = cgauss(rng, N)
    for p in (0.5, 1, 2):
        assert lattice_modnorm(f, sys, p) == pytest.approx(modnorm(f, ModSpec(p, window=DELTA4)) / np.sqrt(N), rel=1e-12)
    assert lattice_modnorm(np.zeros(N), sys, 1) == 0


def test_lattice_modnorm_not_a_frame():
    with pytest.raises(NotAFrameError):
        lattice_modnorm(np.ones(4), GaborSystem.gaussian(4, 4, 4), 1)


def test_lattice_modnorm_equivalence(rng):
    sys = GaborSystem.gaussian(16, 2, 2)
    ratios = [lattice_modnorm(f, sys, 1) / modnorm(f, ModSpec(1)) for f in (cgauss(rng, 16) for _ in range(200))]
    C = max(max(ratios), 1 / min(ratios))
    assert np.isfinite(C)
    assert all(1 / C <= r <= C for r in ratios)


def test_up_matrix_norm_examples():
    E = np.zeros((3, 2))
    E[2, 1] = 1
    assert up_matrix_norm(MatrixOperator(E), "1/2") == 1
    M = MatrixOperator([[3, 4], [0, 0]])
    assert up_matrix_norm(M, 1) == 7
    assert up_matrix_norm(M, "1/2") == pytest.approx(7 + 4 * np.sqrt(3))
    W = MatrixOperator([[1, 1]], omega1=[1, 2], omega2=[4])
    assert up_matrix_norm(W, 1) == pytest.approx(4 + 2)


def test_atomic_single_atom():
    sys = GaborSystem.gaussian(8, 2, 2)
    w = standard_weight("polynomial", 8, 2, 1)
    X = (3, 5)
    f = 3 * tf_shift(sys.window, X)
    bound, rep = atomic_norm_upper(f, sys, "1/2", w)
    assert len(rep.atoms) == 1 and rep.atoms[0][1] == ((3,), (5,))
    tol = 1e-8 * np.linalg.norm(f)
    assert bound <= 3 * w.values[X] * (1 + 1e-6) + tol
    np.testing.assert_allclose(rep.reconstruct(), f, atol=1e-12)


def test_atomic_zero_and_errors():
    sys = GaborSystem.gaussian(8, 2, 2)
    assert atomic_norm_upper(np.zeros(8), sys, 1)[0] == 0
    with pytest.raises(ConfigError):
        atomic_norm_upper(np.ones(8), sys, 2)
    with pytest.raises(NotAFrameError):
        atomic_norm_upper(np.ones(4), GaborSystem.gaussian(4, 4, 4), 1)


def test_atomic_is_min_of_candidates(rng):
    sys = GaborSystem.gaussian(8, 2, 2)
    f = cgauss(rng, 8)
    bound, rep = atomic_norm_upper(f, sys, "1/2")
    assert bound <= rep.lattice_bound
    assert bound == min(rep.candidates.values())
    assert rep.lattice_bound == pytest.approx(lattice_modnorm(f, sys, "1/2"), rel=1e-12)
    np.testing.assert_allclose(rep.reconstruct(), f, atol=1e-12)


def test_atomic_non_convergent_falls_back(rng):
    sys = GaborSystem.gaussian(8, 2, 2)
    f = cgauss(rng, 8)
    bound, rep = atomic_norm_upper(f, sys, 1, max_atoms=2)
    assert not rep.converged and rep.path == "lattice"
    assert bound == rep.lattice_bound


def test_atomic_p_triangle_with_merged_extras(rng):
    # pricing the merged expansions of f and g makes the bound p-subadditive
    sys = GaborSystem.gaussian(8, 2, 2)
    p = 0.5
    for _ in range(10):
        f, g = cgauss(rng, 8), cgauss(rng, 8)
        bf, rf = atomic_norm_upper(f, sys, p)
        bg, rg = atomic_norm_upper(g, sys, p)
        lists = [(rf.atoms, lattice_atoms(f, sys)), (rg.atoms, lattice_atoms(g, sys))]
        extra = [merge_atoms(x, y) for x, y in itertools.product(*lists)]
        bs, _ = atomic_norm_upper(f + g, sys, p, extra=extra)
        assert bs**p <= (bf**p + bg**p) * (1 + 1e-12)


def test_tensor_rank_one(rng):
    f, g = cgauss(rng, 8), cgauss(rng, 8)
    v1 = standard_weight("polynomial", 8, 2, 1)
    expected = modnorm(f, ModSpec("1/2", weight=v1)) * modnorm(g, ModSpec("1/2"))
    assert tensor_norm_upper(np.outer(f, g), "1/2", v1) == pytest.approx(expected, rel=1e-10)
    assert tensor_norm_upper(np.zeros((8, 8)), 1) == 0
    with pytest.raises(ValueError):
        tensor_norm_upper(np.ones(8), 1)


def test_tensor_equivalence(rng):
    ratios = []
    for _ in range(50):
        F = cgauss(rng, (8, 8))
        ratios.append(tensor_norm_upper(F, 1) / modnorm(F, ModSpec(1)))
    C = max(max(ratios), 1 / min(ratios))
    assert np.isfinite(C) and min(ratios) > 0


def test_embedding_check_examples():
    phi = gaussian_window(8)
    s = ModSpec(1, 1, window=phi)
    rep = embedding_check(s, s, 5, 0)
    assert rep["constants"] == {"lower": 1.0, "upper": 1.0} and rep["holds"]
    rep = embedding_check(ModSpec(1, 1, window=phi), ModSpec(2, 1, window=phi), 10, 1)
    assert rep["constants"]["upper"] <= 1 and rep["holds"]
    two = standard_weight("constant", 8, 2).values * 2
    rep = embedding_check(ModSpec(1, 1, two, phi), ModSpec(1, 1, None, phi), 10, 2)
    assert rep["constants"]["upper"] <= 0.5 + 1e-15 and rep["bound"] == 0.5
    with pytest.raises(ConfigError):
        embedding_check(ModSpec(2, window=phi), ModSpec(1, window=phi), 3, 0)


def test_translation_invariance_lemma(rng):
    N = 8
    psi = cgauss(rng, N)
    w = standard_weight("exponential", N, 2, 0.3)
    X = (3, 6)
    for p, q in [("1/2", "1"), ("1", "1"), ("2", "inf")]:
        lhs = modnorm(tf_shift(psi, X), ModSpec(p, q, shifted_weight(w, X)))
        rhs = modnorm(psi, ModSpec(p, q, w))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_shift_equality_constant_weight(rng):
    f = cgauss(rng, 8)
    assert modnorm(tf_shift(f, (2, 7)), ModSpec("1/2")) == pytest.approx(modnorm(f, ModSpec("1/2")), rel=1e-12)
