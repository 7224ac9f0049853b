import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bwgeo.exceptions import AsymmetricInput, DimensionMismatch, FactorMismatch, NotPsd, NotSpd, RankDeficient
from bwgeo.linalg import (
    DEFAULT_TOL,
    Tolerances,
    check_factor,
    eig_sym,
    eigenspaces,
    intersect_nontrivial,
    kernel_basis,
    orth_complement,
    pinv_sym,
    polar_orthogonal,
    rank_with_tol,
    spectral_norm,
    sqrt_psd,
    sylvester_spd,
    symmetrize,
)

seeds = st.integers(0, 2**32 - 1)


def _psd(seed, n, k):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, k))
    return x @ x.T


class TestTolerances:
    def test_defaults(self):
        assert DEFAULT_TOL.rank_rel == 1e-9
        assert DEFAULT_TOL.sym_abs == 1e-8

    @pytest.mark.parametrize("kw", [{"rank_rel": 0.0}, {"sym_abs": -1.0}, {"rank_rel": 1.0}, {"geo_tol": 0.0}])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            Tolerances(**kw)


class TestSymmetrize:
    def test_already_symmetric(self):
        np.testing.assert_array_equal(symmetrize(np.diag([1.0, 2.0])), np.diag([1.0, 2.0]))

    def test_averages_small_asymmetry(self):
        out = symmetrize([[1.0, 1 + 1e-12], [1 - 1e-12, 1.0]])
        np.testing.assert_allclose(out, np.ones((2, 2)), atol=1e-15)
        assert np.array_equal(out, out.T)

    def test_rejects_asymmetry(self):
        with pytest.raises(AsymmetricInput):
            symmetrize([[0.0, 1.0], [0.0, 0.0]])

    def test_rejects_nonfinite(self):
        with pytest.raises(AsymmetricInput):
            symmetrize([[np.nan, 0.0], [0.0, 1.0]])

    def test_rejects_non_square(self):
        with pytest.raises(DimensionMismatch):
            symmetrize(np.zeros((2, 3)))


class TestEigSym:
    def test_permutation(self):
        u, d = eig_sym(np.diag([3.0, 1.0]))
        np.testing.assert_array_equal(d, [1.0, 3.0])
        np.testing.assert_allclose(np.abs(u), [[0, 1], [1, 0]])

    def test_swap(self):
        _, d = eig_sym([[0.0, 1.0], [1.0, 0.0]])
        np.testing.assert_allclose(d, [-1.0, 1.0])

    def test_zero(self):
        u, d = eig_sym(np.zeros((3, 3)))
        np.testing.assert_array_equal(d, 0.0)
        np.testing.assert_allclose(u @ u.T, np.eye(3))

    def test_empty(self):
        u, d = eig_sym(np.zeros((0, 0)))
        assert u.shape == (0, 0) and d.shape == (0,)


class TestRank:
    @pytest.mark.parametrize("values, expected", [((4, 1e-15, 0), 1), ((2, 2, 2), 3), ((), 0), ((0, 0), 0)])
    def test_examples(self, values, expected):
        assert rank_with_tol(values) == expected

    def test_explicit_scale(self):
        assert rank_with_tol([1e-15], scale=1.0) == 0
        assert rank_with_tol([1e-15]) == 1

    @given(seeds, st.floats(1e-6, 1e6))
    def test_scale_invariance(self, seed, c):
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(6) * rng.choice([0.0, 1.0, 1e-12], size=6)
        assert rank_with_tol(v) == rank_with_tol(c * v)


class TestSqrtPinv:
    def test_diag(self):
        np.testing.assert_allclose(sqrt_psd(np.diag([4.0, 9.0, 0.0])), np.diag([2.0, 3.0, 0.0]))

    def test_identity(self):
        np.testing.assert_allclose(sqrt_psd(np.eye(3)), np.eye(3))

    def test_square_equals_input(self):
        s = np.array([[2.0, 1.0], [1.0, 2.0]])
        r = sqrt_psd(s)
        np.testing.assert_allclose(r @ r, s, atol=1e-14)
        np.testing.assert_allclose(np.linalg.eigvalsh(r), [1.0, math.sqrt(3.0)])

    def test_noise_is_zeroed(self):
        s = np.diag([1.0, -1e-13, 1e-13])
        np.testing.assert_array_equal(sqrt_psd(s), np.diag([1.0, 0.0, 0.0]))

    def test_rejects_negative(self):
        with pytest.raises(NotPsd):
            sqrt_psd(np.diag([1.0, -1.0]))

    @settings(max_examples=200)
    @given(seeds, st.integers(1, 10), st.integers(0, 10))
    def test_square_property(self, seed, n, k):
        s = _psd(seed, n, min(k, n))
        r = sqrt_psd(s)
        assert np.max(np.abs(r @ r - s)) <= DEFAULT_TOL.geo_tol * max(1.0, np.max(np.abs(s))) * 10

    def test_pinv_examples(self):
        np.testing.assert_allclose(pinv_sym(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))
        np.testing.assert_allclose(pinv_sym(np.ones((2, 2))), np.full((2, 2), 0.25), atol=1e-15)
        a = np.array([[2.0, 1.0], [1.0, 3.0]])
        np.testing.assert_allclose(pinv_sym(a), np.linalg.inv(a), atol=1e-12)

    @given(seeds, st.integers(1, 8), st.integers(0, 8))
    def test_moore_penrose(self, seed, n, k):
        s = _psd(seed, n, min(k, n))
        p = pinv_sym(s)
        tol = 1e-8 * max(1.0, np.max(np.abs(s))) * max(1.0, np.max(np.abs(p)))
        assert np.max(np.abs(s @ p @ s - s)) <= tol
        assert np.max(np.abs(p @ s @ p - p)) <= tol
        assert np.max(np.abs(s @ p - (s @ p).T)) <= tol
        assert np.max(np.abs(p @ s - (p @ s).T)) <= tol


class TestSylvester:
    def test_identity(self):
        b = np.array([[1.0, 2.0], [2.0, -3.0]])
        np.testing.assert_allclose(sylvester_spd(np.eye(2), b), b / 2)

    def test_diag(self):
        out = sylvester_spd(np.diag([1.0, 3.0]), np.array([[2.0, 4.0], [4.0, 6.0]]))
        np.testing.assert_allclose(out, np.ones((2, 2)), atol=1e-15)

    def test_zero(self):
        np.testing.assert_array_equal(sylvester_spd(np.diag([1.0, 3.0]), np.zeros((2, 2))), 0.0)

    def test_rejects_singular(self):
        with pytest.raises(NotSpd):
            sylvester_spd(np.diag([1.0, 0.0]), np.eye(2))

    @given(seeds, st.integers(1, 10))
    def test_against_kronecker(self, seed, n):
        rng = np.random.default_rng(seed)
        a = _psd(seed, n, n) + 0.5 * np.eye(n)
        b = rng.standard_normal((n, n))
        b = b + b.T
        z = sylvester_spd(a, b)
        assert np.max(np.abs(a @ z + z @ a - b)) <= DEFAULT_TOL.geo_tol * max(1.0, np.max(np.abs(b))) * np.linalg.cond(a)
        kron = np.kron(np.eye(n), a) + np.kron(a, np.eye(n))
        z_ref = np.linalg.solve(kron, b.reshape(-1)).reshape(n, n)
        np.testing.assert_allclose(z, z_ref, atol=1e-8)


class TestPolar:
    def test_rotation(self):
        m = np.array([[0.0, -1.0], [1.0, 0.0]])
        h, r = polar_orthogonal(m)
        np.testing.assert_allclose(h, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(r, m, atol=1e-15)

    def test_reflection(self):
        h, r = polar_orthogonal(np.diag([2.0, -3.0]))
        np.testing.assert_allclose(h, np.diag([2.0, 3.0]))
        np.testing.assert_allclose(r, np.diag([1.0, -1.0]))

    def test_singular_tie_break(self):
        h, r = polar_orthogonal(np.diag([5.0, 0.0]))
        np.testing.assert_allclose(h, np.diag([5.0, 0.0]))
        np.testing.assert_allclose(r, np.eye(2))

    @settings(max_examples=100)
    @given(seeds, st.integers(1, 7), st.integers(0, 7))
    def test_contract(self, seed, n, k):
        rng = np.random.default_rng(seed)
        m = rng.standard_normal((n, min(k, n))) @ rng.standard_normal((min(k, n), n))
        h, r = polar_orthogonal(m)
        assert np.max(np.abs(h @ r - m)) <= 1e-9 * max(1.0, np.max(np.abs(m)))
        np.testing.assert_allclose(r.T @ r, np.eye(n), atol=1e-12)
        assert np.linalg.eigvalsh(h)[0] >= -1e-12 * max(1.0, np.max(np.abs(m)))


class TestComplementNorms:
    def test_complement_e3(self):
        xp = orth_complement(np.eye(3)[:, :2])
        np.testing.assert_allclose(np.abs(xp[:, 0]), [0, 0, 1], atol=1e-15)

    def test_complement_full(self):
        assert orth_complement(np.eye(3)).shape == (3, 0)

    def test_complement_random(self, rng):
        x = rng.standard_normal((5, 2))
        xp = orth_complement(x)
        np.testing.assert_allclose(xp.T @ xp, np.eye(3), atol=1e-14)
        np.testing.assert_allclose(xp.T @ x, 0.0, atol=1e-14)

    def test_complement_rank_deficient(self):
        with pytest.raises(RankDeficient):
            orth_complement(np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]]))

    def test_spectral_norm(self):
        assert spectral_norm(np.diag([3.0, -4.0])) == pytest.approx(4.0)
        assert spectral_norm(np.zeros((2, 2))) == 0.0
        assert spectral_norm(np.zeros((0, 3))) == 0.0
        assert spectral_norm([[1.0, 1.0], [0.0, 1.0]]) == pytest.approx(math.sqrt((3 + math.sqrt(5)) / 2))


class TestKernels:
    def test_kernel_diag(self):
        k = kernel_basis(np.diag([1.0, 0.0, 0.0]))
        assert k.shape == (3, 2)
        np.testing.assert_allclose(k[0], 0.0)

    def test_kernel_invertible(self):
        assert kernel_basis(np.eye(2)).shape == (2, 0)

    def test_kernel_rank_one(self):
        k = kernel_basis(np.ones((2, 2)))
        np.testing.assert_allclose(np.abs(k[:, 0]), [1 / math.sqrt(2)] * 2)
        assert k[0, 0] * k[1, 0] < 0

    def test_intersections(self):
        e = np.eye(3)
        assert intersect_nontrivial(e[:2, :1], np.diag([0.0, 1.0]))
        assert not intersect_nontrivial(e[:2, :1], np.diag([1.0, 0.0]))
        assert intersect_nontrivial(e[:, :2], np.diag([1.0, 0.0, 1.0]))
        assert not intersect_nontrivial(e[:, :0], np.eye(3))

    def test_eigenspaces_cluster(self):
        groups = eigenspaces(np.diag([1.0, 2.0, 2.0 + 1e-12, 5.0]))
        assert [g[1].shape[1] for g in groups] == [1, 2, 1]
        np.testing.assert_allclose([g[0] for g in groups], [1.0, 2.0, 5.0])

    def test_check_factor(self):
        x = np.eye(3)[:, :2]
        assert check_factor(x, np.diag([1.0, 1.0, 0.0])) is not None
        with pytest.raises(FactorMismatch):
            check_factor(x, np.eye(3))
