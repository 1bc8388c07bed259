import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from koopdmd import linalg


def random_matrix(rows, cols, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((rows, cols))


class TestSvd:
    def test_rank_one_example(self):
        # [[1,1],[1,1]] has singular values (2, 0); the leading pair of
        # singular vectors is (1/sqrt(2), 1/sqrt(2)) up to sign.
        r = linalg.svd([[1.0, 1.0], [1.0, 1.0]])
        assert_allclose(r.S, [2.0, 0.0], atol=1e-14)
        u = np.full(2, 1.0 / np.sqrt(2.0))
        assert_allclose(np.abs(r.W[:, 0]), u, atol=1e-14)
        assert_allclose(np.abs(r.V[:, 0]), u, atol=1e-14)
        assert np.sign(r.W[0, 0] * r.W[1, 0]) > 0  # same sign within the vector
        assert r.rank_kept == 2

    def test_identity(self):
        r = linalg.svd(np.eye(3))
        assert_allclose(r.S, np.ones(3))
        assert_allclose(r.W, np.eye(3))
        assert_allclose(r.V, np.eye(3))

    def test_diagonal_order(self):
        r = linalg.svd(np.diag([2.0, 3.0]))
        assert_allclose(r.S, [3.0, 2.0])
        # reconstruction recovers the original column placement
        assert_allclose(r.W @ np.diag(r.S) @ r.V.T, np.diag([2.0, 3.0]), atol=1e-14)

    @pytest.mark.parametrize("rows,cols,seed", [
        (3, 5, 0), (5, 3, 1), (50, 20, 2), (20, 50, 3), (200, 200, 4), (120, 37, 5),
    ])
    def test_invariants_random(self, rows, cols, seed):
        x = random_matrix(rows, cols, seed)
        r = linalg.svd(x)
        k = min(rows, cols)
        assert r.W.shape == (rows, k) and r.V.shape == (cols, k)
        assert np.all(np.diff(r.S) <= 0) and np.all(r.S >= 0)
        assert np.max(np.abs(r.W.T @ r.W - np.eye(k))) <= 1e-10
        assert np.max(np.abs(r.V.T @ r.V - np.eye(k))) <= 1e-10
        xf = np.linalg.norm(x)
        assert np.linalg.norm(r.W @ np.diag(r.S) @ r.V.T - x) <= 1e-8 * xf

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            linalg.svd(np.array([1.0, 2.0]))
        with pytest.raises(ValueError):
            linalg.svd([[np.nan, 1.0], [0.0, 1.0]])
        with pytest.raises(ValueError):
            linalg.svd(np.empty((0, 3)))


class TestEig:
    def test_rotation_matrix(self):
        th = np.pi / 4
        rot = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        r = linalg.eig(rot)
        got = sorted(r.eigenvalues, key=lambda z: z.imag)
        want = [np.exp(-1j * th), np.exp(1j * th)]
        assert_allclose(got, want, atol=1e-14)

    def test_companion_of_quadratic(self):
        # companion matrix of z^2 - 1: eigenvalues {1, -1}
        c = np.array([[0.0, 1.0], [1.0, 0.0]])
        r = linalg.eig(c)
        assert_allclose(sorted(r.eigenvalues.real), [-1.0, 1.0], atol=1e-14)
        assert_allclose(r.eigenvalues.imag, 0.0, atol=1e-14)

    @pytest.mark.parametrize("n,seed", [(2, 0), (5, 1), (30, 2), (100, 3)])
    def test_residual_and_unit_norm(self, n, seed):
        a = random_matrix(n, n, seed)
        r = linalg.eig(a)
        af = np.linalg.norm(a)
        for j in range(n):
            w = r.eigenvectors[:, j]
            assert abs(np.linalg.norm(w) - 1.0) <= 1e-12
            assert np.linalg.norm(a @ w - r.eigenvalues[j] * w) <= 1e-8 * af

    def test_conjugate_pairs_for_real_input(self):
        a = random_matrix(7, 7, 11)
        vals = linalg.eig(a).eigenvalues
        key = lambda z: (round(z.real, 9), round(z.imag, 9))
        paired = sorted(vals, key=key)
        mirrored = sorted(np.conj(vals), key=key)
        assert_allclose(paired, mirrored, atol=1e-9)

    def test_requires_square(self):
        with pytest.raises(ValueError):
            linalg.eig(np.ones((2, 3)))


class TestPinv:
    def test_single_column(self):
        # pseudoinverse of the column (1,1)^T is the row (1/2, 1/2)
        p = linalg.pinv([[1.0], [1.0]])
        assert_allclose(p, [[0.5, 0.5]], atol=1e-14)

    def test_zero_matrix(self):
        p = linalg.pinv(np.zeros((3, 2)))
        assert p.shape == (2, 3)
        assert np.all(p == 0.0)

    @pytest.mark.parametrize("rows,cols,seed", [(4, 4, 0), (6, 3, 1), (3, 6, 2), (40, 25, 3)])
    def test_penrose_identities(self, rows, cols, seed):
        x = random_matrix(rows, cols, seed)
        p = linalg.pinv(x)
        scale = max(1.0, np.linalg.norm(x))
        assert np.linalg.norm(x @ p @ x - x) <= 1e-8 * scale
        assert np.linalg.norm(p @ x @ p - p) <= 1e-8 * max(1.0, np.linalg.norm(p))
        assert np.max(np.abs((x @ p) - (x @ p).T)) <= 1e-8 * scale
        assert np.max(np.abs((p @ x) - (p @ x).T)) <= 1e-8 * scale

    def test_penrose_on_rank_deficient(self):
        x = np.array([[1.0, 1.0], [1.0, 1.0]])
        p = linalg.pinv(x)
        assert_allclose(x @ p @ x, x, atol=1e-12)
        assert_allclose(p, np.full((2, 2), 0.25), atol=1e-12)

    @given(st.integers(1, 4), st.integers(1, 4), st.integers(0, 10_000))
    @settings(max_examples=50, deadline=None)
    def test_penrose_property(self, rows, cols, seed):
        x = random_matrix(rows, cols, seed)
        p = linalg.pinv(x)
        scale = max(1.0, np.linalg.norm(x))
        assert np.linalg.norm(x @ p @ x - x) <= 1e-8 * scale


class TestGram:
    def test_single_column(self):
        assert_allclose(linalg.gram([[1.0], [1.0]], 0.5), [[1.0]])

    def test_cosine_quarter_period(self):
        # columns: cos(k*pi/2) for k=0..3 and its one-step shift; over the
        # full period the two are orthogonal and each has energy 2.
        col1 = np.cos(np.arange(4) * np.pi / 2)
        col2 = np.cos((np.arange(4) + 1) * np.pi / 2)
        g = linalg.gram(np.column_stack([col1, col2]), 0.25)
        assert_allclose(g, [[0.5, 0.0], [0.0, 0.5]], atol=1e-15)

    @pytest.mark.parametrize("seed", range(4))
    def test_symmetric_and_psd(self, seed):
        x = random_matrix(17, 9, seed)
        g = linalg.gram(x, 1.0 / 17.0)
        assert np.array_equal(g, g.T)  # exactly symmetric by construction
        evals = np.linalg.eigvalsh(g)
        assert evals.min() >= -1e-10 * max(1.0, evals.max())

    def test_scale_validation(self):
        with pytest.raises(ValueError):
            linalg.gram(np.eye(2), 0.0)
        with pytest.raises(ValueError):
            linalg.gram(np.eye(2), -1.0)
