import numpy as np
import pytest
import scipy.linalg

from mrpibound import linalg
from mrpibound.exceptions import NotPositiveDefinite, NotSchurStable, SingularMatrix
from mrpibound.mrpi import random_schur_matrix

from conftest import brute_force_box_qp, random_spd


class TestSolveLinear:
    def test_identity(self):
        np.testing.assert_array_equal(linalg.solve_linear(np.eye(2), [3.0, -1.0]), [3.0, -1.0])

    def test_diagonal(self):
        np.testing.assert_allclose(linalg.solve_linear([[2.0, 0.0], [0.0, 4.0]], [2.0, 4.0]), [1.0, 1.0])

    def test_random_residual(self, rng):
        A = rng.standard_normal((8, 8)) + 8 * np.eye(8)
        b = rng.standard_normal(8)
        x = linalg.solve_linear(A, b)
        assert np.abs(A @ x - b).max() <= 1e-9 * (1 + np.abs(b).max())

    def test_needs_pivoting(self):
        x = linalg.solve_linear([[0.0, 1.0], [1.0, 0.0]], [2.0, 3.0])
        np.testing.assert_allclose(x, [3.0, 2.0])

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            linalg.solve_linear([[1.0, 2.0], [2.0, 4.0]], [1.0, 1.0])


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(linalg.cholesky(np.eye(3)), np.eye(3))

    def test_diagonal(self):
        np.testing.assert_allclose(linalg.cholesky([[4.0, 0.0], [0.0, 9.0]]), [[2.0, 0.0], [0.0, 3.0]])

    def test_lyapunov_scalar_fixed_point(self):
        L = linalg.cholesky(4.0 / 3.0 * np.eye(2))
        np.testing.assert_allclose(L, np.sqrt(4.0 / 3.0) * np.eye(2))

    def test_reconstruction(self, rng):
        P = random_spd(rng, 6, cond=1e3)
        L = linalg.cholesky(P)
        assert np.allclose(L, np.tril(L))
        assert np.linalg.norm(L @ L.T - P) <= 1e-9 * np.linalg.norm(P)

    @pytest.mark.parametrize("P", [[[1.0, 0.0], [0.0, -1.0]], [[1.0, 2.0], [2.0, 1.0]], [[1.0, 0.5], [0.0, 1.0]]])
    def test_rejects(self, P):
        with pytest.raises(NotPositiveDefinite):
            linalg.cholesky(P)


class TestEigen:
    def test_sym_eig_max(self):
        assert linalg.sym_eig_max(np.diag([1.0, 5.0, 2.0])) == pytest.approx(5.0, rel=1e-8)
        assert linalg.sym_eig_max(np.zeros((3, 3))) == pytest.approx(0.0, abs=1e-12)
        assert linalg.sym_eig_max([[2.0, 1.0], [1.0, 2.0]]) == pytest.approx(3.0, rel=1e-8)

    def test_spectral_radius(self):
        assert linalg.spectral_radius(0.5 * np.eye(2)) == pytest.approx(0.5, rel=1e-6)
        assert linalg.spectral_radius([[0.0, 0.9], [0.0, 0.0]]) == pytest.approx(0.0, abs=1e-12)
        assert linalg.spectral_radius([[0.8, 0.5], [0.0, 0.7]]) == pytest.approx(0.8, rel=1e-6)

    def test_spectral_radius_complex_pair(self):
        # rotation by 90 degrees scaled by 0.6 has eigenvalues +/- 0.6 i
        A = 0.6 * np.array([[0.0, -1.0], [1.0, 0.0]])
        assert linalg.spectral_radius(A) == pytest.approx(0.6, rel=1e-6)


class TestLyapunov:
    def test_zero_matrix(self):
        np.testing.assert_allclose(linalg.solve_discrete_lyapunov(np.zeros((2, 2)), np.eye(2)), np.eye(2))

    def test_scalar_case(self):
        P = linalg.solve_discrete_lyapunov(0.5 * np.eye(2), np.eye(2))
        np.testing.assert_allclose(P, 4.0 / 3.0 * np.eye(2), rtol=1e-12)

    def test_random_residual_and_scipy(self, rng):
        A = random_schur_matrix(6, seed=3)
        Q = np.eye(6)
        P = linalg.solve_discrete_lyapunov(A, Q)
        assert np.linalg.norm(A.T @ P @ A - P + Q) <= 1e-8 * np.linalg.norm(Q)
        # scipy solves A X A^H - X + Q = 0, so pass A^T
        np.testing.assert_allclose(P, scipy.linalg.solve_discrete_lyapunov(A.T, Q), rtol=1e-8, atol=1e-10)
        x = rng.standard_normal((100, 6))
        assert np.all(np.einsum("ij,jk,ik->i", x, P, x) > 0)

    def test_unstable(self):
        with pytest.raises(NotSchurStable):
            linalg.solve_discrete_lyapunov(1.2 * np.eye(2), np.eye(2))


class TestBoxQP:
    def test_interior(self):
        z = linalg.solve_qp(np.eye(2), [-1.0, -1.0], [-10, -10], [10, 10])
        np.testing.assert_allclose(z, [1.0, 1.0], atol=1e-12)

    def test_clipped(self):
        z = linalg.solve_qp(np.eye(1), [-5.0], [0.0], [1.0])
        np.testing.assert_allclose(z, [1.0])

    def test_infinite_bounds(self):
        H = np.array([[2.0, 0.5], [0.5, 1.0]])
        z = linalg.solve_qp(H, [1.0, -1.0], [-np.inf, 0.0], [np.inf, np.inf])
        assert linalg.qp_kkt_satisfied(H, [1.0, -1.0], z, [-np.inf, 0.0], [np.inf, np.inf])

    def test_equal_bounds(self):
        z = linalg.solve_qp(np.eye(2), [-1.0, -1.0], [0.3, -1.0], [0.3, 1.0])
        np.testing.assert_allclose(z, [0.3, 1.0])

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_enumeration(self, seed):
        rng = np.random.default_rng(seed)
        n = 6
        H = random_spd(rng, n, cond=50.0)
        g = 3 * rng.standard_normal(n)
        lower = -rng.uniform(0.1, 1.0, n)
        upper = rng.uniform(0.1, 1.0, n)
        z = linalg.solve_qp(H, g, lower, upper)
        np.testing.assert_allclose(z, brute_force_box_qp(H, g, lower, upper), atol=1e-6)
        assert linalg.qp_kkt_satisfied(H, g, z, lower, upper)
