import numpy as np
import pytest

from walkernel import linalg as la


rng = np.random.default_rng(12345)


class TestVecUnvec:
    def test_vec_column_stacking(self):
        m = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert la.vec(m).tolist() == [1.0, 3.0, 2.0, 4.0]

    def test_vec_1x1(self):
        assert la.vec(np.array([[5.0]])).tolist() == [5.0]

    def test_unvec_inverse(self):
        assert la.unvec(np.array([1.0, 3.0, 2.0, 4.0]), 2, 2).tolist() == \
            [[1.0, 2.0], [3.0, 4.0]]

    def test_unvec_zero(self):
        assert np.all(la.unvec(np.zeros(6), 3, 2) == 0)

    def test_round_trip(self):
        for _ in range(20):
            r, c = rng.integers(1, 7, size=2)
            m = rng.standard_normal((r, c))
            assert np.array_equal(la.unvec(la.vec(m), r, c), m)

    def test_unvec_dimension_mismatch(self):
        with pytest.raises(ValueError):
            la.unvec(np.zeros(5), 2, 2)


class TestKron:
    def test_identity_factor(self):
        a = np.array([[1.0, 2.0], [3.0, 4.0]])
        out = la.kron(a, np.eye(2))
        assert out[0].tolist() == [1.0, 0.0, 2.0, 0.0]

    def test_scalar_case(self):
        assert la.kron(np.array([[3.0]]), np.array([[4.0]]))[0, 0] == 12.0

    def test_mixed_product(self):
        for _ in range(10):
            a, b, c, d = (rng.standard_normal((2, 2)) for _ in range(4))
            lhs = la.kron(a, b) @ la.kron(c, d)
            rhs = la.kron(a @ c, b @ d)
            assert np.abs(lhs - rhs).max() <= 1e-12

    def test_sparse_inputs_stay_sparse(self):
        a = la.SparseMatrix.from_dense(np.eye(3))
        b = la.SparseMatrix.from_dense(np.array([[0.0, 1.0], [1.0, 0.0]]))
        out = la.kron(a, b)
        assert isinstance(out, la.SparseMatrix)
        assert out.nnz() == 6
        assert np.array_equal(out.to_dense(), np.kron(np.eye(3), b.to_dense()))


class TestKronSum:
    def test_scalar(self):
        out = la.kron_sum(np.array([[2.0]]), np.array([[3.0]]))
        assert out[0, 0] == 5.0

    def test_zero_partner(self):
        a = rng.standard_normal((3, 3))
        out = la.kron_sum(a, np.zeros((2, 2)))
        assert np.abs(out - np.kron(a, np.eye(2))).max() == 0.0

    def test_vec_identity_rectangular_sizes(self):
        a = rng.standard_normal((3, 3))
        b = rng.standard_normal((2, 2))
        c = rng.standard_normal((2, 3))
        lhs = la.kron_sum(a, b) @ la.vec(c)
        rhs = la.vec(np.eye(2) @ c @ a.T + b @ c @ np.eye(3).T)
        assert np.abs(lhs - rhs).max() <= 1e-12


class TestHadamard:
    def test_ones(self):
        a = rng.standard_normal((3, 4))
        assert np.array_equal(la.hadamard(a, np.ones((3, 4))), a)

    def test_zeros(self):
        a = rng.standard_normal((3, 4))
        assert np.all(la.hadamard(a, np.zeros((3, 4))) == 0)

    def test_kron_interplay(self):
        a, c = (rng.standard_normal((2, 2)) for _ in range(2))
        b, d = (rng.standard_normal((2, 2)) for _ in range(2))
        lhs = la.hadamard(la.kron(a, b), la.kron(c, d))
        rhs = la.kron(la.hadamard(a, c), la.hadamard(b, d))
        assert np.abs(lhs - rhs).max() <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            la.hadamard(np.zeros((2, 2)), np.zeros((2, 3)))


class TestKronMatVec:
    def test_identity(self):
        r = rng.standard_normal(9)
        out = la.kron_mat_vec(np.eye(3), np.eye(3), r)
        assert np.abs(out - r).max() == 0.0

    def test_matches_explicit(self):
        for _ in range(10):
            a = rng.standard_normal((4, 4))
            b = rng.standard_normal((4, 4))
            r = rng.standard_normal(16)
            assert np.abs(la.kron_mat_vec(a, b, r) - np.kron(a, b) @ r).max() <= 1e-12

    def test_rectangular(self):
        a = rng.standard_normal((2, 3))
        b = rng.standard_normal((4, 5))
        r = rng.standard_normal(15)
        assert np.abs(la.kron_mat_vec(a, b, r) - np.kron(a, b) @ r).max() <= 1e-12

    def test_sparse_matches_dense(self):
        dense_a = np.zeros((10, 10))
        dense_b = np.zeros((10, 10))
        for _ in range(30):
            dense_a[rng.integers(10), rng.integers(10)] = rng.standard_normal()
            dense_b[rng.integers(10), rng.integers(10)] = rng.standard_normal()
        sa, sb = la.SparseMatrix.from_dense(dense_a), la.SparseMatrix.from_dense(dense_b)
        r = rng.standard_normal(100)
        assert np.abs(la.kron_mat_vec(sa, sb, r)
                      - la.kron_mat_vec(dense_a, dense_b, r)).max() <= 1e-12

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            la.kron_mat_vec(np.eye(2), np.eye(2), np.zeros(5))

    def test_all_small_sizes(self):
        for n in range(1, 9):
            a = rng.standard_normal((n, n))
            b = rng.standard_normal((n, n))
            r = rng.standard_normal(n * n)
            assert np.abs(la.kron_mat_vec(a, b, r) - np.kron(a, b) @ r).max() <= 1e-12


class TestSumKronMatVec:
    def test_single_pair(self):
        a, b = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
        r = rng.standard_normal(9)
        assert np.array_equal(la.sum_kron_mat_vec([(a, b)], r),
                              la.kron_mat_vec(a, b, r))

    def test_zero_second_factor(self):
        a, b = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
        r = rng.standard_normal(9)
        out = la.sum_kron_mat_vec([(a, b), (a, np.zeros((3, 3)))], r)
        assert np.abs(out - la.kron_mat_vec(a, b, r)).max() <= 1e-15

    def test_three_pairs_vs_oracle(self):
        pairs = [(rng.standard_normal((3, 3)), rng.standard_normal((3, 3)))
                 for _ in range(3)]
        r = rng.standard_normal(9)
        explicit = sum(np.kron(a, b) for a, b in pairs)
        assert np.abs(la.sum_kron_mat_vec(pairs, r) - explicit @ r).max() <= 1e-12

    def test_inconsistent_dims(self):
        with pytest.raises(ValueError):
            la.sum_kron_mat_vec([(np.eye(2), np.eye(2)), (np.eye(3), np.eye(2))],
                                np.zeros(4))


class TestDenseSolve:
    def test_identity(self):
        b = rng.standard_normal(5)
        assert np.array_equal(la.dense_solve(np.eye(5), b), b)

    def test_scaled_identity(self):
        out = la.dense_solve(2 * np.eye(4), np.ones(4))
        assert np.abs(out - 0.5).max() <= 1e-15

    def test_residual_random_system(self):
        m = rng.standard_normal((8, 8)) + 8 * np.eye(8)
        b = rng.standard_normal(8)
        x = la.dense_solve(m, b)
        assert np.linalg.norm(m @ x - b) <= 1e-10 * (1 + np.linalg.norm(b))

    def test_singular_raises(self):
        m = np.ones((3, 3))
        with pytest.raises(la.SingularOperatorError):
            la.dense_solve(m, np.ones(3))


class TestCgSolve:
    def test_identity_one_iteration(self):
        b = rng.standard_normal(6)
        rep = la.cg_solve(lambda v: v, b, tol=1e-12)
        assert rep.converged and rep.iterations <= 1
        assert np.abs(rep.solution - b).max() <= 1e-12

    def test_matches_dense_solve(self):
        # resolvent system on the 2-cycle product graph
        a = np.array([[0.0, 1.0], [1.0, 0.0]])
        w = np.kron(a, a)
        m = np.eye(4) - 0.1 * w
        b = np.full(4, 0.25)
        rep = la.cg_solve(lambda v: m @ v, b, tol=1e-12, apply_t=lambda v: m.T @ v)
        assert np.abs(rep.solution - la.dense_solve(m, b)).max() <= 1e-8

    def test_two_distinct_eigenvalues(self):
        m = np.diag([1.0, 1.0, 2.0, 2.0])
        b = rng.standard_normal(4)
        rep = la.cg_solve(lambda v: m @ v, b, tol=1e-10)
        assert rep.converged and rep.iterations <= 3

    def test_nonconvergence_flagged(self):
        m = np.diag(np.arange(1.0, 40.0))
        b = np.ones(39)
        rep = la.cg_solve(lambda v: m @ v, b, tol=1e-14, max_iter=2)
        assert not rep.converged

    def test_nonsymmetric_via_transpose(self):
        m = np.eye(5) + 0.3 * rng.standard_normal((5, 5))
        b = rng.standard_normal(5)
        rep = la.cg_solve(lambda v: m @ v, b, tol=1e-10, max_iter=200,
                          apply_t=lambda v: m.T @ v)
        assert rep.converged
        assert np.linalg.norm(m @ rep.solution - b) <= 1e-9 * np.linalg.norm(b) * 10


class TestFixedPoint:
    def test_lam_zero(self):
        p = rng.standard_normal(4)
        rep = la.fixed_point_solve(lambda v: v, p, 0.0)
        assert rep.iterations == 1 and np.array_equal(rep.solution, p)

    def test_row_stochastic_uniform(self):
        a = np.array([[0.0, 0.5, 0.5], [0.3, 0.0, 0.7], [1.0, 0.0, 0.0]])
        p = np.full(3, 1.0 / 3)
        lam = 0.4
        rep = la.fixed_point_solve(lambda v: a.T @ v, p, lam, tol=1e-14,
                                   max_iter=10000)
        # uniform start is preserved in total mass: x sums to 1/(1-lam)
        assert abs(rep.solution.sum() - 1.0 / (1 - lam)) <= 1e-10

    def test_contraction_matches_dense(self):
        w = rng.standard_normal((6, 6))
        w /= 2 * np.linalg.norm(w, 2)
        p = rng.standard_normal(6)
        lam = 0.9
        rep = la.fixed_point_solve(lambda v: w @ v, p, lam, tol=1e-12,
                                   max_iter=5000)
        x = la.dense_solve(np.eye(6) - lam * w, p)
        assert np.abs(rep.solution - x).max() <= 1e-10

    def test_divergence_detected(self):
        w = 5.0 * np.eye(3)
        with pytest.raises(la.DivergenceError):
            la.fixed_point_solve(lambda v: w @ v, np.ones(3), 1.0, max_iter=10000)

    def test_max_iter_flag(self):
        w = 0.999 * np.eye(3)
        rep = la.fixed_point_solve(lambda v: w @ v, np.ones(3), 1.0, tol=1e-15,
                                   max_iter=3)
        assert not rep.converged


class TestSylvester:
    def test_zero_factors(self):
        m0 = rng.standard_normal((4, 4))
        out = la.sylvester_solve(np.zeros((4, 4)), np.zeros((4, 4)), m0)
        assert np.abs(out - m0).max() <= 1e-12

    def test_scalar_operator(self):
        alpha = 0.7
        m0 = rng.standard_normal((3, 3))
        out = la.sylvester_solve(alpha * np.eye(3), alpha * np.eye(3), m0)
        assert np.abs(out - m0 / (1 - alpha ** 2)).max() <= 1e-10

    def test_matches_vectorized_oracle(self):
        for _ in range(5):
            s = rng.standard_normal((5, 5))
            t = rng.standard_normal((5, 5))
            s /= 2 * np.abs(np.linalg.eigvals(s)).max()
            t /= 2 * np.abs(np.linalg.eigvals(t)).max()
            m0 = rng.standard_normal((5, 5))
            m = la.sylvester_solve(s, t, m0)
            x = la.dense_solve(np.eye(25) - np.kron(t.T, s), la.vec(m0))
            assert np.abs(la.vec(m) - x).max() <= 1e-8

    def test_symmetric_route(self):
        s = rng.standard_normal((6, 6))
        s = 0.2 * (s + s.T)
        t = rng.standard_normal((6, 6))
        t = 0.2 * (t + t.T)
        m0 = rng.standard_normal((6, 6))
        m = la.sylvester_solve(s, t, m0)
        assert np.abs(m - s @ m @ t - m0).max() <= 1e-8 * (1 + np.abs(m0).max())

    def test_singular_stein_raises(self):
        # eigenvalue product exactly 1
        s = np.eye(2)
        t = np.eye(2)
        with pytest.raises(la.SingularOperatorError):
            la.sylvester_solve(s, t, np.ones((2, 2)))


class TestGeneralizedSylvester:
    def test_d1_agrees_with_sylvester(self):
        s = rng.standard_normal((4, 4))
        t = rng.standard_normal((4, 4))
        s /= 2 * np.abs(np.linalg.eigvals(s)).max()
        t /= 2 * np.abs(np.linalg.eigvals(t)).max()
        m0 = rng.standard_normal((4, 4))
        direct = la.sylvester_solve(s, t, m0)
        general = la.generalized_sylvester_solve([(s, t.T)], 1.0, m0, tol=1e-13)
        assert np.abs(direct - general).max() <= 1e-8

    def test_lam_zero(self):
        m0 = rng.standard_normal((3, 3))
        out = la.generalized_sylvester_solve(
            [(np.eye(3), np.eye(3))], 0.0, m0)
        assert np.array_equal(out, m0)

    def test_d2_matches_dense_oracle(self):
        pairs = [(rng.standard_normal((4, 4)), rng.standard_normal((4, 4)))
                 for _ in range(2)]
        lam = 0.05
        m0 = rng.standard_normal((4, 4))
        m = la.generalized_sylvester_solve(pairs, lam, m0, tol=1e-13)
        op = np.eye(16) - lam * sum(np.kron(t, s) for s, t in pairs)
        x = la.dense_solve(op, la.vec(m0))
        assert np.abs(la.vec(m) - x).max() <= 1e-8

    def test_divergence_raises(self):
        pairs = [(3 * np.eye(3), 3 * np.eye(3))]
        with pytest.raises(la.DivergenceError):
            la.generalized_sylvester_solve(pairs, 1.0, np.ones((3, 3)),
                                           max_iter=200)


class TestSymEig:
    def test_diag(self):
        eig = la.sym_eig(np.diag([3.0, 1.0]))
        assert np.abs(eig.eigenvalues - [1.0, 3.0]).max() <= 1e-12
        assert np.abs(np.abs(eig.eigenvectors) - np.eye(2)[:, ::-1]).max() <= 1e-12

    def test_two_cycle_spectrum(self):
        eig = la.sym_eig(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert np.abs(eig.eigenvalues - [-1.0, 1.0]).max() <= 1e-12

    def test_reconstruction_and_orthonormality(self):
        a = rng.standard_normal((6, 6))
        a = a + a.T
        eig = la.sym_eig(a)
        p, d = eig.eigenvectors, eig.eigenvalues
        assert np.abs(p.T @ p - np.eye(6)).max() <= 1e-10
        assert np.abs(p @ np.diag(d) @ p.T - a).max() <= 1e-8 * (1 + np.abs(a).max())

    def test_asymmetric_raises(self):
        with pytest.raises(ValueError):
            la.sym_eig(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestMatrixExp:
    def test_zero(self):
        assert np.array_equal(la.matrix_exp_oracle(np.zeros((3, 3))), np.eye(3))

    def test_diagonal(self):
        out = la.matrix_exp_oracle(np.diag([1.0, -2.0]), 1.0)
        assert np.abs(np.diag(out) - np.exp([1.0, -2.0])).max() <= 1e-12

    def test_matches_spectral_route(self):
        a = rng.standard_normal((5, 5))
        a = a + a.T
        t = 0.7
        eig = la.sym_eig(a)
        spectral = (eig.eigenvectors * np.exp(t * eig.eigenvalues)) @ eig.eigenvectors.T
        assert np.abs(la.matrix_exp_oracle(a, t) - spectral).max() <= \
            1e-9 * np.abs(spectral).max()


class TestSpectralRadius:
    def test_diag(self):
        m = np.diag([2.0, 1.0])
        est = la.spectral_radius_estimate(lambda v: m @ v, 2, iters=50)
        assert abs(est - 2.0) <= 1e-6

    def test_row_stochastic(self):
        a = np.array([[0.0, 0.5, 0.5], [0.2, 0.0, 0.8], [0.9, 0.1, 0.0]])
        est = la.spectral_radius_estimate(lambda v: a @ v, 3, iters=100)
        assert abs(est - 1.0) <= 1e-8

    def test_random_symmetric_vs_oracle(self):
        a = rng.standard_normal((5, 5))
        a = a + a.T
        est = la.spectral_radius_estimate(lambda v: a @ v, 5, iters=300)
        truth = np.abs(np.linalg.eigvalsh(a)).max()
        assert abs(est - truth) <= 1e-4

    def test_zero_operator(self):
        assert la.spectral_radius_estimate(lambda v: 0 * v, 4) == 0.0


class TestSparseMatrix:
    def test_invariants(self):
        m = la.SparseMatrix.from_coo(3, 3, [0, 0, 2], [2, 1, 0], [1.0, 2.0, 3.0])
        assert m.nnz() == 3
        assert m.row(0) == [(1, 2.0), (2, 1.0)]  # sorted columns

    def test_explicit_zeros_dropped(self):
        m = la.SparseMatrix.from_coo(2, 2, [0, 1], [0, 1], [0.0, 5.0])
        assert m.nnz() == 1

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            la.SparseMatrix.from_coo(2, 2, [0], [0], [np.inf])

    def test_carrier_validators(self):
        with pytest.raises(ValueError):
            la.as_vector([1.0, np.nan])
        with pytest.raises(ValueError):
            la.as_dense([[1.0, np.inf]])
        assert la.as_vector([1.0, 2.0]).shape == (2,)
