import math

import numpy as np
import pytest

from walkernel import semiring as sr


rng = np.random.default_rng(321)


class TestInstances:
    def test_unknown_name(self):
        with pytest.raises(ValueError):
            sr.instance("fancy")

    def test_logarithmic_oplus(self):
        s = sr.instance("logarithmic")
        assert abs(s.oplus(math.log(2), math.log(3)) - math.log(5)) <= 1e-12

    def test_tropical_ops(self):
        s = sr.instance("tropical")
        assert s.oplus(3.0, 5.0) == 5.0
        assert s.odot(3.0, 5.0) == 8.0

    def test_boolean_ops(self):
        s = sr.instance("boolean")
        assert s.odot(1.0, 0.0) == 0.0
        for x in (0.0, 1.0):
            assert s.odot(s.zero, x) == s.zero

    def test_morphism_presence(self):
        assert sr.instance("logarithmic").morphism is not None
        assert sr.instance("real").morphism is not None
        assert sr.instance("tropical").morphism is None
        assert sr.instance("boolean").morphism is None

    def test_log_morphism_is_exp(self):
        psi = sr.instance("logarithmic").morphism
        assert abs(psi.forward(0.0) - 1.0) <= 1e-15
        assert psi.forward(sr.NEG_INF) == 0.0


class TestLogStability:
    def test_matches_naive_when_safe(self):
        s = sr.instance("logarithmic")
        for _ in range(200):
            x, y = rng.uniform(-20, 20, size=2)
            naive = math.log(math.exp(x) + math.exp(y))
            assert abs(s.oplus(x, y) - naive) <= 1e-12 * max(1.0, abs(naive))

    def test_no_overflow_up_to_700(self):
        s = sr.instance("logarithmic")
        out = s.oplus(700.0, 699.0)
        assert math.isfinite(out)
        assert abs(out - (700.0 + math.log1p(math.exp(-1.0)))) <= 1e-12 * 700

    def test_neg_inf_identity(self):
        s = sr.instance("logarithmic")
        assert s.oplus(sr.NEG_INF, 3.5) == 3.5
        assert s.oplus(3.5, sr.NEG_INF) == 3.5

    def test_annihilation_with_pos_inf(self):
        s = sr.instance("logarithmic")
        assert s.odot(sr.NEG_INF, math.inf) == sr.NEG_INF


class TestMatVec:
    def test_tropical_example(self):
        s = sr.instance("tropical")
        a = sr.SemiringMatrix.build(s, [[1.0, 2.0], [3.0, 4.0]])
        out = sr.semiring_mat_vec(a, np.array([0.0, 0.0]))
        assert out.tolist() == [2.0, 4.0]

    def test_identity_matrix(self):
        for name in ("real", "boolean", "logarithmic", "tropical"):
            s = sr.instance(name)
            eye = sr.SemiringMatrix.identity(s, 3)
            x = np.array([s.one, s.zero, s.one])
            out = sr.semiring_mat_vec(eye, x)
            assert out.tolist() == x.tolist(), name

    def test_real_matches_numpy(self):
        s = sr.instance("real")
        a = rng.standard_normal((4, 4))
        x = rng.standard_normal(4)
        out = sr.semiring_mat_vec(sr.SemiringMatrix.build(s, a), x)
        assert np.abs(out - a @ x).max() <= 1e-12

    def test_vectorized_matches_generic(self):
        for name in ("real", "boolean", "logarithmic", "tropical"):
            s = sr.instance(name)
            if name == "boolean":
                a = rng.integers(0, 2, size=(5, 5)).astype(float)
                x = rng.integers(0, 2, size=5).astype(float)
            else:
                a = rng.standard_normal((5, 5))
                x = rng.standard_normal(5)
                if name in ("logarithmic", "tropical"):
                    a[0, 0] = sr.NEG_INF
                    x[1] = sr.NEG_INF
            fast = s.mat_vec(a, x)
            slow = s.mat_vec_generic(a, x)
            both_zero = (fast == s.zero) & (slow == s.zero)
            dev = np.where(both_zero, 0.0, np.abs(fast - slow))
            assert np.max(dev) <= 1e-12, name

    def test_dimension_mismatch(self):
        s = sr.instance("real")
        a = sr.SemiringMatrix.build(s, np.eye(3))
        with pytest.raises(ValueError):
            sr.semiring_mat_vec(a, np.zeros(4))


class TestMatMat:
    def test_identity_absorption(self):
        s = sr.instance("tropical")
        a = sr.SemiringMatrix.build(s, rng.standard_normal((3, 3)))
        eye = sr.SemiringMatrix.identity(s, 3)
        out = sr.semiring_mat_mat(a, eye)
        assert np.abs(out.data - a.data).max() <= 1e-15

    def test_tropical_bruteforce(self):
        s = sr.instance("tropical")
        a = sr.SemiringMatrix.build(s, [[1.0, 2.0], [3.0, 4.0]])
        b = sr.SemiringMatrix.build(s, [[0.5, -1.0], [2.0, 0.0]])
        out = sr.semiring_mat_mat(a, b)
        expected = [[max(1.5, 4.0), max(0.0, 2.0)],
                    [max(3.5, 6.0), max(2.0, 4.0)]]
        assert out.data.tolist() == expected

    def test_boolean_is_reachability_join(self):
        s = sr.instance("boolean")
        rel1 = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=float)
        rel2 = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], dtype=float)
        out = sr.semiring_mat_mat(sr.SemiringMatrix.build(s, rel1),
                                  sr.SemiringMatrix.build(s, rel2))
        join = np.zeros((3, 3))
        for i in range(3):
            for j in range(3):
                join[i, j] = float(any(rel1[i, k] and rel2[k, j] for k in range(3)))
        assert np.array_equal(out.data, join)

    def test_associativity_sampled(self):
        s = sr.instance("logarithmic")
        a, b, c = (sr.SemiringMatrix.build(s, rng.standard_normal((3, 3)))
                   for _ in range(3))
        left = sr.semiring_mat_mat(sr.semiring_mat_mat(a, b), c)
        right = sr.semiring_mat_mat(a, sr.semiring_mat_mat(b, c))
        assert np.abs(left.data - right.data).max() <= 1e-10

    def test_mismatched_semirings(self):
        a = sr.SemiringMatrix.build(sr.instance("real"), np.eye(2))
        b = sr.SemiringMatrix.build(sr.instance("tropical"), np.eye(2))
        with pytest.raises(ValueError):
            sr.semiring_mat_mat(a, b)


class TestSemiringKron:
    def test_real_matches_numpy(self):
        s = sr.instance("real")
        a = sr.SemiringMatrix.build(s, rng.standard_normal((2, 3)))
        b = sr.SemiringMatrix.build(s, rng.standard_normal((2, 2)))
        out = sr.semiring_kron(a, b)
        assert np.abs(out.data - np.kron(a.data, b.data)).max() <= 1e-15

    def test_tropical_kron(self):
        s = sr.instance("tropical")
        a = sr.SemiringMatrix.build(s, [[1.0]])
        b = sr.SemiringMatrix.build(s, [[2.0, 3.0]])
        out = sr.semiring_kron(a, b)
        assert out.data.tolist() == [[3.0, 4.0]]


class TestPushThrough:
    def test_log_semiring_matvec_and_matmat(self):
        s = sr.instance("logarithmic")
        for dim in (1, 3, 5):
            a = sr.SemiringMatrix.build(s, rng.standard_normal((dim, dim)))
            b = sr.SemiringMatrix.build(s, rng.standard_normal((dim, dim)))
            x = rng.standard_normal(dim)
            ok, dev = sr.morphism_pushthrough_check(s, a, x=x)
            assert ok, dev
            ok, dev = sr.morphism_pushthrough_check(s, a, b=b)
            assert ok, dev

    def test_real_trivial(self):
        s = sr.instance("real")
        a = sr.SemiringMatrix.build(s, rng.standard_normal((4, 4)))
        ok, dev = sr.morphism_pushthrough_check(s, a, x=rng.standard_normal(4))
        assert ok and dev <= 1e-12

    def test_scalar_case(self):
        s = sr.instance("logarithmic")
        a, x = 0.3, -1.2
        psi = s.morphism
        assert abs(psi.forward(s.odot(a, x)) - psi.forward(a) * psi.forward(x)) <= 1e-15

    def test_no_morphism_raises(self):
        s = sr.instance("tropical")
        a = sr.SemiringMatrix.build(s, np.eye(2))
        with pytest.raises(ValueError):
            sr.morphism_pushthrough_check(s, a, x=np.zeros(2))
