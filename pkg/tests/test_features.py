import numpy as np
import pytest

from walkernel import features as ft
from walkernel import graph as gr
from walkernel import linalg as la
from walkernel import verify


rng = np.random.default_rng(555)


class TestGridBasics:
    def test_grid_shape_validation(self):
        with pytest.raises(ValueError):
            ft.as_grid(np.zeros((2, 2)))

    def test_vec_layout_matches_component_vec(self):
        f = rng.standard_normal((3, 4, 2))
        gv = ft.grid_vec(f)
        for d in range(2):
            assert np.array_equal(gv[:, d], la.vec(f[:, :, d]))

    def test_unvec_round_trip(self):
        f = rng.standard_normal((3, 4, 2))
        assert np.array_equal(ft.grid_unvec(ft.grid_vec(f), 3, 4), f)

    def test_dot_grid_is_componentwise_inner(self):
        fa = rng.standard_normal((2, 3, 4))
        fb = rng.standard_normal((3, 2, 4))
        out = ft.grid_dot_grid(fa, fb)
        expected = sum(fa[:, :, d] @ fb[:, :, d] for d in range(4))
        assert np.abs(out - expected).max() <= 1e-12

    def test_kron_one_hot_matches_label_filter_sum(self):
        # one-hot feature grids reproduce the label-filtered Kronecker sum
        g1 = gr.make_graph(3, [(0, 1), (1, 2)], label_mode=gr.LABEL_DISCRETE,
                           labels=[0, 1], d=2)
        g2 = gr.make_graph(2, [(0, 1)], label_mode=gr.LABEL_DISCRETE,
                           labels=[1], d=2)
        f1, f2 = gr.feature_matrix(g1), gr.feature_matrix(g2)
        lhs = ft.grid_kron(f1, f2)
        rhs = sum(np.kron(gr.label_filtered_adjacency(g1, l).to_dense(),
                          gr.label_filtered_adjacency(g2, l).to_dense())
                  for l in range(2))
        assert np.abs(lhs - rhs).max() <= 1e-12

    def test_hadamard_contract(self):
        fa = rng.standard_normal((3, 3, 2))
        fb = rng.standard_normal((3, 3, 2))
        out = ft.grid_hadamard(fa, fb)
        assert np.abs(out - (fa * fb).sum(axis=2)).max() <= 1e-13

    def test_kron_sum_matches_definition(self):
        fa = rng.standard_normal((2, 2, 3))
        fb = rng.standard_normal((2, 2, 3))
        ks = ft.grid_kron_sum(fa, fb)
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    for l in range(2):
                        want = fa[i, j] * (k == l) + (i == j) * fb[k, l]
                        assert np.abs(ks[i * 2 + k, j * 2 + l] - want).max() <= 1e-14


class TestIdentitySuite:
    def test_all_identities_randomized(self):
        r = np.random.default_rng(77)
        for _ in range(40):
            for name, dev, is_grid in verify.identity_checks(r):
                tol = 1e-10 if is_grid else 1e-12
                assert dev <= tol, (name, dev)

    def test_lemma13_is_walk_factor_identity(self):
        # the vec identity underpinning every lazy operator application
        g1 = gr.make_graph(4, [(0, 1), (1, 2), (2, 3)])
        g2 = gr.make_graph(3, [(0, 1), (1, 2)])
        f1 = gr.feature_matrix(g1)
        f2 = gr.feature_matrix(g2)
        b = rng.standard_normal((3, 4))
        lhs = la.vec(ft.grid_dot_grid(ft.grid_dot_real(f2, b), f1))
        rhs = ft.grid_kron(ft.grid_transpose(f1), f2) @ la.vec(b)
        assert np.abs(lhs - rhs).max() <= 1e-12
