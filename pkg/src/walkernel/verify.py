"""Named verification suites: lemma identities, cross-method agreement, PSD
checks, semiring laws, and the transducer/walk equivalence. Each suite is
deterministic (seeds are fixed and reported on failure) and returns a
(passed, detail) pair; the CLI wraps them behind `walkernel verify`.
"""

from __future__ import annotations

import math

import numpy as np

from . import features as ft
from . import graph as gr
from . import kernels as kn
from . import linalg as la
from . import semiring as sr
from . import transducer as td


def _random_graph(rng: np.random.Generator, n: int, p_edge: float = 0.5) -> gr.Graph:
    """Random connected undirected graph (resampled until connected)."""
    for _ in range(200):
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < p_edge]
        if not edges:
            continue
        g = gr.make_graph(n, edges)
        if gr.is_connected(g):
            return g
    raise RuntimeError("failed to sample a connected graph")


def suite_lemma2(seed: int = 0, trials: int = 100, tol: float = 1e-10):
    """Walk-operator factorization: Wx^k px == vec[A'^k p' (A^k p)^T]."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n1, n2 = int(rng.integers(2, 11)), int(rng.integers(2, 11))
        g1, g2 = _random_graph(rng, n1), _random_graph(rng, n2)
        a1 = gr.transition_matrix(g1).to_dense()
        a2 = gr.transition_matrix(g2).to_dense()
        wx = np.kron(a1, a2)
        p1, _ = gr.uniform_start_stop(g1)
        p2, _ = gr.uniform_start_stop(g2)
        px = np.kron(p1, p2)
        lhs = px.copy()
        v1, v2 = p1.copy(), p2.copy()
        for _k in range(int(rng.integers(1, 6))):
            lhs = wx @ lhs
            v1, v2 = a1 @ v1, a2 @ v2
        rhs = la.vec(np.outer(v2, v1))
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= tol, f"max deviation {worst:.3e} (seed {seed}, {trials} trials)"


def suite_eq12(seed: int = 1, trials: int = 100, tol: float = 1e-10):
    """Per-term factorization qx^T Wx^k px == (q^T A^k p)(q'^T A'^k p')."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        n1, n2 = int(rng.integers(2, 11)), int(rng.integers(2, 11))
        g1, g2 = _random_graph(rng, n1), _random_graph(rng, n2)
        a1 = gr.transition_matrix(g1).to_dense()
        a2 = gr.transition_matrix(g2).to_dense()
        wx = np.kron(a1, a2)
        p1, q1 = gr.uniform_start_stop(g1)
        p2, q2 = gr.uniform_start_stop(g2)
        px, qx = np.kron(p1, p2), np.kron(q1, q2)
        v = px.copy()
        v1, v2 = p1.copy(), p2.copy()
        for _k in range(int(rng.integers(1, 6))):
            v = wx @ v
            v1, v2 = a1 @ v1, a2 @ v2
        worst = max(worst, abs(float(qx @ v) - float(q1 @ v1) * float(q2 @ v2)))
    return worst <= tol, f"max deviation {worst:.3e} (seed {seed}, {trials} trials)"


def _laplacian_product_data(rng, n_max=8):
    n1, n2 = int(rng.integers(2, n_max + 1)), int(rng.integers(2, n_max + 1))
    g1, g2 = _random_graph(rng, n1), _random_graph(rng, n2)
    l1 = gr.laplacian(g1).to_dense()
    l2 = gr.laplacian(g2).to_dense()
    wbox = la.kron_sum(l1, l2)
    p1, q1 = gr.uniform_start_stop(g1)
    p2, q2 = gr.uniform_start_stop(g2)
    return l1, l2, wbox, p1, q1, p2, q2


def suite_lemma28(seed: int = 2, trials: int = 50, k_max: int = 6, tol: float = 1e-9):
    """Kronecker-sum binomial expansion:
    Wbox^k pbox == sum_i C(k,i) vec[L'^(k-i) p' (L^i p)^T]."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        l1, l2, wbox, p1, _, p2, _ = _laplacian_product_data(rng)
        pbox = np.kron(p1, p2)
        lhs = pbox.copy()
        for k in range(1, k_max + 1):
            lhs = wbox @ lhs
            rhs = np.zeros_like(lhs)
            for i in range(k + 1):
                left = np.linalg.matrix_power(l2, k - i) @ p2
                right = np.linalg.matrix_power(l1, i) @ p1
                rhs += math.comb(k, i) * la.vec(np.outer(left, right))
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst <= tol, f"max deviation {worst:.3e} (seed {seed}, {trials} trials)"


def suite_eq83(seed: int = 3, trials: int = 50, k_max: int = 3, tol: float = 1e-9):
    """Even-power Cartesian term decomposition:
    qbox^T Wbox^(2k) pbox == sum_i C(2k,i)(q^T L^i p)(q'^T L'^(2k-i) p')."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        l1, l2, wbox, p1, q1, p2, q2 = _laplacian_product_data(rng)
        pbox, qbox = np.kron(p1, p2), np.kron(q1, q2)
        for k in range(1, k_max + 1):
            lhs = float(qbox @ np.linalg.matrix_power(wbox, 2 * k) @ pbox)
            rhs = sum(math.comb(2 * k, i)
                      * float(q1 @ np.linalg.matrix_power(l1, i) @ p1)
                      * float(q2 @ np.linalg.matrix_power(l2, 2 * k - i) @ p2)
                      for i in range(2 * k + 1))
            worst = max(worst, abs(lhs - rhs))
    return worst <= tol, f"max deviation {worst:.3e} (seed {seed}, {trials} trials)"


def suite_diffusion_deficiency(seed: int = 4, trials: int = 20, tol: float = 1e-12):
    """Laplacian-weight Cartesian walk terms vanish under uniform
    distributions, individually for every power."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        _, _, wbox, p1, q1, p2, q2 = _laplacian_product_data(rng)
        pbox, qbox = np.kron(p1, p2), np.kron(q1, q2)
        v = pbox.copy()
        for _k in range(6):
            v = wbox @ v
            worst = max(worst, abs(float(qbox @ v)))
    ok = worst <= tol
    return ok, f"max |term| {worst:.3e} (seed {seed}, {trials} trials)"


def suite_assignment_npsd():
    """Optimal-assignment kernel admits a non-PSD Gram matrix."""
    instances, base, gram, min_eig, seed = kn.assignment_psd_counterexample()
    detail = (f"min eigenvalue {min_eig:.6f} < -1e-6 at search seed {seed}; "
              f"instances {instances}")
    return min_eig < -1e-6, detail


def suite_cross_method(seed: int = 5, tol: float = 1e-6):
    """All solver backends agree on random SET-2 graphs."""
    graphs = [gr.random_graph_set2(16, 25, seed=seed * 100 + i) for i in range(4)]
    worst = 0.0
    for i in range(len(graphs)):
        for j in range(i, len(graphs)):
            vals = {}
            for method in ("direct", "sylvester", "cg", "fixed_point", "spectral"):
                cfg = kn.KernelConfig(lam=0.001, method=method)
                vals[method] = kn.random_walk_kernel(graphs[i], graphs[j], cfg).value
            ref = vals["direct"]
            for method, v in vals.items():
                worst = max(worst, abs(v - ref) / (1.0 + abs(ref)))
    return worst <= tol, f"max relative spread {worst:.3e} (seed {seed})"


def suite_psd(seed: int = 6):
    """PSD suites: random-walk, geometric, even-power Cartesian, rational
    T o T^-1 kernels; diffusion kernel also row-stochastic."""
    graphs = [gr.random_graph_set1(4, seed=seed * 100 + i) for i in range(10)]
    lines = []
    ok = True
    cfg = kn.KernelConfig(lam=0.001, method="fixed_point")
    gram = kn.gram_matrix(lambda a, b: kn.random_walk_kernel(a, b, cfg), graphs)
    me, verdict = kn.psd_check(gram)
    ok &= verdict
    lines.append(f"random_walk min eig {me:.3e}")
    gram = kn.gram_matrix(lambda a, b: kn.geometric_kernel(a, b, 0.05), graphs)
    me, verdict = kn.psd_check(gram)
    ok &= verdict
    lines.append(f"geometric min eig {me:.3e}")
    ccfg = kn.KernelConfig(lam=0.0005, method="fixed_point")
    gram = kn.gram_matrix(
        lambda a, b: kn.cartesian_walk_kernel(a, b, ccfg, weight="laplacian",
                                              power_mode="even"), graphs)
    me, verdict = kn.psd_check(gram)
    ok &= verdict
    lines.append(f"cartesian_even min eig {me:.3e}")
    k_spec = kn.spectral_kernel_family(graphs[0], lambda l: 1.0 + l)
    me, verdict = kn.psd_check(k_spec)
    ok &= verdict
    lines.append(f"spectral_family min eig {me:.3e}")
    # rational kernel Gram over a string set, T o T^-1 machine
    rng = np.random.default_rng(seed)
    s = sr.instance("real")
    transitions = [(int(rng.integers(0, 3)), int(a), int(b), int(rng.integers(0, 3)),
                    float(rng.standard_normal()))
                   for a in range(2) for b in range(2) for _ in range(4)]
    t = td.WeightedTransducer(2, 3, transitions, rng.random(3), rng.random(3), s)
    machine = td.compose(t, td.inverse(t))
    strings = [(0,), (1,), (0, 0), (0, 1), (1, 0), (1, 1), (0, 1, 0)]
    m = len(strings)
    gram_r = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            gram_r[i, j] = td.rational_kernel(machine, strings[i], strings[j])
    me, verdict = kn.psd_check(gram_r, rel_tol=1e-9)
    ok &= verdict
    lines.append(f"rational min eig {me:.3e}")
    k_t = kn.diffusion_vertex_kernel(graphs[0], 0.5)
    me, verdict = kn.psd_check(k_t)
    rows_ok = bool(np.max(np.abs(k_t.sum(axis=1) - 1.0)) <= 1e-9)
    ok &= verdict and rows_ok
    lines.append(f"diffusion min eig {me:.3e}, row sums ok {rows_ok}")
    return ok, "; ".join(lines) + f" (seed {seed})"


def _sample_elements(s: sr.SemiringDescriptor, rng, count: int):
    if s.name == "boolean":
        return rng.integers(0, 2, size=count).astype(float)
    vals = rng.standard_normal(count) * 5.0
    if s.name in ("logarithmic", "tropical"):
        special = rng.random(count) < 0.05
        vals = np.where(special, -np.inf, vals)
        if s.name == "logarithmic":
            plus = rng.random(count) < 0.02
            vals = np.where(plus, np.inf, vals)
    return vals


def _close(a: float, b: float, tol: float) -> bool:
    if a == b:
        return True
    if math.isnan(a) or math.isnan(b):
        return False
    return abs(a - b) <= tol * (1.0 + max(abs(a), abs(b)))


def suite_semiring_axioms(seed: int = 7, samples: int = 1000, tol: float = 1e-9):
    """Closure, monoid, commutativity, distributivity, and annihilation laws
    on sampled triples for every shipped instance."""
    rng = np.random.default_rng(seed)
    failures = []
    for name in ("real", "boolean", "logarithmic", "tropical"):
        s = sr.instance(name)
        xs = _sample_elements(s, rng, samples)
        ys = _sample_elements(s, rng, samples)
        zs = _sample_elements(s, rng, samples)
        for x, y, z in zip(xs, ys, zs):
            checks = [
                ("oplus comm", s.oplus(x, y), s.oplus(y, x)),
                ("oplus assoc", s.oplus(s.oplus(x, y), z), s.oplus(x, s.oplus(y, z))),
                ("oplus ident", s.oplus(x, s.zero), x),
                ("odot assoc", s.odot(s.odot(x, y), z), s.odot(x, s.odot(y, z))),
                ("odot ident l", s.odot(s.one, x), x),
                ("odot ident r", s.odot(x, s.one), x),
                ("dist r", s.odot(s.oplus(x, y), z),
                 s.oplus(s.odot(x, z), s.odot(y, z))),
                ("dist l", s.odot(z, s.oplus(x, y)),
                 s.oplus(s.odot(z, x), s.odot(z, y))),
                ("annihilate l", s.odot(s.zero, x), s.zero),
                ("annihilate r", s.odot(x, s.zero), s.zero),
            ]
            for label, lhs, rhs in checks:
                if not _close(lhs, rhs, tol):
                    failures.append(f"{name}: {label} fails at "
                                    f"x={x} y={y} z={z} ({lhs} vs {rhs})")
                    break
            if failures:
                break
    if failures:
        return False, failures[0] + f" (seed {seed})"
    return True, f"all four instances pass {samples}-sample law checks (seed {seed})"


def suite_morphism(seed: int = 8, tol: float = 1e-9):
    """Morphism laws plus the mat-vec/mat-mat push-through for the
    logarithmic and real instances."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for name in ("real", "logarithmic"):
        s = sr.instance(name)
        psi = s.morphism
        for _ in range(200):
            x, y = rng.standard_normal(2) * 3.0
            if not _close(psi.forward(s.oplus(x, y)),
                          psi.forward(x) + psi.forward(y), tol):
                return False, f"{name}: additivity fails at {x},{y}"
            if not _close(psi.forward(s.odot(x, y)),
                          psi.forward(x) * psi.forward(y), tol):
                return False, f"{name}: multiplicativity fails at {x},{y}"
        if not (psi.forward(s.zero) == 0.0 and psi.forward(s.one) == 1.0):
            return False, f"{name}: unit laws fail"
        for dim in (1, 3, 5):
            a = sr.SemiringMatrix.build(s, rng.standard_normal((dim, dim)))
            b = sr.SemiringMatrix.build(s, rng.standard_normal((dim, dim)))
            x = rng.standard_normal(dim)
            okv, dev_v = sr.morphism_pushthrough_check(s, a, x=x, tol=tol)
            okm, dev_m = sr.morphism_pushthrough_check(s, a, b=b, tol=tol)
            worst = max(worst, dev_v, dev_m)
            if not (okv and okm):
                return False, f"{name}: push-through deviation {max(dev_v, dev_m):.3e}"
    return True, f"push-through max deviation {worst:.3e} (seed {seed})"


def suite_transducer_equivalence(seed: int = 9, tol: float = 1e-10):
    """Composition power sums equal product-graph walk sums."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(6):
        k1, k2 = int(rng.integers(2, 5)), int(rng.integers(2, 5))
        g1 = gr.random_graph_set1(k1, seed=int(rng.integers(0, 2 ** 31)))
        g2 = gr.random_graph_set1(k2, seed=int(rng.integers(0, 2 ** 31)))
        ok, dev = td.rw_equivalence_check(g1, g2, k_max=5, tol=tol)
        worst = max(worst, dev)
        if not ok:
            return False, f"deviation {dev:.3e} on sizes {g1.n},{g2.n} (seed {seed})"
    return True, f"max deviation {worst:.3e} (seed {seed})"


def _apply_grid_op_to_real_vec(grid_op: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Apply a grid-valued operator (N, M, d) to a real vector: grid result."""
    return np.einsum("nmd,m->nd", grid_op, v)


def _apply_grid_op_to_grid_vec(grid_op: np.ndarray, gv: np.ndarray) -> np.ndarray:
    """Apply a grid-valued operator (N, M, d) to a grid vector (M, d) by
    contracting features (inner products): real result."""
    return np.einsum("nmd,md->n", grid_op, gv)


def _grid_op_times_grid_op(left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Product of two grid-valued matrices, contracting features: real."""
    return np.einsum("nmd,mqd->nq", left, right)


def _grid_hadamard_contract(ga: np.ndarray, gb: np.ndarray) -> np.ndarray:
    """Entrywise feature contraction of two grid-valued matrices: real."""
    return np.einsum("nmd,nmd->nm", ga, gb)


def identity_checks(rng: np.random.Generator, dim_cap: int = 6, d_cap: int = 4):
    """One randomized round of the vec/Kronecker/Hadamard identity suite.

    Returns (name, deviation, is_grid) triples; real identities should hold
    to ~1e-12, feature-grid ones to ~1e-10.
    """
    n, m, p, q = (int(rng.integers(2, dim_cap + 1)) for _ in range(4))
    d = int(rng.integers(1, d_cap + 1))
    out = []

    def real_mat(*shape):
        return rng.standard_normal(shape)

    def grid(*shape):
        return rng.standard_normal((*shape, d))

    # Eq. 1: vec(ABC) = (C^T (x) A) vec(B)
    A, B, C = real_mat(n, m), real_mat(m, p), real_mat(p, q)
    dev = np.abs(la.vec(A @ B @ C) - np.kron(C.T, A) @ la.vec(B)).max()
    out.append(("eq1-vec-abc", float(dev), False))
    # Eq. 2: (A (x) B)(C (x) D) = AC (x) BD
    A, B = real_mat(n, m), real_mat(p, q)
    C, D = real_mat(m, n), real_mat(q, p)
    dev = np.abs(np.kron(A, B) @ np.kron(C, D) - np.kron(A @ C, B @ D)).max()
    out.append(("eq2-mixed-product", float(dev), False))
    # Eq. 4: (A (x) B) . (C (x) D) = (A . C) (x) (B . D)
    A, C = real_mat(n, m), real_mat(n, m)
    B, D = real_mat(p, q), real_mat(p, q)
    dev = np.abs(la.hadamard(np.kron(A, B), np.kron(C, D))
                 - np.kron(la.hadamard(A, C), la.hadamard(B, D))).max()
    out.append(("eq4-hadamard-kron", float(dev), False))
    # Eq. 77 / kron_sum: (A (+) B) vec(C) = vec(I_B C A^T + B C I_A^T)
    A, B, C = real_mat(n, n), real_mat(p, p), real_mat(p, n)
    dev = np.abs(la.kron_sum(A, B) @ la.vec(C)
                 - la.vec(C @ A.T + B @ C)).max()
    out.append(("eq77-kron-sum-vec", float(dev), False))

    # Lemma 11: vec(A Phi(B) C) = (C^T (x) A) vec(Phi(B))   [grid-valued]
    A, FB, C = real_mat(n, m), grid(m, p), real_mat(p, q)
    lhs = ft.grid_vec(ft.grid_dot_real(ft.real_dot_grid(A, FB), C))
    rhs = np.kron(C.T, A) @ ft.grid_vec(FB)
    out.append(("lemma11", float(np.abs(lhs - rhs).max()), True))
    # Lemma 13: vec(Phi(A) B Phi(C)) = (Phi(C)^T (x) Phi(A)) vec(B)   [real]
    FA, B, FC = grid(n, m), real_mat(m, p), grid(p, q)
    lhs = la.vec(ft.grid_dot_grid(ft.grid_dot_real(FA, B), FC))
    rhs = ft.grid_kron(ft.grid_transpose(FC), FA) @ la.vec(B)
    out.append(("lemma13", float(np.abs(lhs - rhs).max()), True))
    # Lemma 15: (Phi(A) (x) Phi(B))(C (x) D) = (Phi(A) C) (x) (Phi(B) D)
    FA, FB = grid(n, m), grid(p, q)
    C, D = real_mat(m, n), real_mat(q, p)
    lhs = ft.grid_kron(FA, FB) @ np.kron(C, D)
    rhs = ft.grid_kron(ft.grid_dot_real(FA, C), ft.grid_dot_real(FB, D))
    out.append(("lemma15", float(np.abs(lhs - rhs).max()), True))
    # Lemma 16: (Phi(A) (x) B)(Phi(C) (x) D) = (Phi(A) Phi(C)) (x) (B D)
    FA, B = grid(n, m), real_mat(p, q)
    FC, D = grid(m, n), real_mat(q, p)
    lhs = _grid_op_times_grid_op(ft.grid_kron_real(FA, B), ft.grid_kron_real(FC, D))
    rhs = np.kron(ft.grid_dot_grid(FA, FC), B @ D)
    out.append(("lemma16", float(np.abs(lhs - rhs).max()), True))
    # Lemma 17: vec(Phi(A) B C) = (C^T (x) Phi(A)) vec(B)   [grid-valued]
    FA, B, C = grid(n, m), real_mat(m, p), real_mat(p, q)
    lhs = ft.grid_vec(ft.grid_dot_real(ft.grid_dot_real(FA, B), C))
    rhs = _apply_grid_op_to_real_vec(ft.real_kron_grid(C.T, FA), la.vec(B))
    out.append(("lemma17", float(np.abs(lhs - rhs).max()), True))
    # Lemma 18: vec(A B Phi(C)) = (Phi(C)^T (x) A) vec(B)   [grid-valued]
    A, B, FC = real_mat(n, m), real_mat(m, p), grid(p, q)
    lhs = ft.grid_vec(ft.real_dot_grid(A @ B, FC))
    rhs = _apply_grid_op_to_real_vec(ft.grid_kron_real(ft.grid_transpose(FC), A),
                                     la.vec(B))
    out.append(("lemma18", float(np.abs(lhs - rhs).max()), True))
    # Lemma 19: vec(Phi(A) Phi(B) C) = (C^T (x) Phi(A)) vec(Phi(B))   [real]
    FA, FB, C = grid(n, m), grid(m, p), real_mat(p, q)
    lhs = la.vec(ft.grid_dot_grid(FA, FB) @ C)
    rhs = _apply_grid_op_to_grid_vec(ft.real_kron_grid(C.T, FA), ft.grid_vec(FB))
    out.append(("lemma19", float(np.abs(lhs - rhs).max()), True))
    # Lemma 20: vec(A Phi(B) Phi(C)) = (Phi(C)^T (x) A) vec(Phi(B))   [real]
    A, FB, FC = real_mat(n, m), grid(m, p), grid(p, q)
    lhs = la.vec(_grid_op_times_grid_op(ft.real_dot_grid(A, FB), FC))
    rhs = _apply_grid_op_to_grid_vec(ft.grid_kron_real(ft.grid_transpose(FC), A),
                                     ft.grid_vec(FB))
    out.append(("lemma20", float(np.abs(lhs - rhs).max()), True))
    # Lemma 21 entry formula: [Phi(A) (+) Phi(B)]_(ip+k, jq+l) =
    #   phi(A_ij) delta_kl + delta_ij phi(B_kl)
    FA, FB = grid(n, m), grid(p, q)
    ks = ft.grid_kron_sum(FA, FB)
    dev = 0.0
    for i in range(n):
        for j in range(m):
            for k in range(p):
                for l in range(q):
                    want = FA[i, j] * (k == l) + (i == j) * FB[k, l]
                    dev = max(dev, float(np.abs(ks[i * p + k, j * q + l] - want).max()))
    out.append(("lemma21-def", dev, True))
    # Lemma 22: (Phi(A) (+) Phi(B)) vec(Phi(C)) =
    #   vec(I_B Phi(C) Phi(A)^T + Phi(B) Phi(C) I_A^T)   [real]
    FA, FB, FC = grid(n, m), grid(p, q), grid(q, m)
    lhs = _apply_grid_op_to_grid_vec(ft.grid_kron_sum(FA, FB), ft.grid_vec(FC))
    ib, ia = np.eye(p, q), np.eye(n, m)
    term1 = _grid_op_times_grid_op(ft.real_dot_grid(ib, FC), ft.grid_transpose(FA))
    term2 = ft.grid_dot_grid(FB, FC) @ ia.T
    rhs = la.vec(term1 + term2)
    out.append(("lemma22", float(np.abs(lhs - rhs).max()), True))
    # Lemma 23: (Phi(A) (+) Phi(B)) vec(C) =
    #   vec(I_B C Phi(A)^T + Phi(B) C I_A^T)   [grid-valued]
    FA, FB, C = grid(n, m), grid(p, q), real_mat(q, m)
    lhs = _apply_grid_op_to_real_vec(ft.grid_kron_sum(FA, FB), la.vec(C))
    term1 = ft.real_dot_grid(ib @ C, ft.grid_transpose(FA))
    term2 = ft.grid_dot_real(ft.grid_dot_real(FB, C), ia.T)
    rhs = ft.grid_vec(term1 + term2)
    out.append(("lemma23", float(np.abs(lhs - rhs).max()), True))
    # Lemma 24: (A (+) B) vec(Phi(C)) = vec(I_B Phi(C) A^T + B Phi(C) I_A^T)
    A, B, FC = real_mat(n, m), real_mat(p, q), grid(q, m)
    lhs = la.kron_sum(A, B) @ ft.grid_vec(FC)
    term1 = ft.grid_dot_real(ft.real_dot_grid(np.eye(p, q), FC), A.T)
    term2 = ft.grid_dot_real(ft.real_dot_grid(B, FC), np.eye(n, m).T)
    rhs = ft.grid_vec(term1 + term2)
    out.append(("lemma24", float(np.abs(lhs - rhs).max()), True))
    # Lemma 26: (Phi(A) (x) Phi(B)) . (C (x) D) = (Phi(A) . C) (x) (Phi(B) . D)
    FA, FB = grid(n, m), grid(p, q)
    C, D = real_mat(n, m), real_mat(p, q)
    lhs = la.hadamard(ft.grid_kron(FA, FB), np.kron(C, D))
    rhs = ft.grid_kron(ft.grid_hadamard_real(FA, C), ft.grid_hadamard_real(FB, D))
    out.append(("lemma26", float(np.abs(lhs - rhs).max()), True))
    # Lemma 27: (Phi(A) (x) B) . (Phi(C) (x) D) = (Phi(A) . Phi(C)) (x) (B . D)
    FA, FC = grid(n, m), grid(n, m)
    B, D = real_mat(p, q), real_mat(p, q)
    lhs = _grid_hadamard_contract(ft.grid_kron_real(FA, B), ft.grid_kron_real(FC, D))
    rhs = np.kron(ft.grid_hadamard(FA, FC), la.hadamard(B, D))
    out.append(("lemma27", float(np.abs(lhs - rhs).max()), True))
    return out


def suite_appendix_identities(seed: int = 10, trials: int = 30,
                              tol_real: float = 1e-12, tol_grid: float = 1e-10):
    """vec/Kronecker/Hadamard identities, real and feature-grid forms."""
    rng = np.random.default_rng(seed)
    worst: dict[str, float] = {}
    grid_flag: dict[str, bool] = {}
    for _ in range(trials):
        for name, dev, is_grid in identity_checks(rng):
            worst[name] = max(worst.get(name, 0.0), dev)
            grid_flag[name] = is_grid
    bad = [name for name, dev in worst.items()
           if dev > (tol_grid if grid_flag[name] else tol_real)]
    worst_real = max((d for n, d in worst.items() if not grid_flag[n]), default=0.0)
    worst_grid = max((d for n, d in worst.items() if grid_flag[n]), default=0.0)
    detail = (f"real max {worst_real:.3e}, grid max {worst_grid:.3e} over "
              f"{len(worst)} identities (seed {seed}, {trials} trials)")
    if bad:
        detail += f"; failing: {bad}"
    return not bad, detail


def suite_lemma9_gap(seed: int = 600):
    """Demonstrate that the even-power Cartesian walk kernel is NOT positive
    semi-definite in general: with adjacency weights the binomial expansion
    pairs different moment exponents across the two graphs, an indefinite
    form. (The canonical Laplacian/uniform configuration evades this by
    being identically zero.)"""
    graphs = [gr.random_graph_set1(4, seed=seed + i) for i in range(10)]
    cfg = kn.KernelConfig(lam=0.0005, method="direct")
    gram = kn.gram_matrix(
        lambda a, b: kn.cartesian_walk_kernel(a, b, cfg, weight="adjacency",
                                              power_mode="even"), graphs)
    min_eig, _ = kn.psd_check(gram)
    trace = float(np.trace(gram.values))
    found = min_eig < -1e-8 * trace
    return found, (f"adjacency-weight even-power Cartesian Gram has min "
                   f"eigenvalue {min_eig:.3e} (trace {trace:.3e}, seed {seed})")


def suite_gartner_constant(seed: int = 11, tol: float = 1e-8):
    """n^2 n'^2 x truncated uniform walk kernel equals the all-entries sum."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        g1 = _random_graph(rng, int(rng.integers(2, 8)))
        g2 = _random_graph(rng, int(rng.integers(2, 8)))
        lam = 0.1
        lhs = (g1.n * g2.n) ** 2 * kn.truncated_walk_kernel(g1, g2, lam, 6, k_min=1)
        rhs = kn.gartner_kernel_reference(g1, g2, lam, 6)
        worst = max(worst, abs(lhs - rhs) / max(abs(rhs), 1e-300))
    return worst <= tol, f"max relative deviation {worst:.3e} (seed {seed})"


def suite_marginalized_recovery(seed: int = 12, tol: float = 1e-8):
    """Marginalized kernel equals the rescaled-edge-kernel resolvent."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(10):
        g1 = gr.attach_random_labels(_random_graph(rng, int(rng.integers(3, 9))),
                                     d=2, seed=int(rng.integers(0, 2 ** 31)))
        g2 = gr.attach_random_labels(_random_graph(rng, int(rng.integers(3, 9))),
                                     d=2, seed=int(rng.integers(0, 2 ** 31)))
        t1 = 0.4 * gr.transition_matrix(g1).to_dense()
        t2 = 0.4 * gr.transition_matrix(g2).to_dense()
        cfg = kn.KernelConfig(method="direct")
        lhs = kn.marginalized_kernel(g1, g2, t1, t2, cfg=cfg).value
        rhs = _marginalized_oracle(g1, g2, t1, t2)
        worst = max(worst, abs(lhs - rhs) / (1.0 + abs(rhs)))
    return worst <= tol, f"max relative deviation {worst:.3e} (seed {seed})"


def _marginalized_oracle(g1, g2, t1, t2) -> float:
    """Explicit Hadamard construction of the rescaled product weight matrix:
    Tx = (P (x) P') . [delta-kernel indicator between edge labels]."""
    phi1 = np.where(gr.feature_matrix(g1, degree_normalize=False) != 0, 1.0, 0.0)
    phi2 = np.where(gr.feature_matrix(g2, degree_normalize=False) != 0, 1.0, 0.0)
    kappa = ft.grid_kron(phi1, phi2)
    tx = np.kron(t1, t2) * kappa
    n = tx.shape[0]
    p1, q1 = gr.uniform_start_stop(g1)
    p2, q2 = gr.uniform_start_stop(g2)
    px, qx = np.kron(p1, p2), np.kron(q1, q2)
    x = np.linalg.solve(np.eye(n) - tx, px)
    return float(qx @ x)


def suite_geometric_oracle(seed: int = 13, trials: int = 20, tol: float = 1e-8):
    """Spectral geometric kernel equals the matrix-exponential oracle."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        g1 = _random_graph(rng, int(rng.integers(2, 10)))
        g2 = _random_graph(rng, int(rng.integers(2, 10)))
        lam = float(rng.uniform(0.01, 0.5))
        fast = kn.geometric_kernel(g1, g2, lam)
        slow = kn.geometric_kernel_oracle(g1, g2, lam)
        worst = max(worst, abs(fast - slow) / max(abs(slow), 1e-300))
    return worst <= tol, f"max relative deviation {worst:.3e} (seed {seed})"


SUITES = {
    "lemma2": suite_lemma2,
    "eq12": suite_eq12,
    "lemma28": suite_lemma28,
    "eq83": suite_eq83,
    "diffusion-deficiency": suite_diffusion_deficiency,
    "assignment-npsd": suite_assignment_npsd,
    "cross-method": suite_cross_method,
    "psd": suite_psd,
    "lemma9-gap": suite_lemma9_gap,
    "semiring-axioms": suite_semiring_axioms,
    "morphism": suite_morphism,
    "transducer-equivalence": suite_transducer_equivalence,
    "appendix-identities": suite_appendix_identities,
    "gartner-constant": suite_gartner_constant,
    "marginalized-recovery": suite_marginalized_recovery,
    "geometric-oracle": suite_geometric_oracle,
}


def run_suites(names=None):
    """Run the named suites (all when names is None); returns (all_ok, lines)."""
    if names is None or names == ["all"]:
        names = list(SUITES)
    lines = []
    all_ok = True
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        ok, detail = SUITES[name]()
        all_ok &= ok
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return all_ok, lines
