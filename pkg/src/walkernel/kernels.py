"""Graph kernels: the random-walk family with four solver backends, the
geometric kernel with its spectral fast path, marginalized and Cartesian
walk kernels, diffusion and spectral vertex kernels, composite and
assignment kernels, plus Gram-matrix assembly and PSD checking.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from itertools import permutations
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linear_sum_assignment

from . import graph as gr
from . import linalg as la

Array = np.ndarray

MEASURE_GEOMETRIC = "geometric"      # mu(k) = lam^k
MEASURE_EXPONENTIAL = "exponential"  # mu(k) = lam^k / k!

METHODS = ("direct", "sylvester", "cg", "fixed_point", "spectral")


@dataclass(frozen=True)
class KernelConfig:
    lam: float = 0.001
    method: str = "fixed_point"
    tol: float = 1e-6
    max_iter: int = 1000
    measure: str = MEASURE_GEOMETRIC
    k_max: int = 10            # truncation for series-sum reference computations
    degree_normalize: bool = True

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.k_max < 1:
            raise ValueError("k_max must be >= 1")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")


@dataclass
class KernelResult:
    value: float
    method: str
    iterations: int = 0
    residual: float = 0.0
    wall_time: float = 0.0
    converged: bool = True


def _solve_resolvent(factors, px: Array, qx: Array, cfg: KernelConfig,
                     square: bool = False) -> KernelResult:
    """Compute qx^T (I - lam W)^-1 px for W given as Kronecker factor pairs.

    square applies W twice per operator application (even-power series).
    """
    t0 = time.perf_counter()
    lam = cfg.lam
    dim = len(px)
    if square:
        def apply_w(v):
            return la.sum_kron_mat_vec(factors, la.sum_kron_mat_vec(factors, v))
        factors_t = [(a.transpose() if isinstance(a, la.SparseMatrix) else a.T,
                      b.transpose() if isinstance(b, la.SparseMatrix) else b.T)
                     for a, b in factors]

        def apply_wt(v):
            return la.sum_kron_mat_vec(factors_t, la.sum_kron_mat_vec(factors_t, v))
    else:
        def apply_w(v):
            return la.sum_kron_mat_vec(factors, v)
        factors_t = [(a.transpose() if isinstance(a, la.SparseMatrix) else a.T,
                      b.transpose() if isinstance(b, la.SparseMatrix) else b.T)
                     for a, b in factors]

        def apply_wt(v):
            return la.sum_kron_mat_vec(factors_t, v)

    method = cfg.method
    if method == "direct":
        w = _explicit_weight(factors, square=square)
        x = la.dense_solve(np.eye(dim) - lam * w, px)
        value = float(qx @ x)
        return KernelResult(value, method, 0, 0.0, time.perf_counter() - t0)
    if method == "sylvester":
        m0 = la.unvec(px, _factor_cols(factors[0][1]), _factor_cols(factors[0][0]))
        if square:
            pairs = _square_sum_pairs(factors)
        else:
            pairs = [(_densify_one(b), _densify_one(a)) for a, b in factors]
        m = la.generalized_sylvester_solve(pairs, lam, m0,
                                           tol=min(cfg.tol, 1e-10) * max(1.0, np.abs(m0).max()),
                                           max_iter=cfg.max_iter)
        value = float(qx @ la.vec(m))
        return KernelResult(value, method, 0, 0.0, time.perf_counter() - t0)
    if method == "cg":
        report = la.cg_solve(_resolvent_apply_pair(apply_w, lam),
                             px, cfg.tol, cfg.max_iter,
                             apply_t=_resolvent_apply_pair(apply_wt, lam))
        value = float(qx @ report.solution)
        return KernelResult(value, method, report.iterations, report.residual_norm,
                            time.perf_counter() - t0, report.converged)
    if method == "fixed_point":
        _spectral_guard_op(apply_w, dim, lam)
        report = la.fixed_point_solve(apply_w, px, lam, cfg.tol, cfg.max_iter)
        value = float(qx @ report.solution)
        return KernelResult(value, method, report.iterations, report.residual_norm,
                            time.perf_counter() - t0, report.converged)
    raise ValueError(f"method {cfg.method!r} not applicable here")


def _resolvent_apply_pair(apply_w, lam):
    def apply(v):
        return v - lam * apply_w(v)
    return apply


def _spectral_guard_op(apply_w, dim: int, lam: float) -> None:
    est = la.spectral_radius_estimate(apply_w, dim, iters=20)
    if lam * est >= 1.0:
        raise la.DivergenceError(
            f"spectral condition violated: lam * xi_max ~ {lam * est:.3g} >= 1; "
            "use a smaller lam")


def _factor_cols(m) -> int:
    return m.shape[1]


def _densify_one(m) -> Array:
    return m.to_dense() if isinstance(m, la.SparseMatrix) else np.asarray(m, dtype=float)


def _densify(pair) -> tuple[Array, Array]:
    return _densify_one(pair[0]), _densify_one(pair[1])


def _square_sum_pairs(factors) -> list[tuple[Array, Array]]:
    """Dense (S_i, T_i) pairs realizing W^2 for W = sum_l A_l (x) B_l:
    W^2 = sum_{l,m} (A_l A_m) (x) (B_l B_m), and the Stein sweeps encode the
    term T (x) S as the pair (S, T)."""
    dense = [(_densify_one(a), _densify_one(b)) for a, b in factors]
    return [(b1 @ b2, a1 @ a2) for a1, b1 in dense for a2, b2 in dense]


def _explicit_weight(factors, square: bool = False) -> Array:
    w = None
    for a, b in factors:
        term = np.kron(_densify_one(a), _densify_one(b))
        w = term if w is None else w + term
    if square:
        w = w @ w
    return w


# ---------------------------------------------------------------------------
# random-walk family


def random_walk_kernel(g1: gr.Graph, g2: gr.Graph,
                       cfg: KernelConfig = KernelConfig(),
                       p1=None, p2=None, q1=None, q2=None) -> KernelResult:
    """Walk-counting kernel qx^T (I - lam Wx)^-1 px on the direct product
    graph, with Wx the (label-filtered) transition-matrix Kronecker sum.

    All solver backends agree to within their tolerances; uniform start/stop
    distributions are used unless supplied.
    """
    if cfg.measure != MEASURE_GEOMETRIC:
        raise ValueError(
            "closed-form solvers cover the geometric measure; use "
            "geometric_kernel or truncated_walk_kernel for other measures")
    if cfg.method == "spectral":
        value = _spectral_resolvent(g1, g2, cfg, p1, p2, q1, q2)
        return KernelResult(value, "spectral")
    prod = gr.direct_product(g1, g2, p1, p2, q1, q2,
                             degree_normalize=cfg.degree_normalize)
    return _solve_resolvent(prod.factors, prod.p, prod.q, cfg)


def _spectral_resolvent(g1: gr.Graph, g2: gr.Graph, cfg: KernelConfig,
                        p1=None, p2=None, q1=None, q2=None) -> float:
    """O(n^3) resolvent through symmetrized eigendecompositions: the
    transition matrix is similar to a symmetric matrix via D^(1/2), so
    qx^T (I - lam Ax)^-1 px reduces to a weighted sum over eigenvalue pairs.

    Needs unlabeled undirected graphs with positive degrees.
    """
    if g1.directed or g2.directed:
        raise ValueError("spectral method requires undirected graphs")
    if g1.label_mode != gr.LABEL_NONE or g2.label_mode != gr.LABEL_NONE:
        raise ValueError("spectral method requires unlabeled graphs")
    if p1 is None:
        p1, q1 = gr.uniform_start_stop(g1)
    if p2 is None:
        p2, q2 = gr.uniform_start_stop(g2)
    ev1, vq1, vp1 = _walk_eigendata(g1, p1, q1, cfg.degree_normalize)
    ev2, vq2, vp2 = _walk_eigendata(g2, p2, q2, cfg.degree_normalize)
    denom = 1.0 - cfg.lam * np.outer(ev1, ev2)
    if np.min(np.abs(denom)) < 1e-14:
        raise la.SingularOperatorError("resolvent singular at an eigenvalue pair")
    return float((vq1 * vp1) @ (1.0 / denom) @ (vq2 * vp2))


def _walk_eigendata(g: gr.Graph, p: Array, q: Array, degree_normalize: bool):
    a = gr.adjacency(g).to_dense()
    if degree_normalize:
        d = a.sum(axis=1)
        if np.any(d <= 0):
            raise ValueError("spectral method needs all degrees positive")
        inv_sqrt = 1.0 / np.sqrt(d)
        s = a * np.outer(inv_sqrt, inv_sqrt)
        eig = la.sym_eig(s)
        vq = eig.eigenvectors.T @ (inv_sqrt * q)
        vp = eig.eigenvectors.T @ (np.sqrt(d) * p)
    else:
        eig = la.sym_eig(a)
        vq = eig.eigenvectors.T @ q
        vp = eig.eigenvectors.T @ p
    return eig.eigenvalues, vq, vp


def truncated_walk_kernel(g1: gr.Graph, g2: gr.Graph, lam: float, k_max: int,
                          k_min: int = 0, measure: str = MEASURE_GEOMETRIC,
                          p1=None, p2=None, q1=None, q2=None,
                          degree_normalize: bool = True) -> float:
    """Reference series sum_{k=k_min..k_max} mu(k) qx^T Wx^k px computed by
    iterated lazy operator application (no solver involved)."""
    prod = gr.direct_product(g1, g2, p1, p2, q1, q2,
                             degree_normalize=degree_normalize)
    v = prod.p.copy()
    total = 0.0
    fact = 1.0
    for k in range(k_max + 1):
        if k > 0:
            v = la.sum_kron_mat_vec(prod.factors, v)
            fact *= k
        if k < k_min:
            continue
        mu = lam ** k if measure == MEASURE_GEOMETRIC else lam ** k / fact
        if k == 0 and measure == MEASURE_EXPONENTIAL:
            mu = 1.0
        total += mu * float(prod.q @ v)
    return total


def gartner_kernel_reference(g1: gr.Graph, g2: gr.Graph, lam: float,
                             k_max: int) -> float:
    """Truncated all-entries walk sum sum_{k=1..K} lam^k sum_ij [Ax^k]_ij,
    computed on the explicit product transition matrix.

    Equals n^2 n'^2 times the uniform-distribution truncated walk kernel.
    """
    ax = la.kron(gr.transition_matrix(g1), gr.transition_matrix(g2)).to_dense()
    e = np.ones(ax.shape[0])
    v = e.copy()
    total = 0.0
    for k in range(1, k_max + 1):
        v = ax @ v
        total += lam ** k * float(e @ v)
    return total


def marginalized_kernel(g1: gr.Graph, g2: gr.Graph, p_trans: Array, p_trans2: Array,
                        p1=None, p2=None, q1=None, q2=None,
                        cfg: KernelConfig = KernelConfig()) -> KernelResult:
    """Marginalized walk kernel qx^T (I - Tx)^-1 px where Tx rescales the
    edge kernel by the given transition probabilities (lam = 1 internally).

    p_trans/p_trans2 must be row-substochastic and supported on the edges.
    """
    t1 = _masked_transition(g1, np.asarray(p_trans, dtype=float))
    t2 = _masked_transition(g2, np.asarray(p_trans2, dtype=float))
    if g1.label_mode == gr.LABEL_DISCRETE and g2.label_mode == gr.LABEL_DISCRETE:
        factors = [(_filter_by_label(g1, t1, l), _filter_by_label(g2, t2, l))
                   for l in range(g1.d)]
    else:
        factors = [(la.SparseMatrix.from_dense(t1), la.SparseMatrix.from_dense(t2))]
    prod = gr.direct_product(g1, g2, p1, p2, q1, q2)
    est = la.spectral_radius_estimate(
        lambda v: la.sum_kron_mat_vec(factors, v), prod.n, iters=30)
    if est >= 1.0:
        raise la.DivergenceError(
            f"spectral radius of the rescaled weight matrix is {est:.3g} >= 1")
    cfg1 = replace(cfg, lam=1.0, method=cfg.method if cfg.method != "spectral" else "direct")
    return _solve_resolvent(factors, prod.p, prod.q, cfg1)


def _masked_transition(g: gr.Graph, p: Array) -> Array:
    support = gr.adjacency(g).to_dense() > 0
    if p.shape != support.shape:
        raise ValueError("transition matrix shape does not match the graph")
    if np.any((np.abs(p) > 0) & ~support):
        raise ValueError("transition probabilities must be supported on edges")
    rows = p.sum(axis=1)
    if np.any(rows > 1 + 1e-12):
        raise ValueError("transition matrix must be row-substochastic")
    return p


def _filter_by_label(g: gr.Graph, t: Array, label: int) -> la.SparseMatrix:
    mask = np.zeros_like(t, dtype=bool)
    for k in range(g.num_edges):
        if int(g.labels[k]) == label:
            i, j = int(g.src[k]), int(g.dst[k])
            mask[i, j] = True
            if not g.directed:
                mask[j, i] = True
    return la.SparseMatrix.from_dense(np.where(mask, t, 0.0))


# ---------------------------------------------------------------------------
# geometric kernel


def geometric_kernel(g1: gr.Graph, g2: gr.Graph, lam: float) -> float:
    """e^T exp(lam Ax) e over the product transition matrix, via the O(n^3)
    spectral route (symmetrized eigendecompositions of both factors)."""
    if g1.directed or g2.directed:
        raise ValueError("geometric kernel requires undirected graphs")
    lam1, u1, w1 = _sym_basis_vectors(g1)
    lam2, u2, w2 = _sym_basis_vectors(g2)
    # k = sum_ij u_i u'_j exp(lam l_i l'_j) w_i w'_j
    expmat = np.exp(lam * np.outer(lam1, lam2))
    return float((u1 * w1) @ expmat @ (u2 * w2))


def _sym_basis_vectors(g: gr.Graph):
    """Eigen-data of the symmetrized transition matrix: returns eigenvalues,
    u = P^T D^-1/2 e, and w = P^T D^1/2 e, so that
    e^T f(A) e = sum_i u_i f(l_i) w_i."""
    a = gr.adjacency(g).to_dense()
    d = a.sum(axis=1)
    if np.any(d <= 0):
        raise ValueError("geometric kernel needs all degrees positive")
    inv_sqrt = 1.0 / np.sqrt(d)
    s = a * np.outer(inv_sqrt, inv_sqrt)
    eig = la.sym_eig(s)
    e = np.ones(g.n)
    u = eig.eigenvectors.T @ (inv_sqrt * e)
    w = eig.eigenvectors.T @ (np.sqrt(d) * e)
    return eig.eigenvalues, u, w


def geometric_kernel_oracle(g1: gr.Graph, g2: gr.Graph, lam: float) -> float:
    """Brute-force e^T exp(lam Ax) e through the matrix-exponential oracle."""
    ax = la.kron(gr.transition_matrix(g1), gr.transition_matrix(g2)).to_dense()
    e = np.ones(ax.shape[0])
    return float(e @ la.matrix_exp_oracle(ax, lam) @ e)


# ---------------------------------------------------------------------------
# Cartesian-product kernels


def cartesian_walk_kernel(g1: gr.Graph, g2: gr.Graph,
                          cfg: KernelConfig = KernelConfig(),
                          weight: str = "laplacian", power_mode: str = "even",
                          p1=None, p2=None, q1=None, q2=None) -> KernelResult:
    """Walk kernel on the Cartesian product graph.

    power_mode "even" sums the even-power series
    q^T [(I - lam W^2)^-1 - I] p; "all" computes q^T (I - lam W)^-1 p.
    weight picks the factor matrices: "laplacian" (the diffusion form; zero
    under uniform distributions by the rank deficiency) or "adjacency".
    """
    if g1.directed or g2.directed:
        raise ValueError("Cartesian kernel requires undirected graphs")
    if power_mode not in ("even", "all"):
        raise ValueError("power_mode must be 'even' or 'all'")
    prod = gr.cartesian_product(g1, g2, p1, p2, q1, q2, weight=weight)
    a1, a2 = prod.factors[0]
    eye1 = la.SparseMatrix(sp.eye(g1.n, format="csr"))
    eye2 = la.SparseMatrix(sp.eye(g2.n, format="csr"))
    # the Kronecker sum A (+) A' as factor pairs A (x) I' + I (x) A'
    sum_factors = [(a1, eye2), (eye1, a2)]
    result = _solve_resolvent(sum_factors, prod.p, prod.q, cfg,
                              square=(power_mode == "even"))
    if power_mode == "even":
        # series starts at k=1: subtract the k=0 term q^T p
        result.value -= float(prod.q @ prod.p)
    return result


# ---------------------------------------------------------------------------
# composite / complement


def composite_kernel(g1: gr.Graph, g2: gr.Graph,
                     base: Callable[[gr.Graph, gr.Graph], float]) -> float:
    """base(G, G') + base(complement G, complement G')."""
    return float(base(g1, g2)) + float(base(gr.complement(g1), gr.complement(g2)))


# ---------------------------------------------------------------------------
# kernels on graph vertices


def diffusion_vertex_kernel(g: gr.Graph, t: float) -> Array:
    """Continuous-time diffusion operator, the m -> inf limit of
    (I - t L/m)^m: symmetric, positive semi-definite, and row-stochastic."""
    if g.directed:
        raise ValueError("diffusion kernel requires an undirected graph")
    if t <= 0:
        raise ValueError("t must be positive")
    lap = gr.laplacian(g).to_dense()
    eig = la.sym_eig(lap)
    return (eig.eigenvectors * np.exp(-t * eig.eigenvalues)) @ eig.eigenvectors.T


def spectral_kernel_family(g: gr.Graph, r: Callable[[float], float]) -> Array:
    """K = sum_i r(l_i)^-1 v_i v_i^T over the normalized-Laplacian eigensystem;
    r must be positive (and increasing) on [0, 2]."""
    if g.directed:
        raise ValueError("spectral kernels require an undirected graph")
    lap = gr.normalized_laplacian(g).to_dense()
    eig = la.sym_eig(lap)
    rv = np.array([r(float(l)) for l in eig.eigenvalues])
    if np.any(rv <= 0):
        bad = float(eig.eigenvalues[np.argmin(rv)])
        raise ValueError(f"spectral transform is nonpositive at eigenvalue {bad:.6g}")
    return (eig.eigenvectors / rv) @ eig.eigenvectors.T


def smoothness_functional(g: gr.Graph, f: Array) -> float:
    """f^T L f, the weighted sum of squared differences across edges."""
    if g.directed:
        raise ValueError("smoothness functional requires an undirected graph")
    f = np.asarray(f, dtype=float)
    if f.shape != (g.n,):
        raise ValueError(f"f must have length {g.n}")
    lap = gr.laplacian(g)
    return float(f @ (lap.csr @ f))


def smoothness_edge_sum(g: gr.Graph, f: Array) -> float:
    """Independent edge-difference form: sum_edges w_ij (f_i - f_j)^2."""
    f = np.asarray(f, dtype=float)
    total = 0.0
    for i, j, w in zip(g.src.tolist(), g.dst.tolist(), g.weight.tolist()):
        total += w * (f[i] - f[j]) ** 2
    return total


# ---------------------------------------------------------------------------
# assignment / R-convolution kernels


def optimal_assignment_kernel(parts1, parts2, base: Callable) -> float:
    """Maximize sum_i base(x_i, x'_pi(i)) over injective assignments of the
    smaller part list into the larger (exact Hungarian-style search)."""
    a, b = list(parts1), list(parts2)
    if not a or not b:
        raise ValueError("part lists must be nonempty")
    swapped = len(a) > len(b)
    if swapped:
        a, b = b, a
    cost = np.array([[float(base(x, y)) for y in b] for x in a])
    ri, ci = linear_sum_assignment(cost, maximize=True)
    return float(cost[ri, ci].sum())


def optimal_assignment_bruteforce(parts1, parts2, base: Callable) -> float:
    """Exhaustive permutation oracle (sizes <= 8)."""
    a, b = list(parts1), list(parts2)
    if len(a) > len(b):
        a, b = b, a
    if len(b) > 8:
        raise ValueError("brute-force oracle is limited to sizes <= 8")
    best = -np.inf
    for perm in permutations(range(len(b)), len(a)):
        best = max(best, sum(float(base(a[i], b[j])) for i, j in enumerate(perm)))
    return float(best)


def assignment_psd_counterexample(max_seeds: int = 200):
    """Search for a concrete instance set whose optimal-assignment Gram
    matrix has a negative eigenvalue, under a positive semi-definite base
    similarity. Returns (instances, base matrix, gram, min eigenvalue, seed).
    """
    for seed in range(max_seeds):
        rng = np.random.default_rng(seed)
        n_labels = 3
        # random PSD label similarity with unit diagonal
        v = rng.standard_normal((n_labels, n_labels))
        s = v @ v.T
        dd = np.sqrt(np.diag(s))
        s = s / np.outer(dd, dd)
        base = lambda x, y: s[x, y]
        m = int(rng.integers(4, 8))
        instances = [[int(x) for x in rng.integers(0, n_labels, size=int(rng.integers(1, 5)))]
                     for _ in range(m)]
        gram = np.zeros((m, m))
        for i in range(m):
            for j in range(i, m):
                gram[i, j] = gram[j, i] = optimal_assignment_kernel(
                    instances[i], instances[j], base)
        min_eig = float(np.linalg.eigvalsh(gram)[0])
        if min_eig < -1e-6:
            return instances, s, gram, min_eig, seed
    raise RuntimeError(f"no counterexample found in {max_seeds} seeds")


def r_convolution_kernel(decomp: Callable, base_kernels, x, x2,
                         measure: Callable | None = None) -> float:
    """Generic decomposition combinator: the double sum over decompositions
    of mu(parts, parts') * prod_i base_i(part_i, part'_i).

    decomp maps an object to its finite list of decompositions (tuples).
    """
    dx, dx2 = list(decomp(x)), list(decomp(x2))
    total = 0.0
    for parts in dx:
        for parts2 in dx2:
            mu = measure(parts, parts2) if measure is not None else 1.0
            prod = mu
            for kf, a, b in zip(base_kernels, parts, parts2):
                prod *= kf(a, b)
            total += prod
    return total


# ---------------------------------------------------------------------------
# Gram matrices


@dataclass
class GramMatrix:
    values: Array
    names: list[str]

    def __post_init__(self):
        if self.values.shape[0] != self.values.shape[1]:
            raise ValueError("Gram matrix must be square")


def gram_matrix(kernel: Callable, graphs, names=None,
                parallel: bool = False) -> GramMatrix:
    """Fill the upper triangle with pairwise kernel values and mirror it.

    kernel(gi, gj) may return a float or a KernelResult. With parallel=True
    independent pairs run on a thread pool capped by WALKERNEL_THREADS.
    """
    graphs = list(graphs)
    m = len(graphs)
    names = list(names) if names is not None else [f"g{i}" for i in range(m)]
    pairs = [(i, j) for i in range(m) for j in range(i, m)]

    def one(pair):
        i, j = pair
        try:
            res = kernel(graphs[i], graphs[j])
        except Exception as e:
            raise RuntimeError(f"kernel failed on pair ({names[i]}, {names[j]}): {e}") from e
        return float(res.value) if isinstance(res, KernelResult) else float(res)

    values = np.zeros((m, m))
    if parallel:
        max_workers = int(os.environ.get("WALKERNEL_THREADS", "0")) or None
        with ThreadPoolExecutor(max_workers=max_workers) as ex:
            results = list(ex.map(one, pairs))
    else:
        results = [one(p) for p in pairs]
    for (i, j), v in zip(pairs, results):
        values[i, j] = values[j, i] = v
    return GramMatrix(values, names)


def psd_check(gram: GramMatrix | Array,
              rel_tol: float = 1e-8) -> tuple[float, bool]:
    """Minimum eigenvalue and PSD verdict (min eig >= -rel_tol * trace, with
    an absolute floor so a numerically-zero matrix counts as PSD)."""
    values = gram.values if isinstance(gram, GramMatrix) else np.asarray(gram)
    eig = la.sym_eig(0.5 * (values + values.T))
    min_eig = float(eig.eigenvalues[0])
    trace = float(np.trace(values))
    scale = float(np.abs(values).max()) if values.size else 0.0
    bound = rel_tol * max(trace, 0.0) + 1e-14 * max(1.0, scale)
    return min_eig, bool(min_eig >= -bound)
