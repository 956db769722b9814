"""Dense/sparse linear algebra: Kronecker operations, the vec trick, and the
iterative and direct solvers the kernel computations are built on.

Matrices and vectors are plain numpy arrays (or SparseMatrix for sparse
operands); everything here is a pure function of its inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

Array = np.ndarray
LinearOp = Callable[[Array], Array]


class SingularOperatorError(ValueError):
    """Raised when a solver's operator is singular to working precision."""


class DivergenceError(RuntimeError):
    """Raised when an iteration diverges (spectral condition violated)."""


# ---------------------------------------------------------------------------
# basic carriers


def as_vector(entries) -> Array:
    """Validate and return a 1-D float vector (finite entries required)."""
    v = np.asarray(entries, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected 1-D vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_dense(entries, rows: int | None = None, cols: int | None = None) -> Array:
    """Validate and return a 2-D float matrix (finite entries required)."""
    m = np.asarray(entries, dtype=float)
    if m.ndim != 2:
        raise ValueError(f"expected 2-D matrix, got shape {m.shape}")
    if rows is not None and m.shape != (rows, cols):
        raise ValueError(f"expected shape {(rows, cols)}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


class SparseMatrix:
    """Row-compressed sparse matrix with sorted column indices per row.

    Backed by a scipy CSR matrix; no explicit zeros are stored and column
    indices are strictly increasing within each row.
    """

    def __init__(self, csr: sp.csr_matrix):
        csr = sp.csr_matrix(csr)
        csr.sum_duplicates()
        csr.eliminate_zeros()
        csr.sort_indices()
        if not np.all(np.isfinite(csr.data)):
            raise ValueError("sparse entries must be finite")
        self.csr = csr

    @classmethod
    def from_coo(cls, rows: int, cols: int, ii, jj, vv) -> "SparseMatrix":
        return cls(sp.csr_matrix((vv, (ii, jj)), shape=(rows, cols)))

    @classmethod
    def from_dense(cls, m) -> "SparseMatrix":
        return cls(sp.csr_matrix(np.asarray(m, dtype=float)))

    @property
    def rows(self) -> int:
        return self.csr.shape[0]

    @property
    def cols(self) -> int:
        return self.csr.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.csr.shape

    def nnz(self) -> int:
        return int(self.csr.nnz)

    def row(self, i: int) -> list[tuple[int, float]]:
        """Sorted (column, value) pairs of row i."""
        lo, hi = self.csr.indptr[i], self.csr.indptr[i + 1]
        return list(zip(self.csr.indices[lo:hi].tolist(), self.csr.data[lo:hi].tolist()))

    def to_dense(self) -> Array:
        return self.csr.toarray()

    def transpose(self) -> "SparseMatrix":
        return SparseMatrix(self.csr.T.tocsr())

    def matvec(self, x: Array) -> Array:
        return self.csr @ x

    def row_sums(self) -> Array:
        return np.asarray(self.csr.sum(axis=1)).ravel()

    def scale_rows(self, s: Array) -> "SparseMatrix":
        return SparseMatrix(sp.diags(s) @ self.csr)

    def __matmul__(self, other):
        if isinstance(other, SparseMatrix):
            return SparseMatrix(self.csr @ other.csr)
        return self.csr @ other


def _dense(m) -> Array:
    return m.to_dense() if isinstance(m, SparseMatrix) else np.asarray(m, dtype=float)


def _is_sparse(m) -> bool:
    return isinstance(m, SparseMatrix) or sp.issparse(m)


# ---------------------------------------------------------------------------
# vec / Kronecker algebra


def vec(m) -> Array:
    """Column-stacking operator: entry j*rows + i of the result is m[i, j]."""
    return _dense(m).reshape(-1, order="F").copy()


def unvec(v: Array, rows: int, cols: int) -> Array:
    """Inverse of vec; v must have length rows*cols."""
    v = np.asarray(v, dtype=float)
    if v.size != rows * cols:
        raise ValueError(f"cannot reshape length-{v.size} vector to {rows}x{cols}")
    return v.reshape((rows, cols), order="F")


def kron(a, b):
    """Kronecker product; sparse inputs yield a sparse result."""
    if _is_sparse(a) or _is_sparse(b):
        am = a.csr if isinstance(a, SparseMatrix) else sp.csr_matrix(_dense(a))
        bm = b.csr if isinstance(b, SparseMatrix) else sp.csr_matrix(_dense(b))
        return SparseMatrix(sp.kron(am, bm, format="csr"))
    return np.kron(_dense(a), _dense(b))


def kron_sum(a, b):
    """Kronecker sum A (+) B = A (x) I_B + I_A (x) B.

    I_A and I_B are (possibly rectangular) identities sized like A and B.
    """
    if _is_sparse(a) or _is_sparse(b):
        am = a.csr if isinstance(a, SparseMatrix) else sp.csr_matrix(_dense(a))
        bm = b.csr if isinstance(b, SparseMatrix) else sp.csr_matrix(_dense(b))
        ia = sp.eye(am.shape[0], am.shape[1], format="csr")
        ib = sp.eye(bm.shape[0], bm.shape[1], format="csr")
        return SparseMatrix(sp.kron(am, ib, format="csr") + sp.kron(ia, bm, format="csr"))
    am, bm = _dense(a), _dense(b)
    ia = np.eye(am.shape[0], am.shape[1])
    ib = np.eye(bm.shape[0], bm.shape[1])
    return np.kron(am, ib) + np.kron(ia, bm)


def hadamard(a, b):
    """Element-wise product; both operands must have equal dimensions."""
    am, bm = _dense(a), _dense(b)
    if am.shape != bm.shape:
        raise ValueError(f"dimension mismatch {am.shape} vs {bm.shape}")
    return am * bm


def _shape(m) -> tuple[int, int]:
    return m.shape if not isinstance(m, SparseMatrix) else m.shape


def kron_mat_vec(a, b, r: Array) -> Array:
    """Compute (A (x) B) r as vec(B R A^T) without forming the product.

    R is unvec(r) with shape (cols(B), cols(A)); works with dense or sparse
    factors, O(n^3) dense and O(n^2) when both factors have O(n) nonzeros.
    """
    an, am = _shape(a)
    bn, bm = _shape(b)
    r = np.asarray(r, dtype=float)
    if r.size != am * bm:
        raise ValueError(f"vector length {r.size} does not match {am}x{bm} factors")
    R = unvec(r, bm, am)
    if isinstance(a, SparseMatrix):
        a = a.csr
    if isinstance(b, SparseMatrix):
        b = b.csr
    br = b @ R
    if sp.issparse(a):
        out = (a @ br.T).T
    else:
        out = br @ a.T
    return np.asarray(out).reshape(-1, order="F")


def sum_kron_mat_vec(factors: Sequence[tuple], r: Array) -> Array:
    """Apply a sum of Kronecker products, sum_l (A_l (x) B_l) r."""
    if not factors:
        raise ValueError("need at least one factor pair")
    shapes = {( _shape(a)[1], _shape(b)[1]) for a, b in factors}
    if len(shapes) != 1:
        raise ValueError(f"inconsistent factor dimensions: {shapes}")
    out = kron_mat_vec(factors[0][0], factors[0][1], r)
    for a, b in factors[1:]:
        out += kron_mat_vec(a, b, r)
    return out


# ---------------------------------------------------------------------------
# solvers


@dataclass
class SolveReport:
    solution: Array
    iterations: int
    residual_norm: float
    converged: bool


def dense_solve(m: Array, b: Array) -> Array:
    """Solve M x = b by LU factorization; M must be square and nonsingular.

    The residual is certified to ||Mx - b|| <= 1e-10 (1 + ||b||); failure
    means M is singular to working precision.
    """
    m = _dense(m)
    b = np.asarray(b, dtype=float)
    try:
        x = np.linalg.solve(m, b)
    except np.linalg.LinAlgError as e:
        raise SingularOperatorError(f"dense solve failed: {e}") from e
    resid = np.linalg.norm(m @ x - b)
    if not resid <= 1e-10 * (1.0 + np.linalg.norm(b)):
        raise SingularOperatorError(
            f"matrix singular to working precision (residual {resid:.3e})")
    return x


def cg_solve(apply: LinearOp, b: Array, tol: float = 1e-6, max_iter: int = 1000,
             apply_t: LinearOp | None = None) -> SolveReport:
    """Krylov solve of apply(x) = b; residual is tracked on the original system.

    With apply_t given, runs CG on the normal equations (valid for general
    nonsingular operators); without it the operator is taken to be symmetric
    positive definite. Non-convergence yields converged=False, not an error.
    """
    b = np.asarray(b, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return SolveReport(np.zeros_like(b), 0, 0.0, True)
    x = np.zeros_like(b)
    r = b.copy()
    if apply_t is None:
        # plain CG for symmetric positive definite operators
        p = r.copy()
        rs = r @ r
        for it in range(1, max_iter + 1):
            ap = apply(p)
            denom = p @ ap
            if denom == 0.0:
                break
            alpha = rs / denom
            x += alpha * p
            r -= alpha * ap
            rs_new = r @ r
            rel = math.sqrt(rs_new) / bnorm
            if rel <= tol:
                return SolveReport(x, it, rel, True)
            p = r + (rs_new / rs) * p
            rs = rs_new
        return SolveReport(x, max_iter, np.linalg.norm(r) / bnorm, False)
    # CGNR: CG on A^T A x = A^T b, with r = b - A x tracked directly
    z = apply_t(r)
    p = z.copy()
    zz = z @ z
    for it in range(1, max_iter + 1):
        ap = apply(p)
        denom = ap @ ap
        if denom == 0.0:
            break
        alpha = zz / denom
        x += alpha * p
        r -= alpha * ap
        rel = np.linalg.norm(r) / bnorm
        if rel <= tol:
            return SolveReport(x, it, rel, True)
        z = apply_t(r)
        zz_new = z @ z
        p = z + (zz_new / zz) * p
        zz = zz_new
    return SolveReport(x, max_iter, np.linalg.norm(r) / bnorm, False)


def fixed_point_solve(apply_w: LinearOp, p: Array, lam: float,
                      tol: float = 1e-6, max_iter: int = 1000) -> SolveReport:
    """Iterate x <- p + lam * W x from x0 = p until the update norm drops
    below tol; the limit solves (I - lam W) x = p.

    Divergence (iterate growth beyond 1e12x the start) raises DivergenceError
    identifying the spectral condition lam < 1/xi_max as violated.
    """
    if lam < 0:
        raise ValueError("lam must be nonnegative")
    p = np.asarray(p, dtype=float)
    x = p.copy()
    if lam == 0.0:
        return SolveReport(x, 1, 0.0, True)
    guard = 1e12 * (1.0 + np.linalg.norm(p))
    for it in range(1, max_iter + 1):
        x_next = p + lam * apply_w(x)
        diff = np.linalg.norm(x_next - x)
        x = x_next
        if diff < tol:
            return SolveReport(x, it, diff, True)
        if np.linalg.norm(x) > guard:
            raise DivergenceError(
                "fixed-point iteration diverged: spectral condition "
                "lam < 1/xi_max(W) is violated; decrease lam")
    return SolveReport(x, max_iter, diff, False)


def _is_symmetric(m: Array, tol: float = 1e-12) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.T)) <= tol * (1.0 + np.max(np.abs(m)))


def sylvester_solve(s: Array, t: Array, m0: Array) -> Array:
    """Solve the Stein equation M = S M T + M0.

    Symmetric S and T are handled exactly through their eigendecompositions;
    otherwise a doubling iteration M <- M + S^(2^k) M T^(2^k) is used, which
    requires the contraction sr(S) sr(T) < 1. The result is certified against
    the residual bound ||M - S M T - M0||_max <= 1e-8 (1 + ||M0||_max).
    """
    s, t, m0 = _dense(s), _dense(t), _dense(m0)
    if _is_symmetric(s) and _is_symmetric(t):
        ls, ps = np.linalg.eigh(s)
        lt, pt = np.linalg.eigh(t)
        denom = 1.0 - np.outer(ls, lt)
        if np.min(np.abs(denom)) < 1e-12:
            raise SingularOperatorError("Stein operator is singular: eigenvalue product hits 1")
        m = ps @ ((ps.T @ m0 @ pt) / denom) @ pt.T
    else:
        m = m0.copy()
        sk, tk = s.copy(), t.copy()
        guard = 1e12 * (1.0 + np.max(np.abs(m0)))
        for _ in range(64):
            delta = sk @ m @ tk
            m = m + delta
            if np.max(np.abs(delta)) <= 1e-16 * (1.0 + np.max(np.abs(m))):
                break
            if np.max(np.abs(m)) > guard:
                raise DivergenceError(
                    "doubling iteration diverged: need sr(S) sr(T) < 1")
            sk = sk @ sk
            tk = tk @ tk
    resid = np.max(np.abs(m - s @ m @ t - m0))
    if not resid <= 1e-8 * (1.0 + np.max(np.abs(m0))):
        raise SingularOperatorError(
            f"Stein equation residual {resid:.3e} exceeds certification bound")
    return m


def generalized_sylvester_solve(pairs: Sequence[tuple[Array, Array]], lam: float,
                                m0: Array, tol: float = 1e-10,
                                max_iter: int = 1000) -> Array:
    """Solve M = lam * sum_i S_i M T_i^T + M0 by fixed-point sweeps.

    Each sweep costs O(d n^3); contraction of the map (checkable through
    spectral_radius_estimate on the summed operator) is required.
    """
    m0 = _dense(m0)
    rows, cols = m0.shape
    pairs = [(_dense(si), _dense(ti)) for si, ti in pairs]
    # vec(S M T^T) = (T (x) S) vec(M), so delegate to the Kronecker operator
    factors = [(ti, si) for si, ti in pairs]
    try:
        report = fixed_point_solve(
            lambda v: sum_kron_mat_vec(factors, v), vec(m0), lam, tol, max_iter)
    except DivergenceError as e:
        raise DivergenceError(
            "generalized Stein sweeps diverged: contraction "
            "lam * sum_i ||S_i|| ||T_i|| < 1 is violated") from e
    if not report.converged:
        raise DivergenceError(
            f"generalized Stein sweeps did not converge in {max_iter} sweeps")
    return unvec(report.solution, rows, cols)


# ---------------------------------------------------------------------------
# spectral tools


@dataclass
class EigenDecomposition:
    eigenvalues: Array   # ascending
    eigenvectors: Array  # column i pairs with eigenvalue i


def sym_eig(a: Array) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix (ascending eigenvalues)."""
    a = _dense(a)
    if not _is_symmetric(a):
        raise ValueError("sym_eig requires a symmetric matrix")
    w, v = np.linalg.eigh(a)
    return EigenDecomposition(w, v)


def matrix_exp_oracle(a: Array, t: float = 1.0) -> Array:
    """Brute-force exp(t A) by scaling-and-squaring with a Taylor series.

    Accurate to ~1e-10 relative for ||t A|| up to ~50; used as the oracle
    against which the spectral fast paths are certified.
    """
    a = _dense(a)
    n = a.shape[0]
    b = t * a
    norm = np.linalg.norm(b, 1)
    squarings = max(0, int(math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0)
    b = b / (2 ** squarings)
    result = np.eye(n)
    term = np.eye(n)
    for k in range(1, 60):
        term = term @ b / k
        result = result + term
        if np.max(np.abs(term)) <= 1e-18 * max(1.0, np.max(np.abs(result))):
            break
    for _ in range(squarings):
        result = result @ result
    return result


def spectral_radius_estimate(apply: LinearOp, dim: int, iters: int = 50) -> float:
    """Power-iteration estimate of the largest-magnitude eigenvalue.

    Deterministic (fixed seeded start vector); approaches the true value from
    below for symmetric/nonnegative operators as iters grows.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    rng = np.random.default_rng(0)
    v = rng.random(dim) + 0.5  # positive start keeps Perron directions reachable
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = apply(v)
        nrm = np.linalg.norm(w)
        if nrm <= 1e-300:
            return 0.0
        est = nrm
        v = w / nrm
    return float(est)
