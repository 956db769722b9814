"""Benchmark harness: timed Gram-matrix computation per method over the
synthetic graph sets, log-log slope fits, and the vec-trick vs explicit
product-matrix comparison.

Timing methodology: BLAS pinned to one thread, warm-up excluded, median over
repetitions. The "direct" baseline replicates the reference approach it is
compared against in the literature: materialize the product weight matrix
densely and explicitly invert it. A per-cell timeout (checked between pairs)
marks cells as excluded rather than blocking the run.
"""

from __future__ import annotations

import csv
import math
import time
from contextlib import nullcontext
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import lapack

from . import graph as gr
from . import linalg as la

try:
    from threadpoolctl import threadpool_limits
except ImportError:  # pragma: no cover
    threadpool_limits = None

BENCH_METHODS = ("direct", "sylvester", "cg", "fixed_point",
                 "fp_vec_trick", "fp_explicit")

CSV_HEADER = ["method", "n", "fill", "rep", "seconds", "checksum", "status"]


@dataclass
class TimingRecord:
    method: str
    n: int
    fill: float | None
    rep: int
    seconds: float
    checksum: float
    status: str = "ok"  # ok | excluded


@dataclass
class BenchmarkPlan:
    methods: list[str]
    set1_ks: list[int] = field(default_factory=list)
    set2_n: int = 32
    set2_fills: list[float] = field(default_factory=list)
    graphs_per_cell: int = 10
    reps: int = 3
    seed: int = 0
    lam: float = 0.001
    tol: float = 1e-6
    timeout_secs: float | None = None

    def __post_init__(self):
        if self.reps < 1:
            raise ValueError("reps must be >= 1")
        if not self.methods:
            raise ValueError("need at least one method")
        for m in self.methods:
            if m not in BENCH_METHODS:
                raise ValueError(f"unknown bench method {m!r}")


class CellTimeout(Exception):
    pass


def _single_thread():
    if threadpool_limits is None:  # pragma: no cover
        return nullcontext()
    return threadpool_limits(limits=1)


_INV_LWORK: dict[int, int] = {}


def _raw_inv(m: np.ndarray) -> np.ndarray:
    """Explicit inverse through dgetrf/dgetri with blocked workspace."""
    dim = m.shape[0]
    lwork = _INV_LWORK.get(dim)
    if lwork is None:
        lwork = _INV_LWORK[dim] = int(lapack.dgetri_lwork(dim)[0])
    lu, piv, info = lapack.dgetrf(m, overwrite_a=True)
    if info != 0:
        raise la.SingularOperatorError(f"LU factorization failed (info={info})")
    inv, info = lapack.dgetri(lu, piv, lwork=lwork, overwrite_lu=True)
    if info != 0:
        raise la.SingularOperatorError(f"inversion failed (info={info})")
    return inv


# ---------------------------------------------------------------------------
# per-method pair loops (lean, with per-graph data precomputed once per cell)


def _gram_direct(mats: list[np.ndarray], lam: float, deadline: float) -> float:
    """Reference baseline: dense product weight matrix and explicit inverse.

    The system matrix is assembled transposed in C order so its transpose
    view is Fortran-contiguous, letting LAPACK factor it without a copy.
    """
    trans = [m.T.copy() for m in mats]
    n = mats[0].shape[0]
    dim = n * n
    p = np.full(dim, 1.0 / dim)
    total = 0.0
    for a in range(len(mats)):
        for b in range(a, len(mats)):
            if time.perf_counter() > deadline:
                raise CellTimeout
            # (I - lam W)^T built directly: value = p^T (I - lam W)^-1 p
            wt = (trans[a][:, None, :, None] * trans[b][None, :, None, :])
            wt = wt.reshape(dim, dim)
            wt *= -lam
            wt.reshape(-1)[::dim + 1] += 1.0
            inv = _raw_inv(wt.T)
            v = float(p @ (inv @ p))
            total += v if a == b else 2.0 * v
    return total


def _gram_sylvester(dense_mats: list[np.ndarray], lam: float, tol: float,
                    deadline: float) -> float:
    total = 0.0
    for a in range(len(dense_mats)):
        for b in range(a, len(dense_mats)):
            if time.perf_counter() > deadline:
                raise CellTimeout
            ma, mb = dense_mats[a], dense_mats[b]
            n1, n2 = ma.shape[0], mb.shape[0]
            m0 = np.full((n2, n1), 1.0 / (n1 * n2))
            m = la.generalized_sylvester_solve([(mb, ma)], lam, m0, tol=tol * 1e-3)
            v = float(np.full(n1 * n2, 1.0 / (n1 * n2)) @ la.vec(m))
            total += v if a == b else 2.0 * v
    return total


def _pair_operator(csr_a, csr_b):
    at, bt = csr_a.T.tocsr(), csr_b.T.tocsr()

    def apply_w(v):
        r = v.reshape(csr_a.shape[1], csr_b.shape[1]).T
        return np.asarray((csr_a @ (csr_b @ r).T)).T.reshape(-1, order="F")

    def apply_wt(v):
        r = v.reshape(csr_a.shape[0], csr_b.shape[0]).T
        return np.asarray((at @ (bt @ r).T)).T.reshape(-1, order="F")

    return apply_w, apply_wt


def _guard(apply_w, dim: int, lam: float) -> None:
    est = la.spectral_radius_estimate(apply_w, dim, iters=20)
    if lam * est >= 1.0:
        raise la.DivergenceError("spectral condition violated in benchmark cell")


def _gram_fixed_point(csrs, lam: float, tol: float, deadline: float,
                      explicit: bool) -> float:
    total = 0.0
    for a in range(len(csrs)):
        for b in range(a, len(csrs)):
            if time.perf_counter() > deadline:
                raise CellTimeout
            ca, cb = csrs[a], csrs[b]
            dim = ca.shape[0] * cb.shape[0]
            if explicit:
                w = sp.kron(ca, cb, format="csr")
                apply_w = lambda v: w @ v
            else:
                apply_w, _ = _pair_operator(ca, cb)
            _guard(apply_w, dim, lam)
            p = np.full(dim, 1.0 / dim)
            rep = la.fixed_point_solve(apply_w, p, lam, tol)
            v = float(p @ rep.solution)
            total += v if a == b else 2.0 * v
    return total


def _gram_cg(csrs, lam: float, tol: float, deadline: float) -> float:
    total = 0.0
    for a in range(len(csrs)):
        for b in range(a, len(csrs)):
            if time.perf_counter() > deadline:
                raise CellTimeout
            ca, cb = csrs[a], csrs[b]
            dim = ca.shape[0] * cb.shape[0]
            apply_w, apply_wt = _pair_operator(ca, cb)
            p = np.full(dim, 1.0 / dim)
            rep = la.cg_solve(lambda v: v - lam * apply_w(v), p, tol,
                              max_iter=1000,
                              apply_t=lambda v: v - lam * apply_wt(v))
            v = float(p @ rep.solution)
            total += v if a == b else 2.0 * v
    return total


def _cell_once(method: str, graphs, lam: float, tol: float,
               timeout: float | None) -> tuple[float, float, str]:
    """Run one repetition of a cell; returns (seconds, checksum, status)."""
    deadline = time.perf_counter() + (timeout if timeout else math.inf)
    t0 = time.perf_counter()
    try:
        if method == "direct":
            mats = [gr.transition_matrix(g).to_dense() for g in graphs]
            checksum = _gram_direct(mats, lam, deadline)
        elif method == "sylvester":
            mats = [gr.transition_matrix(g).to_dense() for g in graphs]
            checksum = _gram_sylvester(mats, lam, tol, deadline)
        elif method == "cg":
            csrs = [gr.transition_matrix(g).csr for g in graphs]
            checksum = _gram_cg(csrs, lam, tol, deadline)
        elif method in ("fixed_point", "fp_vec_trick"):
            csrs = [gr.transition_matrix(g).csr for g in graphs]
            checksum = _gram_fixed_point(csrs, lam, tol, deadline, explicit=False)
        elif method == "fp_explicit":
            csrs = [gr.transition_matrix(g).csr for g in graphs]
            checksum = _gram_fixed_point(csrs, lam, tol, deadline, explicit=True)
        else:
            raise ValueError(f"unknown bench method {method!r}")
    except CellTimeout:
        return time.perf_counter() - t0, math.nan, "excluded"
    return time.perf_counter() - t0, checksum, "ok"


def run_cell(method: str, graphs, lam: float, tol: float, reps: int,
             timeout: float | None, n: int, fill: float | None,
             warmup: bool = True) -> list[TimingRecord]:
    """Time one (method, size/fill) cell: reps repetitions of the full
    Gram computation, warm-up excluded, single BLAS thread."""
    records = []
    with _single_thread():
        if warmup:
            # a two-graph sub-cell warms the library paths at this dimension
            seconds, _, status = _cell_once(method, graphs[:2], lam, tol, timeout)
            if status == "excluded":
                return [TimingRecord(method, n, fill, 0, seconds, math.nan, "excluded")]
        for rep in range(reps):
            seconds, checksum, status = _cell_once(method, graphs, lam, tol, timeout)
            records.append(TimingRecord(method, n, fill, rep, seconds, checksum, status))
            if status == "excluded":
                break
    return records


def run_plan(plan: BenchmarkPlan, progress=None) -> list[TimingRecord]:
    """Execute every planned cell sequentially (timing fidelity)."""
    records: list[TimingRecord] = []
    cells: list[tuple[int, float | None, list]] = []
    for k in plan.set1_ks:
        graphs = [gr.random_graph_set1(k, seed=plan.seed * 1000 + k * 100 + i)
                  for i in range(plan.graphs_per_cell)]
        cells.append((2 ** k, None, graphs))
    for fill in plan.set2_fills:
        graphs = [gr.random_graph_set2(plan.set2_n, fill,
                                       seed=plan.seed * 1000 + int(fill) * 10 + i)
                  for i in range(plan.graphs_per_cell)]
        cells.append((plan.set2_n, fill, graphs))
    for method in plan.methods:
        skip_larger = False
        for n, fill, graphs in cells:
            if skip_larger and fill is None:
                records.append(TimingRecord(method, n, fill, 0, math.nan,
                                            math.nan, "excluded"))
                continue
            cell_records = run_cell(method, graphs, plan.lam, plan.tol,
                                    plan.reps, plan.timeout_secs, n, fill)
            records.extend(cell_records)
            if progress:
                progress(method, n, fill, cell_records)
            if any(r.status == "excluded" for r in cell_records) and fill is None:
                skip_larger = True  # larger sizes of the same method will also time out
    return records


# ---------------------------------------------------------------------------
# analysis and output


def median_cell_times(records, method: str) -> dict[int, float]:
    """Median ok-seconds per size for a method (SET-1 cells only)."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        if r.method == method and r.fill is None and r.status == "ok":
            by_n.setdefault(r.n, []).append(r.seconds)
    return {n: float(np.median(ts)) for n, ts in sorted(by_n.items())}


def fit_loglog_slope(times_by_n: dict[int, float]) -> float:
    """Least-squares slope of log(time) against log(n)."""
    if len(times_by_n) < 2:
        raise ValueError("need at least two sizes to fit a slope")
    xs = np.log([float(n) for n in times_by_n])
    ys = np.log(list(times_by_n.values()))
    return float(np.polyfit(xs, ys, 1)[0])


def slope_report(records, methods) -> dict[str, float]:
    out = {}
    for method in methods:
        times = median_cell_times(records, method)
        if len(times) >= 2:
            out[method] = fit_loglog_slope(times)
    return out


def checksum_agreement(records) -> float:
    """Largest relative checksum spread across methods per (n, fill) cell."""
    by_cell: dict[tuple, list[float]] = {}
    for r in records:
        if r.status == "ok" and np.isfinite(r.checksum):
            by_cell.setdefault((r.n, r.fill), []).append(r.checksum)
    worst = 0.0
    for sums in by_cell.values():
        lo, hi = min(sums), max(sums)
        worst = max(worst, (hi - lo) / max(abs(hi), 1e-300))
    return worst


def write_csv(records, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in records:
            writer.writerow([r.method, r.n,
                             "" if r.fill is None else r.fill,
                             r.rep,
                             "" if math.isnan(r.seconds) else f"{r.seconds:.6f}",
                             "" if math.isnan(r.checksum) else repr(r.checksum),
                             r.status])


def read_csv(path) -> list[TimingRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            records.append(TimingRecord(
                row["method"], int(row["n"]),
                float(row["fill"]) if row["fill"] else None,
                int(row["rep"]),
                float(row["seconds"]) if row["seconds"] else math.nan,
                float(row["checksum"]) if row["checksum"] else math.nan,
                row["status"]))
    return records
