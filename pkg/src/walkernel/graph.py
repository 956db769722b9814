"""Graph data model, derived matrices, product/complement constructions, and
the seeded synthetic graph generators used by the scaling experiments.

Graphs are immutable after construction. Undirected graphs store each edge
once with i < j; all derived matrices are symmetrized on the fly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from .linalg import SparseMatrix, kron, kron_sum

LABEL_NONE = "none"
LABEL_DISCRETE = "discrete"
LABEL_VECTOR = "vector"

GRAPH_FORMAT = "walkernel-graph"
GRAPH_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Graph:
    """Weighted graph with optional per-edge discrete labels or feature vectors.

    src/dst/weight are parallel arrays; undirected graphs keep src < dst.
    Absent edges carry the null label, realized as edge absence (never stored).
    """

    n: int
    directed: bool
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    label_mode: str = LABEL_NONE
    labels: np.ndarray | None = None  # (m,) ints or (m, d) floats
    d: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        src, dst = self.src, self.dst
        if np.any(src == dst):
            raise ValueError("self-loops are not allowed")
        if len(src) and (src.min() < 0 or dst.min() < 0 or
                         max(src.max(), dst.max()) >= self.n):
            raise ValueError("vertex index out of range")
        if np.any(self.weight <= 0):
            raise ValueError("edge weights must be strictly positive")
        if not self.directed and np.any(src > dst):
            raise ValueError("undirected edges must be stored with src < dst")
        if self.label_mode == LABEL_DISCRETE:
            if self.labels is None or np.any(self.labels < 0) or np.any(self.labels >= self.d):
                raise ValueError("discrete labels must lie in [0, d)")
        elif self.label_mode == LABEL_VECTOR:
            if self.labels is None or self.labels.shape != (len(src), self.d):
                raise ValueError("vector labels must have shape (edges, d)")

    @property
    def num_edges(self) -> int:
        return len(self.src)

    def edge_list(self) -> list[tuple[int, int, float]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()))


def make_graph(n: int, edges, directed: bool = False, label_mode: str = LABEL_NONE,
               labels=None, d: int = 0) -> Graph:
    """Build a Graph from an iterable of (i, j[, w]) tuples.

    Undirected edges are canonicalized to i < j; duplicates are rejected.
    """
    src, dst, wt = [], [], []
    for e in edges:
        i, j = int(e[0]), int(e[1])
        w = float(e[2]) if len(e) > 2 else 1.0
        if not directed and i > j:
            i, j = j, i
        src.append(i)
        dst.append(j)
        wt.append(w)
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    wt = np.asarray(wt, dtype=float)
    if len(set(zip(src.tolist(), dst.tolist()))) != len(src):
        raise ValueError("duplicate edges")
    if label_mode == LABEL_DISCRETE:
        labels = np.asarray(labels, dtype=np.int64)
    elif label_mode == LABEL_VECTOR:
        labels = np.asarray(labels, dtype=float).reshape(len(src), d)
    return Graph(n, directed, src, dst, wt, label_mode, labels, d)


# ---------------------------------------------------------------------------
# derived matrices


def adjacency(g: Graph) -> SparseMatrix:
    """Weight matrix A~ with zero diagonal; symmetric iff g is undirected."""
    if g.directed:
        return SparseMatrix.from_coo(g.n, g.n, g.src, g.dst, g.weight)
    ii = np.concatenate([g.src, g.dst])
    jj = np.concatenate([g.dst, g.src])
    vv = np.concatenate([g.weight, g.weight])
    return SparseMatrix.from_coo(g.n, g.n, ii, jj, vv)


def degrees(g: Graph) -> np.ndarray:
    return adjacency(g).row_sums()


def normalized_adjacency(g: Graph) -> SparseMatrix:
    """Row-stochastic transition matrix D^-1 A~; every row sums to one."""
    a = adjacency(g)
    d = a.row_sums()
    zero = np.nonzero(d <= 0)[0]
    if len(zero):
        raise ValueError(f"vertex {int(zero[0])} is isolated (degree 0)")
    return a.scale_rows(1.0 / d)


def transition_matrix(g: Graph) -> SparseMatrix:
    """D^-1 A~ with zero rows kept for isolated vertices (walk semantics)."""
    a = adjacency(g)
    d = a.row_sums()
    inv = np.where(d > 0, 1.0 / np.where(d > 0, d, 1.0), 0.0)
    return a.scale_rows(inv)


def laplacian(g: Graph) -> SparseMatrix:
    """Graph Laplacian L~ = D - A~ (undirected graphs only)."""
    if g.directed:
        raise ValueError("Laplacian requires an undirected graph")
    a = adjacency(g)
    d = a.row_sums()
    return SparseMatrix(sp.diags(d).tocsr() - a.csr)


def normalized_laplacian(g: Graph) -> SparseMatrix:
    """D^-1/2 L~ D^-1/2; symmetric with spectrum contained in [0, 2]."""
    if g.directed:
        raise ValueError("Laplacian requires an undirected graph")
    a = adjacency(g)
    d = a.row_sums()
    zero = np.nonzero(d <= 0)[0]
    if len(zero):
        raise ValueError(f"vertex {int(zero[0])} is isolated (degree 0)")
    dm = sp.diags(1.0 / np.sqrt(d))
    lap = sp.diags(d).tocsr() - a.csr
    return SparseMatrix(dm @ lap @ dm)


def label_filtered_adjacency(g: Graph, label: int) -> SparseMatrix:
    """Normalized adjacency restricted to edges carrying the given label."""
    if g.label_mode != LABEL_DISCRETE:
        raise ValueError("label filtering requires discrete edge labels")
    if not 0 <= label < g.d:
        raise ValueError(f"label {label} outside alphabet of size {g.d}")
    a = transition_matrix(g)
    mask = g.labels == label
    src, dst = g.src[mask], g.dst[mask]
    if g.directed:
        keep = sp.csr_matrix((np.ones(len(src)), (src, dst)), shape=(g.n, g.n))
    else:
        ii = np.concatenate([src, dst])
        jj = np.concatenate([dst, src])
        keep = sp.csr_matrix((np.ones(len(ii)), (ii, jj)), shape=(g.n, g.n))
    return SparseMatrix(a.csr.multiply(keep))


def feature_matrix(g: Graph, degree_normalize: bool = True) -> np.ndarray:
    """Edge feature grid of shape (n, n, d); absent edges map to the zero vector.

    Discrete labels give one-hot vectors e_l / d_i (degree-normalized), vector
    labels copy the stored features scaled by 1/d_i. Unlabeled graphs are
    treated as single-label (d = 1), recovering the transition matrix.
    """
    d = max(1, g.d) if g.label_mode != LABEL_NONE else 1
    phi = np.zeros((g.n, g.n, d))
    a = (transition_matrix(g) if degree_normalize else adjacency(g)).to_dense()
    if g.label_mode == LABEL_NONE:
        phi[:, :, 0] = a
        return phi
    if g.label_mode == LABEL_DISCRETE:
        for k in range(g.num_edges):
            i, j, l = int(g.src[k]), int(g.dst[k]), int(g.labels[k])
            phi[i, j, l] = a[i, j]
            if not g.directed:
                phi[j, i, l] = a[j, i]
        return phi
    # vector labels: stored feature scaled by the normalization weight ratio
    w = adjacency(g).to_dense()
    for k in range(g.num_edges):
        i, j = int(g.src[k]), int(g.dst[k])
        fv = g.labels[k]
        phi[i, j] = fv * (a[i, j] / w[i, j])
        if not g.directed:
            phi[j, i] = fv * (a[j, i] / w[j, i])
    return phi


# ---------------------------------------------------------------------------
# products and complement


@dataclass
class ProductGraph:
    """Product of two graphs over paired vertices; (i, i') maps to i*n2 + i'.

    Carries the weight-matrix factor list for lazy operator application and
    start/stop distributions; the explicit matrix is built on demand.
    """

    n1: int
    n2: int
    factors: list[tuple[SparseMatrix, SparseMatrix]]
    p: np.ndarray
    q: np.ndarray
    kind: str  # "direct" or "cartesian"
    _explicit: SparseMatrix | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.n1 * self.n2

    def vertex_index(self, i: int, i2: int) -> int:
        return i * self.n2 + i2

    def explicit_weight(self) -> SparseMatrix:
        """Materialize the weight matrix from the factor list."""
        if self._explicit is None:
            if self.kind == "direct":
                acc = kron(self.factors[0][0], self.factors[0][1]).csr
                for a, b in self.factors[1:]:
                    acc = acc + kron(a, b).csr
            else:
                acc = kron_sum(self.factors[0][0], self.factors[0][1]).csr
                for a, b in self.factors[1:]:
                    acc = acc + kron_sum(a, b).csr
            self._explicit = SparseMatrix(acc)
        return self._explicit

    def edges(self) -> list[tuple[int, int]]:
        """Structural edge set (index pairs with i < j for symmetric weights)."""
        coo = self.explicit_weight().csr.tocoo()
        out = set()
        for i, j in zip(coo.row.tolist(), coo.col.tolist()):
            out.add((min(i, j), max(i, j)))
        return sorted(out)


def uniform_start_stop(g: Graph) -> tuple[np.ndarray, np.ndarray]:
    """Uniform start/stop distributions p = q = e/n."""
    p = np.full(g.n, 1.0 / g.n)
    return p, p.copy()


def _product_distributions(g1: Graph, g2: Graph, p1, p2, q1, q2):
    if p1 is None:
        p1, q1 = uniform_start_stop(g1)
    if p2 is None:
        p2, q2 = uniform_start_stop(g2)
    return np.kron(p1, p2), np.kron(q1, q2)


def _walk_factors(g1: Graph, g2: Graph, degree_normalize: bool = True
                  ) -> list[tuple[SparseMatrix, SparseMatrix]]:
    """Factor pairs (F_l, F'_l) with W = sum_l F_l (x) F'_l.

    Unlabeled graphs give the single transition-matrix pair; discrete labels
    give label-filtered pairs; vector labels give one pair per feature
    component (the inner product decomposes across components).
    """
    def base(g):
        return transition_matrix(g) if degree_normalize else adjacency(g)

    modes = (g1.label_mode, g2.label_mode)
    if LABEL_VECTOR in modes:
        if modes[0] != modes[1] or g1.d != g2.d:
            raise ValueError("vector-labeled products need matching feature dimensions")
        f1 = feature_matrix(g1, degree_normalize)
        f2 = feature_matrix(g2, degree_normalize)
        return [(SparseMatrix.from_dense(f1[:, :, l]), SparseMatrix.from_dense(f2[:, :, l]))
                for l in range(g1.d)]
    if LABEL_DISCRETE in modes:
        if modes[0] != modes[1] or g1.d != g2.d:
            raise ValueError("labeled products need matching label alphabets")
        if degree_normalize:
            return [(label_filtered_adjacency(g1, l), label_filtered_adjacency(g2, l))
                    for l in range(g1.d)]
        return [(_raw_label_filtered(g1, l), _raw_label_filtered(g2, l))
                for l in range(g1.d)]
    return [(base(g1), base(g2))]


def _raw_label_filtered(g: Graph, label: int) -> SparseMatrix:
    mask = g.labels == label
    src, dst, wt = g.src[mask], g.dst[mask], g.weight[mask]
    if g.directed:
        return SparseMatrix.from_coo(g.n, g.n, src, dst, wt)
    ii = np.concatenate([src, dst])
    jj = np.concatenate([dst, src])
    vv = np.concatenate([wt, wt])
    return SparseMatrix.from_coo(g.n, g.n, ii, jj, vv)


def direct_product(g1: Graph, g2: Graph, p1=None, p2=None, q1=None, q2=None,
                   degree_normalize: bool = True) -> ProductGraph:
    """Direct (tensor) product: (i,i') ~ (j,j') iff i~j and i'~j'.

    The weight matrix is sum_l lA (x) lA', kept as a factor list.
    """
    if g1.directed != g2.directed:
        raise ValueError("product requires matching directedness")
    p, q = _product_distributions(g1, g2, p1, p2, q1, q2)
    return ProductGraph(g1.n, g2.n, _walk_factors(g1, g2, degree_normalize), p, q, "direct")


def cartesian_product(g1: Graph, g2: Graph, p1=None, p2=None, q1=None, q2=None,
                      weight: str = "adjacency") -> ProductGraph:
    """Cartesian (box) product: adjacent iff equal in one coordinate and
    adjacent in the other; A and L both combine by Kronecker sum.

    weight selects the factor matrices: "adjacency" (raw A~) or "laplacian" (L~).
    """
    if g1.directed != g2.directed:
        raise ValueError("product requires matching directedness")
    p, q = _product_distributions(g1, g2, p1, p2, q1, q2)
    if weight == "adjacency":
        factors = [(adjacency(g1), adjacency(g2))]
    elif weight == "laplacian":
        factors = [(laplacian(g1), laplacian(g2))]
    else:
        raise ValueError(f"unknown weight choice {weight!r}")
    return ProductGraph(g1.n, g2.n, factors, p, q, "cartesian")


def complement(g: Graph) -> Graph:
    """Complement graph: exactly the missing (off-diagonal) edges, weight 1."""
    if g.directed:
        raise ValueError("complement requires an undirected graph")
    present = set(zip(g.src.tolist(), g.dst.tolist()))
    edges = [(i, j) for i in range(g.n) for j in range(i + 1, g.n)
             if (i, j) not in present]
    return make_graph(g.n, edges, directed=False)


def is_connected(g: Graph) -> bool:
    """BFS reachability over the undirected support."""
    if g.n == 1:
        return True
    adj = [[] for _ in range(g.n)]
    for i, j in zip(g.src.tolist(), g.dst.tolist()):
        adj[i].append(j)
        adj[j].append(i)
    seen = np.zeros(g.n, dtype=bool)
    stack = [0]
    seen[0] = True
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = True
                count += 1
                stack.append(v)
    return count == g.n


# ---------------------------------------------------------------------------
# generators


class _UnionFind:
    def __init__(self, n):
        self.parent = list(range(n))
        self.components = n

    def find(self, a):
        while self.parent[a] != a:
            self.parent[a] = self.parent[self.parent[a]]
            a = self.parent[a]
        return a

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb
            self.components -= 1


def _shuffled_pairs(n: int, rng: np.random.Generator) -> np.ndarray:
    iu = np.triu_indices(n, k=1)
    pairs = np.column_stack(iu)
    return pairs[rng.permutation(len(pairs))]


def random_graph_set1(k: int, seed: int) -> Graph:
    """SET-1 generator: 2^k vertices; insert random edges one at a time until
    the graph is connected and the average degree is at least 2.

    Deterministic per seed. (On 2 vertices the degree target is unreachable,
    so the single possible edge yields K2.)
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = 2 ** k
    rng = np.random.default_rng(seed)
    uf = _UnionFind(n)
    edges = []
    for i, j in _shuffled_pairs(n, rng):
        edges.append((int(i), int(j)))
        uf.union(int(i), int(j))
        if uf.components == 1 and 2 * len(edges) >= 2 * n:
            break
    return make_graph(n, edges, directed=False)


def random_graph_set2(n: int, fill_pct: float, seed: int) -> Graph:
    """SET-2 generator: n vertices; insert random edges until connected and
    the adjacency fill nnz/n^2 reaches fill_pct/100 (capped at the complete
    graph, which realizes fill_pct = 100).
    """
    min_fill = 100.0 * 2 * (n - 1) / (n * n)
    if fill_pct < min_fill:
        raise ValueError(
            f"fill_pct {fill_pct} cannot produce a connected graph on {n} "
            f"vertices (minimum {min_fill:.2f})")
    if fill_pct > 100:
        raise ValueError("fill_pct cannot exceed 100")
    target_nnz = fill_pct / 100.0 * n * n
    rng = np.random.default_rng(seed)
    uf = _UnionFind(n)
    edges = []
    all_pairs = _shuffled_pairs(n, rng)
    for i, j in all_pairs:
        edges.append((int(i), int(j)))
        uf.union(int(i), int(j))
        if uf.components == 1 and 2 * len(edges) >= target_nnz:
            break
    return make_graph(n, edges, directed=False)


def attach_random_labels(g: Graph, d: int, seed: int) -> Graph:
    """Copy of g with uniformly random discrete edge labels from [0, d)."""
    rng = np.random.default_rng(seed)
    labels = rng.integers(0, d, size=g.num_edges)
    return Graph(g.n, g.directed, g.src, g.dst, g.weight, LABEL_DISCRETE, labels, d)


def concat_vertex_labels(g: Graph, vertex_labels) -> Graph:
    """Fold vertex labels into edge labels: each edge gets the label formed by
    its endpoints' labels (plus any existing edge label), re-indexed over a
    canonical alphabet. Endpoint order is ignored for undirected graphs.
    """
    vl = list(vertex_labels)
    if len(vl) != g.n:
        raise ValueError("need one label per vertex")
    combos = []
    for k in range(g.num_edges):
        i, j = int(g.src[k]), int(g.dst[k])
        el = int(g.labels[k]) if g.label_mode == LABEL_DISCRETE else None
        pair = (vl[i], vl[j]) if g.directed else tuple(sorted((vl[i], vl[j]), key=repr))
        combos.append((pair, el))
    alphabet = sorted(set(combos), key=repr)
    index = {c: i for i, c in enumerate(alphabet)}
    labels = np.array([index[c] for c in combos], dtype=np.int64)
    return Graph(g.n, g.directed, g.src, g.dst, g.weight,
                 LABEL_DISCRETE, labels, len(alphabet))


# ---------------------------------------------------------------------------
# file formats


def to_json_dict(g: Graph) -> dict:
    edges = []
    for k in range(g.num_edges):
        e = [int(g.src[k]), int(g.dst[k]), float(g.weight[k])]
        if g.label_mode == LABEL_DISCRETE:
            e.append(int(g.labels[k]))
        elif g.label_mode == LABEL_VECTOR:
            e.append([float(x) for x in g.labels[k]])
        edges.append(e)
    return {
        "format": GRAPH_FORMAT,
        "version": GRAPH_FORMAT_VERSION,
        "n": g.n,
        "directed": g.directed,
        "label_mode": g.label_mode,
        "d": g.d,
        "edges": edges,
    }


def from_json_dict(doc: dict) -> Graph:
    if doc.get("format") != GRAPH_FORMAT:
        raise ValueError("not a walkernel graph document")
    if doc.get("version") != GRAPH_FORMAT_VERSION:
        raise ValueError(f"unsupported graph format version {doc.get('version')}")
    mode = doc.get("label_mode", LABEL_NONE)
    edges, labels = [], []
    for e in doc["edges"]:
        edges.append((e[0], e[1], e[2]))
        if mode != LABEL_NONE:
            labels.append(e[3])
    return make_graph(doc["n"], edges, directed=doc.get("directed", False),
                      label_mode=mode, labels=labels if mode != LABEL_NONE else None,
                      d=doc.get("d", 0))


def save_graph(g: Graph, path) -> None:
    Path(path).write_text(json.dumps(to_json_dict(g), sort_keys=True) + "\n")


def load_graph(path) -> Graph:
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return from_json_dict(json.loads(text))
    return parse_edge_list(text)


def parse_edge_list(text: str) -> Graph:
    """Plain edge-list format: '#n=<count>' header then 'i j [w] [label]' lines."""
    n = None
    edges, labels = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("n="):
                n = int(body[2:])
            continue
        parts = line.split()
        if len(parts) < 2:
            raise ValueError(f"bad edge line: {raw!r}")
        i, j = int(parts[0]), int(parts[1])
        w = float(parts[2]) if len(parts) > 2 else 1.0
        edges.append((i, j, w))
        if len(parts) > 3:
            labels.append(int(parts[3]))
    if n is None:
        raise ValueError("edge list needs a '#n=<count>' header")
    if labels and len(labels) != len(edges):
        raise ValueError("either all or no edges may carry labels")
    if labels:
        return make_graph(n, edges, label_mode=LABEL_DISCRETE, labels=labels,
                          d=max(labels) + 1)
    return make_graph(n, edges)
