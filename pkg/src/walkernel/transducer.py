"""Weighted finite-state transducers over semirings: output weights,
inversion, composition, rational kernels, and the single-letter
specialization that recovers walk sums on graphs.

No epsilon transitions exist by construction, so every machine is regulated.
Transitions are stored sparsely as (src, in, out, dst, weight) tuples with
per-(in, out) slice indices; machines are immutable after construction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import semiring as sr
from .graph import Graph, transition_matrix, uniform_start_stop
from .linalg import kron

Array = np.ndarray


@dataclass
class WeightedTransducer:
    alphabet_size: int
    n_states: int
    transitions: list[tuple[int, int, int, int, float]]  # (src, a, b, dst, w)
    p: Array  # initial weights
    q: Array  # final weights
    semiring: sr.SemiringDescriptor
    _slices: dict[tuple[int, int], Array] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        merged: dict[tuple[int, int, int, int], float] = {}
        for src, a, b, dst, w in self.transitions:
            if not (0 <= a < self.alphabet_size and 0 <= b < self.alphabet_size):
                raise ValueError(f"label ({a},{b}) outside alphabet")
            if not (0 <= src < self.n_states and 0 <= dst < self.n_states):
                raise ValueError("state index out of range")
            key = (src, a, b, dst)
            merged[key] = self.semiring.oplus(merged[key], w) if key in merged else w
        self.transitions = [(s, a, b, d, w) for (s, a, b, d), w in sorted(merged.items())
                            if w != self.semiring.zero]
        self.p = np.asarray(self.p, dtype=float)
        self.q = np.asarray(self.q, dtype=float)

    def slice(self, a: int, b: int) -> Array:
        """Dense n x n transition matrix for input a emitting b."""
        key = (a, b)
        if key not in self._slices:
            m = np.full((self.n_states, self.n_states), self.semiring.zero)
            for src, aa, bb, dst, w in self.transitions:
                if aa == a and bb == b:
                    m[src, dst] = w
            self._slices[key] = m
        return self._slices[key]


@dataclass
class WeightedAutomaton:
    """Transducer with identical input and output labels (3-index tensor)."""

    alphabet_size: int
    n_states: int
    transitions: list[tuple[int, int, int, float]]  # (src, a, dst, w)
    p: Array
    q: Array
    semiring: sr.SemiringDescriptor

    def to_transducer(self) -> WeightedTransducer:
        return WeightedTransducer(
            self.alphabet_size, self.n_states,
            [(s, a, a, d, w) for s, a, d, w in self.transitions],
            self.p, self.q, self.semiring)

    def slice(self, a: int) -> Array:
        return self.to_transducer().slice(a, a)


def output_weight(t: WeightedTransducer, alpha, beta) -> float:
    """Weight assigned to a string pair: q^T (.) A_{a1 b1} (.) ... (.) p.

    Pairs of unequal length get the zero element (no epsilon transitions).
    """
    alpha, beta = list(alpha), list(beta)
    for lbl in (*alpha, *beta):
        if not 0 <= lbl < t.alphabet_size:
            raise ValueError(f"label {lbl} outside alphabet of size {t.alphabet_size}")
    if len(alpha) != len(beta):
        return t.semiring.zero
    v = t.p.copy()
    for a, b in zip(reversed(alpha), reversed(beta)):
        v = t.semiring.mat_vec(t.slice(a, b), v)
    return sr.semiring_dot(t.semiring, t.q, v)


def automaton_output_weight(g: WeightedAutomaton, k: int) -> float:
    """Weight of the length-k one-letter string: q^T (.) A^k (.) p."""
    if g.alphabet_size != 1:
        raise ValueError("needs a single-letter automaton")
    m = g.slice(0)
    v = np.asarray(g.p, dtype=float).copy()
    for _ in range(k):
        v = g.semiring.mat_vec(m, v)
    return sr.semiring_dot(g.semiring, np.asarray(g.q, dtype=float), v)


def inverse(t: WeightedTransducer) -> WeightedTransducer:
    """Transpose input and output labels of every transition."""
    return WeightedTransducer(
        t.alphabet_size, t.n_states,
        [(s, b, a, d, w) for s, a, b, d, w in t.transitions],
        t.p.copy(), t.q.copy(), t.semiring)


def compose(t1: WeightedTransducer, t2: WeightedTransducer) -> WeightedTransducer:
    """Composition through the shared middle tape:
    B_ab = (+)_c A_ac (x) A'_cb over paired states.

    Exploits transition sparsity; state (s, s') maps to s * n' + s'.
    """
    if t1.semiring is not t2.semiring:
        raise ValueError("operands use different semirings")
    if t1.alphabet_size != t2.alphabet_size:
        raise ValueError("operands use different alphabets")
    s = t1.semiring
    n2 = t2.n_states
    by_out: dict[int, list] = {}
    for tr in t1.transitions:
        by_out.setdefault(tr[2], []).append(tr)
    by_in: dict[int, list] = {}
    for tr in t2.transitions:
        by_in.setdefault(tr[1], []).append(tr)
    acc: dict[tuple[int, int, int, int], float] = {}
    for c in set(by_out) & set(by_in):
        for src1, a, _, dst1, w1 in by_out[c]:
            for src2, _, b, dst2, w2 in by_in[c]:
                key = (src1 * n2 + src2, a, b, dst1 * n2 + dst2)
                w = s.odot(w1, w2)
                acc[key] = s.oplus(acc[key], w) if key in acc else w
    transitions = [(src, a, b, dst, w) for (src, a, b, dst), w in acc.items()]
    p = _vec_kron(s, t1.p, t2.p)
    q = _vec_kron(s, t1.q, t2.q)
    return WeightedTransducer(t1.alphabet_size, t1.n_states * n2, transitions, p, q, s)


def _vec_kron(s: sr.SemiringDescriptor, x: Array, y: Array) -> Array:
    out = np.empty(len(x) * len(y))
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            out[i * len(y) + j] = s.odot(float(xi), float(yj))
    return out


def rational_kernel(t: WeightedTransducer, alpha, beta,
                    psi: sr.Morphism | None = None) -> float:
    """psi(weight of the pair); positive semi-definite over any finite string
    set when t = S o S^-1 and psi is a semiring morphism."""
    if psi is None:
        if t.semiring.morphism is None:
            raise ValueError("semiring has no morphism; supply psi")
        psi = t.semiring.morphism
    return psi.forward(output_weight(t, alpha, beta))


def transducer_kernel(s_aut: WeightedAutomaton, u_aut: WeightedAutomaton,
                      t: WeightedTransducer, psi: sr.Morphism | None = None,
                      l_max: int = 10) -> float:
    """Kernel between two weighted automata through a middle transducer:
    the sum over all string pairs of length <= l_max of
    psi(weight assigned by S o T o U).

    Computed by composing and then taking real-domain power sums of the
    label-aggregated transition matrix (psi must be a morphism).
    """
    composed = compose(compose(s_aut.to_transducer(), t), u_aut.to_transducer())
    if psi is None:
        if composed.semiring.morphism is None:
            raise ValueError("semiring has no morphism; supply psi")
        psi = composed.semiring.morphism
    n = composed.n_states
    total_m = np.zeros((n, n))
    for a in range(composed.alphabet_size):
        for b in range(composed.alphabet_size):
            total_m += psi.map_array(composed.slice(a, b))
    p = psi.map_array(composed.p)
    q = psi.map_array(composed.q)
    total = 0.0
    v = p.copy()
    for _ in range(l_max + 1):
        total += q @ v
        v = total_m @ v
    return float(total)


def unit_loop_automaton(alphabet_size: int,
                        s: sr.SemiringDescriptor) -> WeightedAutomaton:
    """Single-state automaton accepting every string with unit weight."""
    transitions = [(0, a, 0, s.one) for a in range(alphabet_size)]
    return WeightedAutomaton(alphabet_size, 1, transitions,
                             np.array([s.one]), np.array([s.one]), s)


def identity_transducer(alphabet_size: int,
                        s: sr.SemiringDescriptor) -> WeightedTransducer:
    """Single-state transducer accepting exactly the pairs (alpha, alpha)."""
    transitions = [(0, a, a, 0, s.one) for a in range(alphabet_size)]
    return WeightedTransducer(alphabet_size, 1, transitions,
                              np.array([s.one]), np.array([s.one]), s)


# ---------------------------------------------------------------------------
# graphs as automata


def graph_as_automaton(g: Graph, p: Array | None = None,
                       q: Array | None = None) -> WeightedAutomaton:
    """Single-letter automaton whose transition matrix is the graph's
    row-normalized adjacency (real semiring)."""
    if p is None:
        p, q = uniform_start_stop(g)
    a = transition_matrix(g).to_dense()
    transitions = [(i, 0, j, float(a[i, j]))
                   for i, j in zip(*np.nonzero(a))]
    return WeightedAutomaton(1, g.n, transitions, np.asarray(p, dtype=float),
                             np.asarray(q, dtype=float), sr.instance("real"))


def rw_equivalence_check(g1: Graph, g2: Graph, k_max: int,
                         tol: float = 1e-10) -> tuple[bool, float]:
    """Verify that transducer-composition power sums match the product-graph
    walk sums: sum_{k=1..K} [G o G'](a^k) == sum_{k=1..K} q_x^T A_x^k p_x.

    Returns (verdict, absolute deviation).
    """
    aut1, aut2 = graph_as_automaton(g1), graph_as_automaton(g2)
    composed = compose(aut1.to_transducer(), aut2.to_transducer())
    comp_aut = WeightedAutomaton(
        1, composed.n_states,
        [(s, a, d, w) for s, a, b, d, w in composed.transitions],
        composed.p, composed.q, composed.semiring)
    lhs = sum(automaton_output_weight(comp_aut, k) for k in range(1, k_max + 1))

    ax = kron(transition_matrix(g1), transition_matrix(g2)).to_dense()
    p1, q1 = uniform_start_stop(g1)
    p2, q2 = uniform_start_stop(g2)
    px, qx = np.kron(p1, p2), np.kron(q1, q2)
    v = px.copy()
    rhs = 0.0
    for _ in range(k_max):
        v = ax @ v
        rhs += qx @ v
    dev = abs(lhs - rhs)
    return bool(dev <= tol), float(dev)


# ---------------------------------------------------------------------------
# text format


def save_transducer(t: WeightedTransducer, path) -> None:
    lines = [f"states={t.n_states} alphabet={t.alphabet_size} semiring={t.semiring.name}"]
    for src, a, b, dst, w in t.transitions:
        lines.append(f"{src} {a} {b} {dst} {w!r}")
    for i, w in enumerate(t.p):
        if w != t.semiring.zero:
            lines.append(f"initial: {i} {float(w)!r}")
    for i, w in enumerate(t.q):
        if w != t.semiring.zero:
            lines.append(f"final: {i} {float(w)!r}")
    Path(path).write_text("\n".join(lines) + "\n")


def load_transducer(path) -> WeightedTransducer:
    lines = [l.strip() for l in Path(path).read_text().splitlines() if l.strip()]
    header = dict(kv.split("=") for kv in lines[0].split())
    n = int(header["states"])
    alphabet = int(header["alphabet"])
    s = sr.instance(header["semiring"])
    p = np.full(n, s.zero)
    q = np.full(n, s.zero)
    transitions = []
    for line in lines[1:]:
        if line.startswith("initial:"):
            _, idx, w = line.split()
            p[int(idx)] = float(w)
        elif line.startswith("final:"):
            _, idx, w = line.split()
            q[int(idx)] = float(w)
        else:
            src, a, b, dst, w = line.split()
            transitions.append((int(src), int(a), int(b), int(dst), float(w)))
    return WeightedTransducer(alphabet, n, transitions, p, q, s)
