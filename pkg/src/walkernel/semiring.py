"""Abstract semiring algebra over a numeric carrier, with the real, boolean,
logarithmic, and tropical instances, their morphisms (where they exist), and
semiring matrix/vector operations.

Elements live in a single float carrier interpreted by the descriptor;
booleans are encoded as {0.0, 1.0}. Descriptors are immutable function
tables and all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

Array = np.ndarray

NEG_INF = float("-inf")


@dataclass(frozen=True)
class Morphism:
    """Structure-preserving map into the reals: psi(x (+) y) = psi(x) + psi(y),
    psi(x (.) y) = psi(x) psi(y), psi(zero) = 0, psi(one) = 1."""

    forward: Callable[[float], float]
    inverse: Callable[[float], float] | None = None

    def map_array(self, a: Array) -> Array:
        return np.vectorize(self.forward, otypes=[float])(a)

    def unmap_array(self, a: Array) -> Array:
        if self.inverse is None:
            raise ValueError("morphism has no inverse")
        return np.vectorize(self.inverse, otypes=[float])(a)


@dataclass(frozen=True)
class SemiringDescriptor:
    """A semiring (carrier, (+), (.), zero, one) with optional vectorized
    fast paths and an optional morphism to the reals."""

    name: str
    oplus: Callable[[float, float], float]
    odot: Callable[[float, float], float]
    zero: float
    one: float
    morphism: Morphism | None = None
    # vectorized helpers; fall back to the scalar ops when absent
    _mat_vec: Callable[[Array, Array], Array] | None = field(default=None, repr=False)

    def contains(self, x: float) -> bool:
        return not math.isnan(x)

    def mat_vec_generic(self, a: Array, x: Array) -> Array:
        """Definitional mat-vec: out_i = (+)_j a_ij (.) x_j."""
        n, m = a.shape
        out = np.full(n, self.zero)
        for i in range(n):
            acc = self.zero
            for j in range(m):
                acc = self.oplus(acc, self.odot(a[i, j], x[j]))
            out[i] = acc
        return out

    def mat_vec(self, a: Array, x: Array) -> Array:
        if a.shape[1] != x.shape[0]:
            raise ValueError(f"dimension mismatch {a.shape} @ {x.shape}")
        if self._mat_vec is not None:
            return self._mat_vec(a, x)
        return self.mat_vec_generic(a, x)


def _log_oplus(x: float, y: float) -> float:
    # stable log-sum-exp: max + log1p(exp(-|x-y|))
    if x == NEG_INF:
        return y
    if y == NEG_INF:
        return x
    if math.isinf(x) or math.isinf(y):
        return math.inf
    hi, lo = (x, y) if x >= y else (y, x)
    return hi + math.log1p(math.exp(lo - hi))


def _extended_add(x: float, y: float) -> float:
    # (.) for log/tropical: + with -inf annihilating (so -inf (.) +inf = -inf)
    if x == NEG_INF or y == NEG_INF:
        return NEG_INF
    return x + y


def _log_mat_vec(a: Array, x: Array) -> Array:
    with np.errstate(invalid="ignore"):
        s = a + x[None, :]
    s[np.isnan(s)] = NEG_INF  # -inf + inf pairs annihilate
    hi = np.max(s, axis=1, keepdims=True)
    safe_hi = np.where(np.isfinite(hi), hi, 0.0)
    with np.errstate(divide="ignore"):
        out = safe_hi.ravel() + np.log(np.sum(np.exp(s - safe_hi), axis=1))
    return np.where(np.isfinite(hi.ravel()), out, hi.ravel())


def _tropical_mat_vec(a: Array, x: Array) -> Array:
    with np.errstate(invalid="ignore"):
        s = a + x[None, :]
    s[np.isnan(s)] = NEG_INF
    return np.max(s, axis=1)


def _boolean_mat_vec(a: Array, x: Array) -> Array:
    return (((a > 0.5) & (x[None, :] > 0.5)).any(axis=1)).astype(float)


_REAL = SemiringDescriptor(
    "real", lambda x, y: x + y, lambda x, y: x * y, 0.0, 1.0,
    morphism=Morphism(lambda x: x, lambda x: x),
    _mat_vec=lambda a, x: a @ x)

_BOOLEAN = SemiringDescriptor(
    "boolean",
    lambda x, y: float(bool(x) or bool(y)),
    lambda x, y: float(bool(x) and bool(y)),
    0.0, 1.0, _mat_vec=_boolean_mat_vec)

def _safe_exp(x: float) -> float:
    return math.exp(x) if x < 709.0 else math.inf


_LOGARITHMIC = SemiringDescriptor(
    "logarithmic", _log_oplus, _extended_add, NEG_INF, 0.0,
    morphism=Morphism(_safe_exp, lambda x: math.log(x) if x > 0 else NEG_INF),
    _mat_vec=_log_mat_vec)

_TROPICAL = SemiringDescriptor(
    "tropical", max, _extended_add, NEG_INF, 0.0,
    _mat_vec=_tropical_mat_vec)

_INSTANCES = {s.name: s for s in (_REAL, _BOOLEAN, _LOGARITHMIC, _TROPICAL)}


def instance(name: str) -> SemiringDescriptor:
    """Return a shipped semiring by name: real, boolean, logarithmic, tropical."""
    try:
        return _INSTANCES[name]
    except KeyError:
        raise ValueError(f"unknown semiring {name!r}; "
                         f"choose from {sorted(_INSTANCES)}") from None


# ---------------------------------------------------------------------------
# semiring matrices


@dataclass(frozen=True)
class SemiringMatrix:
    semiring: SemiringDescriptor
    data: Array  # (rows, cols) in the carrier

    def __post_init__(self):
        if self.data.ndim != 2:
            raise ValueError("semiring matrix must be 2-D")

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @classmethod
    def build(cls, semiring: SemiringDescriptor, entries) -> "SemiringMatrix":
        return cls(semiring, np.asarray(entries, dtype=float))

    @classmethod
    def identity(cls, semiring: SemiringDescriptor, n: int) -> "SemiringMatrix":
        data = np.full((n, n), semiring.zero)
        np.fill_diagonal(data, semiring.one)
        return cls(semiring, data)


def semiring_mat_vec(a: SemiringMatrix, x: Array) -> Array:
    """out_i = (+)_j A_ij (.) x_j."""
    return a.semiring.mat_vec(a.data, np.asarray(x, dtype=float))


def semiring_vec_mat(x: Array, a: SemiringMatrix) -> Array:
    """out_j = (+)_i x_i (.) A_ij (left multiplication by a row vector)."""
    return a.semiring.mat_vec(a.data.T, np.asarray(x, dtype=float))


def semiring_mat_mat(a: SemiringMatrix, b: SemiringMatrix) -> SemiringMatrix:
    """[A (.) B]_ij = (+)_k A_ik (.) B_kj."""
    if a.semiring is not b.semiring:
        raise ValueError("operands use different semirings")
    if a.cols != b.rows:
        raise ValueError(f"dimension mismatch {a.data.shape} @ {b.data.shape}")
    out = np.column_stack([a.semiring.mat_vec(a.data, b.data[:, j])
                           for j in range(b.cols)])
    return SemiringMatrix(a.semiring, out)


def semiring_dot(s: SemiringDescriptor, x: Array, y: Array) -> float:
    """(+)_i x_i (.) y_i."""
    acc = s.zero
    for xi, yi in zip(x, y):
        acc = s.oplus(acc, s.odot(float(xi), float(yi)))
    return acc


def semiring_kron(a: SemiringMatrix, b: SemiringMatrix) -> SemiringMatrix:
    """Kronecker product with (.) in place of multiplication."""
    if a.semiring is not b.semiring:
        raise ValueError("operands use different semirings")
    n, m = a.data.shape
    p, q = b.data.shape
    out = np.full((n * p, m * q), a.semiring.zero)
    for i in range(n):
        for j in range(m):
            for k in range(p):
                for l in range(q):
                    out[i * p + k, j * q + l] = a.semiring.odot(a.data[i, j], b.data[k, l])
    return SemiringMatrix(a.semiring, out)


def morphism_pushthrough_check(s: SemiringDescriptor, a: SemiringMatrix,
                               x=None, b: SemiringMatrix | None = None,
                               tol: float = 1e-9) -> tuple[bool, float]:
    """Verify Psi^-1(Psi(A) Psi(x)) equals the semiring mat-vec (and likewise
    for mat-mat); returns (verdict, max deviation in the carrier domain)."""
    if s.morphism is None or s.morphism.inverse is None:
        raise ValueError(f"semiring {s.name} has no (invertible) morphism")
    psi = s.morphism
    if x is not None:
        direct = semiring_mat_vec(a, x)
        mapped = psi.unmap_array(psi.map_array(a.data) @ psi.map_array(np.asarray(x, dtype=float)))
    elif b is not None:
        direct = semiring_mat_mat(a, b).data
        mapped = psi.unmap_array(psi.map_array(a.data) @ psi.map_array(b.data))
    else:
        raise ValueError("supply a vector x or a matrix b")
    with np.errstate(invalid="ignore"):
        dev = np.where(direct == mapped, 0.0, np.abs(direct - mapped))
    max_dev = float(np.max(dev)) if dev.size else 0.0
    return bool(max_dev <= tol), max_dev
