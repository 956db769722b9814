"""Finite-dimensional feature-grid algebra.

A feature grid is an (n, m, d) array: an n x m matrix whose entries are
d-dimensional feature vectors. Products between two grids contract the
feature dimension (yielding real matrices); products between a grid and a
real matrix stay grids. These operations realize the lifted matrix algebra
that the labeled-graph weight matrices are built from, and the identity
suite in the tests certifies the vec/Kronecker interplay on random grids.
"""

from __future__ import annotations

import numpy as np

Array = np.ndarray


def as_grid(f) -> Array:
    f = np.asarray(f, dtype=float)
    if f.ndim != 3:
        raise ValueError(f"feature grid must be 3-D (n, m, d), got {f.shape}")
    return f


# -- matrix products ---------------------------------------------------------


def grid_dot_grid(fa: Array, fb: Array) -> Array:
    """[Phi(A) Phi(B)]_ik = sum_j <phi(A_ij), phi(B_jk)> (a real matrix)."""
    return np.einsum("ijd,jkd->ik", as_grid(fa), as_grid(fb))


def grid_dot_real(fa: Array, c: Array) -> Array:
    """[Phi(A) C]_ik = sum_j phi(A_ij) C_jk (still a feature grid)."""
    return np.einsum("ijd,jk->ikd", as_grid(fa), np.asarray(c, dtype=float))


def real_dot_grid(c: Array, fb: Array) -> Array:
    """[C Phi(B)]_ik = sum_j C_ij phi(B_jk)."""
    return np.einsum("ij,jkd->ikd", np.asarray(c, dtype=float), as_grid(fb))


def grid_transpose(fa: Array) -> Array:
    return as_grid(fa).transpose(1, 0, 2)


# -- vec ---------------------------------------------------------------------


def grid_vec(fa: Array) -> Array:
    """Column-stacking of a grid: (n, m, d) -> (n*m, d)."""
    fa = as_grid(fa)
    return fa.transpose(1, 0, 2).reshape(-1, fa.shape[2])


def grid_unvec(v: Array, rows: int, cols: int) -> Array:
    v = np.asarray(v, dtype=float)
    return v.reshape(cols, rows, v.shape[1]).transpose(1, 0, 2)


# -- Kronecker products ------------------------------------------------------


def grid_kron(fa: Array, fb: Array) -> Array:
    """Feature-space Kronecker product: a real (np x mq) matrix with entries
    <phi(A_ij), phi(B_kl)> at ((i-1)p+k, (j-1)q+l)."""
    fa, fb = as_grid(fa), as_grid(fb)
    n, m, _ = fa.shape
    p, q, _ = fb.shape
    out = np.tensordot(fa, fb, axes=([2], [2]))  # (n, m, p, q)
    return out.transpose(0, 2, 1, 3).reshape(n * p, m * q)


def grid_kron_real(fa: Array, b: Array) -> Array:
    """Heterogeneous Kronecker product Phi(A) (x) B: a feature grid of shape
    (n*p, m*q, d) with entries phi(A_ij) B_kl."""
    fa = as_grid(fa)
    b = np.asarray(b, dtype=float)
    n, m, d = fa.shape
    p, q = b.shape
    out = np.einsum("ijd,kl->ikjld", fa, b)
    return out.reshape(n * p, m * q, d)


def real_kron_grid(a: Array, fb: Array) -> Array:
    """Heterogeneous Kronecker product A (x) Phi(B)."""
    a = np.asarray(a, dtype=float)
    fb = as_grid(fb)
    n, m = a.shape
    p, q, d = fb.shape
    out = np.einsum("ij,kld->ikjld", a, fb)
    return out.reshape(n * p, m * q, d)


def grid_kron_sum(fa: Array, fb: Array) -> Array:
    """Kronecker sum of grids: Phi(A) (x) I_B + I_A (x) Phi(B), a grid."""
    fa, fb = as_grid(fa), as_grid(fb)
    ia = np.eye(fa.shape[0], fa.shape[1])
    ib = np.eye(fb.shape[0], fb.shape[1])
    return grid_kron_real(fa, ib) + real_kron_grid(ia, fb)


# -- Hadamard products -------------------------------------------------------


def grid_hadamard(fa: Array, fb: Array) -> Array:
    """[Phi(A) . Phi(B)]_ij = <phi(A_ij), phi(B_ij)> (a real matrix)."""
    fa, fb = as_grid(fa), as_grid(fb)
    if fa.shape != fb.shape:
        raise ValueError("grid dimensions must match")
    return np.einsum("ijd,ijd->ij", fa, fb)


def grid_hadamard_real(fa: Array, c: Array) -> Array:
    """[Phi(A) . C]_ij = phi(A_ij) C_ij (a grid)."""
    fa = as_grid(fa)
    c = np.asarray(c, dtype=float)
    if fa.shape[:2] != c.shape:
        raise ValueError("dimensions must match")
    return fa * c[:, :, None]
