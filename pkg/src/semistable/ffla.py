"""Linear algebra over F_p on int64 numpy arrays.

Subspaces of F_p^n are stored as n x r basis matrices in reduced column
echelon form (the transpose is in RREF), which makes them canonical.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np


def as_mat(a, p: int, shape: tuple[int, int] | None = None) -> np.ndarray:
    m = np.array(a, dtype=np.int64) % p
    if shape is not None:
        m = m.reshape(shape)
    return m


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    m = np.array(a, dtype=np.int64) % p
    rows, cols = m.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r])) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray, p: int) -> int:
    if a.size == 0:
        return 0
    return len(rref(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> np.ndarray:
    """Basis of {x : a x = 0} as columns of an (ncols x k) matrix."""
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols, dtype=np.int64)
    r, piv = rref(a, p)
    free = [c for c in range(cols) if c not in piv]
    out = np.zeros((cols, len(free)), dtype=np.int64)
    for k, f in enumerate(free):
        out[f, k] = 1
        for i, pc in enumerate(piv):
            out[pc, k] = (-r[i, f]) % p
    return out


def span(vectors: np.ndarray, p: int) -> np.ndarray:
    """Canonical basis (reduced column echelon) of the column span."""
    n = vectors.shape[0]
    if vectors.size == 0:
        return np.zeros((n, 0), dtype=np.int64)
    r, piv = rref(vectors.T, p)
    return r[: len(piv)].T.copy()


def pivots_of(basis: np.ndarray) -> list[int]:
    """Pivot rows of a basis in reduced column echelon form."""
    out = []
    for j in range(basis.shape[1]):
        out.append(int(np.nonzero(basis[:, j])[0][0]))
    return out


def complement(basis: np.ndarray, n: int) -> np.ndarray:
    """Standard basis vectors completing a canonical basis to F_p^n."""
    piv = set(pivots_of(basis))
    cols = [j for j in range(n) if j not in piv]
    out = np.zeros((n, len(cols)), dtype=np.int64)
    for k, j in enumerate(cols):
        out[j, k] = 1
    return out


def inverse(a: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    aug = np.hstack([a % p, np.eye(n, dtype=np.int64)])
    r, piv = rref(aug, p)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix over F_p")
    return r[:, n:]


def solve(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray | None:
    """Some X with a X = b (b may have several columns), or None."""
    rows, cols = a.shape
    b = b.reshape(rows, -1)
    aug = np.hstack([a % p, b % p])
    r, piv = rref(aug, p)
    if any(pc >= cols for pc in piv):
        return None
    x = np.zeros((cols, b.shape[1]), dtype=np.int64)
    for i, pc in enumerate(piv):
        x[pc] = r[i, cols:]
    return x


def contains(big: np.ndarray, small: np.ndarray, p: int) -> bool:
    if small.shape[1] == 0:
        return True
    return rank(np.hstack([big, small]), p) == big.shape[1]


def subspace_sum(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return span(np.hstack([a, b]), p)


def intersect(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[0]
    if a.shape[1] == 0 or b.shape[1] == 0:
        return np.zeros((n, 0), dtype=np.int64)
    ker = nullspace(np.hstack([a, (-b) % p]), p)
    return span((a @ ker[: a.shape[1]]) % p, p)


def annihilator(basis: np.ndarray, n: int, p: int) -> np.ndarray:
    """Rows of a matrix whose kernel is exactly the given subspace."""
    if basis.shape[1] == 0:
        return np.eye(n, dtype=np.int64)
    return nullspace(basis.T, p).T.copy()


def quotient_coords(sub: np.ndarray, whole: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Complement C of ``sub`` inside ``whole`` and a matrix extracting C-coordinates.

    Returns (C, P) where the columns of C extend ``sub`` to a basis of ``whole``
    and P (dim C x n) satisfies P @ (s + C y) = y for s in ``sub``, applied to
    vectors of ``whole``.
    """
    n = whole.shape[0]
    chosen = sub.copy()
    comp = []
    for j in range(whole.shape[1]):
        v = whole[:, j : j + 1]
        trial = np.hstack([chosen, v])
        if rank(trial, p) > chosen.shape[1]:
            chosen = trial
            comp.append(v)
    c = np.hstack(comp) if comp else np.zeros((n, 0), dtype=np.int64)
    basis = np.hstack([sub, c])
    k = sub.shape[1]
    full = np.hstack([basis, complement(span(basis, p), n)])
    proj = inverse(full, p)[k : basis.shape[1]]
    return c, proj % p


@lru_cache(maxsize=None)
def _subspaces(n: int, p: int, r: int) -> tuple[np.ndarray, ...]:
    out = []
    for piv in itertools.combinations(range(n), r):
        # free entries: row i of the RREF (length n), positions after the pivot
        # and not in other pivot columns
        slots = [(i, c) for i, pc in enumerate(piv) for c in range(pc + 1, n) if c not in piv]
        for vals in itertools.product(range(p), repeat=len(slots)):
            m = np.zeros((r, n), dtype=np.int64)
            for i, pc in enumerate(piv):
                m[i, pc] = 1
            for (i, c), v in zip(slots, vals):
                m[i, c] = v
            basis = m.T.copy()
            basis.setflags(write=False)
            out.append(basis)
    return tuple(out)


def subspaces(n: int, p: int, dims: range | list | None = None) -> list[np.ndarray]:
    """All subspaces of F_p^n as canonical bases, ordered by dimension."""
    dims = range(n + 1) if dims is None else dims
    out: list[np.ndarray] = []
    for r in dims:
        out.extend(_subspaces(n, p, r))
    return out


def gaussian_binomial(n: int, k: int, p: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= p ** (n - i) - 1
        den *= p ** (i + 1) - 1
    return num // den


def count_subspaces(n: int, p: int) -> int:
    return sum(gaussian_binomial(n, k, p) for k in range(n + 1))


def key(a: np.ndarray) -> tuple:
    return (a.shape, tuple(int(x) for x in a.ravel()))
