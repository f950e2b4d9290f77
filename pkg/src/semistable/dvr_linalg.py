"""Matrices and lattices over the valuation ring O of a ``ValuedField``.

Matrices are lists of rows of field elements.  A lattice in K^d is stored by
a canonical basis (columns) in lower-triangular column Hermite form: pivot
``B[r][r] = pi^e_r``, zeros to the right of each pivot, and every entry below
a pivot reduced to its truncated expansion modulo that row's pivot.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from . import fields as F
from .valued_field import INF, ValuedField

MatrixK = list


class NonIntegralError(ValueError):
    pass


class NotContainedError(ValueError):
    """Raised when L1 is not inside L2; ``rescale`` is the minimal fixing exponent."""

    def __init__(self, rescale: int):
        super().__init__(
            f"first lattice is not contained in the second; multiply it by pi^{rescale} first"
        )
        self.rescale = rescale


def min_valuation(a: MatrixK, field: ValuedField) -> int | float:
    return min((field.valuation(x) for row in a for x in row), default=INF)


def check_integral(a: MatrixK, field: ValuedField) -> None:
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            if field.valuation(x) < 0:
                raise NonIntegralError(f"entry ({i},{j}) = {field.format(x)} is not integral")


def scale(a: MatrixK, c) -> MatrixK:
    return [[c * x for x in row] for row in a]


def residue_matrix(a: MatrixK, field: ValuedField):
    import numpy as np

    rows = len(a)
    cols = len(a[0]) if rows else 0
    out = np.zeros((rows, cols), dtype=np.int64)
    for i, row in enumerate(a):
        for j, x in enumerate(row):
            out[i, j] = field.residue(x)
    return out


def lift_matrix(m, field: ValuedField) -> MatrixK:
    return [[field.lift(int(x)) for x in row] for row in m]


# --- Smith normal form ----------------------------------------------------------


@dataclass(frozen=True)
class SmithDecomposition:
    """U A V = diag(pi^e_1, ..., pi^e_r, 0, ...) with U, V in GL(O)."""

    U: MatrixK
    V: MatrixK
    exponents: tuple[int, ...]
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        return len(self.exponents)

    @property
    def free_rank(self) -> int:
        # cokernel of A : O^cols -> O^rows
        return self.rows - self.rank

    @property
    def zero_columns(self) -> int:
        return self.cols - self.rank


def smith_normal_form(a: MatrixK, field: ValuedField) -> SmithDecomposition:
    """Smith form over O with deterministic pivoting.

    The pivot at each step is the entry of minimal valuation in the remaining
    block, ties broken by lowest (row, col).  Exponents come out ascending.
    """
    check_integral(a, field)
    rows = len(a)
    cols = len(a[0]) if rows else 0
    m = [list(r) for r in a]
    U = F.identity(rows, field)
    V = F.identity(cols, field)
    exps: list[int] = []
    for t in range(min(rows, cols)):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = field.valuation(m[i][j])
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        e, i, j = best
        if i != t:
            m[t], m[i] = m[i], m[t]
            U[t], U[i] = U[i], U[t]
        if j != t:
            for row in m:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
        u_inv = field.one / field.unit_part(m[t][t])
        m[t] = [x * u_inv for x in m[t]]
        U[t] = [x * u_inv for x in U[t]]
        piv = m[t][t]
        for i in range(t + 1, rows):
            if m[i][t] != 0:
                f = m[i][t] / piv
                m[i] = [x - f * y for x, y in zip(m[i], m[t])]
                U[i] = [x - f * y for x, y in zip(U[i], U[t])]
        for j in range(t + 1, cols):
            if m[t][j] != 0:
                f = m[t][j] / piv
                m[t][j] = field.zero
                for row in V:
                    row[j] = row[j] - f * row[t]
        exps.append(e)
    return SmithDecomposition(U, V, tuple(exps), rows, cols)


def determinantal_exponents(a: MatrixK, field: ValuedField) -> tuple[int, ...]:
    """Smith exponents from minimal minor valuations (brute force oracle)."""
    import itertools

    rows = len(a)
    cols = len(a[0]) if rows else 0
    partial = [0]
    for j in range(1, min(rows, cols) + 1):
        best = INF
        for rs in itertools.combinations(range(rows), j):
            for cs in itertools.combinations(range(cols), j):
                d = F.det([[a[r][c] for c in cs] for r in rs], field)
                best = min(best, field.valuation(d))
        if best == INF:
            break
        partial.append(best)
    return tuple(partial[i + 1] - partial[i] for i in range(len(partial) - 1))


def is_unimodular(a: MatrixK, field: ValuedField) -> bool:
    if min_valuation(a, field) < 0:
        return False
    return field.valuation(F.det(a, field)) == 0


def random_unimodular(n: int, field: ValuedField, rng: random.Random, max_val: int = 2) -> MatrixK:
    """Product of random integral lower and upper unitriangular matrices and a unit diagonal."""
    lo = F.identity(n, field)
    up = F.identity(n, field)
    for i in range(n):
        for j in range(n):
            if i > j:
                lo[i][j] = field.random_integral(rng, max_val, zero_prob=0.3)
            elif i < j:
                up[i][j] = field.random_integral(rng, max_val, zero_prob=0.3)
    diag = F.identity(n, field)
    for i in range(n):
        diag[i][i] = field.random_unit(rng)
    perm = list(range(n))
    rng.shuffle(perm)
    pm = [[field.one if perm[i] == j else field.zero for j in range(n)] for i in range(n)]
    return F.matmul(F.matmul(F.matmul(pm, lo, field), diag, field), up, field)


# --- Hermite form and lattices -------------------------------------------------


def hermite_form(b: MatrixK, field: ValuedField) -> MatrixK:
    """Canonical d x d basis of the O-span of the columns of a rank-d matrix."""
    d = len(b)
    n = len(b[0]) if d else 0
    m = [list(r) for r in b]
    exps = []
    for r in range(d):
        best = None
        for c in range(r, n):
            v = field.valuation(m[r][c])
            if v != INF and (best is None or v < best[0]):
                best = (v, c)
        if best is None:
            raise ValueError("columns do not span a full-rank lattice")
        e, c = best
        if c != r:
            for row in m:
                row[r], row[c] = row[c], row[r]
        u_inv = field.one / field.unit_part(m[r][r])
        for row in m:
            row[r] = row[r] * u_inv
        piv = m[r][r]
        for c in range(r + 1, n):
            if m[r][c] != 0:
                f = m[r][c] / piv
                for row in m:
                    row[c] = row[c] - f * row[r]
        exps.append(e)
    out = [row[:d] for row in m]
    # reduce below-pivot entries top to bottom
    for c in range(d):
        for s in range(c + 1, d):
            x = out[s][c]
            rep = field.truncate(x, exps[s])
            if rep != x:
                q = (x - rep) / out[s][s]
                for row in out:
                    row[c] = row[c] - q * row[s]
    return out


def _freeze(m: MatrixK) -> tuple[tuple, ...]:
    return tuple(tuple(r) for r in m)


class Lattice:
    """Full-rank O-lattice in K^d, canonicalized on construction."""

    __slots__ = ("field", "dim", "basis", "_hash")

    def __init__(self, basis: MatrixK, field: ValuedField, canonical: bool = False):
        self.field = field
        self.dim = len(basis)
        if self.dim and len(basis[0]) < self.dim:
            raise ValueError("too few basis vectors for a full-rank lattice")
        self.basis = _freeze(basis if canonical else hermite_form(basis, field))
        self._hash = hash((field, self.basis))

    @classmethod
    def standard(cls, d: int, field: ValuedField, shift: int = 0) -> Lattice:
        return cls(F.scale_identity(d, field.pi_power(shift), field) if d else [], field, canonical=True)

    def matrix(self) -> MatrixK:
        return [list(r) for r in self.basis]

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.field == other.field and self.basis == other.basis

    def __hash__(self):
        return self._hash

    def __repr__(self):
        rows = ";".join(",".join(self.field.format(x) for x in r) for r in self.basis)
        return f"Lattice({rows})"

    def coords(self, vectors: MatrixK) -> MatrixK:
        """Coordinates (columns) of the given column vectors in this basis."""
        if self.dim == 0:
            return []
        return F.matmul(F.inverse(self.matrix(), self.field), vectors, self.field)

    def contains(self, other: Lattice) -> bool:
        return rescale_exponent(other, self) == 0

    def pivot_exponents(self) -> list[int]:
        return [self.field.valuation(self.basis[i][i]) for i in range(self.dim)]


def _check_compatible(l1: Lattice, l2: Lattice) -> None:
    if l1.dim != l2.dim:
        raise ValueError(f"dimension mismatch {l1.dim} != {l2.dim}")
    if l1.field != l2.field:
        raise ValueError("lattices live over different backends")


def lattice_sum(l1: Lattice, l2: Lattice) -> Lattice:
    _check_compatible(l1, l2)
    if l1.dim == 0:
        return l1
    return Lattice(F.hstack(l1.matrix(), l2.matrix()), l1.field)


def dual(l: Lattice) -> Lattice:
    if l.dim == 0:
        return l
    return Lattice(F.transpose(F.inverse(l.matrix(), l.field)), l.field)


def lattice_intersection(l1: Lattice, l2: Lattice) -> Lattice:
    _check_compatible(l1, l2)
    if l1.dim == 0:
        return l1
    return dual(lattice_sum(dual(l1), dual(l2)))


def lattice_scale(l: Lattice, n: int) -> Lattice:
    c = l.field.pi_power(n)
    return Lattice(scale(l.matrix(), c), l.field, canonical=True)


def rescale_exponent(l1: Lattice, l2: Lattice) -> int:
    """Minimal n >= 0 with pi^n L1 inside L2."""
    _check_compatible(l1, l2)
    if l1.dim == 0:
        return 0
    c = l2.coords(l1.matrix())
    v = min_valuation(c, l1.field)
    return max(0, -v)


def quotient_torsion(l1: Lattice, l2: Lattice):
    """Elementary divisors of L2 / L1 for L1 inside L2."""
    from .torsion import TorsionModule

    n = rescale_exponent(l1, l2)
    if n:
        raise NotContainedError(n)
    if l1.dim == 0:
        return TorsionModule(())
    snf = smith_normal_form(l2.coords(l1.matrix()), l1.field)
    return TorsionModule(tuple(e for e in snf.exponents if e > 0))


def random_lattice(d: int, field: ValuedField, rng: random.Random, spread: int = 2) -> Lattice:
    """g O^d for g = unimodular * diag(pi^e) * unimodular, e in [-spread, spread]."""
    if d == 0:
        return Lattice([], field)
    u1 = random_unimodular(d, field, rng)
    u2 = random_unimodular(d, field, rng)
    diag = F.zeros(d, d, field)
    for i in range(d):
        diag[i][i] = field.pi_power(rng.randint(-spread, spread))
    g = F.matmul(F.matmul(u1, diag, field), u2, field)
    return Lattice(g, field)


# --- text format ------------------------------------------------------------------


def parse_matrix(text: str, field) -> MatrixK:
    """Row-major text: rows separated by ';', entries by ','."""
    text = text.strip()
    if not text:
        return []
    rows = [r for r in text.split(";")]
    out = [[field(x) for x in r.split(",")] for r in rows]
    if len({len(r) for r in out}) > 1:
        raise ValueError("ragged matrix")
    return out


def format_matrix(a: MatrixK, field) -> str:
    fmt = getattr(field, "format", str)
    return ";".join(",".join(fmt(x) for x in row) for row in a)
