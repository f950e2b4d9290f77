"""Determinant lines of bounded based complexes over a field.

Sign convention (used everywhere in this module and its tests):

* det(C) = (x)_j det(C^j)^((-1)^j), factors in ascending degree; the basis of
  det(C^j) is the wedge of the given basis of C^j in ascending index order.
* For an acyclic complex pick, in every degree, vectors b^j whose images d b^j
  form a basis of the image of d^j.  Then [d b^(j-1) | b^j] (images first) is a
  basis of C^j, and with D_j its determinant in the given basis

      tau(C) = prod_j D_j^((-1)^j).

  0 -> V --A--> V -> 0 in degrees 0, 1 gives tau = det(A)^-1.
* For a general complex and vectors h^j representing a basis of H^j,
  rho_C(h) = prod_j det[d b^(j-1) | h^j | b^j]^((-1)^j).  A quasi-isomorphism
  phi : C -> D acts on determinant lines by the scalar rho_D(phi h) / rho_C(h).
  The same scalar is obtained from the acyclic mapping cone (C^(j+1) (+) D^j,
  C first) as eps * tau(cone), with eps the Koszul sign from reordering the
  factors; both routes are computed and must agree.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

from . import fields as F
from .fields import ExtensionField, Field
from .torsion import VerificationError


class NotExactError(ValueError):
    pass


class NotChainMapError(ValueError):
    pass


class NotQuasiIsomorphismError(ValueError):
    pass


Vector = list


def _apply(mat, v: Vector, rows: int, field: Field) -> Vector:
    if not rows:
        return []
    return [sum((a * x for a, x in zip(row, v)), field.zero) for row in mat]


def _matrix_of(cols: Sequence[Vector], n: int, field: Field):
    return F.from_columns(list(cols), n, field)


def _det_cols(cols: Sequence[Vector], n: int, field: Field):
    if len(cols) != n:
        raise VerificationError(f"expected {n} vectors, got {len(cols)}")
    return F.det(_matrix_of(cols, n, field), field)


def _independent(cols: Sequence[Vector], n: int, field: Field) -> bool:
    if not cols:
        return True
    return F.rank(_matrix_of(cols, n, field), field) == len(cols)


class BasedComplex:
    """Cochain complex C^start -> ... -> C^(start+len-1) of based vector spaces."""

    def __init__(self, field: Field, start: int, dims: Sequence[int], diffs: Sequence):
        self.field = field
        self.start = int(start)
        self.dims = [int(d) for d in dims]
        if len(diffs) != max(len(self.dims) - 1, 0):
            raise ValueError("need one differential between consecutive degrees")
        self.diffs = []
        for i, m in enumerate(diffs):
            rows, cols = self.dims[i + 1], self.dims[i]
            m = [[field(x) for x in row] for row in m] if rows and cols else F.zeros(rows, cols, field)
            if len(m) != rows or any(len(r) != cols for r in m):
                raise ValueError(f"differential out of degree {self.start + i} must be {rows}x{cols}")
            self.diffs.append(m)
        for i in range(len(self.diffs) - 1):
            rows, mid, cols = self.dims[i + 2], self.dims[i + 1], self.dims[i]
            if rows and cols and mid:
                prod = F.matmul(self.diffs[i + 1], self.diffs[i], field)
                if any(x != field.zero for r in prod for x in r):
                    raise ValueError(f"d o d != 0 at degree {self.start + i}")

    @property
    def degrees(self) -> range:
        return range(self.start, self.start + len(self.dims))

    def dim(self, j: int) -> int:
        i = j - self.start
        return self.dims[i] if 0 <= i < len(self.dims) else 0

    def d(self, j: int):
        """Differential C^j -> C^(j+1) as a dim(j+1) x dim(j) matrix."""
        i = j - self.start
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return F.zeros(self.dim(j + 1), self.dim(j), self.field)

    def apply_d(self, j: int, v: Vector) -> Vector:
        return _apply(self.d(j), v, self.dim(j + 1), self.field)

    def rank_d(self, j: int) -> int:
        if not self.dim(j) or not self.dim(j + 1):
            return 0
        return F.rank(self.d(j), self.field)

    def betti(self, j: int) -> int:
        return self.dim(j) - self.rank_d(j) - self.rank_d(j - 1)

    def is_acyclic(self) -> bool:
        return all(self.betti(j) == 0 for j in self.degrees)

    def base_change(self, ext: ExtensionField) -> BasedComplex:
        diffs = [[[ext.embed(x) for x in row] for row in m] for m in self.diffs]
        return BasedComplex(ext, self.start, self.dims, diffs)

    def __repr__(self):
        return f"BasedComplex(start={self.start}, dims={self.dims})"


@dataclass(frozen=True)
class DetLine:
    """A graded line given by its parity and a scalar against the canonical basis."""

    parity: int
    scalar: object


@dataclass(frozen=True)
class DetIso:
    source: DetLine
    target: DetLine
    scalar: object

    def __mul__(self, other: DetIso) -> DetIso:
        """self o other."""
        return DetIso(other.source, self.target, self.scalar * other.scalar)


def det_complex(c: BasedComplex) -> DetLine:
    return DetLine(sum(c.dims) % 2, c.field.one)


def euler_parity(c: BasedComplex) -> int:
    return sum(c.betti(j) for j in c.degrees) % 2


# --- splittings ---------------------------------------------------------------------


def _unit(n: int, i: int, field: Field) -> Vector:
    return [field.one if k == i else field.zero for k in range(n)]


def _kernel(c: BasedComplex, j: int) -> list[Vector]:
    n = c.dim(j)
    if not n:
        return []
    if not c.dim(j + 1):
        return [_unit(n, i, c.field) for i in range(n)]
    return F.kernel(c.d(j), c.field, n)


def _preimages(c: BasedComplex, j: int, rng: random.Random | None) -> list[Vector]:
    """Vectors b^j whose images form a basis of im d^j."""
    field, n = c.field, c.dim(j)
    if not n or not c.dim(j + 1):
        return []
    _, piv = F.rref(c.d(j), field)
    b = [_unit(n, i, field) for i in piv]
    if rng is None or not b:
        return b
    g = F.random_invertible(len(b), field, rng)
    mixed = [[sum((g[k][col] * b[k][i] for k in range(len(b))), field.zero) for i in range(n)] for col in range(len(b))]
    ker = _kernel(c, j)
    for v in mixed:
        for z in ker:
            a = field.random_element(rng)
            for i in range(n):
                v[i] = v[i] + a * z[i]
    return mixed


def _homology_reps(c: BasedComplex, j: int, boundaries: list[Vector]) -> list[Vector]:
    n = c.dim(j)
    chosen = list(boundaries)
    reps = []
    for z in _kernel(c, j):
        if _independent(chosen + [z], n, c.field):
            chosen.append(z)
            reps.append(z)
    return reps


def _splitting(c: BasedComplex, rng: random.Random | None) -> dict[int, list[Vector]]:
    return {j: _preimages(c, j, rng) for j in range(c.start - 1, c.start + len(c.dims))}


def _images(c: BasedComplex, j: int, b: dict[int, list[Vector]]) -> list[Vector]:
    """d b^(j-1), vectors in C^j."""
    return [c.apply_d(j - 1, v) for v in b.get(j - 1, [])]


def _alternating(values: dict[int, object], field: Field):
    out = field.one
    for j, x in values.items():
        if x == field.zero:
            raise VerificationError(f"degenerate basis in degree {j}")
        out = out * x if j % 2 == 0 else out / x
    return out


def trivialize_acyclic(c: BasedComplex, rng: random.Random | None = None):
    """tau(C); ``rng`` picks a random splitting instead of the pivot one."""
    if not c.is_acyclic():
        raise NotExactError("complex is not exact")
    b = _splitting(c, rng)
    return _alternating({j: _det_cols(_images(c, j, b) + b[j], c.dim(j), c.field) for j in c.degrees}, c.field)


def rho(c: BasedComplex, h: dict[int, list[Vector]], b: dict[int, list[Vector]] | None = None):
    """prod_j det[d b^(j-1) | h^j | b^j]^((-1)^j)."""
    b = b if b is not None else _splitting(c, None)
    vals = {}
    for j in c.degrees:
        cols = _images(c, j, b) + h.get(j, []) + b[j]
        if len(cols) != c.dim(j) or not _independent(cols, c.dim(j), c.field):
            raise NotQuasiIsomorphismError(f"homology representatives fail to complete a basis in degree {j}")
        vals[j] = _det_cols(cols, c.dim(j), c.field)
    return _alternating(vals, c.field)


def homology_basis(c: BasedComplex) -> dict[int, list[Vector]]:
    b = _splitting(c, None)
    return {j: _homology_reps(c, j, _images(c, j, b)) for j in c.degrees}


# --- chain maps ---------------------------------------------------------------------


class ChainMap:
    """phi^j : C^j -> D^j given as dim_D(j) x dim_C(j) matrices keyed by degree."""

    def __init__(self, source: BasedComplex, target: BasedComplex, maps: dict[int, object]):
        if source.field != target.field:
            raise ValueError("source and target live over different fields")
        self.source, self.target = source, target
        field = source.field
        self.maps = {}
        for j in self.degrees:
            rows, cols = target.dim(j), source.dim(j)
            m = maps.get(j)
            if m is None or not rows or not cols:
                m = F.zeros(rows, cols, field)
            else:
                m = [[field(x) for x in r] for r in m]
            if len(m) != rows or any(len(r) != cols for r in m):
                raise ValueError(f"map in degree {j} must be {rows}x{cols}")
            self.maps[j] = m

    @property
    def degrees(self) -> range:
        lo = min(self.source.start, self.target.start)
        hi = max(self.source.start + len(self.source.dims), self.target.start + len(self.target.dims))
        return range(lo, hi)

    def at(self, j: int):
        if j in self.maps:
            return self.maps[j]
        return F.zeros(self.target.dim(j), self.source.dim(j), self.source.field)

    def apply(self, j: int, v: Vector) -> Vector:
        return _apply(self.at(j), v, self.target.dim(j), self.source.field)

    def is_chain_map(self) -> bool:
        c, d, field = self.source, self.target, self.source.field
        for j in self.degrees:
            for i in range(c.dim(j)):
                e = _unit(c.dim(j), i, field)
                if self.apply(j + 1, c.apply_d(j, e)) != d.apply_d(j, self.apply(j, e)):
                    return False
        return True

    def compose(self, first: ChainMap) -> ChainMap:
        """self o first."""
        if first.target is not self.source and (first.target.dims, first.target.start) != (self.source.dims, self.source.start):
            raise ValueError("maps are not composable")
        field = self.source.field
        maps = {}
        for j in first.degrees:
            a, b = self.at(j), first.at(j)
            rows, cols = self.target.dim(j), first.source.dim(j)
            maps[j] = F.matmul(a, b, field) if rows and cols and self.source.dim(j) else F.zeros(rows, cols, field)
        return ChainMap(first.source, self.target, maps)


def identity_map(c: BasedComplex) -> ChainMap:
    return ChainMap(c, c, {j: F.identity(c.dim(j), c.field) for j in c.degrees})


def cone(phi: ChainMap) -> BasedComplex:
    """Cone^j = C^(j+1) (+) D^j with d(c, x) = (-d c, phi c + d x)."""
    c, d, field = phi.source, phi.target, phi.source.field
    lo = min(c.start - 1, d.start)
    hi = max(c.start + len(c.dims) - 2, d.start + len(d.dims) - 1)
    degs = list(range(lo, hi + 1))
    dims = [c.dim(j + 1) + d.dim(j) for j in degs]
    diffs = []
    for j in degs[:-1]:
        rows, cols = dims[j - lo + 1], dims[j - lo]
        m = F.zeros(rows, cols, field)
        dc, dd, ph = c.d(j + 1), d.d(j), phi.at(j + 1)
        c1, d0, c2 = c.dim(j + 1), d.dim(j), c.dim(j + 2)
        for r in range(c2):
            for s in range(c1):
                m[r][s] = -dc[r][s]
        for r in range(d.dim(j + 1)):
            for s in range(c1):
                m[c2 + r][s] = ph[r][s]
            for s in range(d0):
                m[c2 + r][c1 + s] = dd[r][s]
        diffs.append(m)
    return BasedComplex(field, lo, dims, diffs)


def _koszul_sign(phi: ChainMap) -> int:
    c, d = phi.source, phi.target
    total = 0
    for j in cone(phi).degrees:
        g2, g3, g4 = d.rank_d(j - 1), c.betti(j), c.rank_d(j + 1)
        g5, g6 = d.rank_d(j), c.betti(j + 1)
        total += c.rank_d(j) + g6 * (g2 + g3 + g4 + g5) + g4 * (g2 + g3)
    return -1 if total % 2 else 1


def det_iso_homology(phi: ChainMap):
    """rho_D(phi h) / rho_C(h)."""
    c, d = phi.source, phi.target
    h = homology_basis(c)
    image = {j: [phi.apply(j, v) for v in vs] for j, vs in h.items()}
    return rho(d, image) / rho(c, h)


def det_iso_of_quasi_iso(phi: ChainMap, rng: random.Random | None = None) -> DetIso:
    """Scalar of det(phi) from the acyclic cone, cross-checked against the homology route."""
    if not phi.is_chain_map():
        raise NotChainMapError("phi does not commute with the differentials")
    cn = cone(phi)
    if not cn.is_acyclic():
        raise NotQuasiIsomorphismError("mapping cone is not acyclic")
    scalar = trivialize_acyclic(cn, rng)
    if _koszul_sign(phi) < 0:
        scalar = -scalar
    if scalar != det_iso_homology(phi):
        raise VerificationError("cone and homology computations of det(phi) disagree")
    return DetIso(det_complex(phi.source), det_complex(phi.target), scalar)


# --- extension of scalars -------------------------------------------------------------


def pullback_compat_check(ext: ExtensionField, c: BasedComplex, phi: ChainMap | None = None) -> bool:
    """det commutes with extending scalars along base -> ext."""
    if ext.base != c.field:
        raise ValueError("extension is not over the complex's field")
    up = c.base_change(ext)
    if det_complex(up).parity != det_complex(c).parity:
        return False
    if c.is_acyclic() and ext.embed(trivialize_acyclic(c)) != trivialize_acyclic(up):
        return False
    if phi is not None:
        tgt = phi.target.base_change(ext)
        maps = {j: [[ext.embed(x) for x in r] for r in phi.at(j)] for j in phi.degrees}
        phi_up = ChainMap(up, tgt, maps)
        if ext.embed(det_iso_of_quasi_iso(phi).scalar) != det_iso_of_quasi_iso(phi_up).scalar:
            return False
    return True


# --- random data for property tests ---------------------------------------------------


def random_complex(
    field: Field, rng: random.Random, start: int = 0, length: int = 3, max_dim: int = 3
) -> BasedComplex:
    """d^j = P_(j+1) E_j P_j^-1 with E_j a partial identity, so d o d = 0 by construction."""
    ranks = [0]
    dims = []
    for i in range(length):
        r_in = ranks[-1]
        extra = rng.randint(0, max_dim)
        r_out = rng.randint(0, extra) if i < length - 1 else 0
        dims.append(r_in + extra)
        ranks.append(r_out)
    # degree i: [images of previous (r_in) | homology | sources of the next (r_out)]
    bases = [F.random_invertible(n, field, rng) if n else [] for n in dims]
    diffs = []
    for i in range(length - 1):
        n_in, n_out = dims[i], dims[i + 1]
        r_next = ranks[i + 1]
        e = F.zeros(n_out, n_in, field)
        for k in range(r_next):
            e[k][n_in - r_next + k] = field.one
        if n_in and n_out:
            m = F.matmul(F.matmul(bases[i + 1], e, field), F.inverse(bases[i], field), field)
        else:
            m = F.zeros(n_out, n_in, field)
        diffs.append(m)
    return BasedComplex(field, start, dims, diffs)


def random_quasi_iso(c: BasedComplex, rng: random.Random, extra: int = 2) -> ChainMap:
    """c -> D where D is c in a random basis plus a contractible summand k -> k."""
    field = c.field
    degs = list(c.degrees)
    # choose a degree j (not the last) to host the contractible piece in degrees j, j+1
    pad = {j: 0 for j in degs}
    if len(degs) >= 2:
        for _ in range(extra):
            j = rng.choice(degs[:-1])
            pad[j] += 1
    dims = []
    for j in degs:
        dims.append(c.dim(j) + pad[j] + pad.get(j - 1, 0))
    g = {j: F.random_invertible(dims[i], field, rng) if dims[i] else [] for i, j in enumerate(degs)}
    # block differential on c (+) pads: pad part of degree j maps identically to degree j+1
    raw = []
    for i, j in enumerate(degs[:-1]):
        n_in, n_out = dims[i], dims[i + 1]
        m = F.zeros(n_out, n_in, field)
        cd = c.d(j)
        for r in range(c.dim(j + 1)):
            for s in range(c.dim(j)):
                m[r][s] = cd[r][s]
        for k in range(pad[j]):
            # source slot: after c and after the incoming pads of degree j
            src = c.dim(j) + pad.get(j - 1, 0) + k
            dst = c.dim(j + 1) + k
            m[dst][src] = field.one
        raw.append(m)
    diffs = []
    for i, j in enumerate(degs[:-1]):
        n_in, n_out = dims[i], dims[i + 1]
        if n_in and n_out:
            diffs.append(F.matmul(F.matmul(g[degs[i + 1]], raw[i], field), F.inverse(g[j], field), field))
        else:
            diffs.append(F.zeros(n_out, n_in, field))
    d = BasedComplex(field, c.start, dims, diffs)
    maps = {}
    for i, j in enumerate(degs):
        inc = F.zeros(dims[i], c.dim(j), field)
        for k in range(c.dim(j)):
            inc[k][k] = field.one
        maps[j] = F.matmul(g[j], inc, field) if dims[i] and c.dim(j) else F.zeros(dims[i], c.dim(j), field)
    return ChainMap(c, d, maps)


def homotopic_variant(phi: ChainMap, rng: random.Random) -> ChainMap:
    """phi + d h + h d for a random h : C^j -> D^(j-1)."""
    c, d, field = phi.source, phi.target, phi.source.field
    h = {j: F.random_matrix(d.dim(j - 1), c.dim(j), field, rng) for j in phi.degrees}
    maps = {}
    for j in phi.degrees:
        rows, cols = d.dim(j), c.dim(j)
        m = [list(r) for r in phi.at(j)] if rows and cols else F.zeros(rows, cols, field)
        if rows and cols:
            if d.dim(j - 1):
                dh = F.matmul(d.d(j - 1), h[j], field)
                m = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(m, dh)]
            if c.dim(j + 1) and h.get(j + 1) is not None and d.dim(j):
                hd = F.matmul(h[j + 1], c.d(j), field)
                m = [[x + y for x, y in zip(r1, r2)] for r1, r2 in zip(m, hd)]
        maps[j] = m
    return ChainMap(c, d, maps)
