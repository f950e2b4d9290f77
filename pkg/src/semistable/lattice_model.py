"""Integral models of quiver representations over K and their reductions.

A model of a K-representation M is one lattice L_v per vertex such that every
arrow maps L_s into L_t.  Written in the lattice bases the arrows become
integral matrices, and their residues give the reduction over F_p.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Sequence

import numpy as np

from . import fields as F
from . import ffla
from .dvr_linalg import (
    INF,
    Lattice,
    MatrixK,
    NonIntegralError,
    lattice_intersection,
    lattice_scale,
    min_valuation,
    quotient_torsion,
    random_lattice,
    residue_matrix,
    rescale_exponent,
    smith_normal_form,
)
from .quiver import (
    Quiver,
    Representation,
    SubrepWitness,
    canonical_witness,
    iso_check,
    push_to_quotient,
    quotient,
    subrepresentation,
)
from .torsion import TorsionModule, VerificationError
from .valued_field import ValuedField


class KRepresentation:
    """Representation of a quiver over the fraction field K of a ``ValuedField``."""

    __slots__ = ("quiver", "field", "dims", "mats")

    def __init__(self, quiver: Quiver, field: ValuedField, dims: Sequence[int], mats: Sequence[MatrixK]):
        self.quiver = quiver
        self.field = field
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != quiver.vertices:
            raise ValueError("dimension vector length differs from the vertex count")
        if len(mats) != len(quiver.arrows):
            raise ValueError("one matrix per arrow is required")
        out = []
        for (s, t), m in zip(quiver.arrows, mats):
            m = [[field(x) for x in row] for row in m] if m else []
            if self.dims[t] and self.dims[s]:
                if len(m) != self.dims[t] or any(len(r) != self.dims[s] for r in m):
                    raise ValueError(f"arrow ({s},{t}) needs a {self.dims[t]}x{self.dims[s]} matrix")
            else:
                m = F.zeros(self.dims[t], self.dims[s], field)
            out.append(tuple(tuple(r) for r in m))
        self.mats = tuple(out)

    def matrix(self, i: int) -> MatrixK:
        return [list(r) for r in self.mats[i]]

    def __eq__(self, other):
        return (
            isinstance(other, KRepresentation)
            and (self.quiver, self.field, self.dims, self.mats)
            == (other.quiver, other.field, other.dims, other.mats)
        )

    def __hash__(self):
        return hash((self.quiver, self.field, self.dims, self.mats))

    def __repr__(self):
        return f"KRepresentation({self.field.spec}, dims={self.dims})"


def _arrow_in_lattices(m: KRepresentation, i: int, lats: Sequence[Lattice]) -> MatrixK:
    s, t = m.quiver.arrows[i]
    if not m.dims[s] or not m.dims[t]:
        return F.zeros(m.dims[t], m.dims[s], m.field)
    return lats[t].coords(F.matmul(m.matrix(i), lats[s].matrix(), m.field))


@dataclass(frozen=True, eq=False)
class LatticeModel:
    rep: KRepresentation
    lattices: tuple[Lattice, ...]

    def __post_init__(self):
        lats = tuple(self.lattices)
        object.__setattr__(self, "lattices", lats)
        if len(lats) != self.rep.quiver.vertices:
            raise ValueError("one lattice per vertex is required")
        for v, lat in enumerate(lats):
            if lat.dim != self.rep.dims[v]:
                raise ValueError(f"lattice at vertex {v} has dimension {lat.dim}, expected {self.rep.dims[v]}")
        for i, (s, t) in enumerate(self.rep.quiver.arrows):
            if min_valuation(self.arrow(i), self.rep.field) < 0:
                raise NonIntegralError(f"arrow ({s},{t}) does not map L_{s} into L_{t}")

    @property
    def field(self) -> ValuedField:
        return self.rep.field

    def arrow(self, i: int) -> MatrixK:
        """Arrow i written in the lattice bases (an integral matrix)."""
        return _arrow_in_lattices(self.rep, i, self.lattices)

    def scaled(self, n: int) -> LatticeModel:
        return LatticeModel(self.rep, tuple(lattice_scale(l, n) for l in self.lattices))

    def __eq__(self, other):
        return isinstance(other, LatticeModel) and self.rep == other.rep and self.lattices == other.lattices

    def __hash__(self):
        return hash((self.rep, self.lattices))

    def canonical_key(self) -> tuple:
        """Key that forgets independent rescaling of each linked group of vertices.

        Vertices joined by nonzero arrows must be rescaled together; vertices
        in different groups can be rescaled separately without changing the
        model in any essential way.
        """
        active = [any(x != 0 for row in self.rep.mats[i] for x in row) for i in range(len(self.rep.mats))]
        shifts = [0] * self.rep.quiver.vertices
        for comp in self.rep.quiver.components(active):
            exps = [e for v in comp for e in self.lattices[v].pivot_exponents()]
            low = min(exps, default=0)
            for v in comp:
                shifts[v] = -low
        return tuple(lattice_scale(l, n).basis for l, n in zip(self.lattices, shifts))


# --- construction -------------------------------------------------------------------


def _arrow_weights(m: KRepresentation, bases: Sequence[Lattice]) -> list[int | float]:
    return [min_valuation(_arrow_in_lattices(m, i, bases), m.field) for i in range(len(m.mats))]


def _minimal_shifts(quiver: Quiver, weights: Sequence) -> list[int] | None:
    """Least n >= 0 with n_t <= n_s + w_a for every arrow, or None if none exists."""
    n = [0] * quiver.vertices
    for _ in range(quiver.vertices + 1):
        changed = False
        for (s, t), w in zip(quiver.arrows, weights):
            if w == INF:
                continue
            need = n[t] - w
            if n[s] < need:
                n[s] = int(need)
                changed = True
        if not changed:
            return n
    return None


def _closure(m: KRepresentation, lats: list[Lattice], rounds: int = 64) -> list[Lattice]:
    """Enlarge lattices until every arrow maps L_s into L_t."""
    for _ in range(rounds):
        changed = False
        for i, (s, t) in enumerate(m.quiver.arrows):
            if not m.dims[s] or not m.dims[t]:
                continue
            img = F.matmul(m.matrix(i), lats[s].matrix(), m.field)
            if min_valuation(lats[t].coords(img), m.field) < 0:
                lats[t] = Lattice(F.hstack(lats[t].matrix(), img), m.field)
                changed = True
        if not changed:
            return lats
    raise ValueError("no arrow-stable lattices exist: some cycle of arrows is not bounded")


def _model_from_bases(m: KRepresentation, bases: list[Lattice]) -> LatticeModel:
    shifts = _minimal_shifts(m.quiver, _arrow_weights(m, bases))
    if shifts is not None:
        return LatticeModel(m, tuple(lattice_scale(b, n) for b, n in zip(bases, shifts)))
    return LatticeModel(m, tuple(_closure(m, list(bases))))


def standard_model(m: KRepresentation) -> LatticeModel:
    """pi^(n_v) O^(d_v) with the least n_v >= 0 making every arrow integral."""
    return _model_from_bases(m, [Lattice.standard(d, m.field) for d in m.dims])


def random_model(m: KRepresentation, rng: random.Random, spread: int = 2) -> LatticeModel:
    """A model built on random lattices g_v O^(d_v), shifted to make the arrows integral."""
    return _model_from_bases(m, [random_lattice(d, m.field, rng, spread) for d in m.dims])


def reduction(model: LatticeModel) -> Representation:
    mats = [residue_matrix(model.arrow(i), model.field) for i in range(len(model.rep.mats))]
    return Representation(model.rep.quiver, model.field.p, model.rep.dims, mats)


# --- saturation ---------------------------------------------------------------------


@dataclass
class Saturation:
    """G cap L as a model of G, the induced model of M/G, and their bases in K^d."""

    sub: LatticeModel
    quotient: LatticeModel
    sub_bases: list[MatrixK]  # saturated lattice bases of G_v cap L_v (ambient coordinates)
    complement_bases: list[MatrixK]  # completes sub_bases to a basis of L_v
    torsion: list[TorsionModule] = dc_field(default_factory=list)  # torsion of L_v / (G_v cap L_v); empty


def saturate_submodel(g: Sequence[MatrixK], model: LatticeModel) -> Saturation:
    """Saturate a K-subrepresentation (one basis matrix per vertex) inside a model.

    The lattice G_v cap L_v is read off a Smith decomposition of G's basis in
    L-coordinates: if U c V = diag(pi^e), the first r columns of U^-1 span the
    saturation and the remaining columns span a complement, so L_v / (G_v cap L_v)
    is free.  The reductions then form a short exact sequence, which is checked.
    """
    m, field = model.rep, model.field
    q = m.quiver
    sub_bases, comp_bases, coords_sub, coords_comp, torsion = [], [], [], [], []
    for v in range(q.vertices):
        d = m.dims[v]
        gv = g[v] if g[v] and g[v][0] else F.zeros(d, 0, field)
        r = len(gv[0]) if d else 0
        if r and F.rank(gv, field) != r:
            raise ValueError(f"subspace basis at vertex {v} is not linearly independent")
        lat = model.lattices[v]
        if r:
            c = lat.coords(gv)
            scale = min_valuation(c, field)
            c = [[x / field.pi_power(scale) for x in row] for row in c]
            snf = smith_normal_form(c, field)
            u_inv = F.inverse(snf.U, field)
        else:
            u_inv = F.identity(d, field)
        cs = [row[:r] for row in u_inv]
        cc = [row[r:] for row in u_inv]
        coords_sub.append(cs)
        coords_comp.append(cc)
        sub_bases.append(F.matmul(lat.matrix(), cs, field) if d else [])
        comp_bases.append(F.matmul(lat.matrix(), cc, field) if d else [])
        torsion.append(TorsionModule(()))
    sub_mats, quo_mats = [], []
    for i, (s, t) in enumerate(q.arrows):
        a = model.arrow(i)  # L-coordinates
        rs, rt = len(coords_sub[s][0]) if m.dims[s] else 0, len(coords_sub[t][0]) if m.dims[t] else 0
        ds, dt = m.dims[s], m.dims[t]
        if not ds or not dt:
            sub_mats.append(F.zeros(rt, rs, field))
            quo_mats.append(F.zeros(dt - rt, ds - rs, field))
            continue
        full_t = F.hstack(coords_sub[t], coords_comp[t])
        inv_t = F.inverse(full_t, field)
        a_sub = F.matmul(inv_t, F.matmul(a, coords_sub[s], field), field)
        if any(a_sub[j][c] != 0 for j in range(rt, dt) for c in range(rs)):
            raise ValueError(f"subspace is not invariant under arrow ({s},{t})")
        a_comp = F.matmul(inv_t, F.matmul(a, coords_comp[s], field), field)
        sub_mats.append([row[:] for row in a_sub[:rt]])
        quo_mats.append([row[:] for row in a_comp[rt:]])
    sub_dims = [len(c[0]) if c else 0 for c in coords_sub]
    sub_rep = KRepresentation(q, field, sub_dims, sub_mats)
    quo_rep = KRepresentation(q, field, [d - r for d, r in zip(m.dims, sub_dims)], quo_mats)
    sub_model = LatticeModel(sub_rep, tuple(Lattice.standard(d, field) for d in sub_dims))
    quo_model = LatticeModel(quo_rep, tuple(Lattice.standard(d, field) for d in quo_rep.dims))
    _check_short_exact(model, sub_model, quo_model, coords_sub, coords_comp)
    return Saturation(sub_model, quo_model, sub_bases, comp_bases, torsion)


def _check_short_exact(model, sub_model, quo_model, coords_sub, coords_comp) -> None:
    """0 -> G_0 -> L_0 -> H_0 -> 0 with the inclusion and projection given by U^-1."""
    field, p = model.field, model.field.p
    r_full, r_sub, r_quo = reduction(model), reduction(sub_model), reduction(quo_model)
    for v in range(model.rep.quiver.vertices):
        d = model.rep.dims[v]
        if not d:
            continue
        basis = residue_matrix(F.hstack(coords_sub[v], coords_comp[v]), field)
        if ffla.rank(basis, p) != d:
            raise VerificationError("saturated basis does not reduce to a basis of L_0")
    for i, (s, t) in enumerate(model.rep.quiver.arrows):
        if not model.rep.dims[s] or not model.rep.dims[t]:
            continue
        inc_s = residue_matrix(coords_sub[s], field) if r_sub.dims[s] else np.zeros((model.rep.dims[s], 0), dtype=np.int64)
        inc_t = residue_matrix(coords_sub[t], field) if r_sub.dims[t] else np.zeros((model.rep.dims[t], 0), dtype=np.int64)
        lhs = (r_full.mats[i] @ inc_s) % p
        rhs = (inc_t @ r_sub.mats[i]) % p
        if not np.array_equal(lhs, rhs):
            raise VerificationError("inclusion of reductions does not commute with an arrow")


# --- comparison of two models -------------------------------------------------------


@dataclass
class ModelComparison:
    shift: int  # F1 = pi^shift L1 sits inside F2 = L2
    torsion: list[TorsionModule]  # F2_v / F1_v
    levels: list[int]
    graded_first: dict[int, Representation]  # Gr^i of the decreasing filtration on F1_0
    graded_second: dict[int, Representation]  # Gr^i of the increasing filtration on F2_0
    maps: dict[int, list[np.ndarray]]  # per level and vertex, phi^i on graded bases

    def nonzero_levels(self) -> list[int]:
        return [i for i in self.levels if self.graded_first[i].total_dim]


def _level_witness(model: LatticeModel, lats: list[Lattice]) -> SubrepWitness:
    """Reduction of sublattices of the model's lattices, as a witness in the reduction."""
    p = model.field.p
    bases = []
    for v, lat in enumerate(lats):
        d = model.rep.dims[v]
        if not d:
            bases.append(np.zeros((0, 0), dtype=np.int64))
            continue
        res = residue_matrix(model.lattices[v].coords(lat.matrix()), model.field)
        bases.append(res)
    return canonical_witness(bases, p)


def _subquotient(r: Representation, hi: SubrepWitness, lo: SubrepWitness) -> tuple[Representation, SubrepWitness]:
    q = quotient(r, lo)
    img = push_to_quotient(r, lo, hi)
    return subrepresentation(q, img), img


def compare_models(model1: LatticeModel, model2: LatticeModel) -> ModelComparison:
    """Rescale model1 into model2 and match the graded pieces of both reductions.

    With F1 = pi^n L1 inside F2 = L2, the first reduction is filtered by the
    images of F1 cap pi^i F2 (decreasing in i) and the second by the images of
    F2 cap pi^-i F1 (increasing).  Multiplication by pi^-i identifies the i-th
    graded pieces; each identification is checked to be an isomorphism that
    commutes with the arrows.
    """
    if model1.rep != model2.rep:
        raise ValueError("models of different representations cannot be compared")
    field, p = model1.field, model1.field.p
    nv = model1.rep.quiver.vertices
    shift = max((rescale_exponent(l1, l2) for l1, l2 in zip(model1.lattices, model2.lattices)), default=0)
    f1 = model1.scaled(shift)
    f2 = model2
    torsion = [quotient_torsion(a, b) for a, b in zip(f1.lattices, f2.lattices)]
    top = max((max(t.exponents, default=0) for t in torsion), default=0)
    levels = list(range(top + 1))
    r1, r2 = reduction(f1), reduction(f2)

    def fil(i):  # image of F1 cap pi^i F2 in F1_0
        return _level_witness(
            f1, [lattice_intersection(a, lattice_scale(b, i)) for a, b in zip(f1.lattices, f2.lattices)]
        )

    def ext(i):  # image of F2 cap pi^-i F1 in F2_0
        if i < 0:
            return r2.zero()
        return _level_witness(
            f2, [lattice_intersection(b, lattice_scale(a, -i)) for a, b in zip(f1.lattices, f2.lattices)]
        )

    graded_first, graded_second, maps = {}, {}, {}
    for i in levels:
        hi1, lo1 = fil(i), fil(i + 1)
        hi2, lo2 = ext(i), ext(i - 1)
        g1, _ = _subquotient(r1, hi1, lo1)
        g2, _ = _subquotient(r2, hi2, lo2)
        graded_first[i], graded_second[i] = g1, g2
        per_vertex = []
        for v in range(nv):
            per_vertex.append(_phi(f1, f2, v, i, hi1, lo1, hi2, lo2))
        maps[i] = per_vertex
        if g1.dims != g2.dims:
            raise VerificationError(f"graded pieces at level {i} have different dimensions")
        _check_intertwines(r1, r2, per_vertex, hi1, lo1, hi2, lo2, i)
        if not iso_check(g1, g2):
            raise VerificationError(f"graded pieces at level {i} are not isomorphic")
    return ModelComparison(shift, torsion, levels, graded_first, graded_second, maps)


def _graded_coords(hi: np.ndarray, lo: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Complement C of lo in hi and the projection onto C-coordinates."""
    return ffla.quotient_coords(lo, hi, p)


def _phi(f1, f2, v, i, hi1, lo1, hi2, lo2) -> np.ndarray:
    """Matrix of x -> pi^-i x from Gr^i(F1_0) to Gr^i(F2_0) at one vertex."""
    field, p = f1.field, f1.field.p
    c1, _ = _graded_coords(hi1.bases[v], lo1.bases[v], p)
    _, proj2 = _graded_coords(hi2.bases[v], lo2.bases[v], p)
    if c1.shape[1] == 0:
        return np.zeros((proj2.shape[0], 0), dtype=np.int64)
    x_lat = lattice_intersection(f1.lattices[v], lattice_scale(f2.lattices[v], i))
    x_basis = x_lat.matrix()
    x_res = residue_matrix(f1.lattices[v].coords(x_basis), field)
    cols = []
    for j in range(c1.shape[1]):
        sol = ffla.solve(x_res, c1[:, j : j + 1], p)
        if sol is None:
            raise VerificationError("graded basis vector has no lift in F1 cap pi^i F2")
        lift = [[field.lift(int(c))] for c in sol[:, 0]]
        x = F.matmul(x_basis, lift, field)
        y = [[e[0] / field.pi_power(i)] for e in x]
        r = residue_matrix(f2.lattices[v].coords(y), field)
        if not ffla.contains(hi2.bases[v], r, p):
            raise VerificationError(f"pi^-{i} leaves the level-{i} piece of F2_0")
        cols.append((proj2 @ r) % p)
    mat = np.hstack(cols)
    if mat.shape[0] != mat.shape[1] or ffla.rank(mat, p) != mat.shape[0]:
        raise VerificationError(f"phi^{i} is not an isomorphism at vertex {v}")
    return mat


def _check_intertwines(r1, r2, maps, hi1, lo1, hi2, lo2, i) -> None:
    p = r1.p
    for k, (s, t) in enumerate(r1.quiver.arrows):
        c1s, _ = _graded_coords(hi1.bases[s], lo1.bases[s], p)
        _, proj1t = _graded_coords(hi1.bases[t], lo1.bases[t], p)
        c2s, _ = _graded_coords(hi2.bases[s], lo2.bases[s], p)
        _, proj2t = _graded_coords(hi2.bases[t], lo2.bases[t], p)
        if c1s.shape[1] == 0 or proj1t.shape[0] == 0:
            continue
        a1 = (proj1t @ r1.mats[k] @ c1s) % p  # arrow on Gr^i(F1_0)
        a2 = (proj2t @ r2.mats[k] @ c2s) % p  # arrow on Gr^i(F2_0)
        if not np.array_equal((maps[t] @ a1) % p, (a2 @ maps[s]) % p):
            raise VerificationError(f"phi^{i} does not commute with arrow ({s},{t})")
