"""Finitely generated torsion modules over O and their two canonical filtrations.

For a torsion module Q = O^m / C O^m the reduction Q_0 = Q / pi Q carries the
increasing filtration

    Fil1^j = image of ker(pi^j : Q -> Q) in Q_0,

and Q'_0 = ker(pi : Q -> Q) (identified with Tor_1(k, Q)) carries the
decreasing filtration

    Fil2^j = pi^j Q  intersected with  Q'_0.

Both jump exactly at the elementary-divisor exponents, and multiplication by
pi^(i-1) on lifts induces isomorphisms Gr1^i = Fil1^i / Fil1^(i-1) -> Gr2^i =
Fil2^(i-1) / Fil2^i.  Everything here is computed from explicit lattice bases;
closed-form dimension counts only appear in the tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import fields as F
from . import ffla
from .dvr_linalg import (
    Lattice,
    MatrixK,
    lattice_intersection,
    lattice_scale,
    lattice_sum,
    quotient_torsion,
    residue_matrix,
    smith_normal_form,
)
from .valued_field import PAdicField, ValuedField


@dataclass(frozen=True)
class TorsionModule:
    """The module (+)_i O / pi^{e_i}, stored as the sorted exponent tuple."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        exps = tuple(sorted(int(e) for e in self.exponents))
        if any(e < 1 for e in exps):
            raise ValueError("torsion exponents must be >= 1")
        object.__setattr__(self, "exponents", exps)

    @property
    def length(self) -> int:
        return sum(self.exponents)

    @property
    def is_zero(self) -> bool:
        return not self.exponents

    def __add__(self, other: TorsionModule) -> TorsionModule:
        return TorsionModule(self.exponents + other.exponents)

    def to_list(self) -> list[int]:
        return list(self.exponents)

    def presentation(self, field: ValuedField) -> MatrixK:
        m = len(self.exponents)
        out = F.zeros(m, m, field)
        for i, e in enumerate(self.exponents):
            out[i][i] = field.pi_power(e)
        return out


def elementary_divisors(presentation: MatrixK, field: ValuedField) -> tuple[TorsionModule, int]:
    """Torsion part and free rank of the cokernel of an integral matrix.

    An empty torsion part means the cokernel is torsion-free (pure).
    """
    snf = smith_normal_form(presentation, field)
    return TorsionModule(tuple(e for e in snf.exponents if e > 0)), snf.free_rank


# --- coordinate model of Q = O^m / C O^m -----------------------------------------


class _Coordinates:
    def __init__(self, c: MatrixK, field: ValuedField):
        self.field = field
        self.m = len(c)
        p = field.p
        self.p = p
        self.outer = Lattice.standard(self.m, field)
        self.inner = Lattice(c, field)
        snf = smith_normal_form(c, field)
        if snf.rank < self.m:
            raise ValueError("presentation does not define a torsion module")
        self.top = max(snf.exponents, default=0)
        self._kers: dict[int, Lattice] = {}
        # Q_0 = k^m / n0 with n0 the reduction of the relations
        self.n0 = ffla.span(residue_matrix(self.inner.matrix(), field), p)
        self.k1 = self.ker_pi(1)
        # Q'_0 = K_1 / inner, coordinates through K_1's basis modulo n1
        self.n1 = ffla.span(self._k1_residue(self.inner.matrix()), p)

    def ker_pi(self, j: int) -> Lattice:
        """Lattice K_j of x in O^m with pi^j x in C O^m, i.e. ker(pi^j) on Q."""
        if j not in self._kers:
            self._kers[j] = lattice_intersection(self.outer, lattice_scale(self.inner, -j))
        return self._kers[j]

    def _k1_residue(self, vectors: MatrixK) -> np.ndarray:
        return residue_matrix(self.k1.coords(vectors), self.field)

    def fil1(self, j: int) -> np.ndarray:
        if j <= 0:
            return self.n0
        vecs = residue_matrix(self.ker_pi(j).matrix(), self.field)
        return ffla.span(np.hstack([self.n0, vecs]), self.p)

    def fil2(self, j: int) -> np.ndarray:
        lat = lattice_intersection(lattice_sum(lattice_scale(self.outer, j), self.inner), self.k1)
        return ffla.span(np.hstack([self.n1, self._k1_residue(lat.matrix())]), self.p)


@dataclass
class FiltrationProfile:
    """Dimensions of both filtrations at levels 0..top, relative to the quotients."""

    levels: list[int]
    first: list[int]  # dim Fil1^j(Q_0), increasing
    second: list[int]  # dim Fil2^j(Q'_0), decreasing

    @property
    def graded_first(self) -> dict[int, int]:
        return {
            j: self.first[j] - self.first[j - 1]
            for j in self.levels[1:]
            if self.first[j] != self.first[j - 1]
        }

    @property
    def graded_second(self) -> dict[int, int]:
        return {
            j: self.second[j - 1] - self.second[j]
            for j in self.levels[1:]
            if self.second[j] != self.second[j - 1]
        }

    @property
    def jumps(self) -> list[int]:
        return sorted(self.graded_first)


def _profile(coords: _Coordinates) -> FiltrationProfile:
    d0 = coords.n0.shape[1]
    d1 = coords.n1.shape[1]
    levels = list(range(coords.top + 1))
    first = [coords.fil1(j).shape[1] - d0 for j in levels]
    second = [coords.fil2(j).shape[1] - d1 for j in levels]
    return FiltrationProfile(levels, first, second)


def filtration_profiles(q: TorsionModule, field: ValuedField | None = None) -> FiltrationProfile:
    field = field or PAdicField(2)
    if q.is_zero:
        return FiltrationProfile([0], [0], [0])
    return _profile(_Coordinates(q.presentation(field), field))


def filtration_profiles_of_pair(inner: Lattice, outer: Lattice) -> FiltrationProfile:
    """Profiles of outer / inner for nested lattices."""
    c = outer.coords(inner.matrix())
    return _profile(_Coordinates(c, inner.field))


@dataclass
class GradedIso:
    """Per jump level i, the matrix of f_i : Gr1^i -> Gr2^i over F_p."""

    maps: dict[int, np.ndarray] = dc_field(default_factory=dict)
    p: int = 2

    def ranks(self) -> dict[int, int]:
        return {i: ffla.rank(m, self.p) for i, m in self.maps.items()}


class VerificationError(RuntimeError):
    """Internal consistency check failed; indicates a bug, not bad input."""


def _random_combination(lat: Lattice, rng: random.Random) -> list:
    field = lat.field
    coeffs = [[field.random_integral(rng, 2, zero_prob=0.3)] for _ in range(lat.dim)]
    return [row[0] for row in F.matmul(lat.matrix(), coeffs, field)]


def _graded_iso(coords: _Coordinates, rng: random.Random | None, trials: int) -> GradedIso:
    field, p = coords.field, coords.p
    out = GradedIso(p=p)
    pi = field.uniformizer()
    base_kernel = lattice_sum(lattice_scale(coords.outer, 1), coords.inner)
    for i in range(1, coords.top + 1):
        lo, hi = coords.fil1(i - 1), coords.fil1(i)
        if hi.shape[1] == lo.shape[1]:
            continue
        k_i = coords.ker_pi(i)
        lifts_all = k_i.matrix()
        # basis vectors of K_i whose residues extend Fil1^(i-1) to Fil1^i
        chosen = lo.copy()
        lifts = []
        res = residue_matrix(lifts_all, field)
        for j in range(k_i.dim):
            trial = np.hstack([chosen, res[:, j : j + 1]])
            if ffla.rank(trial, p) > chosen.shape[1]:
                chosen = trial
                lifts.append([row[j] for row in lifts_all])
        target_hi, target_lo = coords.fil2(i - 1), coords.fil2(i)
        _, proj = ffla.quotient_coords(target_lo, target_hi, p)

        def image(vec):
            w = [pi ** (i - 1) * x for x in vec]
            r = coords._k1_residue([[x] for x in w])
            if not ffla.contains(target_hi, r, p):
                raise VerificationError(f"f_{i} leaves Fil2^{i - 1}")
            return (proj @ r) % p

        mat = np.hstack([image(v) for v in lifts]) if lifts else np.zeros((0, 0), dtype=np.int64)
        if mat.shape[0] != mat.shape[1] or ffla.rank(mat, p) != mat.shape[0]:
            raise VerificationError(f"f_{i} is not an isomorphism of graded pieces")
        if rng is not None and trials:
            # independence of the lift: perturb by ker(K_i -> Q_0) and by Fil1^(i-1) lifts
            ambiguity = lattice_intersection(k_i, base_kernel)
            prev = coords.ker_pi(i - 1)
            for _ in range(trials):
                for col, v in enumerate(lifts):
                    y = _random_combination(ambiguity, rng)
                    z = _random_combination(prev, rng)
                    w = [a + b + c for a, b, c in zip(v, y, z)]
                    if not np.array_equal(image(w)[:, 0], mat[:, col]):
                        raise VerificationError(f"f_{i} depends on the chosen lift")
        out.maps[i] = mat
    return out


def graded_iso_check(
    q: TorsionModule,
    field: ValuedField | None = None,
    rng: random.Random | None = None,
    trials: int = 2,
) -> GradedIso:
    """Build every f_i on explicit bases and verify it is a lift-independent isomorphism."""
    field = field or PAdicField(2)
    if q.is_zero:
        return GradedIso(p=field.p)
    rng = rng if rng is not None else random.Random(0)
    return _graded_iso(_Coordinates(q.presentation(field), field), rng, trials)


def graded_iso_of_pair(
    inner: Lattice, outer: Lattice, rng: random.Random | None = None, trials: int = 1
) -> GradedIso:
    c = outer.coords(inner.matrix())
    return _graded_iso(_Coordinates(c, inner.field), rng, trials)


def k_class_of_model(lattice: Lattice) -> int:
    """Class of the reduction L / pi L in K_0 of k-vector spaces, i.e. its dimension."""
    return quotient_torsion(lattice_scale(lattice, 1), lattice).length
