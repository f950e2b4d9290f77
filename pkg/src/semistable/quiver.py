"""Quiver representations over F_p and slope stability by exhaustive enumeration.

Subrepresentations are witnessed by one canonical basis per vertex (reduced
column echelon, see ``ffla``), so two witnesses are equal iff the subspaces
are.  Slopes come from additive data: the pair (sigma . d, theta_k . d) is the
leading and k-th coefficient of a Hilbert-like polynomial, so the slope vector
is the list of reduced coefficients a_1..a_m.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import ffla
from .hilbert import HilbertPolynomial, reduced_coefficients, violates

DEFAULT_CAP = 10**6


class EnumerationCapError(RuntimeError):
    """A brute-force search would exceed its configured size."""


class NotSemistableError(ValueError):
    pass


class MaximalityError(RuntimeError):
    """Candidate destabilizers are not closed under sums."""


@dataclass(frozen=True)
class Quiver:
    vertices: int
    arrows: tuple[tuple[int, int], ...]

    def __post_init__(self):
        arrows = tuple((int(s), int(t)) for s, t in self.arrows)
        for s, t in arrows:
            if not (0 <= s < self.vertices and 0 <= t < self.vertices):
                raise ValueError(f"arrow ({s},{t}) leaves the vertex range 0..{self.vertices - 1}")
        object.__setattr__(self, "arrows", arrows)

    @classmethod
    def kronecker(cls) -> Quiver:
        return cls(2, ((0, 1), (0, 1)))

    @classmethod
    def a2(cls) -> Quiver:
        return cls(2, ((0, 1),))

    @classmethod
    def loop_with_tail(cls) -> Quiver:
        return cls(2, ((0, 0), (0, 1)))

    def components(self, active: Sequence[bool] | None = None) -> list[list[int]]:
        """Connected components of the underlying graph, optionally on a subset of arrows."""
        parent = list(range(self.vertices))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, (s, t) in enumerate(self.arrows):
            if active is None or active[i]:
                parent[find(s)] = find(t)
        groups: dict[int, list[int]] = {}
        for v in range(self.vertices):
            groups.setdefault(find(v), []).append(v)
        return sorted(groups.values())


@dataclass(frozen=True)
class StabilityData:
    """Weights theta_1..theta_m and a positive denominator sigma, one entry per vertex."""

    theta: tuple[tuple[int, ...], ...]
    sigma: tuple[int, ...]

    def __post_init__(self):
        theta = tuple(tuple(int(x) for x in row) for row in self.theta)
        sigma = tuple(int(x) for x in self.sigma)
        if any(s <= 0 for s in sigma):
            raise ValueError("sigma must be positive at every vertex")
        if any(len(row) != len(sigma) for row in theta):
            raise ValueError("every theta row needs one weight per vertex")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "sigma", sigma)

    @property
    def arity(self) -> int:
        return len(self.theta)

    def polynomial(self, dims: Sequence[int]) -> HilbertPolynomial:
        """sigma.d n^m + theta_1.d n^(m-1) + ... + theta_m.d; additive in d."""
        if len(dims) != len(self.sigma):
            raise ValueError("dimension vector does not match the stability data")
        dot = lambda w: sum(a * b for a, b in zip(w, dims))  # noqa: E731
        return HilbertPolynomial((dot(self.sigma),) + tuple(dot(row) for row in self.theta))

    def slope_of(self, dims: Sequence[int]) -> tuple[Fraction, ...]:
        if not any(dims):
            raise ValueError("the zero representation has no slope")
        return tuple(reduced_coefficients(self.polynomial(dims)))


# --- representations --------------------------------------------------------------


class Representation:
    """Representation of a quiver over F_p; arrow a is a d_t x d_s int64 matrix."""

    __slots__ = ("quiver", "p", "dims", "mats", "_key")

    def __init__(self, quiver: Quiver, p: int, dims: Sequence[int], mats: Sequence):
        self.quiver = quiver
        self.p = int(p)
        self.dims = tuple(int(d) for d in dims)
        if len(self.dims) != quiver.vertices:
            raise ValueError("dimension vector length differs from the vertex count")
        if len(mats) != len(quiver.arrows):
            raise ValueError("one matrix per arrow is required")
        out = []
        for (s, t), m in zip(quiver.arrows, mats):
            a = np.array(m, dtype=np.int64).reshape(self.dims[t], self.dims[s]) % self.p
            a.setflags(write=False)
            out.append(a)
        self.mats = tuple(out)
        self._key = (quiver, self.p, self.dims, tuple(ffla.key(a) for a in self.mats))

    @property
    def total_dim(self) -> int:
        return sum(self.dims)

    @property
    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __eq__(self, other):
        return isinstance(other, Representation) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        mats = ", ".join(str(m.tolist()) for m in self.mats)
        return f"Representation(p={self.p}, dims={self.dims}, mats=[{mats}])"

    def full(self) -> SubrepWitness:
        return SubrepWitness(tuple(np.eye(d, dtype=np.int64) for d in self.dims))

    def zero(self) -> SubrepWitness:
        return SubrepWitness(tuple(np.zeros((d, 0), dtype=np.int64) for d in self.dims))


def direct_sum(a: Representation, b: Representation) -> Representation:
    if a.quiver != b.quiver or a.p != b.p:
        raise ValueError("direct sum needs the same quiver and field")
    mats = []
    for (s, t), x, y in zip(a.quiver.arrows, a.mats, b.mats):
        m = np.zeros((a.dims[t] + b.dims[t], a.dims[s] + b.dims[s]), dtype=np.int64)
        m[: a.dims[t], : a.dims[s]] = x
        m[a.dims[t] :, a.dims[s] :] = y
        mats.append(m)
    return Representation(a.quiver, a.p, [x + y for x, y in zip(a.dims, b.dims)], mats)


@dataclass(frozen=True, eq=False)
class SubrepWitness:
    """Canonical per-vertex bases of a subrepresentation."""

    bases: tuple[np.ndarray, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(b.shape[1] for b in self.bases)

    @property
    def key(self) -> tuple:
        return tuple(ffla.key(b) for b in self.bases)

    def __eq__(self, other):
        return isinstance(other, SubrepWitness) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"SubrepWitness({[b.tolist() for b in self.bases]})"

    def contains(self, other: SubrepWitness, p: int) -> bool:
        return all(ffla.contains(a, b, p) for a, b in zip(self.bases, other.bases))


def canonical_witness(bases: Iterable[np.ndarray], p: int) -> SubrepWitness:
    return SubrepWitness(tuple(ffla.span(np.asarray(b, dtype=np.int64), p) for b in bases))


def witness_sum(ws: Iterable[SubrepWitness], dims: Sequence[int], p: int) -> SubrepWitness:
    cols = [[np.zeros((d, 0), dtype=np.int64)] for d in dims]
    for w in ws:
        for v, b in enumerate(w.bases):
            cols[v].append(b)
    return canonical_witness((np.hstack(c) for c in cols), p)


def is_invariant(m: Representation, w: SubrepWitness) -> bool:
    p = m.p
    for (s, t), a in zip(m.quiver.arrows, m.mats):
        if not ffla.contains(w.bases[t], (a @ w.bases[s]) % p, p):
            return False
    return True


def _pivots(basis: np.ndarray) -> list[int]:
    return ffla.pivots_of(basis)


def subrepresentation(m: Representation, w: SubrepWitness) -> Representation:
    """The subrepresentation in the coordinates of the witness bases."""
    mats = []
    for (s, t), a in zip(m.quiver.arrows, m.mats):
        img = (a @ w.bases[s]) % m.p
        mats.append(img[_pivots(w.bases[t]), :])
    return Representation(m.quiver, m.p, w.dims, mats)


def _quotient_parts(basis: np.ndarray) -> tuple[list[int], list[int]]:
    piv = _pivots(basis)
    rest = [i for i in range(basis.shape[0]) if i not in piv]
    return piv, rest


def quotient(m: Representation, w: SubrepWitness) -> Representation:
    """M / W with coordinates the standard vectors at non-pivot rows of W's bases."""
    p = m.p
    mats = []
    for (s, t), a in zip(m.quiver.arrows, m.mats):
        _, rest_s = _quotient_parts(w.bases[s])
        piv_t, rest_t = _quotient_parts(w.bases[t])
        img = a[:, rest_s]
        bt = w.bases[t]
        q = (img[rest_t, :] - bt[rest_t, :] @ img[piv_t, :]) % p
        mats.append(q)
    dims = [d - k for d, k in zip(m.dims, w.dims)]
    return Representation(m.quiver, p, dims, mats)


def preimage(m: Representation, w: SubrepWitness, sub_of_quotient: SubrepWitness) -> SubrepWitness:
    """Pull a witness of quotient(m, w) back to a witness of m containing w."""
    bases = []
    for v, (b, q) in enumerate(zip(w.bases, sub_of_quotient.bases)):
        _, rest = _quotient_parts(b)
        lift = np.zeros((m.dims[v], q.shape[1]), dtype=np.int64)
        lift[rest, :] = q
        bases.append(np.hstack([b, lift]))
    return canonical_witness(bases, m.p)


def push_to_quotient(m: Representation, w: SubrepWitness, big: SubrepWitness) -> SubrepWitness:
    """Image in quotient(m, w) of a witness containing w."""
    bases = []
    for b, g in zip(w.bases, big.bases):
        piv, rest = _quotient_parts(b)
        bases.append((g[rest, :] - b[rest, :] @ g[piv, :]) % m.p)
    return canonical_witness(bases, m.p)


# --- enumeration ------------------------------------------------------------------


def enumeration_size(m: Representation, dims: Sequence[int] | None = None) -> int:
    if dims is None:
        return math.prod(ffla.count_subspaces(d, m.p) for d in m.dims)
    return math.prod(ffla.gaussian_binomial(d, r, m.p) for d, r in zip(m.dims, dims))


def enumerate_subreps(
    m: Representation,
    cap: int = DEFAULT_CAP,
    shuffle: random.Random | None = None,
    dims: Sequence[int] | None = None,
) -> list[SubrepWitness]:
    """Every subrepresentation, in canonical order (or shuffled, for order-independence tests).

    ``dims`` restricts the search to one dimension vector.
    """
    size = enumeration_size(m, dims)
    if size > cap:
        raise EnumerationCapError(
            f"subrepresentation search over dims {m.dims} at p={m.p} needs {size} subspace "
            f"tuples, cap is {cap}"
        )
    p = m.p
    n = m.quiver.vertices
    if dims is None:
        spaces = [ffla.subspaces(d, p) for d in m.dims]
    else:
        spaces = [ffla.subspaces(d, p, [r]) for d, r in zip(m.dims, dims)]
    anns = [[ffla.annihilator(b, b.shape[0], p) for b in sp] for sp in spaces]
    # arrows are checked as soon as both endpoints are chosen
    due: list[list[int]] = [[] for _ in range(n)]
    for i, (s, t) in enumerate(m.quiver.arrows):
        due[max(s, t)].append(i)
    out: list[SubrepWitness] = []
    choice = [0] * n

    def ok(v: int) -> bool:
        for i in due[v]:
            s, t = m.quiver.arrows[i]
            img = m.mats[i] @ spaces[s][choice[s]]
            ann = anns[t][choice[t]]
            if ann.shape[0] and img.size and np.any((ann @ img) % p):
                return False
        return True

    def walk(v: int):
        if v == n:
            out.append(SubrepWitness(tuple(spaces[u][choice[u]] for u in range(n))))
            return
        for idx in range(len(spaces[v])):
            choice[v] = idx
            if ok(v):
                walk(v + 1)

    walk(0)
    if shuffle is not None:
        shuffle.shuffle(out)
    return out


# --- slopes and semistability -----------------------------------------------------


def slope(m: Representation, stab: StabilityData) -> tuple[Fraction, ...]:
    return stab.slope_of(m.dims)


@dataclass
class SemistabilityResult:
    semistable: bool
    witness: SubrepWitness | None = None
    witness_slope: tuple[Fraction, ...] | None = None

    def __bool__(self) -> bool:
        return self.semistable


def _nonzero(ws: Iterable[SubrepWitness]) -> list[SubrepWitness]:
    return [w for w in ws if any(w.dims)]


def _level(stab: StabilityData, k) -> int:
    if k == "full":
        return stab.arity
    k = int(k)
    if not 0 <= k <= stab.arity:
        raise ValueError(f"level {k} outside 0..{stab.arity}")
    return k


def is_semistable(
    m: Representation,
    stab: StabilityData,
    k: int | str = "full",
    order: str = "componentwise",
    cap: int = DEFAULT_CAP,
    subreps: list[SubrepWitness] | None = None,
) -> SemistabilityResult:
    """Semistability at level k.

    ``k="full"`` compares whole slope vectors lexicographically, which is the
    eventual order of the reduced polynomials.  A numeric k uses ``order``
    ("componentwise" or "lex") on the first k coordinates.  On failure the
    witness is a violating subrepresentation of lexicographically largest
    slope, largest among those.
    """
    level = _level(stab, k)
    if k == "full":
        order = "lex"
    if m.is_zero:
        return SemistabilityResult(True)
    mu = slope(m, stab)
    subs = _nonzero(subreps if subreps is not None else enumerate_subreps(m, cap))
    bad = [w for w in subs if violates(stab.slope_of(w.dims), mu, level, order)]
    if not bad:
        return SemistabilityResult(True)
    top = max(stab.slope_of(w.dims) for w in bad)
    best = witness_sum((w for w in bad if stab.slope_of(w.dims) == top), m.dims, m.p)
    if not violates(stab.slope_of(best.dims), mu, level, order):
        best = max((w for w in bad if stab.slope_of(w.dims) == top), key=lambda w: sum(w.dims))
    return SemistabilityResult(False, best, stab.slope_of(best.dims))


def semistable_codimension(
    m: Representation,
    stab: StabilityData,
    order: str = "lex",
    cap: int = DEFAULT_CAP,
    subreps: list[SubrepWitness] | None = None,
) -> int:
    """Largest k such that m is semistable at every level 1..k."""
    subs = subreps if subreps is not None else enumerate_subreps(m, cap)
    k = 0
    while k < stab.arity and is_semistable(m, stab, k + 1, order, subreps=subs).semistable:
        k += 1
    return k


# --- Harder-Narasimhan ------------------------------------------------------------


@dataclass
class HNFiltration:
    steps: list[SubrepWitness]  # M_1 .. M_r = M, each a witness in M
    slopes: list[tuple[Fraction, ...]]  # slope of M_i / M_(i-1)

    @property
    def length(self) -> int:
        return len(self.steps)

    @property
    def keys(self) -> tuple:
        return tuple(w.key for w in self.steps)


def _max_destabilizer(
    m: Representation, stab: StabilityData, subs: list[SubrepWitness]
) -> tuple[SubrepWitness, tuple[Fraction, ...]]:
    nz = _nonzero(subs)
    top = max(stab.slope_of(w.dims) for w in nz)
    best = witness_sum((w for w in nz if stab.slope_of(w.dims) == top), m.dims, m.p)
    if stab.slope_of(best.dims) != top:
        raise MaximalityError("sum of maximal-slope subrepresentations lost the maximal slope")
    return best, top


def hn_filtration(
    m: Representation,
    stab: StabilityData,
    cap: int = DEFAULT_CAP,
    shuffle: random.Random | None = None,
) -> HNFiltration:
    """Harder-Narasimhan filtration for the lexicographic slope order."""
    if m.is_zero:
        return HNFiltration([], [])
    steps: list[SubrepWitness] = []
    slopes: list[tuple[Fraction, ...]] = []
    current = m.zero()
    while sum(current.dims) < m.total_dim:
        q = quotient(m, current)
        subs = enumerate_subreps(q, cap, shuffle)
        b, mu = _max_destabilizer(q, stab, subs)
        current = preimage(m, current, b)
        steps.append(current)
        slopes.append(mu)
    return HNFiltration(steps, slopes)


def maximal_destabilizing(
    m: Representation,
    stab: StabilityData,
    k: int,
    cap: int = DEFAULT_CAP,
    subreps: list[SubrepWitness] | None = None,
) -> SubrepWitness:
    """Largest subrepresentation whose first k slope coordinates equal the HN-maximal ones."""
    level = _level(stab, k)
    if m.is_zero:
        return m.zero()
    subs = subreps if subreps is not None else enumerate_subreps(m, cap)
    _, b = _max_destabilizer(m, stab, subs)
    cands = [w for w in _nonzero(subs) if stab.slope_of(w.dims)[:level] == b[:level]]
    total = witness_sum(cands, m.dims, m.p)
    if stab.slope_of(total.dims)[:level] != b[:level]:
        raise MaximalityError(
            f"level-{level} destabilizing candidates are not closed under sum; "
            "the maximal one is ambiguous"
        )
    return total


# --- isomorphism, Jordan-Holder, S-equivalence ------------------------------------


def hom_space(m: Representation, n: Representation) -> list[list[np.ndarray]]:
    """Basis of Hom(m, n): tuples (X_v) with X_t A_a = B_a X_s for every arrow."""
    p = m.p
    sizes = [n.dims[v] * m.dims[v] for v in range(m.quiver.vertices)]
    offsets = [0] + list(itertools.accumulate(sizes))
    total = offsets[-1]
    rows = []
    for (s, t), a, b in zip(m.quiver.arrows, m.mats, n.mats):
        # entry (i, j) of X_t A - B X_s
        for i in range(n.dims[t]):
            for j in range(m.dims[s]):
                row = np.zeros(total, dtype=np.int64)
                for l in range(m.dims[t]):
                    row[offsets[t] + i * m.dims[t] + l] += a[l, j]
                for l in range(n.dims[s]):
                    row[offsets[s] + l * m.dims[s] + j] -= b[i, l]
                rows.append(row % p)
    eqs = np.array(rows, dtype=np.int64).reshape(len(rows), total)
    basis = ffla.nullspace(eqs, p)
    out = []
    for c in range(basis.shape[1]):
        vec = basis[:, c]
        out.append(
            [
                vec[offsets[v] : offsets[v + 1]].reshape(n.dims[v], m.dims[v])
                for v in range(m.quiver.vertices)
            ]
        )
    return out


def iso_check(m: Representation, n: Representation, cap: int = DEFAULT_CAP) -> bool:
    """True iff some invertible intertwiner m -> n exists (search over Hom(m, n))."""
    if m.quiver != n.quiver or m.p != n.p:
        raise ValueError("comparison needs the same quiver and field")
    if m.dims != n.dims:
        return False
    if m == n:
        return True
    p = m.p
    # cheap invariants first
    for a, b in zip(m.mats, n.mats):
        if ffla.rank(a, p) != ffla.rank(b, p):
            return False
    basis = hom_space(m, n)
    if p ** len(basis) > cap:
        raise EnumerationCapError(f"Hom space has {p}^{len(basis)} elements, cap is {cap}")
    nv = m.quiver.vertices
    if any(m.dims[v] for v in range(nv)) and not basis:
        return False
    for coeffs in itertools.product(range(p), repeat=len(basis)):
        if not any(coeffs):
            continue
        good = True
        for v in range(nv):
            x = sum((c * b[v] for c, b in zip(coeffs, basis)), np.zeros((n.dims[v], m.dims[v]), dtype=np.int64))
            if ffla.rank(x % p, p) != m.dims[v]:
                good = False
                break
        if good:
            return True
    return False


def is_stable(m: Representation, stab: StabilityData, cap: int = DEFAULT_CAP) -> bool:
    """Semistable with no proper nonzero subrepresentation of the same slope."""
    if m.is_zero:
        return False
    mu = slope(m, stab)
    for w in _nonzero(enumerate_subreps(m, cap)):
        if sum(w.dims) == m.total_dim:
            continue
        if stab.slope_of(w.dims) >= mu:
            return False
    return True


def jh_filtration(
    m: Representation, stab: StabilityData, pick_last: bool = False, cap: int = DEFAULT_CAP
) -> list[Representation]:
    """Stable subquotients of one Jordan-Holder filtration.

    Each step removes a smallest nonzero subrepresentation of the common slope;
    ``pick_last`` chooses the last such one in canonical order instead of the
    first, giving a second, generally different filtration.
    """
    if m.is_zero:
        return []
    mu = slope(m, stab)
    subs = [w for w in _nonzero(enumerate_subreps(m, cap)) if stab.slope_of(w.dims) == mu]
    smallest = min(sum(w.dims) for w in subs)
    pool = [w for w in subs if sum(w.dims) == smallest]
    w = pool[-1] if pick_last else pool[0]
    piece = subrepresentation(m, w)
    return [piece] + jh_filtration(quotient(m, w), stab, pick_last, cap)


def _same_multiset(xs: list[Representation], ys: list[Representation], cap: int) -> bool:
    if len(xs) != len(ys):
        return False
    remaining = list(ys)
    for x in xs:
        for i, y in enumerate(remaining):
            if iso_check(x, y, cap):
                del remaining[i]
                break
        else:
            return False
    return True


def jh_graded(m: Representation, stab: StabilityData, cap: int = DEFAULT_CAP) -> list[Representation]:
    """Jordan-Holder graded pieces, checked against a second filtration."""
    if not is_semistable(m, stab, "full", cap=cap):
        raise NotSemistableError("Jordan-Holder pieces need a semistable representation")
    first = jh_filtration(m, stab, False, cap)
    second = jh_filtration(m, stab, True, cap)
    if not _same_multiset(first, second, cap):
        raise MaximalityError("two Jordan-Holder filtrations disagree on their graded pieces")
    return sorted(first, key=lambda r: (r.dims, r._key))


def s_equivalent(
    m: Representation, n: Representation, stab: StabilityData, cap: int = DEFAULT_CAP
) -> bool:
    if m.dims != n.dims:
        raise ValueError(f"dimension vectors differ: {m.dims} vs {n.dims}")
    return _same_multiset(jh_graded(m, stab, cap), jh_graded(n, stab, cap), cap)
