"""Elementary modifications of lattice models and the semistable-reduction loop.

Given a model L and a subrepresentation B_0 of its reduction, the flip is

    L'_v = { x in L_v : x mod pi lies in B_0 }.

Multiplication by pi and the inclusion L' -> L induce the exact sequence
0 -> G_0 -> L'_0 -> B_0 -> 0 with G_0 = L_0 / B_0, which is checked on
explicit bases every time.  Repeating the flip at the maximal destabilizing
subobject of the reduction drives a model of a semistable representation to
one with semistable reduction.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import fields as F
from . import ffla
from .dvr_linalg import Lattice, MatrixK, lift_matrix, quotient_torsion, residue_matrix
from .lattice_model import (
    KRepresentation,
    LatticeModel,
    ModelComparison,
    compare_models,
    reduction,
    standard_model,
)
from .quiver import (
    DEFAULT_CAP,
    EnumerationCapError,
    Representation,
    StabilityData,
    SubrepWitness,
    canonical_witness,
    enumerate_subreps,
    hom_space,
    is_invariant,
    is_semistable,
    jh_graded,
    maximal_destabilizing,
    quotient,
    s_equivalent,
    semistable_codimension,
    subrepresentation,
)
from .torsion import VerificationError

log = logging.getLogger(__name__)

DEFAULT_ITERATION_CAP = 256
SEMISTABLE = "semistable-reduction"
CAP_EXCEEDED = "cap-exceeded"


# --- the flip -----------------------------------------------------------------------


@dataclass
class ExactSequenceCheck:
    """Matrices of G_0 -> L'_0 (phi, induced by pi) and L'_0 -> L_0 (psi, the inclusion)."""

    phi: list[np.ndarray]
    psi: list[np.ndarray]
    dims_g: tuple[int, ...]
    dims_b: tuple[int, ...]
    dims_new: tuple[int, ...]
    torsion_exponents: list[tuple[int, ...]]


@dataclass
class FlipStep:
    model: LatticeModel
    b0: SubrepWitness
    g0: Representation
    output: LatticeModel
    check: ExactSequenceCheck
    hom_dim: int  # dim Hom(B_0, G_0); the non-splitting argument wants 0

    @property
    def warnings(self) -> list[str]:
        if self.hom_dim:
            return [f"Hom(B_0, G_0) has dimension {self.hom_dim}; the sequence may split"]
        return []


def _lift_basis(model: LatticeModel, v: int, basis: np.ndarray) -> MatrixK:
    """Ambient K-vectors lifting a basis of a subspace of L_v / pi L_v."""
    field = model.field
    d = model.rep.dims[v]
    if basis.shape[1] == 0:
        return [[] for _ in range(d)]
    return F.matmul(model.lattices[v].matrix(), lift_matrix(basis, field), field)


def flip(model: LatticeModel, b0: SubrepWitness) -> FlipStep:
    """Elementary modification of ``model`` along ``b0``, with the exact sequence verified."""
    field, p = model.field, model.field.p
    red = reduction(model)
    if len(b0.bases) != red.quiver.vertices:
        raise ValueError("witness does not match the representation")
    b0 = canonical_witness(b0.bases, p)
    if not is_invariant(red, b0):
        raise ValueError("B_0 is not a subrepresentation of the reduction")
    pi = field.uniformizer()
    new_lats = []
    for v, d in enumerate(model.rep.dims):
        if not d:
            new_lats.append(model.lattices[v])
            continue
        gens = F.hstack(lift_matrix(b0.bases[v], field), F.scale_identity(d, pi, field))
        new_lats.append(Lattice(F.matmul(model.lattices[v].matrix(), gens, field), field))
    out = LatticeModel(model.rep, tuple(new_lats))
    check = _verify_sequence(model, out, b0)
    g0 = quotient(red, b0)
    hom_dim = len(hom_space(subrepresentation(red, b0), g0))
    step = FlipStep(model, b0, g0, out, check, hom_dim)
    for w in step.warnings:
        log.warning(w)
    return step


def _verify_sequence(model: LatticeModel, out: LatticeModel, b0: SubrepWitness) -> ExactSequenceCheck:
    field, p = model.field, model.field.p
    pi = field.uniformizer()
    phis, psis, exps = [], [], []
    for v, d in enumerate(model.rep.dims):
        big, small = model.lattices[v], out.lattices[v]
        if not d:
            phis.append(np.zeros((0, 0), dtype=np.int64))
            psis.append(np.zeros((0, 0), dtype=np.int64))
            exps.append(())
            continue
        tors = quotient_torsion(small, big)  # raises unless L' is inside L
        if any(e != 1 for e in tors.exponents) or tors.length != d - b0.dims[v]:
            raise VerificationError(f"L / L' at vertex {v} is {tors.exponents}, expected all ones")
        if quotient_torsion(Lattice([[pi * x for x in r] for r in big.matrix()], field), small).length != b0.dims[v]:
            raise VerificationError(f"pi L is not inside L' with the right index at vertex {v}")
        exps.append(tors.exponents)
        # phi: L_0 -> L'_0, x -> pi x; it must vanish exactly on B_0
        phi = residue_matrix(small.coords([[pi * x for x in r] for r in big.matrix()]), field)
        # psi: L'_0 -> L_0 induced by the inclusion; its image must be B_0
        psi = residue_matrix(big.coords(small.matrix()), field)
        ker_phi = ffla.span(ffla.nullspace(phi, p), p)
        if ffla.key(ker_phi) != ffla.key(b0.bases[v]):
            raise VerificationError(f"kernel of multiplication by pi is not B_0 at vertex {v}")
        if ffla.key(ffla.span(psi, p)) != ffla.key(b0.bases[v]):
            raise VerificationError(f"image of L'_0 in L_0 is not B_0 at vertex {v}")
        if ffla.key(ffla.span(ffla.nullspace(psi, p), p)) != ffla.key(ffla.span(phi, p)):
            raise VerificationError(f"sequence is not exact in the middle at vertex {v}")
        if ffla.rank(phi, p) + ffla.rank(psi, p) != d:
            raise VerificationError(f"dimensions of G_0 and B_0 do not add up at vertex {v}")
        phis.append(phi)
        psis.append(psi)
    red_old, red_new = reduction(model), reduction(out)
    for i, (s, t) in enumerate(model.rep.quiver.arrows):
        if not model.rep.dims[s] or not model.rep.dims[t]:
            continue
        if not np.array_equal((phis[t] @ red_old.mats[i]) % p, (red_new.mats[i] @ phis[s]) % p):
            raise VerificationError(f"phi does not commute with arrow ({s},{t})")
        if not np.array_equal((psis[t] @ red_new.mats[i]) % p, (red_old.mats[i] @ psis[s]) % p):
            raise VerificationError(f"psi does not commute with arrow ({s},{t})")
    dims_b = b0.dims
    dims_g = tuple(d - b for d, b in zip(model.rep.dims, dims_b))
    return ExactSequenceCheck(phis, psis, dims_g, dims_b, model.rep.dims, exps)


def image_of_g(step: FlipStep) -> SubrepWitness:
    """Image of G_0 inside the new reduction L'_0."""
    return canonical_witness(step.check.phi, step.model.field.p)


def sequence_splits(step: FlipStep, cap: int = DEFAULT_CAP) -> bool:
    """True iff some subrepresentation of L'_0 maps isomorphically onto B_0."""
    p = step.model.field.p
    if not any(step.b0.dims):
        return True
    red = reduction(step.output)
    kernel = image_of_g(step)
    for s in enumerate_subreps(red, cap, dims=step.b0.dims):
        if all(ffla.intersect(a, b, p).shape[1] == 0 for a, b in zip(s.bases, kernel.bases)):
            return True
    return False


# --- lift level ---------------------------------------------------------------------


@dataclass
class LiftLevel:
    level: int
    reached_cap: bool
    nodes: int
    hom_dim: int

    def __str__(self) -> str:
        return f"lifts at all tested levels (>= {self.level})" if self.reached_cap else str(self.level)


def max_lift_level(model: LatticeModel, b0: SubrepWitness, cap: int = 8, node_cap: int = 10**5) -> LiftLevel:
    """Largest j <= cap such that B_0 lifts to an arrow-stable free summand mod pi^j.

    A lift at vertex v is written in graph form over the pivot rows of B_0's
    canonical basis: identity on the pivot rows and a matrix X_v on the other
    rows.  Lifts mod pi^(j+1) of a given lift mod pi^j are X_v + pi^j Y_v with
    Y_v over F_p; all of them are enumerated.
    """
    field, p = model.field, model.field.p
    red = reduction(model)
    b0 = canonical_witness(b0.bases, p)
    if not is_invariant(red, b0):
        raise ValueError("B_0 is not a subrepresentation of the reduction")
    hom_dim = len(hom_space(subrepresentation(red, b0), quotient(red, b0)))
    nv = model.rep.quiver.vertices
    arrows = [model.arrow(i) for i in range(len(model.rep.mats))]
    pivs, rests = [], []
    for v in range(nv):
        piv = ffla.pivots_of(b0.bases[v])
        pivs.append(piv)
        rests.append([i for i in range(model.rep.dims[v]) if i not in piv])
    x0 = [lift_matrix(b0.bases[v][rests[v], :], field) for v in range(nv)]
    slots = [(v, a, b) for v in range(nv) for a in range(len(rests[v])) for b in range(b0.dims[v])]

    def section(xs, v):
        d, r = model.rep.dims[v], b0.dims[v]
        out = F.zeros(d, r, field)
        for c, row in enumerate(pivs[v]):
            out[row][c] = field.one
        for a, row in enumerate(rests[v]):
            for c in range(r):
                out[row][c] = xs[v][a][c]
        return out

    def error_valuation(xs) -> int | float:
        worst = float("inf")
        for i, (s, t) in enumerate(model.rep.quiver.arrows):
            if not b0.dims[s] or not model.rep.dims[t]:
                continue
            w = F.matmul(arrows[i], section(xs, s), field)
            for a, row in enumerate(rests[t]):
                for c in range(b0.dims[s]):
                    e = w[row][c] - sum((xs[t][a][k] * w[pr][c] for k, pr in enumerate(pivs[t])), field.zero)
                    worst = min(worst, field.valuation(e))
        return worst

    nodes = 0
    best = 1

    def search(xs, j) -> bool:
        nonlocal nodes, best
        best = max(best, j)
        if j >= cap:
            return True
        step = field.pi_power(j)
        for ys in itertools.product(range(p), repeat=len(slots)):
            nodes += 1
            if nodes > node_cap:
                raise EnumerationCapError(f"lift search exceeded {node_cap} nodes")
            nxt = [[list(r) for r in m] for m in xs]
            for (v, a, c), y in zip(slots, ys):
                if y:
                    nxt[v][a][c] = nxt[v][a][c] + field.lift(y) * step
            if error_valuation(nxt) >= j + 1 and search(nxt, j + 1):
                return True
        return False

    reached = search(x0, 1)
    return LiftLevel(best, reached, nodes, hom_dim)


# --- the loop -----------------------------------------------------------------------


@dataclass
class StepRecord:
    iteration: int
    codimension: int
    componentwise_codimension: int
    b_dims: tuple[int, ...]
    b_rank: int
    b_slope: tuple[Fraction, ...]  # a_1 .. a_(k+1) of B
    b_bases: list[list[list[int]]]
    torsion_exponents: list[tuple[int, ...]]
    hom_dim: int


@dataclass
class Certificate:
    """Independent re-check of the final reduction."""

    reduction: Representation
    semistable: bool
    subreps_checked: int


@dataclass
class LangtonTrace:
    rep: KRepresentation
    stability: StabilityData
    initial: LatticeModel
    steps: list[StepRecord] = dc_field(default_factory=list)
    flips: list[FlipStep] = dc_field(default_factory=list)
    status: str = CAP_EXCEEDED
    flags: list[str] = dc_field(default_factory=list)
    final_model: LatticeModel | None = None
    final_codimension: int = 0
    certificate: Certificate | None = None

    @property
    def terminated(self) -> bool:
        return self.status == SEMISTABLE

    @property
    def iterations(self) -> int:
        return len(self.steps)


def lift_witness(model: LatticeModel, b0: SubrepWitness) -> list[MatrixK]:
    return [_lift_basis(model, v, b) for v, b in enumerate(b0.bases)]


def _k_invariant(rep: KRepresentation, bases: list[MatrixK]) -> bool:
    field = rep.field
    for i, (s, t) in enumerate(rep.quiver.arrows):
        if not bases[s] or not bases[s][0]:
            continue
        img = F.matmul(rep.matrix(i), bases[s], field)
        r_t = len(bases[t][0]) if bases[t] else 0
        if F.rank(F.hstack(bases[t], img) if r_t else img, field) != r_t:
            return False
    return True


def certify(model: LatticeModel, stab: StabilityData, cap: int = DEFAULT_CAP) -> Certificate:
    red = reduction(model)
    subs = enumerate_subreps(red, cap)
    return Certificate(red, is_semistable(red, stab, "full", subreps=subs).semistable, len(subs))


def langton_run(
    rep: KRepresentation,
    stab: StabilityData,
    cap: int = DEFAULT_ITERATION_CAP,
    model: LatticeModel | None = None,
    enum_cap: int = DEFAULT_CAP,
) -> LangtonTrace:
    """Flip at maximal destabilizing subobjects until the reduction is semistable.

    The semistable codimension and the destabilizers use the lexicographic
    order on truncated slope vectors.  A model revisited at the same
    codimension (up to rescaling each linked group of vertices) stops the run
    with the ``periodic`` flag; a destabilizer whose lift is already stable
    under the arrows over K adds the ``unstable-witness`` flag, since such a
    lift destabilizes the representation itself.
    """
    model = model if model is not None else standard_model(rep)
    trace = LangtonTrace(rep, stab, model)
    seen: dict[tuple, int] = {}
    for it in range(cap + 1):
        red = reduction(model)
        subs = enumerate_subreps(red, enum_cap)
        k = semistable_codimension(red, stab, "lex", subreps=subs)
        key = model.canonical_key()
        if k == stab.arity:
            trace.status = SEMISTABLE
            break
        if seen.get(key) == k:
            trace.flags.append("periodic")
            break
        seen[key] = k
        if it == cap:
            break
        b0 = maximal_destabilizing(red, stab, k + 1, subreps=subs)
        if "unstable-witness" not in trace.flags and _k_invariant(rep, lift_witness(model, b0)):
            trace.flags.append("unstable-witness")
        step = flip(model, b0)
        trace.flips.append(step)
        trace.steps.append(
            StepRecord(
                iteration=it,
                codimension=k,
                componentwise_codimension=semistable_codimension(red, stab, "componentwise", subreps=subs),
                b_dims=b0.dims,
                b_rank=sum(b0.dims),
                b_slope=stab.slope_of(b0.dims)[: k + 1],
                b_bases=[b.tolist() for b in b0.bases],
                torsion_exponents=step.check.torsion_exponents,
                hom_dim=step.hom_dim,
            )
        )
        model = step.output
    trace.final_model = model
    trace.final_codimension = k
    if trace.status == SEMISTABLE:
        trace.certificate = certify(model, stab, enum_cap)
        if not trace.certificate.semistable:
            raise VerificationError("final reduction failed the independent semistability check")
    return trace


def trace_invariants_hold(trace: LangtonTrace) -> bool:
    """Codimension never drops; at fixed codimension k, (a_(k+1)(B), rank B) never grows."""
    prev = None
    for rec in trace.steps:
        if prev is not None:
            if rec.codimension < prev.codimension:
                return False
            if rec.codimension == prev.codimension:
                k = rec.codimension
                if (rec.b_slope[k], rec.b_rank) > (prev.b_slope[k], prev.b_rank):
                    return False
        prev = rec
    return True


# --- S-equivalence of two runs -------------------------------------------------------


@dataclass
class SEquivalence:
    equivalent: bool
    comparison: ModelComparison
    graded_first: list[Representation]
    graded_second: list[Representation]

    def __bool__(self) -> bool:
        return self.equivalent


def certify_s_equivalence(run1: LangtonTrace, run2: LangtonTrace, cap: int = DEFAULT_CAP) -> SEquivalence:
    if run1.rep != run2.rep or run1.stability != run2.stability:
        raise ValueError("runs are over different representations or stability data")
    if not (run1.terminated and run2.terminated):
        raise ValueError("both runs must end with a semistable reduction")
    r1, r2 = reduction(run1.final_model), reduction(run2.final_model)
    comparison = compare_models(run1.final_model, run2.final_model)
    equivalent = s_equivalent(r1, r2, run1.stability, cap)
    return SEquivalence(equivalent, comparison, jh_graded(r1, run1.stability, cap), jh_graded(r2, run2.stability, cap))


def flip_sequence(model: LatticeModel, witnesses: Sequence[SubrepWitness]) -> list[FlipStep]:
    out = []
    for w in witnesses:
        step = flip(model, w)
        out.append(step)
        model = step.output
    return out
