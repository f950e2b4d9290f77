"""Regression catalog: named families of worked examples with stored expected output.

Each family is a function returning an ordered mapping from case name to a
plain value (strings, ints, lists).  The YAML rendering of that mapping is
compared byte for byte with ``goldens/<family>.yaml``; a mismatch prints a
unified diff.
"""

from __future__ import annotations

import difflib
import random
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable

import yaml

from .. import fields as F
from ..det_lines import (
    BasedComplex,
    ChainMap,
    det_complex,
    det_iso_of_quasi_iso,
    identity_map,
    pullback_compat_check,
    trivialize_acyclic,
)
from ..dvr_linalg import (
    Lattice,
    determinantal_exponents,
    hermite_form,
    lattice_intersection,
    lattice_scale,
    lattice_sum,
    quotient_torsion,
    smith_normal_form,
)
from ..hilbert import (
    HilbertPolynomial,
    coefficient_a,
    eventual_compare,
    format_polynomial,
    parse_polynomial,
    reduced,
    truncated_compare,
)
from ..langton import flip, image_of_g, langton_run, max_lift_level, sequence_splits
from ..lattice_model import (
    KRepresentation,
    LatticeModel,
    compare_models,
    reduction,
    saturate_submodel,
    standard_model,
)
from ..quiver import (
    Quiver,
    Representation,
    StabilityData,
    canonical_witness,
    enumerate_subreps,
    hn_filtration,
    is_semistable,
    iso_check,
    jh_graded,
    maximal_destabilizing,
)
from ..torsion import TorsionModule, elementary_divisors, filtration_profiles, graded_iso_check
from ..valued_field import PAdicField, TAdicField
from .inputs import P5, SEMISTABLE_CASES, THETA_10, UNSTABLE_CASES, kronecker_11

GOLDEN_DIR = Path(__file__).parent / "goldens"


def _tup(xs) -> str:
    return "(" + ",".join(_num(x) for x in xs) + ")"


def _num(x) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return str(x)


def _mats(r: Representation) -> list[str]:
    return [";".join(",".join(str(int(x)) for x in row) for row in m) for m in r.mats]


def _basis(field, lat: Lattice) -> str:
    return ";".join(",".join(field.format(x) for x in row) for row in lat.matrix())


# --- families ---------------------------------------------------------------------


def family_field() -> dict:
    p5, t3, t2 = PAdicField(5), TAdicField(3), TAdicField(2)
    return {
        "valuation p5 50": p5.valuation(p5(50)),
        "valuation p5 0": str(p5.valuation(p5(0))),
        "valuation t3 t^2/(1+t)": t3.valuation(t3.parse("t^2/(1+t)")),
        "residue p5 7/3": p5.residue(p5(Fraction(7, 3))),
        "residue p5 1": p5.residue(p5(1)),
        "residue t3 (1+t)/(1+2t)": t3.residue(t3.parse("(1+t)/(1+2t)")),
        "uniformizer p5": p5.format(p5.uniformizer()),
        "uniformizer t2": t2.format(t2.uniformizer()),
        "valuation of uniformizer t2": t2.valuation(t2.uniformizer()),
    }


def family_snf() -> dict:
    out = {}
    for name, m in [
        ("diag(5,25)", [[5, 0], [0, 25]]),
        ("identity", [[1, 0], [0, 1]]),
        ("[[5,5],[5,30]]", [[5, 5], [5, 30]]),
        ("zero 2x2", [[0, 0], [0, 0]]),
        ("[[2,3],[4,5]]", [[2, 3], [4, 5]]),
    ]:
        a = [[P5(x) for x in r] for r in m]
        snf = smith_normal_form(a, P5)
        out[name] = {
            "exponents": _tup(snf.exponents),
            "free_rank": snf.free_rank,
            "oracle": _tup(determinantal_exponents(a, P5)),
        }
    return out


def family_lattice() -> dict:
    f = P5
    std = Lattice.standard(2, f)
    pi_std = lattice_scale(std, 1)
    l1 = Lattice([[f(1), f(0)], [f(0), f(5)]], f)
    l2 = Lattice([[f(5), f(0)], [f(0), f(1)]], f)
    l3 = Lattice([[f(5), f(0)], [f(0), f(25)]], f)
    return {
        "sum(pi O^2, O^2)": _basis(f, lattice_sum(pi_std, std)),
        "intersection(O^2, O^2)": _basis(f, lattice_intersection(std, std)),
        "intersection(diag(1,5), diag(5,1))": _basis(f, lattice_intersection(l1, l2)),
        "hermite of diag(5,5)": ";".join(",".join(f.format(x) for x in r) for r in hermite_form([[f(5), f(0)], [f(0), f(5)]], f)),
        "torsion O^2/pi O^2": _tup(quotient_torsion(pi_std, std).exponents),
        "torsion O^2/O^2": _tup(quotient_torsion(std, std).exponents),
        "torsion O^2/<(5,0),(0,25)>": _tup(quotient_torsion(l3, std).exponents),
    }


def family_torsion() -> dict:
    out = {}
    for name, m in [("diag(5,25)", [[5, 0], [0, 25]]), ("zero 2x2", [[0, 0], [0, 0]]), ("[[5,5],[5,30]]", [[5, 5], [5, 30]])]:
        t, free = elementary_divisors([[P5(x) for x in r] for r in m], P5)
        out[f"elementary divisors {name}"] = {"torsion": _tup(t.exponents), "free_rank": free}
    for exps in [(1, 2), (), (3,), (1,), (2, 2), (1, 1, 3)]:
        q = TorsionModule(exps)
        prof = filtration_profiles(q, P5)
        iso = graded_iso_check(q, P5, rng=random.Random(0)) if exps else None
        out[f"profiles {_tup(exps)}"] = {
            "first": prof.first,
            "second": prof.second,
            "graded_first": dict(sorted(prof.graded_first.items())),
            "graded_second": dict(sorted(prof.graded_second.items())),
            "map_ranks": dict(sorted(iso.ranks().items())) if iso else {},
        }
    return out


def family_hilbert() -> dict:
    P = parse_polynomial
    out = {
        "reduced 2n^2+4n": format_polynomial(reduced(P("2n^2 + 4n"))),
        "reduced n^3": format_polynomial(reduced(P("n^3"))),
        "reduced -3n+6": format_polynomial(reduced(P("-3n + 6"))),
        "a_1 of n^2+2n+1": _num(coefficient_a(P("n^2 + 2n + 1"), 1)),
        "a_0 of n^2+5": _num(coefficient_a(P("n^2 + 5"), 0)),
        "a_1 of 3n^2+6n": _num(coefficient_a(P("3n^2 + 6n"), 1)),
        "compare n^2+3n vs n^2+2n+100": eventual_compare(P("n^2 + 3n"), P("n^2 + 2n + 100")),
        "compare n vs n^2": eventual_compare(P("n"), P("n^2")),
        "compare p vs p": eventual_compare(P("n^2 + 1"), P("n^2 + 1")),
    }
    for u, v, k, order in [((1, 5), (1, 3), 1, "componentwise"), ((2, 0), (1, 9), 2, "componentwise"), ((2, 0), (1, 9), 2, "lex")]:
        out[f"truncated {_tup(u)} vs {_tup(v)} k={k} {order}"] = truncated_compare(u, v, k, order).value
    return out


def _rep(quiver, p, dims, mats) -> Representation:
    return Representation(quiver, p, dims, mats)


def family_quiver() -> dict:
    kr, a2 = Quiver.kronecker(), Quiver.a2()
    one = Quiver(1, ())
    out = {
        "subreps zero d=(1) F2": len(enumerate_subreps(_rep(one, 2, (1,), []))),
        "subreps A2 arrow 0 F2": len(enumerate_subreps(_rep(a2, 2, (1, 1), [[[0]]]))),
        "subreps A2 arrow 1 F2": len(enumerate_subreps(_rep(a2, 2, (1, 1), [[[1]]]))),
        "slope kronecker (1,1)": _tup(THETA_10.slope_of((1, 1))),
        "slope (2,1) two-level": _tup(StabilityData(((1, 0), (0, 1)), (1, 1)).slope_of((2, 1))),
    }
    k10 = _rep(kr, 5, (1, 1), [[[1]], [[0]]])
    k00 = _rep(kr, 5, (1, 1), [[[0]], [[0]]])
    res = is_semistable(k00, THETA_10)
    out["semistable kronecker (1,0) F5"] = bool(is_semistable(k10, THETA_10))
    out["semistable kronecker (0,0) F5"] = {
        "semistable": bool(res),
        "witness": list(res.witness.dims),
        "witness_slope": _tup(res.witness_slope),
    }
    m = _rep(a2, 5, (1, 1), [[[0]]])
    hn = hn_filtration(m, THETA_10)
    out["hn A2 arrow 0"] = {"dims": [list(w.dims) for w in hn.steps], "slopes": [_tup(s) for s in hn.slopes]}
    out["max destabilizing A2 arrow 0 k=1"] = list(maximal_destabilizing(m, THETA_10, 1).dims)
    out["jh kronecker (1,1) F5"] = len(jh_graded(_rep(kr, 5, (1, 1), [[[1]], [[1]]]), THETA_10))
    out["iso kronecker (1,0) vs (0,1) F2"] = iso_check(_rep(kr, 2, (1, 1), [[[1]], [[0]]]), _rep(kr, 2, (1, 1), [[[0]], [[1]]]))
    return out


def family_model() -> dict:
    f = P5
    out = {}
    std = standard_model(kronecker_11(f, Fraction(1, 5), 1))
    out["standard (1/5,1)"] = {
        "lattices": [_basis(f, l) for l in std.lattices],
        "reduction": _mats(reduction(std)),
    }
    k55 = kronecker_11(f, 5, 5)
    flipped = LatticeModel(k55, (Lattice.standard(1, f), Lattice.standard(1, f, 1)))
    out["reduction (5,5) on (O, pi O)"] = _mats(reduction(flipped))
    cmp = compare_models(standard_model(k55), flipped)
    out["compare (5,5) standard vs (O, pi O)"] = {
        "shift": cmp.shift,
        "torsion": [_tup(t.exponents) for t in cmp.torsion],
        "graded_dims": [list(cmp.graded_first[i].dims) for i in cmp.nonzero_levels()],
    }
    single = KRepresentation(Quiver(1, ()), f, (2,), [])
    sat = saturate_submodel([[[Fraction(1, 5)], [f(1)]]], standard_model(single))
    out["saturation of (1/5,1) in O^2"] = {
        "sub_basis": ";".join(",".join(f.format(x) for x in r) for r in sat.sub_bases[0]),
        "quotient_dims": list(sat.quotient.rep.dims),
    }
    return out


def family_langton() -> dict:
    f = P5
    out = {}
    k55 = standard_model(kronecker_11(f, 5, 5))
    step = flip(k55, canonical_witness(reduction(k55).full().bases[:1] + (reduction(k55).zero().bases[1],), f.p))
    out["flip (5,5) at (k,0)"] = {
        "lattices": [_basis(f, l) for l in step.output.lattices],
        "reduction": _mats(reduction(step.output)),
        "hom_dim": step.hom_dim,
        "splits": sequence_splits(step),
        "image_of_g": list(image_of_g(step).dims),
    }
    k2525 = standard_model(kronecker_11(f, 25, 25))
    b0 = step.b0
    out["lift level (5,5)"] = str(max_lift_level(k55, b0))
    out["lift level (25,25)"] = str(max_lift_level(k2525, b0))
    out["lift level (0,0)"] = str(max_lift_level(standard_model(kronecker_11(f, 0, 0)), b0, cap=4))
    for case in SEMISTABLE_CASES + UNSTABLE_CASES:
        tr = langton_run(case.build(), case.stability, cap=16)
        out[f"run {case.name}"] = {
            "status": tr.status,
            "flips": tr.iterations,
            "flags": list(tr.flags),
            "final_reduction": _mats(reduction(tr.final_model)),
        }
    return out


def family_detline() -> dict:
    q = F.RationalField()
    out = {}
    line = BasedComplex(q, 0, [1], [])
    out["det rank-1 degree 0"] = {"parity": det_complex(line).parity, "scalar": str(det_complex(line).scalar)}
    zero = BasedComplex(q, 0, [], [])
    out["det zero complex"] = {"parity": det_complex(zero).parity, "scalar": str(det_complex(zero).scalar)}
    ident = BasedComplex(q, 0, [2, 2], [[[1, 0], [0, 1]]])
    out["tau V -id-> V"] = str(trivialize_acyclic(ident))
    diag = BasedComplex(q, 0, [2, 2], [[[2, 0], [0, 3]]])
    out["tau V -diag(2,3)-> V"] = str(trivialize_acyclic(diag))
    three = BasedComplex(q, 0, [1, 2, 1], [[[1], [0]], [[0, 1]]])
    out["tau k -> k^2 -> k"] = str(trivialize_acyclic(three))
    out["det identity map"] = str(det_iso_of_quasi_iso(identity_map(ident)).scalar)
    c7 = ChainMap(line, line, {0: [[q(7)]]})
    out["det scalar 7 on a line"] = str(det_iso_of_quasi_iso(c7).scalar)
    f2 = F.PrimeField(2)
    f4 = F.ExtensionField(f2, [1, 1, 1])
    c2 = BasedComplex(f2, 0, [2, 2], [[[1, 1], [0, 1]]])
    out["base change F2 -> F4"] = pullback_compat_check(f4, c2)
    qsqrt2 = F.ExtensionField(q, [-2, 0, 1])
    out["base change Q -> Q(sqrt 2) diag(2,3)"] = pullback_compat_check(qsqrt2, diag)
    return out


FAMILIES: dict[str, Callable[[], dict]] = {
    "field": family_field,
    "snf": family_snf,
    "lattice": family_lattice,
    "torsion": family_torsion,
    "hilbert": family_hilbert,
    "quiver": family_quiver,
    "model": family_model,
    "langton": family_langton,
    "detline": family_detline,
}


# --- running ----------------------------------------------------------------------


@dataclass
class FamilyResult:
    family: str
    passed: bool
    cases: int
    diff: str


def render(family: str) -> str:
    return yaml.safe_dump(FAMILIES[family](), sort_keys=False, default_flow_style=None, width=100, allow_unicode=True)


def run_family(family: str, golden_dir: Path = GOLDEN_DIR, update: bool = False) -> FamilyResult:
    if family not in FAMILIES:
        raise KeyError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    text = render(family)
    cases = len(yaml.safe_load(text))
    path = Path(golden_dir) / f"{family}.yaml"
    if update:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
        return FamilyResult(family, True, cases, "")
    expected = path.read_text() if path.exists() else ""
    if expected == text:
        return FamilyResult(family, True, cases, "")
    diff = "".join(
        difflib.unified_diff(
            expected.splitlines(keepends=True), text.splitlines(keepends=True), f"golden/{family}.yaml", f"actual/{family}.yaml"
        )
    )
    return FamilyResult(family, False, cases, diff or f"golden file {path} missing\n")


def run_catalog(which: str = "all", golden_dir: Path = GOLDEN_DIR, update: bool = False) -> list[FamilyResult]:
    names = list(FAMILIES) if which == "all" else [n.strip() for n in which.split(",")]
    return [run_family(n, golden_dir, update) for n in names]
