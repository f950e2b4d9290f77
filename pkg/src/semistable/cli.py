"""Command-line front end.

Exit codes:

    0  success (for ``sequiv``: the two runs are S-equivalent)
    1  ``sequiv``: not S-equivalent; ``catalog``: some family mismatched its golden
    2  parse error, unknown flag, dimension mismatch or violated precondition
    3  non-integral input where an integral one is required
    4  ``langton``/``sequiv``: iteration cap exceeded without semistable reduction
    5  subrepresentation enumeration exceeded ``--enum-cap``
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import textio
from .catalog.runner import FAMILIES, GOLDEN_DIR, run_catalog
from .det_lines import (
    NotChainMapError,
    NotQuasiIsomorphismError,
    det_complex,
    det_iso_of_quasi_iso,
    euler_parity,
    trivialize_acyclic,
)
from .dvr_linalg import NonIntegralError, smith_normal_form
from .langton import DEFAULT_ITERATION_CAP, langton_run, certify_s_equivalence
from .lattice_model import reduction
from .quiver import DEFAULT_CAP, EnumerationCapError, hn_filtration, is_semistable, semistable_codimension
from .torsion import TorsionModule, elementary_divisors, filtration_profiles, graded_iso_check

EXIT_OK, EXIT_FALSE, EXIT_PARSE, EXIT_NONINTEGRAL, EXIT_CAP, EXIT_ENUM = 0, 1, 2, 3, 4, 5


class _Exit(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    p = Path(path)
    if not p.is_file():
        raise _Exit(EXIT_PARSE, f"no such file: {path}")
    return p.read_text()


def _emit(args, lines: list[str], body: dict) -> None:
    sys.stdout.write(textio.dump_json(body) if args.json else "\n".join(lines) + "\n")


def _fmt_mat(m, field) -> str:
    return "[" + "; ".join(" ".join(field.format(x) for x in row) for row in m) + "]"


# --- commands ---------------------------------------------------------------------


def cmd_snf(args) -> int:
    a, field = textio.load_matrix(_read(args.matrix), args.backend)
    snf = smith_normal_form(a, field)
    exps = textio.fmt_tuple(snf.exponents)
    lines = [exps, f"free rank: {snf.free_rank}", f"U = {_fmt_mat(snf.U, field)}", f"V = {_fmt_mat(snf.V, field)}"]
    body = {
        "exponents": list(snf.exponents),
        "free_rank": snf.free_rank,
        "U": textio.format_matrix(snf.U, field),
        "V": textio.format_matrix(snf.V, field),
    }
    _emit(args, lines, body)
    return EXIT_OK


def cmd_torsion(args) -> int:
    text = _read(args.document)
    kind, doc = textio.read_document(text, ("torsion", "matrix"))
    if kind == "matrix":
        a, field = textio.load_matrix(text, args.backend)
        q, free = elementary_divisors(a, field)
    else:
        field = textio._valued_field({"backend": doc.get("backend", "p-adic:2")}, args.backend)
        try:
            q, free = TorsionModule(tuple(textio.load_torsion(text))), 0
        except ValueError as exc:
            raise _Exit(EXIT_PARSE, str(exc)) from None
    prof = filtration_profiles(q, field)
    ranks = graded_iso_check(q, field, rng=random.Random(args.seed)).ranks() if not q.is_zero else {}
    lines = [
        f"exponents {textio.fmt_tuple(q.exponents)}  free rank {free}",
        f"first filtration  {prof.first}",
        f"second filtration {prof.second}",
        "graded " + " ".join(f"{j}:{d}" for j, d in sorted(prof.graded_first.items())),
        "f_i ranks " + " ".join(f"{j}:{r}" for j, r in sorted(ranks.items())),
    ]
    body = {
        "exponents": list(q.exponents),
        "free_rank": free,
        "first": prof.first,
        "second": prof.second,
        "graded_first": {str(k): v for k, v in sorted(prof.graded_first.items())},
        "graded_second": {str(k): v for k, v in sorted(prof.graded_second.items())},
        "map_ranks": {str(k): v for k, v in sorted(ranks.items())},
    }
    _emit(args, lines, body)
    return EXIT_OK


def _finite_rep(args):
    """A representation over F_p: given directly, or as the reduction of a model."""
    text = _read(args.representation)
    kind, _ = textio.read_document(text, ("representation", "model"))
    if kind == "representation":
        return textio.load_representation(text)
    return reduction(textio.load_model(text, args.backend))


def cmd_hn(args) -> int:
    rep = _finite_rep(args)
    stab = textio.load_stability(_read(args.stability))
    _check_arity(rep.quiver.vertices, stab)
    hn = hn_filtration(rep, stab, args.enum_cap)
    lines = [f"HN filtration, {hn.length} step(s)"]
    for w, s in zip(hn.steps, hn.slopes):
        lines.append(f"  dims {list(w.dims)}  slope {textio.fmt_tuple(s)}")
    body = {"steps": [list(w.dims) for w in hn.steps], "slopes": [textio.fmt_tuple(s) for s in hn.slopes]}
    _emit(args, lines, body)
    return EXIT_OK


def cmd_semistable(args) -> int:
    rep = _finite_rep(args)
    stab = textio.load_stability(_read(args.stability))
    _check_arity(rep.quiver.vertices, stab)
    level = "full" if args.level == "full" else int(args.level)
    res = is_semistable(rep, stab, level, args.order, args.enum_cap)
    codim = semistable_codimension(rep, stab, args.order, args.enum_cap)
    lines = [("semistable" if res else "not semistable") + f" at level {args.level}", f"codimension {codim}"]
    body = {"semistable": bool(res), "level": args.level, "order": args.order, "codimension": codim}
    if res.witness is not None:
        lines.append(f"witness dims {list(res.witness.dims)} slope {textio.fmt_tuple(res.witness_slope)}")
        body["witness"] = {"dims": list(res.witness.dims), "slope": textio.fmt_tuple(res.witness_slope)}
    _emit(args, lines, body)
    return EXIT_OK


def _check_arity(vertices: int, stab) -> None:
    if len(stab.sigma) != vertices:
        raise _Exit(EXIT_PARSE, f"stability data has {len(stab.sigma)} weights for {vertices} vertices")


def _run(model, stab, args):
    _check_arity(model.rep.quiver.vertices, stab)
    return langton_run(model.rep, stab, cap=args.cap, model=model, enum_cap=args.enum_cap)


def cmd_langton(args) -> int:
    model = textio.load_model(_read(args.model), args.backend)
    stab = textio.load_stability(_read(args.stability))
    trace = _run(model, stab, args)
    if args.trace:
        Path(args.trace).write_text(textio.dump_trace(trace, args.json or args.trace.endswith(".json")))
    lines = [f"status: {trace.status}", f"flips: {trace.iterations}"]
    if trace.flags:
        lines.append("flags: " + ", ".join(trace.flags))
    red = reduction(trace.final_model)
    lines.append("final reduction: " + " | ".join(textio._rep_strings(red)))
    body = {"status": trace.status, "flips": trace.iterations, "flags": list(trace.flags),
            "final_reduction": textio._rep_strings(red)}
    _emit(args, lines, body)
    return EXIT_OK if trace.terminated else EXIT_CAP


def cmd_sequiv(args) -> int:
    m1 = textio.load_model(_read(args.model1), args.backend)
    m2 = textio.load_model(_read(args.model2), args.backend)
    stab = textio.load_stability(_read(args.stability))
    if m1.rep.quiver != m2.rep.quiver or m1.rep.dims != m2.rep.dims:
        raise _Exit(EXIT_PARSE, f"dimension vectors differ: {list(m1.rep.dims)} vs {list(m2.rep.dims)}")
    t1, t2 = _run(m1, stab, args), _run(m2, stab, args)
    if not (t1.terminated and t2.terminated):
        raise _Exit(EXIT_CAP, "a run hit the iteration cap without semistable reduction")
    try:
        verdict = certify_s_equivalence(t1, t2, args.enum_cap)
    except ValueError as exc:
        raise _Exit(EXIT_PARSE, str(exc)) from None
    pieces = lambda gs: sorted(textio.fmt_tuple(g.dims) for g in gs)
    lines = [
        "S-equivalent" if verdict else "not S-equivalent",
        "graded (first):  " + " ".join(pieces(verdict.graded_first)),
        "graded (second): " + " ".join(pieces(verdict.graded_second)),
        f"flips: {t1.iterations}, {t2.iterations}",
    ]
    body = {
        "equivalent": bool(verdict),
        "graded_first": pieces(verdict.graded_first),
        "graded_second": pieces(verdict.graded_second),
        "flips": [t1.iterations, t2.iterations],
    }
    _emit(args, lines, body)
    return EXIT_OK if verdict else EXIT_FALSE


def cmd_detline(args) -> int:
    text = _read(args.document)
    kind, _ = textio.read_document(text, ("complex", "chainmap"))
    rng = random.Random(args.seed)
    if kind == "complex":
        c = textio.load_complex(text)
        line = det_complex(c)
        lines = [f"parity {line.parity}", f"euler parity {euler_parity(c)}"]
        body = {"parity": line.parity, "euler_parity": euler_parity(c), "acyclic": c.is_acyclic()}
        if c.is_acyclic():
            tau = trivialize_acyclic(c, rng)
            lines.append(f"acyclic; trivialization {tau}")
            body["trivialization"] = str(tau)
        else:
            lines.append("not acyclic; betti " + " ".join(f"{j}:{c.betti(j)}" for j in c.degrees))
            body["betti"] = {str(j): c.betti(j) for j in c.degrees}
    else:
        phi = textio.load_chain_map(text)
        try:
            iso = det_iso_of_quasi_iso(phi, rng)
        except (NotChainMapError, NotQuasiIsomorphismError) as exc:
            raise _Exit(EXIT_PARSE, str(exc)) from None
        lines = [f"det scalar {iso.scalar}"]
        body = {"scalar": str(iso.scalar), "parity": iso.source.parity}
    _emit(args, lines, body)
    return EXIT_OK


def cmd_catalog(args) -> int:
    if args.run != "all":
        unknown = [n for n in args.run.split(",") if n.strip() not in FAMILIES]
        if unknown:
            raise _Exit(EXIT_PARSE, f"unknown family {', '.join(unknown)}; choose from {', '.join(FAMILIES)}")
    results = run_catalog(args.run, Path(args.golden_dir), args.update)
    failed = 0
    for r in results:
        tag = "updated" if args.update else ("PASS" if r.passed else "FAIL")
        print(f"{tag:7} {r.family:8} {r.cases} case(s)")
        if not r.passed:
            failed += 1
            sys.stdout.write(r.diff)
    print(f"{len(results) - failed}/{len(results)} families passed")
    return EXIT_FALSE if failed else EXIT_OK


# --- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--backend", help="override the document backend: p-adic:<p> or t-adic:<p>")
    common.add_argument("--seed", type=int, default=0, help="seed for every random choice (default 0)")
    common.add_argument("--json", action="store_true", help="print a JSON report")
    enum = argparse.ArgumentParser(add_help=False)
    enum.add_argument("--enum-cap", type=int, default=DEFAULT_CAP, help="bound on enumerated subrepresentations")
    loop = argparse.ArgumentParser(add_help=False)
    loop.add_argument("--cap", type=int, default=DEFAULT_ITERATION_CAP, help="iteration cap for the flip loop")

    parser = argparse.ArgumentParser(prog="semistable", description="Semistable reduction toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("snf", parents=[common], help="Smith normal form of a matrix document")
    p.add_argument("matrix")
    p.set_defaults(func=cmd_snf)

    p = sub.add_parser("torsion", parents=[common], help="filtrations of a torsion module")
    p.add_argument("document", help="torsion document (exponents) or matrix document (presentation)")
    p.set_defaults(func=cmd_torsion)

    p = sub.add_parser("hn", parents=[common, enum], help="Harder-Narasimhan filtration")
    p.add_argument("representation", help="representation document, or a model document (uses its reduction)")
    p.add_argument("stability")
    p.set_defaults(func=cmd_hn)

    p = sub.add_parser("semistable", parents=[common, enum], help="semistability at a level")
    p.add_argument("representation")
    p.add_argument("stability")
    p.add_argument("--level", default="full", help="'full' or a truncation level k")
    p.add_argument("--order", choices=("componentwise", "lex"), default="componentwise")
    p.set_defaults(func=cmd_semistable)

    p = sub.add_parser("langton", parents=[common, enum, loop], help="run the semistable-reduction loop")
    p.add_argument("model")
    p.add_argument("stability")
    p.add_argument("--trace", help="write the full trace here (YAML, or JSON with --json or a .json name)")
    p.set_defaults(func=cmd_langton)

    p = sub.add_parser("sequiv", parents=[common, enum, loop], help="S-equivalence of two runs")
    p.add_argument("model1")
    p.add_argument("model2")
    p.add_argument("stability")
    p.set_defaults(func=cmd_sequiv)

    p = sub.add_parser("detline", parents=[common], help="determinant line of a complex or chain map")
    p.add_argument("document")
    p.set_defaults(func=cmd_detline)

    p = sub.add_parser("catalog", parents=[common], help="run the regression catalog")
    p.add_argument("--run", default="all", help="'all' or comma-separated families: " + ", ".join(FAMILIES))
    p.add_argument("--golden-dir", default=str(GOLDEN_DIR))
    p.add_argument("--update", action="store_true", help="rewrite the goldens from the current output")
    p.set_defaults(func=cmd_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except NonIntegralError as exc:
        print(f"error: non-integral input: {exc}", file=sys.stderr)
        return EXIT_NONINTEGRAL
    except EnumerationCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ENUM
    except (textio.ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
