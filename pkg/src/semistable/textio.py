"""Text documents for matrices, representations, models, stability data and complexes.

Every document is YAML whose first line is a versioned header
``# semistable v1 <kind>``.  Matrices are written as strings, rows separated
by ';' and entries by ',' (an empty string is a matrix with no entries).
Example model document::

    # semistable v1 model
    backend: p-adic:5
    quiver: {vertices: 2, arrows: [[0, 1], [0, 1]]}
    dims: [1, 1]
    arrows: ["5", "5"]
    lattices: ["1", "5"]        # optional; the standard model otherwise
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from typing import Any

import yaml

from .det_lines import BasedComplex, ChainMap
from .dvr_linalg import Lattice, format_matrix
from .fields import Field, PrimeField, RationalField
from .lattice_model import KRepresentation, LatticeModel, standard_model
from .quiver import Quiver, Representation, StabilityData
from .valued_field import ValuedField, backend

VERSION = "v1"
KINDS = ("matrix", "torsion", "representation", "model", "stability", "complex", "chainmap")
_HEADER = re.compile(r"^#\s*semistable\s+(v\d+)\s+(\w+)\s*$")


class ParseError(ValueError):
    """Malformed document; the CLI maps it to exit code 2."""


# --- generic ----------------------------------------------------------------------


def header(kind: str) -> str:
    return f"# semistable {VERSION} {kind}\n"


def read_document(text: str, expect: str | tuple[str, ...] | None = None) -> tuple[str, dict]:
    first = text.lstrip().splitlines()[0] if text.strip() else ""
    m = _HEADER.match(first)
    if not m:
        raise ParseError("missing header line '# semistable v1 <kind>'")
    version, kind = m.groups()
    if version != VERSION:
        raise ParseError(f"unsupported document version {version}")
    if kind not in KINDS:
        raise ParseError(f"unknown document kind {kind!r}")
    if expect is not None:
        allowed = (expect,) if isinstance(expect, str) else expect
        if kind not in allowed:
            raise ParseError(f"expected a {' or '.join(allowed)} document, got {kind}")
    try:
        body = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ParseError(f"invalid YAML: {exc}") from None
    if not isinstance(body, dict):
        raise ParseError("document body must be a mapping")
    return kind, body


def dump_document(kind: str, body: dict) -> str:
    return header(kind) + yaml.safe_dump(body, sort_keys=False, default_flow_style=None, width=100)


def dump_json(body: Any) -> str:
    return json.dumps(body, indent=2, sort_keys=False) + "\n"


def _need(body: dict, key: str):
    if key not in body:
        raise ParseError(f"missing field {key!r}")
    return body[key]


def parse_matrix_text(text: str, field, rows: int | None = None, cols: int | None = None) -> list:
    text = "" if text is None else str(text).strip()
    try:
        m = [] if not text else [[field(x.strip()) for x in r.split(",")] for r in text.split(";")]
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad matrix entry in {text!r}: {exc}") from None
    if len({len(r) for r in m}) > 1:
        raise ParseError(f"ragged matrix {text!r}")
    if rows is not None and cols is not None:
        if rows == 0 or cols == 0:
            if m:
                raise ParseError(f"expected an empty {rows}x{cols} matrix, got {text!r}")
            return [[] for _ in range(rows)] if cols == 0 else []
        if len(m) != rows or len(m[0]) != cols:
            got = f"{len(m)}x{len(m[0]) if m else 0}"
            raise ParseError(f"expected a {rows}x{cols} matrix, got {got}")
    return m


def _valued_field(body: dict, override: str | None) -> ValuedField:
    spec = override or body.get("backend")
    if not spec:
        raise ParseError("no backend given (document field 'backend' or --backend)")
    try:
        return backend(str(spec))
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def _plain_field(spec) -> Field:
    s = str(spec).strip()
    if s in ("Q", "QQ", "rationals"):
        return RationalField()
    m = re.fullmatch(r"F_?(\d+)", s)
    if m:
        try:
            return PrimeField(int(m.group(1)))
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError(f"unknown field {s!r}; use Q or F<p>")


def _quiver(body: dict) -> Quiver:
    q = _need(body, "quiver")
    if isinstance(q, str):
        named = {"kronecker": Quiver.kronecker, "a2": Quiver.a2, "loop-tail": Quiver.loop_with_tail}
        if q not in named:
            raise ParseError(f"unknown named quiver {q!r}")
        return named[q]()
    try:
        return Quiver(int(_need(q, "vertices")), tuple(tuple(a) for a in q.get("arrows", [])))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad quiver: {exc}") from None


def _dims(body: dict, quiver: Quiver) -> tuple[int, ...]:
    dims = tuple(int(d) for d in _need(body, "dims"))
    if len(dims) != quiver.vertices or any(d < 0 for d in dims):
        raise ParseError(f"dimension vector {list(dims)} does not fit {quiver.vertices} vertices")
    return dims


def _quiver_body(q: Quiver) -> dict:
    return {"vertices": q.vertices, "arrows": [list(a) for a in q.arrows]}


# --- kinds ------------------------------------------------------------------------


def load_matrix(text: str, backend_override: str | None = None):
    _, body = read_document(text, "matrix")
    field = _valued_field(body, backend_override)
    return parse_matrix_text(_need(body, "matrix"), field), field


def dump_matrix(a, field: ValuedField) -> str:
    return dump_document("matrix", {"backend": field.spec, "matrix": format_matrix(a, field)})


def load_torsion(text: str) -> list[int]:
    _, body = read_document(text, "torsion")
    try:
        return [int(e) for e in _need(body, "exponents")]
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad exponents: {exc}") from None


def load_representation(text: str) -> Representation:
    _, body = read_document(text, "representation")
    q = _quiver(body)
    dims = _dims(body, q)
    p = int(_need(body, "field"))
    field = PrimeField(p)
    mats = _need(body, "arrows")
    if len(mats) != len(q.arrows):
        raise ParseError(f"{len(q.arrows)} arrows need {len(q.arrows)} matrices, got {len(mats)}")
    out = []
    for (s, t), m in zip(q.arrows, mats):
        rows = parse_matrix_text(m, field, dims[t], dims[s])
        out.append([[x.v for x in r] for r in rows] if rows and rows[0] else [[0] * dims[s] for _ in range(dims[t])])
    return Representation(q, p, dims, out)


def dump_representation(r: Representation) -> str:
    mats = [";".join(",".join(str(int(x)) for x in row) for row in m) for m in r.mats]
    return dump_document(
        "representation",
        {"quiver": _quiver_body(r.quiver), "field": r.p, "dims": list(r.dims), "arrows": mats},
    )


def load_model(text: str, backend_override: str | None = None) -> LatticeModel:
    _, body = read_document(text, "model")
    field = _valued_field(body, backend_override)
    q = _quiver(body)
    dims = _dims(body, q)
    mats = _need(body, "arrows")
    if len(mats) != len(q.arrows):
        raise ParseError(f"{len(q.arrows)} arrows need {len(q.arrows)} matrices, got {len(mats)}")
    arrows = [parse_matrix_text(m, field, dims[t], dims[s]) for (s, t), m in zip(q.arrows, mats)]
    rep = KRepresentation(q, field, dims, arrows)
    lats = body.get("lattices")
    if lats is None:
        return standard_model(rep)
    if len(lats) != q.vertices:
        raise ParseError("one lattice basis per vertex is required")
    lattices = []
    for v, text_v in enumerate(lats):
        basis = parse_matrix_text(text_v, field, dims[v], dims[v])
        try:
            lattices.append(Lattice(basis, field) if dims[v] else Lattice([], field))
        except (ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"lattice at vertex {v}: {exc}") from None
    return LatticeModel(rep, tuple(lattices))


def dump_model(model: LatticeModel) -> str:
    rep, field = model.rep, model.field
    return dump_document(
        "model",
        {
            "backend": field.spec,
            "quiver": _quiver_body(rep.quiver),
            "dims": list(rep.dims),
            "arrows": [format_matrix(rep.matrix(i), field) for i in range(len(rep.mats))],
            "lattices": [format_matrix(l.matrix(), field) for l in model.lattices],
        },
    )


def load_stability(text: str) -> StabilityData:
    _, body = read_document(text, "stability")
    try:
        return StabilityData(tuple(tuple(r) for r in _need(body, "theta")), tuple(_need(body, "sigma")))
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad stability data: {exc}") from None


def dump_stability(s: StabilityData) -> str:
    return dump_document("stability", {"theta": [list(r) for r in s.theta], "sigma": list(s.sigma)})


def _complex_from(body: dict) -> BasedComplex:
    field = _plain_field(_need(body, "field"))
    dims = [int(d) for d in _need(body, "dims")]
    start = int(body.get("start", 0))
    diffs_text = body.get("diffs", [])
    if len(diffs_text) != max(len(dims) - 1, 0):
        raise ParseError("need one differential between consecutive degrees")
    diffs = [parse_matrix_text(m, field, dims[i + 1], dims[i]) for i, m in enumerate(diffs_text)]
    try:
        return BasedComplex(field, start, dims, diffs)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def load_complex(text: str) -> BasedComplex:
    _, body = read_document(text, "complex")
    return _complex_from(body)


def load_chain_map(text: str) -> ChainMap:
    _, body = read_document(text, "chainmap")
    src, tgt = _complex_from(_need(body, "source")), _complex_from(_need(body, "target"))
    maps = {}
    for deg, m in (body.get("maps") or {}).items():
        j = int(deg)
        maps[j] = parse_matrix_text(m, src.field, tgt.dim(j), src.dim(j))
    try:
        return ChainMap(src, tgt, maps)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def dump_complex(c: BasedComplex) -> str:
    return dump_document("complex", _complex_body(c))


def _complex_body(c: BasedComplex) -> dict:
    name = "Q" if isinstance(c.field, RationalField) else f"F{c.field.p}"
    return {
        "field": name,
        "start": c.start,
        "dims": list(c.dims),
        "diffs": [";".join(",".join(str(x) for x in r) for r in m) for m in c.diffs],
    }


def dump_chain_map(phi: ChainMap) -> str:
    maps = {int(j): ";".join(",".join(str(x) for x in r) for r in phi.at(j)) for j in phi.degrees}
    return dump_document(
        "chainmap", {"source": _complex_body(phi.source), "target": _complex_body(phi.target), "maps": maps}
    )


# --- plain values -----------------------------------------------------------------


def fmt_fraction(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def fmt_tuple(xs) -> str:
    return "(" + ",".join(fmt_fraction(x) if isinstance(x, Fraction) else str(x) for x in xs) + ")"


# --- traces -----------------------------------------------------------------------


def _lattice_strings(model: LatticeModel) -> list[str]:
    return [format_matrix(l.matrix(), model.field) for l in model.lattices]


def _rep_strings(r: Representation) -> list[str]:
    return [";".join(",".join(str(int(x)) for x in row) for row in m) for m in r.mats]


def trace_to_dict(trace) -> dict:
    """Plain-data view of a ``LangtonTrace`` with a fixed key order."""
    from .lattice_model import reduction

    steps = []
    for rec, fl in zip(trace.steps, trace.flips):
        steps.append(
            {
                "iteration": rec.iteration,
                "codimension": rec.codimension,
                "componentwise_codimension": rec.componentwise_codimension,
                "lattices": _lattice_strings(fl.model),
                "reduction": _rep_strings(reduction(fl.model)),
                "b_dims": list(rec.b_dims),
                "b_slope": fmt_tuple(rec.b_slope),
                "b_bases": [";".join(",".join(str(x) for x in row) for row in b) for b in rec.b_bases],
                "torsion_exponents": [fmt_tuple(t) for t in rec.torsion_exponents],
                "hom_b_g": rec.hom_dim,
            }
        )
    final = trace.final_model
    out = {
        "backend": trace.rep.field.spec,
        "status": trace.status,
        "flags": list(trace.flags),
        "flips": trace.iterations,
        "final_codimension": trace.final_codimension,
        "steps": steps,
        "final": {"lattices": _lattice_strings(final), "reduction": _rep_strings(reduction(final))},
    }
    if trace.certificate is not None:
        out["certificate"] = {
            "semistable": trace.certificate.semistable,
            "subreps_checked": trace.certificate.subreps_checked,
        }
    return out


def dump_trace(trace, as_json: bool = False) -> str:
    body = trace_to_dict(trace)
    if as_json:
        return dump_json(body)
    return "# semistable v1 trace\n" + yaml.safe_dump(body, sort_keys=False, default_flow_style=None, width=100)
