"""Hilbert polynomials, reduced coefficients a_k and the orders used for stability."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

SlopeVector = tuple  # tuple[Fraction, ...]


@dataclass(frozen=True)
class HilbertPolynomial:
    """Polynomial in n with exact rational coefficients, highest degree first."""

    coeffs: tuple[Fraction, ...]

    def __post_init__(self):
        c = [Fraction(x) for x in self.coeffs]
        while c and c[0] == 0:
            c.pop(0)
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_slope(cls, rank, slope: Sequence) -> HilbertPolynomial:
        """rank * (n^m + a_1 n^(m-1) + ... + a_m)."""
        r = Fraction(rank)
        return cls((r,) + tuple(r * Fraction(a) for a in slope))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def __call__(self, n) -> Fraction:
        out = Fraction(0)
        for c in self.coeffs:
            out = out * n + c
        return out

    def __add__(self, other: HilbertPolynomial) -> HilbertPolynomial:
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        a = (Fraction(0),) * (n - len(a)) + a
        b = (Fraction(0),) * (n - len(b)) + b
        return HilbertPolynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> HilbertPolynomial:
        return HilbertPolynomial(tuple(-x for x in self.coeffs))

    def __sub__(self, other: HilbertPolynomial) -> HilbertPolynomial:
        return self + (-other)

    def scaled(self, c) -> HilbertPolynomial:
        return HilbertPolynomial(tuple(Fraction(c) * x for x in self.coeffs))

    def __str__(self) -> str:
        return format_polynomial(self)


def reduced(p: HilbertPolynomial) -> HilbertPolynomial:
    """Divide by the leading coefficient."""
    if p.is_zero:
        raise ValueError("the zero polynomial has no reduced form")
    return p.scaled(1 / p.leading)


def coefficient_a(p: HilbertPolynomial, k: int) -> Fraction:
    """Coefficient of n^(deg - k) in the reduced polynomial; a_0 = 1."""
    if p.is_zero:
        raise ValueError("the zero polynomial has no reduced form")
    if not 0 <= k <= p.degree:
        raise ValueError(f"k = {k} outside 0..{p.degree}")
    return reduced(p).coeffs[k]


def reduced_coefficients(p: HilbertPolynomial) -> SlopeVector:
    """(a_1, ..., a_deg)."""
    return reduced(p).coeffs[1:]


def eventual_compare(p: HilbertPolynomial, q: HilbertPolynomial) -> int:
    """Sign of p(n) - q(n) for all sufficiently large n (-1, 0 or 1)."""
    d = p - q
    if d.is_zero:
        return 0
    return 1 if d.leading > 0 else -1


def cauchy_bound(p: HilbertPolynomial) -> Fraction:
    """Every real root of a nonzero p is strictly below this value."""
    lead = abs(p.leading)
    return 1 + sum((abs(c) for c in p.coeffs[1:]), Fraction(0)) / lead


class Verdict(str, enum.Enum):
    DOMINATES = "dominates"
    DOMINATED = "dominated"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"
    GREATER = "greater"
    LESS = "less"


def truncated_compare(u: Sequence, v: Sequence, k: int, order: str = "componentwise") -> Verdict:
    """Compare the first k coordinates of two slope vectors.

    ``order="componentwise"`` gives DOMINATES (u >= v everywhere, not equal),
    DOMINATED, EQUAL or INCOMPARABLE.  ``order="lex"`` gives GREATER, LESS or
    EQUAL.
    """
    if len(u) != len(v):
        raise ValueError(f"arity mismatch {len(u)} != {len(v)}")
    if not 0 <= k <= len(u):
        raise ValueError(f"k = {k} exceeds arity {len(u)}")
    if order not in ("componentwise", "lex"):
        raise ValueError(f"unknown order {order!r}")
    a, b = tuple(u[:k]), tuple(v[:k])
    if a == b:
        return Verdict.EQUAL
    if order == "lex":
        return Verdict.GREATER if a > b else Verdict.LESS
    if all(x >= y for x, y in zip(a, b)):
        return Verdict.DOMINATES
    if all(x <= y for x, y in zip(a, b)):
        return Verdict.DOMINATED
    return Verdict.INCOMPARABLE


def violates(sub: Sequence, whole: Sequence, k: int, order: str) -> bool:
    """True when a subobject of slope ``sub`` breaks semistability at level k."""
    verdict = truncated_compare(sub, whole, k, order)
    if order == "lex":
        return verdict is Verdict.GREATER
    return verdict in (Verdict.DOMINATES, Verdict.INCOMPARABLE)


# --- text format: "c_d n^d + ... + c_0" --------------------------------------------

_MONO = re.compile(r"^([0-9/]*)\*?(n(?:\^(\d+))?)?$")


def parse_polynomial(text: str) -> HilbertPolynomial:
    s = text.replace(" ", "").replace("-", "+-")
    terms: dict[int, Fraction] = {}
    for raw in s.split("+"):
        if not raw:
            continue
        sign = 1
        if raw.startswith("-"):
            sign, raw = -1, raw[1:]
        m = _MONO.match(raw)
        if not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"cannot parse term {raw!r}")
        c = Fraction(m.group(1)) if m.group(1) else Fraction(1)
        e = (int(m.group(3)) if m.group(3) else 1) if m.group(2) else 0
        terms[e] = terms.get(e, Fraction(0)) + sign * c
    if not terms:
        return HilbertPolynomial(())
    deg = max(terms)
    return HilbertPolynomial(tuple(terms.get(i, Fraction(0)) for i in range(deg, -1, -1)))


def format_polynomial(p: HilbertPolynomial) -> str:
    if p.is_zero:
        return "0"
    parts = []
    for i, c in enumerate(p.coeffs):
        e = p.degree - i
        if c == 0:
            continue
        mono = "" if e == 0 else ("n" if e == 1 else f"n^{e}")
        mag = abs(c)
        body = (str(mag) if mag != 1 or not mono else "") + (" " if mono and mag != 1 else "") + mono
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)
