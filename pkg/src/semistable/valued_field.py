"""Discretely valued fields with finite residue field F_p.

Two backends share one interface:

* ``PAdicField(p)``: K = Q with the p-adic valuation, elements are ``Fraction``.
* ``TAdicField(p)``: K = F_p(t) with the order of vanishing at t = 0,
  elements are ``RatFunc``.

The value group is Z; the valuation of zero is ``math.inf``.
"""

from __future__ import annotations

import math
import random
import re
from fractions import Fraction
from typing import Union

from .fields import Field, PrimeField, is_prime

INF = math.inf
MAX_PRIME = 13


# --- polynomials over F_p as int tuples, low degree first ----------------------


def _trim(a: list[int]) -> tuple[int, ...]:
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def _padd(a, b, p):
    n = max(len(a), len(b))
    return _trim([((a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)) % p for i in range(n)])


def _pneg(a, p):
    return tuple((-x) % p for x in a)


def _pmul(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _trim(out)


def _pscale(a, c, p):
    return _trim([(x * c) % p for x in a])


def _pdivmod(a, b, p):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b) and a:
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - len(b)
        c = (a[-1] * inv) % p
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - c * y) % p
        a.pop()
    return _trim(q), _trim(a)


def _pgcd(a, b, p):
    while b:
        a, b = b, _pdivmod(a, b, p)[1]
    if not a:
        return a
    return _pscale(a, pow(a[-1], -1, p), p)


def _ord0(a) -> int:
    for i, x in enumerate(a):
        if x:
            return i
    return INF


class RatFunc:
    """Element of F_p(t) in canonical form.

    ``num/den`` is fully reduced and the lowest nonzero coefficient of ``den``
    equals 1 (so the constant term is 1 whenever t does not divide ``den``).
    """

    __slots__ = ("p", "num", "den")

    def __init__(self, num, den=(1,), p: int = 2, _canonical: bool = False):
        self.p = p
        if _canonical:
            self.num, self.den = num, den
            return
        num = _trim([x % p for x in num])
        den = _trim([x % p for x in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not num or den == (1,):
            self.num, self.den = num, (1,)
            return
        g = _pgcd(num, den, p)
        if len(g) > 1:
            num = _pdivmod(num, g, p)[0]
            den = _pdivmod(den, g, p)[0]
        low = den[_ord0(den)]
        inv = pow(low, -1, p)
        self.num = _pscale(num, inv, p)
        self.den = _pscale(den, inv, p)

    @classmethod
    def const(cls, c: int, p: int) -> RatFunc:
        return cls((c,), (1,), p)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            if other.p != self.p:
                raise ValueError("mixing characteristics")
            return other
        if isinstance(other, int):
            return RatFunc((other,), (1,), self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        if self.den == o.den:
            return RatFunc(_padd(self.num, o.num, p), self.den, p)
        return RatFunc(
            _padd(_pmul(self.num, o.den, p), _pmul(o.num, self.den, p), p),
            _pmul(self.den, o.den, p),
            p,
        )

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(_pneg(self.num, self.p), self.den, self.p, _canonical=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.p
        return RatFunc(_pmul(self.num, o.num, p), _pmul(self.den, o.den, p), p)

    __rmul__ = __mul__

    def inverse(self) -> RatFunc:
        if not self.num:
            raise ZeroDivisionError("inverse of 0")
        return RatFunc(self.den, self.num, self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RatFunc((1,), (1,), self.p)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, RatFunc) else other
        if o is NotImplemented:
            return False
        return self.p == o.p and self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((self.p, self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"RatFunc({format_poly(self.num)!r}/{format_poly(self.den)!r}, p={self.p})"

    def __str__(self):
        return format_ratfunc(self)


def format_poly(a) -> str:
    if not a:
        return "0"
    terms = []
    for i, c in enumerate(a):
        if not c:
            continue
        if i == 0:
            terms.append(str(c))
        else:
            mon = "t" if i == 1 else f"t^{i}"
            terms.append(mon if c == 1 else f"{c}{mon}")
    return "+".join(terms)


def format_ratfunc(x: RatFunc) -> str:
    if x.den == (1,):
        n = format_poly(x.num)
        return n if len([c for c in x.num if c]) <= 1 else f"({n})"
    return f"({format_poly(x.num)})/({format_poly(x.den)})"


_TERM = re.compile(r"^(\d*)\*?(t(?:\^(\d+))?)?$")


def parse_poly(s: str, p: int) -> tuple[int, ...]:
    s = s.replace(" ", "")
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if not s:
        raise ValueError("empty polynomial")
    s = s.replace("-", "+-")
    coeffs: dict[int, int] = {}
    for raw in s.split("+"):
        if not raw:
            continue
        sign = 1
        if raw.startswith("-"):
            sign, raw = -1, raw[1:]
        m = _TERM.match(raw)
        if not m or (not m.group(1) and not m.group(2)):
            raise ValueError(f"cannot parse polynomial term {raw!r}")
        c = int(m.group(1)) if m.group(1) else 1
        if m.group(2):
            e = int(m.group(3)) if m.group(3) else 1
        else:
            e = 0
        coeffs[e] = (coeffs.get(e, 0) + sign * c) % p
    n = max(coeffs) + 1
    return _trim([coeffs.get(i, 0) for i in range(n)])


def _split_fraction(s: str) -> tuple[str, str | None]:
    depth = 0
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            return s[:i], s[i + 1 :]
    return s, None


Scalar = Union[Fraction, RatFunc]


class ValuedField(Field):
    """Common interface of the discretely valued backends."""

    p: int
    kind: str

    def __init__(self, p: int, max_prime: int = MAX_PRIME):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        if p > max_prime:
            raise ValueError(f"prime {p} exceeds the enumeration bound {max_prime}")
        self.p = p
        self.residue_field = PrimeField(p)

    @property
    def spec(self) -> str:
        return f"{self.kind}:{self.p}"

    def __eq__(self, other):
        return isinstance(other, ValuedField) and other.kind == self.kind and other.p == self.p

    def __hash__(self):
        return hash((self.kind, self.p))

    def __repr__(self):
        return f"{type(self).__name__}({self.p})"

    # generic helpers built on valuation/uniformizer

    def pi_power(self, n: int) -> Scalar:
        return self.uniformizer() ** n

    def unit_part(self, x: Scalar) -> Scalar:
        v = self.valuation(x)
        if v == INF:
            raise ValueError("zero has no unit part")
        return x / self.pi_power(v)

    def is_integral(self, x: Scalar) -> bool:
        return self.valuation(x) >= 0

    def digits(self, x: Scalar, upto: int) -> dict[int, int]:
        """Coefficients c_k in {0..p-1} with x = sum c_k pi^k mod pi^upto."""
        out: dict[int, int] = {}
        while True:
            v = self.valuation(x)
            if v >= upto:
                return out
            c = self.residue(self.unit_part(x))
            out[v] = c
            x = x - self.lift(c) * self.pi_power(v)

    def truncate(self, x: Scalar, e: int) -> Scalar:
        """Canonical representative of x modulo pi^e O (truncated expansion)."""
        r = self.zero
        for k, c in self.digits(x, e).items():
            r = r + self.lift(c) * self.pi_power(k)
        return r

    def random_integral(self, rng: random.Random, max_val: int = 3, zero_prob: float = 0.0) -> Scalar:
        if rng.random() < zero_prob:
            return self.zero
        v = rng.randint(0, max_val)
        return self.random_unit(rng) * self.pi_power(v)


class PAdicField(ValuedField):
    """Q with the p-adic valuation."""

    kind = "p-adic"

    def __init__(self, p: int, max_prime: int = MAX_PRIME):
        super().__init__(p, max_prime)
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, x) -> Fraction:
        if isinstance(x, str):
            return self.parse(x)
        return Fraction(x)

    @staticmethod
    def _vint(n: int, p: int) -> int:
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v

    def valuation(self, x) -> int | float:
        x = Fraction(x)
        if x == 0:
            return INF
        return self._vint(x.numerator, self.p) - self._vint(x.denominator, self.p)

    def residue(self, x) -> int:
        x = Fraction(x)
        if self.valuation(x) < 0:
            raise ValueError(f"{x} is not integral")
        return (x.numerator * pow(x.denominator, -1, self.p)) % self.p

    def lift(self, c: int) -> Fraction:
        return Fraction(c % self.p)

    def uniformizer(self) -> Fraction:
        return Fraction(self.p)

    def random_unit(self, rng) -> Fraction:
        while True:
            a = rng.randint(-12, 12)
            b = rng.randint(1, 6)
            x = Fraction(a, b)
            if x != 0 and self.valuation(x) == 0:
                return x

    def random_element(self, rng) -> Fraction:
        if rng.random() < 0.1:
            return self.zero
        return self.random_unit(rng) * self.pi_power(rng.randint(-1, 2))

    def parse(self, s: str) -> Fraction:
        return Fraction(s.strip())

    def format(self, x) -> str:
        return str(Fraction(x))


class TAdicField(ValuedField):
    """F_p(t) with the order of vanishing at t = 0."""

    kind = "t-adic"

    def __init__(self, p: int, max_prime: int = MAX_PRIME):
        super().__init__(p, max_prime)
        self.zero = RatFunc((), (1,), p)
        self.one = RatFunc((1,), (1,), p)

    def __call__(self, x) -> RatFunc:
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, str):
            return self.parse(x)
        if isinstance(x, Fraction):
            return RatFunc((x.numerator,), (1,), self.p) / RatFunc((x.denominator,), (1,), self.p)
        return RatFunc((int(x),), (1,), self.p)

    def valuation(self, x: RatFunc) -> int | float:
        x = self(x)
        if not x.num:
            return INF
        return _ord0(x.num) - _ord0(x.den)

    def residue(self, x: RatFunc) -> int:
        x = self(x)
        v = self.valuation(x)
        if v < 0:
            raise ValueError(f"{x} is not integral")
        if v > 0:
            return 0
        # den has constant term 1 when v == 0 and t does not divide den
        d0 = _ord0(x.den)
        n0 = x.num[d0] if d0 < len(x.num) else 0
        return (n0 * pow(x.den[d0], -1, self.p)) % self.p

    def lift(self, c: int) -> RatFunc:
        return RatFunc((c % self.p,), (1,), self.p)

    def uniformizer(self) -> RatFunc:
        return RatFunc((0, 1), (1,), self.p)

    def random_unit(self, rng) -> RatFunc:
        p = self.p
        num = [rng.randrange(1, p)] + [rng.randrange(p) for _ in range(rng.randint(0, 2))]
        den = [1] + [rng.randrange(p) for _ in range(rng.randint(0, 2))]
        return RatFunc(num, den, p)

    def random_element(self, rng) -> RatFunc:
        if rng.random() < 0.1:
            return self.zero
        return self.random_unit(rng) * self.pi_power(rng.randint(-1, 2))

    def parse(self, s: str) -> RatFunc:
        s = s.strip()
        a, b = _split_fraction(s)
        num = parse_poly(a, self.p)
        den = parse_poly(b, self.p) if b is not None else (1,)
        return RatFunc(num, den, self.p)

    def format(self, x: RatFunc) -> str:
        return format_ratfunc(self(x))


def backend(spec: str) -> ValuedField:
    """Build a backend from ``'p-adic:<p>'`` or ``'t-adic:<p>'``."""
    try:
        kind, p = spec.strip().split(":")
        p = int(p)
    except ValueError:
        raise ValueError(f"bad backend spec {spec!r}; expected p-adic:<p> or t-adic:<p>") from None
    if kind == "p-adic":
        return PAdicField(p)
    if kind == "t-adic":
        return TAdicField(p)
    raise ValueError(f"unknown backend kind {kind!r}")


def valuation(x: Scalar, field: ValuedField) -> int | float:
    return field.valuation(x)


def reduce_residue(x: Scalar, field: ValuedField) -> int:
    return field.residue(x)


def uniformizer(field: ValuedField) -> Scalar:
    return field.uniformizer()
