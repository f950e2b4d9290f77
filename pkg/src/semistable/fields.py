"""Exact fields and dense linear algebra over them.

Elements are plain Python objects with arithmetic operators: ``Fraction`` for
the rationals, ``Fp`` for prime fields, ``ExtElement`` for simple algebraic
extensions.  Matrices are lists of row lists.
"""

from __future__ import annotations

import itertools
import random
from fractions import Fraction
from typing import Any, Iterable, Sequence

Matrix = list  # list[list[element]]


class Fp:
    """Element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.p = p
        self.v = v % p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return Fp(-self.v, self.p)

    def inverse(self) -> Fp:
        if self.v == 0:
            raise ZeroDivisionError("inverse of 0 in F_p")
        return Fp(pow(self.v, -1, self.p), self.p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * Fp(o, self.p).inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o, self.p) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return Fp(pow(self.v, n, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


class Field:
    """Minimal field interface shared by every concrete field."""

    zero: Any
    one: Any

    def __call__(self, x):  # pragma: no cover - overridden
        raise NotImplementedError

    def random_element(self, rng: random.Random):  # pragma: no cover
        raise NotImplementedError

    def random_nonzero(self, rng: random.Random):
        while True:
            x = self.random_element(rng)
            if x != self.zero:
                return x


class RationalField(Field):
    name = "Q"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def __call__(self, x) -> Fraction:
        if isinstance(x, str):
            return Fraction(x.strip())
        return Fraction(x)

    def random_element(self, rng, bound: int = 5) -> Fraction:
        return Fraction(rng.randint(-bound, bound), rng.randint(1, 3))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "RationalField()"


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return all(n % q for q in range(2, int(n**0.5) + 1))


class PrimeField(Field):
    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.zero = Fp(0, p)
        self.one = Fp(1, p)
        self.name = f"F{p}"

    def __call__(self, x) -> Fp:
        if isinstance(x, Fp):
            return Fp(x.v, self.p)
        if isinstance(x, str):
            x = Fraction(x.strip())
        if isinstance(x, Fraction):
            return Fp(x.numerator, self.p) / Fp(x.denominator, self.p)
        return Fp(int(x), self.p)

    def elements(self) -> list[Fp]:
        return [Fp(i, self.p) for i in range(self.p)]

    def random_element(self, rng) -> Fp:
        return Fp(rng.randrange(self.p), self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return f"PrimeField({self.p})"


# --- univariate polynomials over a field, coefficient lists low -> high -------


def _ptrim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmul(a: Sequence, b: Sequence, zero) -> list:
    if not a or not b:
        return []
    out = [zero] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return _ptrim(out)


def _pdivmod(a: Sequence, b: Sequence, zero) -> tuple[list, list]:
    a = list(a)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [zero] * max(len(a) - len(b) + 1, 0)
    inv_lead = 1 / b[-1]
    while len(_ptrim(a)) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv_lead
        q[shift] = c
        for i, y in enumerate(b):
            a[shift + i] = a[shift + i] - c * y
        a.pop()
    return _ptrim(q), _ptrim(a)


class ExtElement:
    """Element of base[x]/(modulus), stored as a reduced coefficient tuple."""

    __slots__ = ("field", "c")

    def __init__(self, field: ExtensionField, coeffs: Sequence):
        self.field = field
        zero = field.base.zero
        c = [field.base(x) for x in coeffs]
        if len(c) >= len(field.modulus):
            _, c = _pdivmod(c, field.modulus, zero)
        c = _ptrim(list(c))
        self.c = tuple(c)

    def _coerce(self, other):
        if isinstance(other, ExtElement):
            if other.field is not self.field and other.field != self.field:
                raise ValueError("mixing different extension fields")
            return other
        if isinstance(other, (int, Fraction, Fp)):
            return ExtElement(self.field, [other])
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        n = max(len(self.c), len(o.c))
        z = self.field.base.zero
        a = list(self.c) + [z] * (n - len(self.c))
        b = list(o.c) + [z] * (n - len(o.c))
        return ExtElement(self.field, [x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return ExtElement(self.field, [-x for x in self.c])

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
        return ExtElement(self.field, _pmul(self.c, o.c, self.field.base.zero))

    __rmul__ = __mul__

    def inverse(self) -> ExtElement:
        if not self.c:
            raise ZeroDivisionError("inverse of 0")
        # extended Euclid against the (irreducible) modulus
        zero, one = self.field.base.zero, self.field.base.one
        r0, r1 = list(self.field.modulus), list(self.c)
        s0, s1 = [], [one]
        while r1:
            q, r = _pdivmod(r0, r1, zero)
            r0, r1 = r1, r
            qs = _pmul(q, s1, zero)
            n = max(len(s0), len(qs))
            s0p = list(s0) + [zero] * (n - len(s0))
            qsp = list(qs) + [zero] * (n - len(qs))
            s0, s1 = s1, _ptrim([a - b for a, b in zip(s0p, qsp)])
        # r0 is a nonzero constant
        c = r0[0]
        return ExtElement(self.field, [x / c for x in s0])

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

    def __eq__(self, other):
        o = self._coerce(other) if not isinstance(other, ExtElement) else other
        if o is NotImplemented:
            return False
        return self.c == o.c

    def __hash__(self):
        return hash(self.c)

    def __bool__(self):
        return bool(self.c)

    def __repr__(self):
        return f"ExtElement({list(map(str, self.c))})"


class ExtensionField(Field):
    """Simple extension base[x]/(modulus) of the rationals or a prime field.

    ``modulus`` is given low -> high and must be monic and irreducible; the
    irreducibility test is exhaustive for prime fields and the rational root
    test for rational moduli of degree 2 or 3.
    """

    def __init__(self, base: Field, modulus: Sequence):
        self.base = base
        m = _ptrim([base(x) for x in modulus])
        if len(m) < 2:
            raise ValueError("modulus must have positive degree")
        if m[-1] != base.one:
            lead = m[-1]
            m = [x / lead for x in m]
        self.modulus = tuple(m)
        if not is_irreducible(base, self.modulus):
            raise ValueError(f"reducible modulus {list(map(str, self.modulus))}")
        self.degree = len(m) - 1
        self.zero = ExtElement(self, [])
        self.one = ExtElement(self, [base.one])

    def __call__(self, x) -> ExtElement:
        if isinstance(x, ExtElement):
            return x
        if isinstance(x, (list, tuple)):
            return ExtElement(self, x)
        return ExtElement(self, [self.base(x)])

    def embed(self, x) -> ExtElement:
        return ExtElement(self, [x])

    def generator(self) -> ExtElement:
        return ExtElement(self, [self.base.zero, self.base.one])

    def random_element(self, rng) -> ExtElement:
        return ExtElement(self, [self.base.random_element(rng) for _ in range(self.degree)])

    def __eq__(self, other):
        return (
            isinstance(other, ExtensionField)
            and other.base == self.base
            and other.modulus == self.modulus
        )

    def __hash__(self):
        return hash((self.base, self.modulus))

    def __repr__(self):
        return f"ExtensionField({self.base!r}, {[str(c) for c in self.modulus]})"


def is_irreducible(base: Field, poly: Sequence) -> bool:
    deg = len(poly) - 1
    if deg == 1:
        return True
    if isinstance(base, PrimeField):
        p = base.p
        # search monic factors of degree <= deg/2
        for d in range(1, deg // 2 + 1):
            for tail in itertools.product(range(p), repeat=d):
                f = [base(x) for x in tail] + [base.one]
                _, r = _pdivmod(poly, f, base.zero)
                if not r:
                    return False
        return True
    if isinstance(base, RationalField):
        if deg > 3:
            raise ValueError("irreducibility over Q only decided for degree <= 3")
        return not _has_rational_root(poly)
    raise ValueError(f"cannot decide irreducibility over {base!r}")


def _has_rational_root(poly: Sequence[Fraction]) -> bool:
    import math

    den = 1
    for c in poly:
        den = den * Fraction(c).denominator // math.gcd(den, Fraction(c).denominator)
    ints = [int(Fraction(c) * den) for c in poly]
    if ints[0] == 0:
        return True  # x divides the polynomial
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(n):
        return [d for d in range(1, n + 1) if n % d == 0]

    for num in divisors(a0):
        for dd in divisors(an):
            for s in (1, -1):
                x = Fraction(s * num, dd)
                if sum(c * x**i for i, c in enumerate(ints)) == 0:
                    return True
    return False


# --- dense matrices over element objects ---------------------------------------


def zeros(rows: int, cols: int, field: Field) -> Matrix:
    return [[field.zero] * cols for _ in range(rows)]


def identity(n: int, field: Field) -> Matrix:
    out = zeros(n, n, field)
    for i in range(n):
        out[i][i] = field.one
    return out


def scale_identity(n: int, c, field: Field) -> Matrix:
    out = zeros(n, n, field)
    for i in range(n):
        out[i][i] = c
    return out


def matmul(a: Matrix, b: Matrix, field: Field) -> Matrix:
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    if a and len(a[0]) != inner:
        raise ValueError(f"shape mismatch {len(a)}x{len(a[0])} @ {inner}x{cols}")
    out = []
    for row in a:
        new = []
        for j in range(cols):
            s = field.zero
            for k in range(inner):
                x = row[k]
                if x != 0:
                    s = s + x * b[k][j]
            new.append(s)
        out.append(new)
    return out


def transpose(a: Matrix) -> Matrix:
    if not a:
        return []
    return [list(col) for col in zip(*a)]


def hstack(*blocks: Matrix) -> Matrix:
    rows = len(blocks[0])
    return [sum((list(b[i]) for b in blocks), []) for i in range(rows)]


def vstack(*blocks: Matrix) -> Matrix:
    return [list(r) for b in blocks for r in b]


def column(a: Matrix, j: int) -> list:
    return [row[j] for row in a]


def from_columns(cols: Sequence[Sequence], rows: int, field: Field) -> Matrix:
    if not cols:
        return [[] for _ in range(rows)]
    return [[c[i] for c in cols] for i in range(rows)]


def rref(a: Matrix, field: Field) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns."""
    m = [list(r) for r in a]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = field.one / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(a: Matrix, field: Field) -> int:
    if not a or not a[0]:
        return 0
    return len(rref(a, field)[1])


def kernel(a: Matrix, field: Field, ncols: int | None = None) -> list[list]:
    """Basis (list of vectors) of the right null space of ``a``."""
    cols = len(a[0]) if a else (ncols or 0)
    if not a:
        return [[field.one if i == j else field.zero for i in range(cols)] for j in range(cols)]
    r, piv = rref(a, field)
    free = [c for c in range(cols) if c not in piv]
    basis = []
    for f in free:
        v = [field.zero] * cols
        v[f] = field.one
        for i, pc in enumerate(piv):
            v[pc] = -r[i][f]
        basis.append(v)
    return basis


def det(a: Matrix, field: Field):
    n = len(a)
    if n == 0:
        return field.one
    m = [list(r) for r in a]
    d = field.one
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return field.zero
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d = d * m[c][c]
        inv = field.one / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return d


def inverse(a: Matrix, field: Field) -> Matrix:
    n = len(a)
    aug = [list(a[i]) + identity(n, field)[i] for i in range(n)]
    r, piv = rref(aug, field)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in r]


def solve(a: Matrix, b: Sequence, field: Field) -> list | None:
    """One solution x of a x = b, or None."""
    rows = len(a)
    cols = len(a[0]) if rows else 0
    aug = [list(a[i]) + [b[i]] for i in range(rows)]
    r, piv = rref(aug, field)
    if cols in piv:
        return None
    x = [field.zero] * cols
    for i, pc in enumerate(piv):
        x[pc] = r[i][cols]
    return x


def column_space(vectors: Iterable[Sequence], n: int, field: Field) -> list[list]:
    """Canonical basis (RREF rows) of the span of ``vectors`` in field^n."""
    vs = [list(v) for v in vectors]
    if not vs:
        return []
    r, piv = rref(vs, field)
    return [r[i] for i in range(len(piv))]


def random_matrix(rows: int, cols: int, field: Field, rng: random.Random) -> Matrix:
    return [[field.random_element(rng) for _ in range(cols)] for _ in range(rows)]


def random_invertible(n: int, field: Field, rng: random.Random) -> Matrix:
    while True:
        m = random_matrix(n, n, field, rng)
        if det(m, field) != field.zero:
            return m
