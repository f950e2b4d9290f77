from __future__ import annotations

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semistable.hilbert import (
    HilbertPolynomial,
    Verdict,
    cauchy_bound,
    coefficient_a,
    eventual_compare,
    format_polynomial,
    parse_polynomial,
    reduced,
    reduced_coefficients,
    truncated_compare,
    violates,
)

import oracles

P = parse_polynomial


@pytest.mark.parametrize(
    "text, expected",
    [("2n^2 + 4n", "n^2 + 2 n"), ("n^3", "n^3"), ("-3n + 6", "n - 2")],
)
def test_reduced_examples(text, expected):
    assert format_polynomial(reduced(P(text))) == expected


def test_coefficient_a_examples():
    assert coefficient_a(P("n^2 + 2n + 1"), 1) == 2
    assert coefficient_a(P("3n^2 + 6n"), 1) == 2
    for text in ("n^2 + 5", "n^4 - n", "n"):
        assert coefficient_a(P(text), 0) == 1


def test_eventual_compare_examples():
    assert eventual_compare(P("n^2 + 3n"), P("n^2 + 2n + 100")) == 1
    p = P("n^2 + 7")
    assert eventual_compare(p, p) == 0
    assert eventual_compare(P("n"), P("n^2")) == -1
    n = 10**6
    assert oracles.evaluate([1, 0], n) < oracles.evaluate([1, 0, 0], n)


def test_truncated_compare_examples():
    assert truncated_compare((1, 5), (1, 3), 1) is Verdict.EQUAL
    # (2,0) vs (1,9): larger first coordinate, smaller second, so componentwise
    # neither vector dominates; the lexicographic order puts (2,0) first
    assert truncated_compare((2, 0), (1, 9), 2, "componentwise") is Verdict.INCOMPARABLE
    assert truncated_compare((2, 0), (1, 9), 2, "lex") is Verdict.GREATER
    assert truncated_compare((2, 9), (1, 9), 2) is Verdict.DOMINATES
    assert truncated_compare((1, 0), (1, 9), 2) is Verdict.DOMINATED


def test_violates():
    assert violates((2, 0), (1, 9), 2, "lex")
    assert violates((2, 0), (1, 9), 2, "componentwise")
    assert not violates((1, 0), (1, 9), 2, "componentwise")
    assert not violates((1, 9), (1, 9), 2, "lex")
    assert not violates((2, 0), (1, 9), 0, "lex")


def test_truncated_compare_rejects_bad_input():
    with pytest.raises(ValueError):
        truncated_compare((1,), (1, 2), 1)
    with pytest.raises(ValueError):
        truncated_compare((1, 2), (1, 2), 3)
    with pytest.raises(ValueError):
        truncated_compare((1, 2), (1, 2), 1, "sideways")


coeff = st.fractions(min_value=-20, max_value=20, max_denominator=6)


def _poly(data, deg):
    cs = [data.draw(coeff) for _ in range(deg + 1)]
    return HilbertPolynomial(tuple(cs))


def _oracle_sign(p: HilbertPolynomial, q: HilbertPolynomial) -> int:
    """Sign of p - q evaluated beyond every real root of the difference."""
    n = max(len(p.coeffs), len(q.coeffs))
    a = (0,) * (n - len(p.coeffs)) + p.coeffs
    b = (0,) * (n - len(q.coeffs)) + q.coeffs
    d = [x - y for x, y in zip(a, b)]
    while d and d[0] == 0:
        d.pop(0)
    if not d:
        return 0
    big = 2 + sum(abs(c) for c in d[1:]) / abs(d[0])
    v = oracles.evaluate(d, big)
    return (v > 0) - (v < 0)


@settings(max_examples=400, deadline=None)
@given(st.integers(0, 5), st.integers(0, 5), st.data())
def test_eventual_compare_matches_large_n(dp, dq, data):
    p, q = _poly(data, dp), _poly(data, dq)
    assert eventual_compare(p, q) == _oracle_sign(p, q)
    assert eventual_compare(q, p) == -eventual_compare(p, q)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5), st.data(), coeff.filter(lambda c: c != 0))
def test_reduced_coefficients_are_scale_invariant(deg, data, c):
    p = _poly(data, deg)
    if p.is_zero:
        return
    assert reduced_coefficients(p.scaled(c)) == reduced_coefficients(p)
    for k in range(p.degree + 1):
        assert coefficient_a(p.scaled(c), k) == coefficient_a(p, k)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 5), st.data())
def test_cauchy_bound_exceeds_real_roots(deg, data):
    p = _poly(data, deg)
    if p.is_zero or p.degree == 0:
        return
    b = cauchy_bound(p)
    # no sign change of p beyond the bound: p(b + k) all share the sign of the leading coefficient
    for k in range(5):
        v = p(b + k)
        assert v != 0 and (v > 0) == (p.leading > 0)


def test_from_slope_round_trip():
    rng = random.Random(0)
    for _ in range(100):
        slope = tuple(Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(rng.randint(0, 4)))
        rank = rng.randint(1, 7)
        assert reduced_coefficients(HilbertPolynomial.from_slope(rank, slope)) == slope


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 4), st.data())
def test_format_parse_round_trip(deg, data):
    p = _poly(data, deg)
    assert parse_polynomial(format_polynomial(p)) == p


def test_parse_errors():
    with pytest.raises(ValueError):
        parse_polynomial("n^x")
