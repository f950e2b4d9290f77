from __future__ import annotations

import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from semistable import fields as F
from semistable.dvr_linalg import (
    Lattice,
    NonIntegralError,
    NotContainedError,
    determinantal_exponents,
    hermite_form,
    is_unimodular,
    lattice_intersection,
    lattice_scale,
    lattice_sum,
    parse_matrix,
    format_matrix,
    quotient_torsion,
    random_lattice,
    random_unimodular,
    rescale_exponent,
    smith_normal_form,
)
from semistable.valued_field import PAdicField, TAdicField

import oracles

P5 = PAdicField(5)


def _m(rows, field=P5):
    return [[field(x) for x in r] for r in rows]


def _check_decomposition(a, snf, field):
    d = F.matmul(F.matmul(snf.U, a, field), snf.V, field)
    rows, cols = len(a), len(a[0])
    for i in range(rows):
        for j in range(cols):
            if i == j and i < len(snf.exponents):
                assert field.valuation(d[i][j]) == snf.exponents[i]
            else:
                assert d[i][j] == field.zero
    assert is_unimodular(snf.U, field) and is_unimodular(snf.V, field)


@pytest.mark.parametrize(
    "rows, expected",
    [([[5, 0], [0, 25]], (1, 2)), ([[1, 0], [0, 1]], (0, 0)), ([[5, 5], [5, 30]], (1, 2))],
)
def test_smith_examples(rows, expected):
    a = _m(rows)
    snf = smith_normal_form(a, P5)
    assert snf.exponents == expected
    assert oracles.elementary_divisors_by_minors(a, 5) == expected
    _check_decomposition(a, snf, P5)


def test_smith_of_zero_and_rectangular():
    snf = smith_normal_form(_m([[0, 0], [0, 0]]), P5)
    assert snf.exponents == () and snf.free_rank == 2
    a = _m([[5, 10, 0]])
    snf = smith_normal_form(a, P5)
    assert snf.exponents == (1,)
    _check_decomposition(a, snf, P5)


def test_smith_rejects_non_integral():
    with pytest.raises(NonIntegralError):
        smith_normal_form(_m([[Fraction(1, 5), 0], [0, 1]]), P5)


entries = st.sampled_from([0, 1, 2, 3, 4, 5, 6, 10, 15, 25, 50, 125, -5, 7, Fraction(5, 3), Fraction(2, 7)])


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 3), st.integers(1, 3), st.data())
def test_smith_matches_minor_oracle_padic(r, c, data):
    a = [[P5(data.draw(entries)) for _ in range(c)] for _ in range(r)]
    snf = smith_normal_form(a, P5)
    assert snf.exponents == oracles.elementary_divisors_by_minors(a, 5)
    assert determinantal_exponents(a, P5) == snf.exponents
    _check_decomposition(a, snf, P5)


@pytest.mark.parametrize("p", [2, 3])
def test_smith_tadic_is_consistent(p):
    f = TAdicField(p)
    rng = random.Random(p)
    for _ in range(60):
        n = rng.randint(1, 3)
        a = [[f.random_integral(rng, 3, zero_prob=0.3) for _ in range(n)] for _ in range(n)]
        snf = smith_normal_form(a, f)
        assert snf.exponents == determinantal_exponents(a, f)
        _check_decomposition(a, snf, f)
        # sum of exponents is the valuation of the determinant
        d = F.det(a, f)
        if d != f.zero:
            assert sum(snf.exponents) == f.valuation(d)


def test_random_unimodular_is_unimodular():
    rng = random.Random(0)
    for f in (P5, TAdicField(3)):
        for n in range(1, 4):
            assert is_unimodular(random_unimodular(n, f, rng), f)


def test_hermite_is_basis_independent():
    rng = random.Random(1)
    for f in (P5, TAdicField(2)):
        for _ in range(40):
            lat = random_lattice(3, f, rng)
            g = random_unimodular(3, f, rng)
            other = F.matmul(lat.matrix(), g, f)
            assert hermite_form(other, f) == lat.matrix()
            assert Lattice(other, f) == lat


def test_lattice_sum_and_intersection_examples():
    std = Lattice.standard(2, P5)
    assert lattice_sum(lattice_scale(std, 1), std) == std
    assert lattice_intersection(std, std) == std
    l1 = Lattice(_m([[1, 0], [0, 5]]), P5)
    l2 = Lattice(_m([[5, 0], [0, 1]]), P5)
    meet = lattice_intersection(l1, l2)
    assert meet.matrix() == hermite_form(_m([[5, 0], [0, 5]]), P5)


def _member(lat: Lattice, v) -> bool:
    coords = lat.coords([[x] for x in v])
    return all(lat.field.valuation(c[0]) >= 0 for c in coords)


def test_intersection_by_membership_oracle():
    rng = random.Random(2)
    f = PAdicField(3)
    for _ in range(60):
        a, b = random_lattice(2, f, rng, 2), random_lattice(2, f, rng, 2)
        meet = lattice_intersection(a, b)
        for col in zip(*meet.matrix()):
            assert _member(a, col) and _member(b, col)
        # small vectors of the ambient space: in both iff in the intersection
        for x, y in itertools.product([Fraction(k, 9) for k in range(-4, 5)], repeat=2):
            v = (f(x * 27), f(y * 27))
            assert (_member(a, v) and _member(b, v)) == _member(meet, v)


def test_quotient_torsion_examples():
    std = Lattice.standard(3, P5)
    assert quotient_torsion(lattice_scale(std, 1), std).exponents == (1, 1, 1)
    assert quotient_torsion(std, std).exponents == ()
    l1 = Lattice(_m([[5, 0], [0, 25]]), P5)
    assert quotient_torsion(l1, Lattice.standard(2, P5)).exponents == (1, 2)


def test_quotient_torsion_requires_containment():
    std = Lattice.standard(2, P5)
    with pytest.raises(NotContainedError) as info:
        quotient_torsion(lattice_scale(std, -2), std)
    assert info.value.rescale == 2
    assert rescale_exponent(lattice_scale(std, -2), std) == 2


def test_scale_and_rescale():
    rng = random.Random(4)
    for _ in range(30):
        a, b = random_lattice(2, P5, rng), random_lattice(2, P5, rng)
        n = rescale_exponent(a, b)
        assert b.contains(lattice_scale(a, n))
        if n > 0:
            assert not b.contains(lattice_scale(a, n - 1))


def test_matrix_text_round_trip():
    a = _m([[Fraction(1, 5), 2], [0, -7]])
    assert parse_matrix(format_matrix(a, P5), P5) == a
    assert parse_matrix("", P5) == []
    with pytest.raises(ValueError):
        parse_matrix("1,2;3", P5)
