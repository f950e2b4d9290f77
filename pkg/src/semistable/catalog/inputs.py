"""Named inputs shared by the catalog runner, the tests and the demos.

Every K-representation here is semistable or unstable by construction; the
comment on each entry gives the reason.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, NamedTuple

from ..lattice_model import KRepresentation
from ..quiver import Quiver, StabilityData
from ..valued_field import PAdicField, TAdicField, ValuedField

THETA_10 = StabilityData(((1, 0),), (1, 1))
THETA_01 = StabilityData(((0, 1),), (1, 1))
# a_1 is constant (theta_1 = sigma), so every reduction is semistable at level 1
# and all the work happens at level 2
THETA_TWO_LEVEL = StabilityData(((1, 1), (1, 0)), (1, 1))


class Case(NamedTuple):
    name: str
    build: Callable[[], KRepresentation]
    stability: StabilityData


def _pi(field: ValuedField, n: int = 1):
    return field.pi_power(n)


def kronecker_11(field: ValuedField, a, b) -> KRepresentation:
    return KRepresentation(Quiver.kronecker(), field, (1, 1), [[[field(a)]], [[field(b)]]])


def kronecker_12(field: ValuedField) -> KRepresentation:
    # arrows send e to (pi, 0) and (0, pi): only (1, 2) contains an invariant vertex-0 line
    z, p = field.zero, _pi(field)
    return KRepresentation(Quiver.kronecker(), field, (1, 2), [[[p], [z]], [[z], [p]]])


def kronecker_21(field: ValuedField) -> KRepresentation:
    # the two arrows have trivially intersecting kernels
    z, p = field.zero, _pi(field)
    return KRepresentation(Quiver.kronecker(), field, (2, 1), [[[p, z]], [[z, p]]])


def kronecker_22(field: ValuedField) -> KRepresentation:
    # a = pi I, b = diag(pi, pi^2): strictly semistable, destabilized only by equal-slope lines
    z, p, p2 = field.zero, _pi(field), _pi(field, 2)
    return KRepresentation(Quiver.kronecker(), field, (2, 2), [[[p, z], [z, p]], [[p, z], [z, p2]]])


def kronecker_23(field: ValuedField) -> KRepresentation:
    # v -> (x, y, 0) and (0, x, y): every line at vertex 0 generates a plane
    z, p = field.zero, _pi(field)
    a = [[p, z], [z, p], [z, z]]
    b = [[z, z], [p, z], [z, p]]
    return KRepresentation(Quiver.kronecker(), field, (2, 3), [a, b])


def a2(field: ValuedField, k: int) -> KRepresentation:
    return KRepresentation(Quiver.a2(), field, (1, 1), [[[_pi(field, k)]]])


def loop_tail(field: ValuedField, scale: int = 1) -> KRepresentation:
    # the loop fixes only the line spanned by e1, and the tail arrow does not kill e1
    z, o = field.zero, field.one
    loop = [[o, o], [z, o]]
    tail = [[_pi(field, scale), z]] if scale is not None else [[z, z]]
    return KRepresentation(Quiver.loop_with_tail(), field, (2, 1), [loop, tail])


P5 = PAdicField(5)
P3 = PAdicField(3)
P2 = PAdicField(2)
T3 = TAdicField(3)
T2 = TAdicField(2)

SEMISTABLE_CASES: list[Case] = [
    Case("kronecker-11-p5-(5,5)", lambda: kronecker_11(P5, 5, 5), THETA_10),
    Case("kronecker-11-p5-(25,5)", lambda: kronecker_11(P5, 25, 5), THETA_10),
    Case("kronecker-11-p5-(125,25)", lambda: kronecker_11(P5, 125, 25), THETA_10),
    Case("kronecker-11-p5-(1/5,1)", lambda: kronecker_11(P5, Fraction(1, 5), 1), THETA_10),
    Case("kronecker-12-p3", lambda: kronecker_12(P3), THETA_10),
    Case("kronecker-21-p3", lambda: kronecker_21(P3), THETA_10),
    Case("kronecker-22-p2", lambda: kronecker_22(P2), THETA_10),
    Case("kronecker-23-p2", lambda: kronecker_23(P2), THETA_10),
    Case("a2-p5-pi^1", lambda: a2(P5, 1), THETA_10),
    Case("a2-p5-pi^3", lambda: a2(P5, 3), THETA_10),
    Case("loop-tail-p3", lambda: loop_tail(P3), THETA_10),
    Case("kronecker-11-p5-two-level", lambda: kronecker_11(P5, 5, 25), THETA_TWO_LEVEL),
    Case("kronecker-11-t3-(t,t)", lambda: kronecker_11(T3, "t", "t"), THETA_10),
    Case("kronecker-11-t3-(t^2,t+t^2)", lambda: kronecker_11(T3, "t^2", "t+t^2"), THETA_10),
    Case("kronecker-21-t2", lambda: kronecker_21(T2), THETA_10),
    Case("kronecker-22-t2", lambda: kronecker_22(T2), THETA_10),
    Case("a2-t3-t^2", lambda: a2(T3, 2), THETA_10),
    Case("loop-tail-t3", lambda: loop_tail(T3, 2), THETA_10),
]

UNSTABLE_CASES: list[Case] = [
    # (k, 0) is a subrepresentation of slope 1 > 1/2
    Case("kronecker-11-p5-(0,0)", lambda: kronecker_11(P5, 0, 0), THETA_10),
    # (0, k) at the target has slope 1 > 1/2
    Case("a2-p5-unit-theta01", lambda: a2(P5, 0), THETA_01),
    Case("a2-p3-zero", lambda: KRepresentation(Quiver.a2(), P3, (1, 1), [[[0]]]), THETA_10),
    # e2 is killed by both arrows: (1, 0) has slope 1 > 2/3
    Case(
        "kronecker-21-p3-shared-kernel",
        lambda: KRepresentation(Quiver.kronecker(), P3, (2, 1), [[[1, 0]], [[3, 0]]]),
        THETA_10,
    ),
    # the loop-stable line e1 is killed by the tail: slope 1 > 2/3
    Case("loop-tail-p3-dead-tail", lambda: loop_tail(P3, None), THETA_10),
    Case("kronecker-11-t3-(0,0)", lambda: kronecker_11(T3, 0, 0), THETA_10),
    Case("a2-t2-t-theta01", lambda: a2(T2, 1), THETA_01),
]


def by_name(name: str) -> Case:
    for c in SEMISTABLE_CASES + UNSTABLE_CASES:
        if c.name == name:
            return c
    raise KeyError(name)
