from __future__ import annotations

import random

import numpy as np
import pytest

from semistable.dvr_linalg import Lattice, lattice_scale
from semistable.langton import (
    CAP_EXCEEDED,
    SEMISTABLE,
    certify_s_equivalence,
    flip,
    flip_sequence,
    image_of_g,
    langton_run,
    max_lift_level,
    sequence_splits,
    trace_invariants_hold,
)
from semistable.lattice_model import LatticeModel, random_model, reduction, standard_model
from semistable.quiver import SubrepWitness, canonical_witness, enumerate_subreps, is_semistable
from semistable.catalog.inputs import (
    P5,
    SEMISTABLE_CASES,
    THETA_10,
    UNSTABLE_CASES,
    kronecker_11,
)

import oracles


def first_line(model) -> SubrepWitness:
    """The subobject (k, 0) of a (1, 1) reduction."""
    return SubrepWitness((np.array([[1]]), np.zeros((1, 0), dtype=np.int64)))


def test_flip_at_everything_is_identity_and_at_nothing_is_pi():
    model = standard_model(kronecker_11(P5, 5, 5))
    red = reduction(model)
    assert flip(model, red.full()).output == model
    assert flip(model, red.zero()).output == model.scaled(1)


def test_flip_kronecker_55():
    model = standard_model(kronecker_11(P5, 5, 5))
    step = flip(model, first_line(model))
    assert step.output.lattices == (Lattice.standard(1, P5), Lattice.standard(1, P5, 1))
    red = reduction(step.output)
    assert [m.tolist() for m in red.mats] == [[[1]], [[1]]]
    assert is_semistable(red, THETA_10)
    assert step.check.torsion_exponents == [(), (1,)]
    assert step.hom_dim == 0 and step.warnings == []


def test_flip_rejects_non_invariant_witness():
    model = standard_model(kronecker_11(P5, 1, 0))
    with pytest.raises(ValueError):
        flip(model, first_line(model))


def test_flip_twice_at_image_gives_pi_multiple():
    rng = random.Random(0)
    for case in SEMISTABLE_CASES:
        model = random_model(case.build(), rng)
        red = reduction(model)
        for w in enumerate_subreps(red)[:6]:
            step = flip(model, w)
            back = flip(step.output, image_of_g(step))
            assert back.output == model.scaled(1)


def test_lift_levels():
    b0 = first_line(None)
    assert max_lift_level(standard_model(kronecker_11(P5, 5, 5)), b0).level == 1
    assert max_lift_level(standard_model(kronecker_11(P5, 25, 25)), b0).level == 2
    res = max_lift_level(standard_model(kronecker_11(P5, 0, 0)), b0, cap=5)
    assert res.reached_cap and res.level == 5
    assert "all tested levels" in str(res)


def test_lift_level_criterion_matches_valuations():
    # the line (k, 0) lifts mod pi^j exactly when both arrows vanish mod pi^j
    for a, b in [(5, 25), (125, 25), (25, 125), (5, 1)]:
        model = standard_model(kronecker_11(P5, a, b))
        red = reduction(model)
        b0 = first_line(model)
        if not any((m @ b0.bases[0]).any() for m in red.mats):
            expected = min(oracles.valuation(a, 5), oracles.valuation(b, 5))
            assert max_lift_level(model, b0, cap=6).level == expected


def test_sequence_splits_examples():
    model = standard_model(kronecker_11(P5, 5, 5))
    assert sequence_splits(flip(model, reduction(model).zero()))
    assert not sequence_splits(flip(model, first_line(model)))
    # a model that is a direct sum over O: both arrows zero
    split = standard_model(kronecker_11(P5, 0, 0))
    assert sequence_splits(flip(split, first_line(split)))


def test_langton_examples():
    tr = langton_run(kronecker_11(P5, 1, 0), THETA_10)
    assert tr.status == SEMISTABLE and tr.iterations == 0
    tr = langton_run(kronecker_11(P5, 5, 5), THETA_10)
    assert tr.status == SEMISTABLE and tr.iterations == 1
    assert tr.final_model.lattices == (Lattice.standard(1, P5), Lattice.standard(1, P5, 1))
    assert tr.certificate.semistable
    tr = langton_run(kronecker_11(P5, 0, 0), THETA_10, cap=32)
    assert tr.status == CAP_EXCEEDED and "periodic" in tr.flags
    assert tr.certificate is None


@pytest.mark.parametrize("case", SEMISTABLE_CASES, ids=lambda c: c.name)
def test_catalog_runs_terminate(case):
    rng = random.Random(7)
    rep = case.build()
    for model in [standard_model(rep)] + [random_model(rep, rng) for _ in range(2)]:
        tr = langton_run(rep, case.stability, cap=16, model=model)
        assert tr.terminated and tr.iterations <= 16
        assert trace_invariants_hold(tr)
        for step in tr.flips:
            assert all(set(e) <= {1} for e in step.check.torsion_exponents)
        assert is_semistable(reduction(tr.final_model), case.stability)


@pytest.mark.parametrize("case", UNSTABLE_CASES, ids=lambda c: c.name)
def test_unstable_inputs_never_certify(case):
    tr = langton_run(case.build(), case.stability, cap=16)
    assert tr.status == CAP_EXCEEDED and tr.certificate is None
    assert "unstable-witness" in tr.flags


def test_s_equivalence_of_runs():
    rep = kronecker_11(P5, 5, 5)
    r1 = langton_run(rep, THETA_10)
    assert certify_s_equivalence(r1, langton_run(rep, THETA_10))
    r2 = langton_run(rep, THETA_10, model=random_model(rep, random.Random(4)))
    res = certify_s_equivalence(r1, r2)
    assert res.equivalent and len(res.graded_first) == len(res.graded_second)


def test_s_equivalence_preconditions():
    r1 = langton_run(kronecker_11(P5, 5, 5), THETA_10)
    with pytest.raises(ValueError):
        certify_s_equivalence(r1, langton_run(kronecker_11(P5, 5, 25), THETA_10))
    with pytest.raises(ValueError):
        certify_s_equivalence(r1, langton_run(kronecker_11(P5, 5, 5), THETA_10, cap=0))


def test_flip_sequence_chains_outputs():
    model = standard_model(kronecker_11(P5, 25, 25))
    steps = flip_sequence(model, [first_line(model)])
    assert steps[0].model == model
    assert [m.tolist() for m in reduction(steps[-1].output).mats] == [[[0]], [[0]]]
