"""One flip on the Kronecker quiver over Z_(5).

The representation K --a--> K, K --b--> K with a = b = 5 is semistable for
theta = (1, 0), but its standard model reduces to the zero maps, where the
line at the source destabilizes.  One elementary modification repairs it.

    python3 demos/kronecker_worked_example.py
"""

from __future__ import annotations

from semistable.catalog.inputs import P5, THETA_10, kronecker_11
from semistable.langton import flip, langton_run, max_lift_level, sequence_splits
from semistable.lattice_model import reduction, standard_model
from semistable.quiver import is_semistable, maximal_destabilizing, slope
from semistable.textio import fmt_tuple


def show(title, rep):
    mats = [m.tolist() for m in rep.mats]
    print(f"{title}: dims {rep.dims}, arrows {mats}")


def main() -> None:
    rep = kronecker_11(P5, 5, 5)
    model = standard_model(rep)
    red = reduction(model)
    show("reduction of the standard model", red)
    print("semistable?", bool(is_semistable(red, THETA_10)), "slope", fmt_tuple(slope(red, THETA_10)))

    b0 = maximal_destabilizing(red, THETA_10, THETA_10.arity)
    print("maximal destabilizer B_0 has dims", b0.dims)
    print("B_0 lifts modulo pi^j for j up to", max_lift_level(model, b0))

    step = flip(model, b0)
    print("new lattices:", [str(l) for l in step.output.lattices])
    print("L / L' torsion exponents per vertex:", step.check.torsion_exponents)
    print("dim Hom(B_0, G_0) =", step.hom_dim, "| 0 -> G_0 -> L'_0 -> B_0 -> 0 splits?", sequence_splits(step))
    show("reduction after the flip", reduction(step.output))

    trace = langton_run(rep, THETA_10)
    print(f"langton_run: {trace.status} after {trace.iterations} flip(s);",
          f"certificate checked {trace.certificate.subreps_checked} subrepresentations")


if __name__ == "__main__":
    main()
