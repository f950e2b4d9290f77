"""What the loop does on inputs that are unstable over K.

With both arrows zero the line at the source is a subrepresentation over K,
so no model can have a semistable reduction.  Flipping at it only rescales
one vertex, and the run revisits a model up to that rescaling.

    python3 demos/unstable_periodicity.py
"""

from __future__ import annotations

from semistable.catalog.inputs import UNSTABLE_CASES
from semistable.langton import langton_run


def main() -> None:
    for case in UNSTABLE_CASES:
        trace = langton_run(case.build(), case.stability, cap=16)
        flags = ", ".join(trace.flags) or "none"
        print(f"{case.name:34s} {trace.status:14s} flips={trace.iterations:2d} flags: {flags}")
        assert trace.certificate is None

    first = langton_run(UNSTABLE_CASES[0].build(), UNSTABLE_CASES[0].stability, cap=16)
    print("\nfirst input, step by step:")
    for rec, step in zip(first.steps, first.flips):
        lats = [str(l) for l in step.output.lattices]
        print(f"  iteration {rec.iteration}: codimension {rec.codimension}, B dims {rec.b_dims} -> lattices {lats}")


if __name__ == "__main__":
    main()
