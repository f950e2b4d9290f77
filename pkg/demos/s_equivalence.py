"""Different starting models give S-equivalent semistable reductions.

For a 2 x 2 Kronecker representation over Z_(2) we run the loop from the
standard model and from random unimodular changes of basis, then compare the
Jordan-Holder graded pieces of the final reductions.

    python3 demos/s_equivalence.py
"""

from __future__ import annotations

import random

from semistable.catalog.inputs import P2, THETA_10, kronecker_22
from semistable.langton import certify_s_equivalence, langton_run
from semistable.lattice_model import random_model, reduction, standard_model


def main() -> None:
    rep = kronecker_22(P2)
    rng = random.Random(3)
    models = [standard_model(rep)] + [random_model(rep, rng) for _ in range(4)]
    runs = [langton_run(rep, THETA_10, model=m) for m in models]
    for i, tr in enumerate(runs):
        mats = [m.tolist() for m in reduction(tr.final_model).mats]
        print(f"run {i}: {tr.iterations} flip(s), final reduction arrows {mats}")

    res = certify_s_equivalence(runs[0], runs[-1])
    print("\nJH pieces of run 0:", [r.dims for r in res.graded_first])
    print("JH pieces of run 4:", [r.dims for r in res.graded_second])
    print("lattices compared at shift", res.comparison.shift, "levels", res.comparison.nonzero_levels())
    print("all pairs S-equivalent:", all(certify_s_equivalence(a, b) for a in runs for b in runs))


if __name__ == "__main__":
    main()
