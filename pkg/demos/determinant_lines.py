"""Trivializations and quasi-isomorphisms on determinant lines.

    python3 demos/determinant_lines.py
"""

from __future__ import annotations

import random

from semistable import fields as F
from semistable.det_lines import (
    BasedComplex,
    cone,
    det_iso_homology,
    det_iso_of_quasi_iso,
    homotopic_variant,
    pullback_compat_check,
    random_complex,
    random_quasi_iso,
    trivialize_acyclic,
)


def main() -> None:
    q = F.RationalField()
    diag = BasedComplex(q, 0, [2, 2], [[[2, 0], [0, 3]]])
    print("tau(0 -> Q^2 --diag(2,3)--> Q^2 -> 0) =", trivialize_acyclic(diag))

    rng = random.Random(0)
    c = random_complex(q, rng, length=3)
    phi = random_quasi_iso(c, rng)
    print(f"\nsource dims {c.dims}, target dims {phi.target.dims}, cone dims {cone(phi).dims}")
    print("det(phi) through the cone:    ", det_iso_of_quasi_iso(phi).scalar)
    print("det(phi) through homology:    ", det_iso_homology(phi))
    print("det of a homotopic chain map: ", det_iso_of_quasi_iso(homotopic_variant(phi, rng)).scalar)

    f2 = F.PrimeField(2)
    f4 = F.ExtensionField(f2, [1, 1, 1])
    c2 = random_complex(f2, rng, length=3)
    print("\nextending F_2 -> F_4 commutes with det:", pullback_compat_check(f4, c2, random_quasi_iso(c2, rng)))


if __name__ == "__main__":
    main()
