"""Exact semistable reduction for quiver representations over discrete valuation rings."""

from __future__ import annotations

from .dvr_linalg import Lattice, smith_normal_form
from .langton import flip, langton_run
from .lattice_model import KRepresentation, LatticeModel, reduction, standard_model
from .quiver import Quiver, Representation, StabilityData, hn_filtration, is_semistable
from .valued_field import PAdicField, TAdicField, backend

__version__ = "0.1.0"

__all__ = [
    "KRepresentation",
    "Lattice",
    "LatticeModel",
    "PAdicField",
    "Quiver",
    "Representation",
    "StabilityData",
    "TAdicField",
    "backend",
    "flip",
    "hn_filtration",
    "is_semistable",
    "langton_run",
    "reduction",
    "smith_normal_form",
    "standard_model",
]
