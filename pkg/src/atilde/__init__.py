"""Exact representations of the canonical Ã-type quivers K(g, h)."""
from .exactlin import Mat, PrimeField, Rationals, parse_field
from .functors import component_image, locate, phi_m
from .quivers import CyclicQuiver, Walk, assemble_qm, build_component, build_k, classify_walk, normalize_walk
from .reps import (
    BandSpec,
    Morphism,
    Representation,
    band_rep,
    bar_rep,
    change_basis,
    decompose,
    direct_sum,
    hom_basis,
    hom_dim,
    is_indecomposable,
    is_iso,
    random_invertible,
    walk_rep,
)

__version__ = "0.1.0"
