"""Exact spline and Haar wavelet constructions on aperiodic (quasicrystal) point sets."""
from __future__ import annotations

from .quadfield import GOLDEN, FieldSpec, QuadRat, field_make
from .tiling import NodeSequence, generate_beta_integers, generate_fibonacci_chain

__version__ = "0.1.0"

__all__ = [
    "GOLDEN",
    "FieldSpec",
    "NodeSequence",
    "QuadRat",
    "field_make",
    "generate_beta_integers",
    "generate_fibonacci_chain",
]
