"""Exact and numerical tools for the A(1)_l differential systems with affine Weyl group symmetry."""

from __future__ import annotations

from .exprfield import Polynomial, RationalExpr, equals, substitute
from .rootdata import SystemSpec
from .dynamics import SystemModel, build_model
from .weylaction import apply_word, demazure, generator_maps, parse_word
from .canonical import build_coordinate_map, build_H
from .report import CheckResult

__version__ = "0.1.0"

__all__ = [
    "Polynomial",
    "RationalExpr",
    "equals",
    "substitute",
    "SystemSpec",
    "SystemModel",
    "build_model",
    "apply_word",
    "demazure",
    "generator_maps",
    "parse_word",
    "build_coordinate_map",
    "build_H",
    "CheckResult",
    "__version__",
]
