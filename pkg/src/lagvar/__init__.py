"""Numerical toolkit for Laguerre-expansion operators on variable Lebesgue spaces."""
from . import geometry, operators, semigroup, specfun, varlp
from .specfun import AlphaParam, PolyCoeffs, QuadratureRule, make_rule
from .semigroup import Expansion, HeatEval, SubordinationRule
from .varlp import DiscreteFunction, ExponentField, TensorGrid

__all__ = [
    "geometry", "operators", "semigroup", "specfun", "varlp",
    "AlphaParam", "PolyCoeffs", "QuadratureRule", "make_rule",
    "Expansion", "HeatEval", "SubordinationRule",
    "DiscreteFunction", "ExponentField", "TensorGrid",
]
