"""Compactological sets, profinite towers and condensed sets at desk scale."""
from .certs import Certificate
from .finkit import FinFun, FinPartition, FinSet, FinTop, fin

__all__ = ["Certificate", "FinFun", "FinPartition", "FinSet", "FinTop", "fin"]
__version__ = "0.1.0"
