"""Exact and asymptotic SU(2) quantum invariants of Seifert fibered 3-manifolds."""

from .seifert import SeifertData, parse

__version__ = "0.1.0"

__all__ = ["SeifertData", "parse", "__version__"]
