"""Weighted Paley-Wiener kernels: a complete, minimal system whose mixed system is incomplete.

Modules: ``weights`` (weight class, conjugate, K), ``xform`` (transform model and
inner products), ``construct`` (the construction), ``verify`` (checks and the
defect experiment), ``cli`` (command line).
"""
from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
