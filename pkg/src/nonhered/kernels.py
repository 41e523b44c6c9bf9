"""Backend selection for the hot numeric kernels.

``NONHERED_BACKEND=numpy`` forces the pure-numpy path; anything else (or
unset) uses numba when it imports, falling back to numpy otherwise.
"""
import logging
import os

log = logging.getLogger(__name__)

_requested = os.environ.get("NONHERED_BACKEND", "numba").strip().lower()

if _requested == "numpy":
    from . import _kernels_numpy as _impl
    BACKEND = "numpy"
else:
    try:
        from . import _kernels_numba as _impl
        BACKEND = "numba"
    except ImportError:  # pragma: no cover - numba is optional
        log.warning("numba unavailable, using numpy kernels")
        from . import _kernels_numpy as _impl
        BACKEND = "numpy"

master_gj = _impl.master_gj
master_asym = _impl.master_asym
master_integral = _impl.master_integral
lacunary_product = _impl.lacunary_product

__all__ = ["BACKEND", "master_gj", "master_asym", "master_integral", "lacunary_product"]
