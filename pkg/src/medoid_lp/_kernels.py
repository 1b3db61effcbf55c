"""Kernel dispatch: compiled extension when importable, numpy otherwise.

Set ``MEDOID_LP_PURE=1`` to force the fallback.
"""
import os

from . import _kernels_py as _py

BACKEND = "python"
if os.environ.get("MEDOID_LP_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _py
else:
    _impl = _py

eta_update = _impl.eta_update
subset_costs = _impl.subset_costs
positive_part_scan = _impl.positive_part_scan

__all__ = ["BACKEND", "eta_update", "subset_costs", "positive_part_scan"]
