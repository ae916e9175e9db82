"""Hot-loop kernels with import-time backend selection.

The compiled extension is preferred when it built; the pure-Python
reference is the fallback.  Set ``GCB_PURE_KERNELS=1`` to force the
fallback (used by the equivalence tests and the benchmark).
"""

import os

from . import pyref
from .plan import Plan, build_plan, perm_tables

if os.environ.get("GCB_PURE_KERNELS") == "1":
    _impl = pyref
else:
    try:
        from . import _fast as _impl
    except ImportError:
        _impl = pyref

BACKEND = "compiled" if _impl.IS_COMPILED else "pure"

count_and_zsum = _impl.count_and_zsum
cover_sweep = _impl.cover_sweep
cycle_component_histogram = _impl.cycle_component_histogram

__all__ = [
    "BACKEND",
    "Plan",
    "build_plan",
    "perm_tables",
    "count_and_zsum",
    "cover_sweep",
    "cycle_component_histogram",
    "pyref",
]
