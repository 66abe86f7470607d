"""Kernel backend selection.

The compiled extension is used when it imports; otherwise the pure-Python
module is used.  Set ``TOWERNORM_PURE_PYTHON=1`` to force the fallback.
"""

import os

if os.environ.get("TOWERNORM_PURE_PYTHON", "") not in ("", "0"):
    from . import _pykernels as _impl
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        from . import _pykernels as _impl
        BACKEND = "python"

shape_value = _impl.shape_value
shape_slope = _impl.shape_slope
solve_level = _impl.solve_level
level_chain = _impl.level_chain
chain_partials = _impl.chain_partials
member_ball = _impl.member_ball
bisect_norm = _impl.bisect_norm

__all__ = [
    "BACKEND",
    "shape_value",
    "shape_slope",
    "solve_level",
    "level_chain",
    "chain_partials",
    "member_ball",
    "bisect_norm",
]
