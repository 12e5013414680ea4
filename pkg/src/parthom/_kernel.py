"""Backend selection for the GF(p) reduction kernel.

The compiled extension is preferred; the pure-Python twin is the fallback
so the package works from a plain checkout. ``benchmarks/bench_rank.py``
compares the two.
"""

from . import _reduction_py

try:
    from . import _reduction as _compiled

    BACKEND = "compiled"
    rank_reduction = _compiled.rank_reduction
except ImportError:  # extension not built
    _compiled = None
    BACKEND = "pure"
    rank_reduction = _reduction_py.rank_reduction


def available_backends():
    """Name -> rank_reduction callable, for cross-checks and benchmarks."""
    out = {"pure": _reduction_py.rank_reduction}
    if _compiled is not None:
        out["compiled"] = _compiled.rank_reduction
    return out
