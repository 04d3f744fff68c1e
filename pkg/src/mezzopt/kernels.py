"""Hot-kernel dispatch: compiled extension when importable, pure Python otherwise.

Set ``MEZZOPT_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and the equivalence tests).
"""

import os

from . import _fallback

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("MEZZOPT_PURE_PYTHON"):
    _impl = _compiled
    BACKEND = "compiled"
else:
    _impl = _fallback
    BACKEND = "python"

nondominated_ranks = _impl.nondominated_ranks
storage_scores = _impl.storage_scores
ant_walk = _impl.ant_walk
replay = _impl.replay


def backend(name: str):
    """Module implementing the kernels for ``name`` in {"compiled", "python"}."""
    if name == "python":
        return _fallback
    if _compiled is None:
        raise ImportError("compiled kernels are not built")
    return _compiled
