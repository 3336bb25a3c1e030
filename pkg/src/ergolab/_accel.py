"""Optional numba acceleration.

Set ``ERGOLAB_DISABLE_NUMBA=1`` to force the pure-numpy kernels.  Without
numba installed the numpy kernels are used automatically.
"""

import os

_DISABLED = os.environ.get("ERGOLAB_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    from numba import njit as _njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    _njit = None

HAVE_NUMBA = _njit is not None
USE_NUMBA = HAVE_NUMBA and not _DISABLED


def jit(fn):
    """Compile ``fn`` with numba when available, else return it unchanged."""
    if _njit is None:
        return fn
    return _njit(cache=False, nogil=True)(fn)
