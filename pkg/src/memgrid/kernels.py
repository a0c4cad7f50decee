"""Kernel backend selection.

The compiled ``_ckernels`` extension is used when it imports cleanly;
otherwise the numpy/pure-Python ``_pykernels`` module takes over. Set
``MEMGRID_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

ANOMALY = _pykernels.ANOMALY
SINGULAR = _pykernels.SINGULAR
AT_LIMIT = _pykernels.AT_LIMIT

_impl = _pykernels
BACKEND = "python"

if os.environ.get("MEMGRID_PURE_PYTHON", "").strip() in ("", "0"):
    try:
        from . import _ckernels as _impl  # noqa: F811
        BACKEND = "cython"
    except ImportError:
        pass

window = _impl.window
impedance_arrays = _impl.impedance_arrays
current_driven_loop = _impl.current_driven_loop
walk_boundary = _impl.walk_boundary


def available_backends():
    """Return ``{name: module}`` for every backend importable in this process."""
    found = {"python": _pykernels}
    try:
        from . import _ckernels
    except ImportError:
        return found
    found["cython"] = _ckernels
    return found
