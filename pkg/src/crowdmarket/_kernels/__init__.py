"""Backend selection for the selection kernels.

The compiled extension is preferred when it imports cleanly; otherwise the
pure-Python twin takes over with identical results.  Set
``CROWDMARKET_PURE_PYTHON=1`` to force the pure backend, e.g. to compare
the two or to rule out the extension when debugging.
"""

from __future__ import annotations

import os

from . import _pykernels

_FORCE_PURE = os.environ.get("CROWDMARKET_PURE_PYTHON", "") not in ("", "0")

if not _FORCE_PURE:
    try:
        from . import _ckernels as _impl
        BACKEND = "compiled"
    except ImportError:
        _impl = _pykernels
        BACKEND = "pure"
else:
    _impl = _pykernels
    BACKEND = "pure"

ga_evolve = _impl.ga_evolve
pso_evolve = _impl.pso_evolve
aco_evolve = _impl.aco_evolve
rng_stream = _impl.rng_stream


def get_backend() -> str:
    """Name of the active backend, ``"compiled"`` or ``"pure"``."""
    return BACKEND


__all__ = [
    "BACKEND",
    "aco_evolve",
    "ga_evolve",
    "get_backend",
    "pso_evolve",
    "rng_stream",
]
