"""Backend selection for the sweep kernels.

``RISRAY_BACKEND`` picks the implementation process-wide: ``numba``
(JIT-compiled), ``numpy`` (pure vectorized), or ``auto`` (numba when it
imports, numpy otherwise).  An explicit ``backend=`` argument overrides the
environment.
"""

from __future__ import annotations

import os

import numpy as np

from .numpy_backend import sweep_numpy
from .pack import PackedScene

_ENV_VAR = "RISRAY_BACKEND"
_CHOICES = ("auto", "numba", "numpy")


class BackendError(RuntimeError):
    """Raised when the requested backend is unavailable or unknown."""


def _load_numba_sweep():
    from .numba_backend import sweep_numba  # deferred: import compiles nothing yet

    return sweep_numba


def available_backends() -> tuple[str, ...]:
    """Concrete backends importable in this process."""
    names = ["numpy"]
    try:
        _load_numba_sweep()
        names.insert(0, "numba")
    except ImportError:
        pass
    return tuple(names)


def select_backend(name: str | None = None) -> str:
    """Resolve a backend request to a concrete name.

    Args:
        name: "numba", "numpy", "auto", or None (read ``RISRAY_BACKEND``,
            defaulting to auto).
    """
    if name is None:
        name = os.environ.get(_ENV_VAR, "auto")
    name = name.lower()
    if name not in _CHOICES:
        raise BackendError(f"unknown backend {name!r}; choose from {_CHOICES}")
    if name == "auto":
        return "numba" if "numba" in available_backends() else "numpy"
    if name == "numba" and "numba" not in available_backends():
        raise BackendError("numba backend requested but numba is not importable")
    return name


def set_thread_count(threads: int | None) -> int:
    """Clamp and apply a worker-thread request; returns the effective count.

    Only the compiled backend is threaded; the numpy backend ignores this.
    """
    try:
        import numba
    except ImportError:
        return 1
    limit = numba.config.NUMBA_NUM_THREADS
    if threads is None:
        return limit
    effective = max(1, min(int(threads), limit))
    numba.set_num_threads(effective)
    return effective


def sweep_points(
    packed: PackedScene,
    points: np.ndarray,
    backend: str | None = None,
    threads: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Run the point sweep on the selected backend.

    Returns ``(field, n_paths, n_reflected)`` aligned with ``points``; the
    field is the complex receiver-port phasor (vector mode already projected
    onto the receive polarization).
    """
    chosen = select_backend(backend)
    if chosen == "numba":
        set_thread_count(threads)
        return _load_numba_sweep()(packed, points)
    return sweep_numpy(packed, points)
