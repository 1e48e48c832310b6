"""Array kernels: the grid solver packed into flat numpy arrays.

``pack`` flattens a scene into plain arrays, ``numpy_backend`` and
``numba_backend`` implement the identical point sweep (vectorized and
JIT-compiled respectively), and ``backend`` picks between them via the
``RISRAY_BACKEND`` environment variable or an explicit argument.
"""

from .backend import available_backends, select_backend, sweep_points
from .pack import PackedScene, pack_scene

__all__ = [
    "PackedScene",
    "pack_scene",
    "available_backends",
    "select_backend",
    "sweep_points",
]
