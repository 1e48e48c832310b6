"""Deterministic ray tracer for RIS-assisted indoor radio links."""

__version__ = "0.1.0"

from .geometry import Frame, Rect, Vec3, vec3  # noqa: F401
from .scene import Scene, GridSpec, load_scene_file, load_preset, resolve_scene  # noqa: F401
from .sweep import PowerGrid, optimize_panel, sweep_grid  # noqa: F401
