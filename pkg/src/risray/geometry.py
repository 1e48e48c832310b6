"""3-D primitives for the ray tracer: frames, rectangles, and intersection tests.

Conventions used throughout the package:

* Vectors are ``numpy`` arrays of shape ``(3,)`` and dtype float64.
* A :class:`Frame` is a right-handed orthonormal basis attached to an origin.
  Directions expressed "in a frame" use that frame's axes; the elevation angle
  ``theta`` is measured from the frame's z axis and the azimuth ``phi`` from
  the x axis toward the y axis.
* Rectangles are one-sided for reflection (the front side is the one the
  normal points away from) and two-sided for occlusion tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

Vec3 = NDArray[np.float64]

#: Parametric guard band used by intersection and occlusion tests, in meters.
#: Hits closer than this to a segment endpoint are ignored so that rays
#: leaving or arriving exactly on a surface do not collide with it.
RAY_EPS = 1e-6

_ORTHO_TOL = 1e-9


class GeometryError(ValueError):
    """Raised for degenerate geometric input (bad frames, zero vectors...)."""


def vec3(x: float, y: float, z: float) -> Vec3:
    """Build a float64 3-vector."""
    return np.array([x, y, z], dtype=np.float64)


def norm(v: Vec3) -> float:
    """Euclidean length of ``v``."""
    return float(np.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]))


def normalize(v: Vec3) -> Vec3:
    """Return ``v`` scaled to unit length.

    Raises:
        GeometryError: if ``v`` is shorter than 1e-12.
    """
    n = norm(v)
    if n < 1e-12:
        raise GeometryError("cannot normalize a (near-)zero vector")
    return v / n


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.asarray(a, dtype=np.float64).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class Frame:
    """Right-handed orthonormal basis at ``origin``.

    Attributes:
        origin: base point of the frame, world coordinates [m].
        x, y, z: unit axes in world coordinates.  ``z`` doubles as the
            surface/antenna normal wherever a frame is attached to one.
    """

    origin: Vec3
    x: Vec3
    y: Vec3
    z: Vec3

    def __post_init__(self) -> None:
        for name in ("origin", "x", "y", "z"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        for name in ("x", "y", "z"):
            v = getattr(self, name)
            if abs(norm(v) - 1.0) > _ORTHO_TOL:
                raise GeometryError(f"frame axis {name} is not unit length")
        if (
            abs(float(np.dot(self.x, self.y))) > _ORTHO_TOL
            or abs(float(np.dot(self.y, self.z))) > _ORTHO_TOL
            or abs(float(np.dot(self.z, self.x))) > _ORTHO_TOL
        ):
            raise GeometryError("frame axes are not mutually orthogonal")
        if norm(np.cross(self.x, self.y) - self.z) > 1e-8:
            raise GeometryError("frame is not right-handed (x cross y != z)")

    @staticmethod
    def identity(origin: Vec3 | None = None) -> "Frame":
        """World-aligned frame at ``origin`` (default: the world origin)."""
        o = vec3(0.0, 0.0, 0.0) if origin is None else origin
        return Frame(o, vec3(1, 0, 0), vec3(0, 1, 0), vec3(0, 0, 1))

    @staticmethod
    def from_z(origin: Vec3, z_axis: Vec3, up_hint: Vec3 | None = None) -> "Frame":
        """Complete a frame around a prescribed z axis.

        The x axis is chosen as ``up_hint x z`` (so the y axis lies in the
        plane spanned by ``z`` and ``up_hint``); when ``z`` is parallel to
        the hint, the world x axis substitutes for it.  Deterministic.
        """
        z = normalize(z_axis)
        hint = vec3(0.0, 0.0, 1.0) if up_hint is None else normalize(up_hint)
        if abs(float(np.dot(hint, z))) > 1.0 - 1e-9:
            hint = vec3(1.0, 0.0, 0.0)
        x = normalize(np.cross(hint, z))
        y = np.cross(z, x)
        return Frame(origin, x, y, z)

    def to_world(self, local: Vec3) -> Vec3:
        """Map frame coordinates to a world point."""
        return self.origin + local[0] * self.x + local[1] * self.y + local[2] * self.z

    def direction_to_world(self, local: Vec3) -> Vec3:
        """Map a direction given in frame coordinates to world coordinates."""
        return local[0] * self.x + local[1] * self.y + local[2] * self.z


@dataclass(frozen=True, eq=False)
class Rect:
    """Finite rectangle: the frame's z axis is the surface normal.

    ``half_extents`` are the half widths along the frame's in-plane x and y
    axes, so the rectangle covers ``|u| <= half_extents[0]``,
    ``|v| <= half_extents[1]`` in local in-plane coordinates.
    """

    frame: Frame
    half_extents: tuple[float, float]

    def __post_init__(self) -> None:
        hu, hv = self.half_extents
        if not (hu > 0.0 and hv > 0.0):
            raise GeometryError("rectangle half extents must be positive")
        object.__setattr__(self, "half_extents", (float(hu), float(hv)))

    @property
    def normal(self) -> Vec3:
        return self.frame.z

    @property
    def center(self) -> Vec3:
        return self.frame.origin

    def contains_plane_point(self, p: Vec3, tol: float = 0.0) -> bool:
        """True if ``p`` (assumed on the plane) lies inside the bounds."""
        rel = p - self.frame.origin
        u = float(np.dot(rel, self.frame.x))
        v = float(np.dot(rel, self.frame.y))
        hu, hv = self.half_extents
        return abs(u) <= hu + tol and abs(v) <= hv + tol


def spherical_to_cartesian(r: float, phi: float, theta: float, frame: Frame) -> Vec3:
    """Resolve spherical coordinates measured in ``frame`` to a world point.

    Args:
        r: radial distance [m], must be >= 0.
        phi: azimuth [rad], measured from the frame x axis toward y.
        theta: elevation [rad] measured from the frame z axis, in [0, pi].

    Returns:
        ``origin + r * (sin(theta)cos(phi) x + sin(theta)sin(phi) y + cos(theta) z)``.
    """
    if r < 0.0:
        raise GeometryError("radius must be non-negative")
    if not (0.0 <= theta <= np.pi + 1e-12):
        raise GeometryError("elevation must lie in [0, pi]")
    st = np.sin(theta)
    local = vec3(r * st * np.cos(phi), r * st * np.sin(phi), r * np.cos(theta))
    return frame.to_world(local)


def angles_in_frame(frame: Frame, direction: Vec3) -> tuple[float, float]:
    """Azimuth/elevation of a world direction, measured in ``frame``.

    Returns:
        ``(phi, theta)`` with ``theta = arccos(d . z)`` in [0, pi] and
        ``phi = atan2(d . y, d . x)`` in (-pi, pi].  At the poles (direction
        parallel to the z axis) the azimuth is defined as 0.
    """
    d = normalize(direction)
    cz = float(np.clip(np.dot(d, frame.z), -1.0, 1.0))
    theta = float(np.arccos(cz))
    px = float(np.dot(d, frame.x))
    py = float(np.dot(d, frame.y))
    if np.hypot(px, py) < 1e-12:
        return 0.0, theta
    phi = float(np.arctan2(py, px))
    if phi <= -np.pi:
        phi = np.pi
    return phi, theta


def mirror_point(p: Vec3, rect: Rect) -> Vec3:
    """Reflect ``p`` across the plane carrying ``rect``."""
    n = rect.normal
    return p - 2.0 * float(np.dot(p - rect.frame.origin, n)) * n


def ray_rect_intersect(
    origin: Vec3, direction: Vec3, rect: Rect, eps: float = RAY_EPS
) -> tuple[Vec3, float] | None:
    """First intersection of a ray with a finite rectangle.

    Args:
        origin: ray start point.
        direction: ray direction; need not be unit length.
        rect: target rectangle (both sides are considered).
        eps: minimum parametric distance; hits with ``t <= eps`` are ignored.

    Returns:
        ``(point, t)`` with ``point = origin + t * direction`` when the ray
        meets the rectangle beyond ``eps`` and inside its bounds, else None.
        Rays parallel to the plane (|d . n| < 1e-12) never intersect.
    """
    n = rect.normal
    denom = float(np.dot(direction, n))
    if abs(denom) < 1e-12:
        return None
    t = float(np.dot(rect.frame.origin - origin, n)) / denom
    if t <= eps:
        return None
    hit = origin + t * direction
    if not rect.contains_plane_point(hit):
        return None
    return hit, t


def segment_blocked(
    a: Vec3,
    b: Vec3,
    rects: "list[Rect] | tuple[Rect, ...]",
    exclude: "frozenset[int] | set[int] | tuple[int, ...]" = (),
    eps: float = RAY_EPS,
) -> bool:
    """True if any rectangle cuts the open interior of segment ``a``-``b``.

    Rectangles are indexed by their position in ``rects``; indices listed in
    ``exclude`` are skipped (used for a hop's own start/end surfaces).  Only
    hits with parametric position in ``(eps, L - eps)`` count, where ``L``
    is the segment length, so surfaces touching an endpoint do not block.
    Occlusion is two-sided.  Symmetric in ``a`` and ``b``.
    """
    d = b - a
    length = norm(d)
    if length <= 2.0 * eps:
        return False
    excl = set(exclude)
    for idx, rect in enumerate(rects):
        if idx in excl:
            continue
        n = rect.normal
        denom = float(np.dot(d, n))
        if abs(denom) < 1e-15:
            continue
        t = float(np.dot(rect.frame.origin - a, n)) / denom
        if t * length <= eps or t * length >= length - eps:
            continue
        if rect.contains_plane_point(a + t * d):
            return True
    return False
