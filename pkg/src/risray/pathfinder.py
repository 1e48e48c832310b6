"""Specular path enumeration via the image method, and per-path fields.

Every traced path runs transmitter -> panel cell -> (zero or more wall
bounces) -> receiver.  Bounce points are found by mirroring the receiver
through the wall planes in reverse order and walking the ray forward,
which yields the exact specular chain when it exists; finite wall extents,
front-face orientation, and occlusion by blocking rectangles prune
non-physical candidates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .antennas import Antenna, tx_launch_field
from .geometry import (
    RAY_EPS,
    Rect,
    Vec3,
    angles_in_frame,
    mirror_point,
    normalize,
    ray_rect_intersect,
    segment_blocked,
)
from .propagation import (
    Phasor,
    field_at_rx,
    fresnel_reflect,
    impinging_field,
    received_power,
    superpose,
    watts_to_dbm,
)
from .ris import element_reemit
from .scene import Scene

SurfaceSequence = tuple[int, ...]

PATH_DUMP_HEADER = "# risray paths v1"


@dataclass(frozen=True, eq=False)
class PropagationPath:
    """One specular path from a panel cell to a receive point.

    ``points`` runs cell center, bounce points in order, receive point.
    ``sequence`` holds the scene surface ids bounced off, in bounce order.
    """

    element_index: int
    sequence: SurfaceSequence
    points: tuple[np.ndarray, ...]
    hop_lengths: tuple[float, ...]
    total_length: float

    @property
    def order(self) -> int:
        return len(self.sequence)


# --------------------------------------------------------------------------
# sequence enumeration


def enumerate_sequences(
    reflective_ids: Iterable[int], max_order: int
) -> list[SurfaceSequence]:
    """All bounce sequences of length 0..max_order without immediate repeats.

    Deterministic: sorted by (length, lexicographic id order), independent
    of the input iteration order.
    """
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    ids = sorted(set(int(i) for i in reflective_ids))
    out: list[SurfaceSequence] = [()]
    level: list[SurfaceSequence] = [()]
    for _ in range(max_order):
        level = [s + (i,) for s in level for i in ids if not s or s[-1] != i]
        out.extend(level)
        if not level:
            break
    return out


# --------------------------------------------------------------------------
# image-method chain construction


def image_method_chain(
    start: Vec3,
    end: Vec3,
    sequence: SurfaceSequence,
    surface_rects: Sequence[Rect],
    eps: float = RAY_EPS,
) -> list[np.ndarray] | None:
    """Bounce points of the specular chain start -> sequence -> end.

    Mirrors ``end`` through the bounce planes back-to-front, then walks the
    ray forward aiming at each successive image.  Returns None when any
    bounce misses its finite rectangle, approaches from the back face, or
    degenerates.
    """
    k = len(sequence)
    start = np.asarray(start, dtype=np.float64)
    end = np.asarray(end, dtype=np.float64)
    if k == 0:
        return []
    targets: list[np.ndarray] = [end] * k
    img = end
    for j in range(k - 1, -1, -1):
        img = mirror_point(img, surface_rects[sequence[j]])
        targets[j] = img
    points: list[np.ndarray] = []
    cur = start
    for j in range(k):
        rect = surface_rects[sequence[j]]
        d = targets[j] - cur
        if float(np.dot(d, rect.normal)) >= 0.0:
            return None  # must approach the reflecting front face
        hit = ray_rect_intersect(cur, d, rect, eps)
        if hit is None:
            return None
        points.append(hit[0])
        cur = hit[0]
    last_n = surface_rects[sequence[-1]].normal
    if float(np.dot(end - cur, last_n)) <= 0.0:
        return None  # receiver on or behind the last mirror
    return points


def trace_chain(
    start: Vec3,
    end: Vec3,
    sequence: SurfaceSequence,
    surface_rects: Sequence[Rect],
    blocking_rects: Sequence[Rect],
    static_exclude: frozenset[int] = frozenset(),
    eps: float = RAY_EPS,
) -> list[np.ndarray] | None:
    """Full unblocked point chain start..end, or None.

    ``blocking_rects`` must list the scene surfaces first so bounce-surface
    ids can be excluded from their own hops; ``static_exclude`` removes
    non-occluding rectangles from every hop.
    """
    chain = image_method_chain(start, end, sequence, surface_rects, eps)
    if chain is None:
        return None
    pts = [np.asarray(start, float), *chain, np.asarray(end, float)]
    for i in range(len(pts) - 1):
        exclude = set(static_exclude)
        if i >= 1:
            exclude.add(sequence[i - 1])
        if i < len(sequence):
            exclude.add(sequence[i])
        if segment_blocked(pts[i], pts[i + 1], blocking_rects, exclude, eps):
            return None
    return pts


# --------------------------------------------------------------------------
# per-scene path finding


def _static_exclude(scene: Scene) -> frozenset[int]:
    """Ids of surfaces that never occlude (blocking: false)."""
    return frozenset(i for i, s in enumerate(scene.surfaces) if not s.blocking)


def sequences_for_point(
    scene: Scene,
    rx_point: Vec3,
    max_order: int,
    center_prune: bool,
) -> list[SurfaceSequence]:
    """Candidate bounce sequences for one receive point.

    With pruning on, a sequence is kept only if the chain traced from the
    panel *center* exists and is unblocked; this removes whole families of
    dead candidates at the cost of edge cases where only off-center cells
    would have seen a path.
    """
    seqs = enumerate_sequences(scene.reflective_ids(), max_order)
    if not center_prune:
        return seqs
    rects = [s.rect for s in scene.surfaces]
    blocking = scene.blocking_rects()
    excl = _static_exclude(scene)
    center = scene.panel.center
    return [
        s
        for s in seqs
        if trace_chain(center, rx_point, s, rects, blocking, excl) is not None
    ]


def tx_visible_elements(scene: Scene) -> np.ndarray:
    """Boolean mask: transmitter has an unblocked ray to each cell."""
    blocking = scene.blocking_rects()
    excl = _static_exclude(scene)
    tx = scene.tx.frame.origin
    mask = np.zeros(scene.panel.n_elements, dtype=bool)
    for i, el in enumerate(scene.panel.elements):
        mask[i] = not segment_blocked(tx, el.center, blocking, excl)
    return mask


def find_paths(
    scene: Scene,
    rx_point: Vec3,
    max_order: int | None = None,
    center_prune: bool | None = None,
) -> list[PropagationPath]:
    """All surviving specular paths to one receive point.

    Ordered by (cell index, sequence rank); this order is part of the
    contract because field superposition is sequential.
    """
    k = scene.solver.max_order if max_order is None else max_order
    prune = scene.solver.center_prune if center_prune is None else center_prune
    rects = [s.rect for s in scene.surfaces]
    blocking = scene.blocking_rects()
    excl = _static_exclude(scene)
    rx = np.asarray(rx_point, dtype=np.float64)
    seqs = sequences_for_point(scene, rx, k, prune)
    visible = tx_visible_elements(scene)

    paths: list[PropagationPath] = []
    for el in scene.panel.elements:
        if not visible[el.index]:
            continue
        for seq in seqs:
            pts = trace_chain(el.center, rx, seq, rects, blocking, excl)
            if pts is None:
                continue
            hops = tuple(
                float(np.linalg.norm(pts[i + 1] - pts[i]))
                for i in range(len(pts) - 1)
            )
            paths.append(
                PropagationPath(
                    element_index=el.index,
                    sequence=tuple(seq),
                    points=tuple(pts),
                    hop_lengths=hops,
                    total_length=float(sum(hops)),
                )
            )
    return paths


# --------------------------------------------------------------------------
# field along a path


def path_field(
    scene: Scene,
    path: PropagationPath,
    mode: str | None = None,
    rx_antenna: Antenna | None = None,
) -> Phasor:
    """Complex field delivered to the receiver port by one path.

    Composes launch, cell capture, reemission, one Fresnel reflection per
    bounce, and the receive stage; free-space spreading and phase after the
    cell use the unfolded total path length.
    """
    mode = scene.solver.mode if mode is None else mode
    lam = scene.radio.wavelength
    panel = scene.panel
    el = panel.elements[path.element_index]
    if rx_antenna is None:
        rx_antenna = scene.make_rx_antenna(path.points[-1])

    d_vec = el.center - scene.tx.frame.origin
    d_t = float(np.linalg.norm(d_vec))
    d_hat = d_vec / d_t
    e = tx_launch_field(scene.tx, d_hat, mode)
    _, theta_in = angles_in_frame(el.frame, -d_hat)
    e = impinging_field(e, d_t, theta_in, el.area, panel.element_pattern, lam)

    out_dir = normalize(path.points[1] - path.points[0])
    if mode == "vector":
        pol = scene.tx.world_polarization()
        transverse = pol - float(np.dot(pol, d_hat)) * d_hat
        p_in = normalize(transverse)
        e = element_reemit(
            e, el, out_dir, panel.element_gain, "vector", p_in, panel.polarization_axis
        )
    else:
        e = element_reemit(e, el, out_dir, panel.element_gain, "scalar")

    for b, sid in enumerate(path.sequence):
        surf = scene.surfaces[sid]
        hop_dir = normalize(path.points[b + 1] - path.points[b])
        e, _ = fresnel_reflect(
            e, hop_dir, surf.rect, surf.material, scene.radio.frequency, mode
        )

    arrival = normalize(path.points[-1] - path.points[-2])
    return field_at_rx(e, path.total_length, rx_antenna, arrival, lam, mode)


def solve_point(
    scene: Scene,
    rx_point: Vec3,
    max_order: int | None = None,
    mode: str | None = None,
    center_prune: bool | None = None,
) -> tuple[Phasor, list[PropagationPath]]:
    """Superposed field at one receive point plus the contributing paths.

    Reference (object-level) solver; the array kernels must agree with it.
    """
    mode = scene.solver.mode if mode is None else mode
    paths = find_paths(scene, rx_point, max_order, center_prune)
    rx_antenna = scene.make_rx_antenna(np.asarray(rx_point, float))
    fields = [path_field(scene, p, mode, rx_antenna) for p in paths]
    return superpose(fields), paths


def point_power_dbm(
    scene: Scene,
    rx_point: Vec3,
    max_order: int | None = None,
    mode: str | None = None,
    center_prune: bool | None = None,
) -> float:
    field, _ = solve_point(scene, rx_point, max_order, mode, center_prune)
    return watts_to_dbm(received_power(field))


# --------------------------------------------------------------------------
# path dump format


def write_path_dump(dest, paths: Sequence[PropagationPath]) -> None:
    """One line per path: cell index, bounce count, unfolded length,
    bounce-surface ids, and the point chain."""

    def fmt(fh):
        fh.write(PATH_DUMP_HEADER + "\n")
        fh.write("# element order length_m sequence points_x,y,z;...\n")
        for p in paths:
            seq = ",".join(str(i) for i in p.sequence) if p.sequence else "-"
            pts = ";".join(
                ",".join(f"{c:.6f}" for c in point) for point in p.points
            )
            fh.write(f"{p.element_index} {p.order} {p.total_length:.9f} {seq} {pts}\n")

    if hasattr(dest, "write"):
        fmt(dest)
    else:
        with open(dest, "w", encoding="utf-8") as fh:
            fmt(fh)
