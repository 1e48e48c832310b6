"""Grid power sweeps, greedy panel configuration, and result file formats.

This module drives the array kernels over a receive grid, turns the complex
fields into a dBm map with per-point path census, freezes greedily optimized
panel configurations, and serializes results as CSV tables and PPM heatmaps.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .kernels import pack_scene, select_backend, sweep_points
from .pathfinder import find_paths, path_field
from .propagation import DBM_FLOOR, ETA0
from .ris import configure_greedy, get_config, set_config
from .scene import GridSpec, Scene, SceneError, scene_hash

__all__ = [
    "PowerGrid",
    "config_digest",
    "element_contributions",
    "optimize_panel",
    "sweep_grid",
    "write_grid_csv",
    "read_grid_csv",
    "write_heatmap",
    "HEATMAP_COMMENT",
]

HEATMAP_COMMENT = "# risray heatmap v1"

# Color ramp for heatmaps: evenly spaced anchors, linearly interpolated.
# Darkest anchor doubles as the "no power" color for floor-valued cells.
_COLOR_ANCHORS = np.array(
    [
        [13, 8, 135],
        [126, 3, 168],
        [204, 71, 120],
        [248, 149, 64],
        [240, 249, 33],
    ],
    dtype=np.float64,
)


# --------------------------------------------------------------------------
# results container


@dataclass(frozen=True)
class PowerGrid:
    """Received power over a horizontal grid plus a per-point path census.

    ``values_dbm`` has shape ``(n_y, n_x)``; row 0 is the minimum-y row and
    column 0 the minimum-x column, matching :meth:`GridSpec.points` order.
    """

    grid: GridSpec
    values_dbm: np.ndarray
    path_count: np.ndarray
    reflected_count: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        shape = (self.grid.n_y, self.grid.n_x)
        for name in ("values_dbm", "path_count", "reflected_count"):
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValueError(f"{name} shape {arr.shape} != grid shape {shape}")


def config_digest(gammas) -> str:
    """Short stable digest of a reflection-coefficient assignment."""
    arr = np.ascontiguousarray(np.asarray(gammas, dtype=np.complex128))
    return hashlib.sha256(arr.tobytes()).hexdigest()[:12]


# --------------------------------------------------------------------------
# greedy panel configuration


def element_contributions(
    scene: Scene,
    point,
    max_order: int = 0,
    mode: str = "scalar",
    center_prune: bool | None = None,
) -> np.ndarray:
    """Per-element complex field at ``point`` for unit reflection coefficient.

    Every surviving path reemits from its element exactly once (panels never
    act as bounce surfaces), so the received field is linear in each
    coefficient and the full response is ``sum_m gamma_m * contributions[m]``.
    In vector mode the contribution is the field's component along the
    receive polarization axis (all arriving fields are parallel to it after
    the receive-side projection, so magnitudes and sums are preserved).
    """
    unit = set_config(scene.panel, [1.0 + 0.0j] * scene.panel.n_elements)
    unit_scene = scene.with_panel(unit)
    paths = find_paths(unit_scene, point, max_order, center_prune)
    rx_antenna = unit_scene.make_rx_antenna(np.asarray(point, dtype=np.float64))
    out = np.zeros(scene.panel.n_elements, dtype=np.complex128)
    if mode == "vector":
        p_rx = rx_antenna.world_polarization().astype(np.complex128)
        p_norm = complex(np.vdot(p_rx, p_rx))
        for p in paths:
            f = path_field(unit_scene, p, mode, rx_antenna)
            out[p.element_index] += complex(np.vdot(p_rx, f)) / p_norm
    else:
        for p in paths:
            out[p.element_index] += path_field(unit_scene, p, mode, rx_antenna)
    return out


def optimize_panel(
    scene: Scene,
    target=None,
    max_order: int = 0,
    mode: str = "scalar",
    center_prune: bool | None = None,
) -> tuple[Scene, np.ndarray]:
    """Greedily configure the panel to maximize power at a target point.

    The objective uses the direct element-to-target response by default
    (``max_order=0``, scalar); higher orders are valid because the field
    stays linear in the coefficients.  Returns the reconfigured scene and
    the chosen coefficients.
    """
    if target is None:
        target = scene.target
    if target is None:
        raise SceneError("no target point: scene defines none and none was given")
    point = np.asarray(target, dtype=np.float64)
    contrib = element_contributions(scene, point, max_order, mode, center_prune)
    gammas = configure_greedy(scene.panel, scene.alphabet, lambda m: contrib[m])
    panel = set_config(scene.panel, gammas, scene.alphabet)
    return scene.with_panel(panel), gammas


# --------------------------------------------------------------------------
# grid sweep


def sweep_grid(
    scene: Scene,
    grid: GridSpec | None = None,
    max_order: int | None = None,
    mode: str | None = None,
    center_prune: bool | None = None,
    backend: str | None = None,
    threads: int | None = None,
) -> PowerGrid:
    """Received power at every grid point, via the selected array kernel."""
    g = scene.grid if grid is None else grid
    if g is None:
        raise SceneError("no grid: scene defines none and none was given")
    resolved = select_backend(backend)
    packed = pack_scene(scene, max_order=max_order, mode=mode, center_prune=center_prune)
    fields, n_paths, n_reflected = sweep_points(
        packed, g.points(), backend=resolved, threads=threads
    )
    power = np.abs(fields) ** 2 / (2.0 * ETA0)
    values = np.full(power.shape, DBM_FLOOR, dtype=np.float64)
    lit = power > 0.0
    values[lit] = np.maximum(10.0 * np.log10(power[lit] * 1e3), DBM_FLOOR)
    shape = (g.n_y, g.n_x)
    return PowerGrid(
        grid=g,
        values_dbm=values.reshape(shape),
        path_count=n_paths.reshape(shape).astype(np.int32),
        reflected_count=n_reflected.reshape(shape).astype(np.int32),
        metadata={
            "scene": scene_hash(scene),
            "ris_config": config_digest(get_config(scene.panel)),
            "max_order": packed.max_order,
            "mode": "vector" if packed.mode_vector else "scalar",
            "center_prune": bool(packed.center_prune),
            "backend": resolved,
        },
    )


# --------------------------------------------------------------------------
# CSV table format


def _open_text(dest_or_source, write: bool):
    if hasattr(dest_or_source, "read") or hasattr(dest_or_source, "write"):
        return dest_or_source, False
    mode = "w" if write else "r"
    return open(dest_or_source, mode, encoding="utf-8", newline="\n" if write else None), True


def write_grid_csv(dest, grid: PowerGrid) -> None:
    """Write a dBm table: header row of x coordinates, one row per y.

    The top-left cell is a ``y\\x`` axis label; every numeric cell uses six
    decimals, so unlit points serialize as the -400.000000 floor sentinel.
    """
    fh, owned = _open_text(dest, write=True)
    try:
        xs = grid.grid.xs()
        fh.write("y\\x," + ",".join(f"{x:.6f}" for x in xs) + "\n")
        for iy, y in enumerate(grid.grid.ys()):
            row = ",".join(f"{v:.6f}" for v in grid.values_dbm[iy])
            fh.write(f"{y:.6f},{row}\n")
    finally:
        if owned:
            fh.close()


def read_grid_csv(source) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Read a table written by :func:`write_grid_csv`.

    Returns ``(xs, ys, values_dbm)`` with ``values_dbm`` shaped
    ``(len(ys), len(xs))``.
    """
    fh, owned = _open_text(source, write=False)
    try:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    finally:
        if owned:
            fh.close()
    if not lines:
        raise ValueError("empty grid table")
    header = lines[0].split(",")
    if header[0] != "y\\x":
        raise ValueError("missing y\\x header cell")
    xs = np.array([float(c) for c in header[1:]], dtype=np.float64)
    ys = []
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(xs) + 1:
            raise ValueError(f"row has {len(cells) - 1} cells, expected {len(xs)}")
        ys.append(float(cells[0]))
        rows.append([float(c) for c in cells[1:]])
    return xs, np.array(ys, dtype=np.float64), np.array(rows, dtype=np.float64)


# --------------------------------------------------------------------------
# PPM heatmap


def _colormap(norm: np.ndarray) -> np.ndarray:
    """Map values in [0, 1] through the anchor ramp; returns uint8 RGB."""
    n_seg = len(_COLOR_ANCHORS) - 1
    scaled = np.clip(norm, 0.0, 1.0) * n_seg
    idx = np.minimum(scaled.astype(np.int64), n_seg - 1)
    frac = scaled - idx
    lo = _COLOR_ANCHORS[idx]
    hi = _COLOR_ANCHORS[idx + 1]
    rgb = lo + (hi - lo) * frac[..., None]
    return np.clip(np.rint(rgb), 0, 255).astype(np.uint8)


def write_heatmap(
    dest,
    grid: PowerGrid,
    vmin: float | None = None,
    vmax: float | None = None,
) -> None:
    """Write a binary PPM heatmap of the dBm map.

    Pixel rows follow array rows, so the first image row is the minimum-y
    grid row.  Floor-valued cells always take the darkest ramp color; the
    default range spans the remaining (lit) cells.
    """
    if vmin is not None and vmax is not None and not (vmin < vmax):
        raise ValueError(f"color range requires vmin < vmax, got [{vmin}, {vmax}]")
    values = grid.values_dbm
    lit = values > DBM_FLOOR
    if vmin is None:
        vmin = float(values[lit].min()) if lit.any() else 0.0
    if vmax is None:
        vmax = float(values[lit].max()) if lit.any() else 1.0
    span = vmax - vmin
    if span <= 0.0:
        norm = np.where(lit, 1.0, 0.0)
    else:
        norm = np.where(lit, np.clip((values - vmin) / span, 0.0, 1.0), 0.0)
    pixels = _colormap(norm)
    header = (
        f"P6\n{HEATMAP_COMMENT}\n{grid.grid.n_x} {grid.grid.n_y}\n255\n"
    ).encode("ascii")
    payload = header + pixels.tobytes()
    if hasattr(dest, "write"):
        dest.write(payload)
    else:
        with open(dest, "wb") as fh:
            fh.write(payload)
