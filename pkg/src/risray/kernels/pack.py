"""Flatten a scene into the plain arrays the sweep kernels consume.

The packed form pins down everything that is per-element or per-surface
constant: the complex per-cell launch product (transmit launch, capture at
the cell, cell gain, reflection coefficient), transmitter visibility, wall
geometry and complex permittivities, and candidate bounce sequences.  The
kernels only add the parts that depend on the receive point.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..antennas import tx_launch_field
from ..geometry import angles_in_frame
from ..pathfinder import enumerate_sequences, tx_visible_elements
from ..propagation import complex_permittivity, impinging_field
from ..scene import Scene

_PATTERN_CODES = {"isotropic": 0, "directional": 1, "monopole": 2, "cosine": 3}


@dataclass(frozen=True, eq=False)
class PackedScene:
    """Scene flattened for the array kernels; all arrays read-only."""

    mode_vector: bool
    center_prune: bool
    max_order: int
    lam: float
    # cells
    el_centers: np.ndarray  # (M, 3) float64
    el_base: np.ndarray  # (M,) complex128: launch * capture * sqrt(G) * gamma
    el_visible: np.ndarray  # (M,) bool
    panel_normal: np.ndarray  # (3,)
    panel_center: np.ndarray  # (3,)
    pol_axis: np.ndarray  # (3,) reemission polarization axis
    # bounce sequences over surface ids, flattened
    seq_flat: np.ndarray  # (L,) int32
    seq_start: np.ndarray  # (S + 1,) int32
    # rectangles: scene surfaces first (ids match), then panel rects
    r_origin: np.ndarray  # (NR, 3)
    r_normal: np.ndarray  # (NR, 3)
    r_ux: np.ndarray  # (NR, 3)
    r_uy: np.ndarray  # (NR, 3)
    r_half: np.ndarray  # (NR, 2)
    r_blocking: np.ndarray  # (NR,) bool
    surf_eps_c: np.ndarray  # (n_surfaces,) complex128
    # receiver template
    rx_kind: int
    rx_param: float
    rx_gain: float
    rx_axis: np.ndarray  # (3,)

    @property
    def n_elements(self) -> int:
        return self.el_centers.shape[0]

    @property
    def n_sequences(self) -> int:
        return self.seq_start.shape[0] - 1


def _rx_pattern_code(scene: Scene) -> tuple[int, float]:
    pattern = scene.rx.pattern
    code = _PATTERN_CODES[pattern.kind]
    if pattern.kind == "directional":
        param = pattern.gain_linear / 2.0 - 1.0  # cosine-power exponent
    elif pattern.kind == "monopole":
        param = 2.0 * np.pi * pattern.height_over_lambda
    else:
        param = 0.0
    return code, param


def pack_scene(
    scene: Scene,
    max_order: int | None = None,
    mode: str | None = None,
    center_prune: bool | None = None,
) -> PackedScene:
    """Flatten ``scene`` (with optional solver overrides) for the kernels."""
    k = scene.solver.max_order if max_order is None else max_order
    mode = scene.solver.mode if mode is None else mode
    prune = scene.solver.center_prune if center_prune is None else center_prune
    lam = scene.radio.wavelength
    panel = scene.panel

    centers = np.array([el.center for el in panel.elements], dtype=np.float64)
    base = np.empty(panel.n_elements, dtype=np.complex128)
    sqrt_gain = np.sqrt(panel.element_gain)
    tx_origin = scene.tx.frame.origin
    for el in panel.elements:
        d_vec = el.center - tx_origin
        d_t = float(np.linalg.norm(d_vec))
        d_hat = d_vec / d_t
        e = tx_launch_field(scene.tx, d_hat, "scalar")
        _, theta_in = angles_in_frame(el.frame, -d_hat)
        e = impinging_field(e, d_t, theta_in, el.area, panel.element_pattern, lam)
        base[el.index] = e * sqrt_gain * el.gamma

    seqs = enumerate_sequences(scene.reflective_ids(), k)
    seq_start = np.zeros(len(seqs) + 1, dtype=np.int32)
    for i, s in enumerate(seqs):
        seq_start[i + 1] = seq_start[i] + len(s)
    seq_flat = np.fromiter(
        (sid for s in seqs for sid in s), dtype=np.int32, count=int(seq_start[-1])
    )

    rects = scene.blocking_rects()
    nr = len(rects)
    r_origin = np.empty((nr, 3))
    r_normal = np.empty((nr, 3))
    r_ux = np.empty((nr, 3))
    r_uy = np.empty((nr, 3))
    r_half = np.empty((nr, 2))
    for i, rect in enumerate(rects):
        r_origin[i] = rect.frame.origin
        r_normal[i] = rect.frame.z
        r_ux[i] = rect.frame.x
        r_uy[i] = rect.frame.y
        r_half[i] = rect.half_extents
    r_blocking = np.ones(nr, dtype=bool)
    for i, s in enumerate(scene.surfaces):
        r_blocking[i] = s.blocking

    eps_c = np.array(
        [
            complex_permittivity(s.material, scene.radio.frequency)
            for s in scene.surfaces
        ],
        dtype=np.complex128,
    )

    rx_kind, rx_param = _rx_pattern_code(scene)
    rx_axis = np.asarray(scene.rx.polarization_world, dtype=np.float64)
    rx_axis = rx_axis / np.linalg.norm(rx_axis)

    arrays = dict(
        el_centers=centers,
        el_base=base,
        el_visible=tx_visible_elements(scene),
        panel_normal=np.array(panel.frame.z, dtype=np.float64),
        panel_center=np.array(panel.center, dtype=np.float64),
        pol_axis=np.array(panel.polarization_axis, dtype=np.float64),
        seq_flat=seq_flat,
        seq_start=seq_start,
        r_origin=r_origin,
        r_normal=r_normal,
        r_ux=r_ux,
        r_uy=r_uy,
        r_half=r_half,
        r_blocking=r_blocking,
        surf_eps_c=eps_c,
        rx_axis=rx_axis,
    )
    for a in arrays.values():
        a.setflags(write=False)
    return PackedScene(
        mode_vector=(mode == "vector"),
        center_prune=prune,
        max_order=k,
        lam=lam,
        rx_kind=rx_kind,
        rx_param=rx_param,
        rx_gain=scene.rx.gain_linear,
        **arrays,
    )
