"""Reconfigurable reflecting panel: element layout, reemission, configuration.

A panel is a centered hexagonal lattice of small reradiating cells in the
plane of a bounding rectangle.  Each cell picks up the impinging ray, scales
it by its complex reflection coefficient, and reemits toward the receiver
side with a cosine power pattern whose peak gain follows from the cell's
effective area.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from .antennas import AntennaPattern
from .geometry import Frame, Rect, Vec3, normalize

RIS_CONFIG_HEADER = "# risray ris-config v1"


class RisError(ValueError):
    """Raised for invalid panel parameters or configurations."""


@dataclass(frozen=True, eq=False)
class RisElement:
    """One reradiating cell.

    Attributes:
        index: deterministic element id (0 = panel center, rings outward).
        center: cell center, world coordinates [m].
        frame: cell frame; z is the cell normal.
        d_y, d_z: effective cell extents along the panel's two in-plane
            axes [m].
        gamma: complex reflection coefficient currently assigned.
    """

    index: int
    center: Vec3
    frame: Frame
    d_y: float
    d_z: float
    gamma: complex

    @property
    def area(self) -> float:
        """Effective cell area d_y * d_z [m^2]."""
        return self.d_y * self.d_z


@dataclass(frozen=True, eq=False)
class RisPanel:
    """A configured reflecting panel.

    Attributes:
        frame: panel frame; z is the panel normal, x/y span the face.
        elements: cells in index order.
        rect: opaque bounding rectangle of the physical panel.
        element_pattern: per-cell normalized power pattern (cosine).
        element_gain: per-cell peak gain (linear), shared by all cells.
        polarization_axis: unit vector (world) reemitted rays are polarized
            along, before the transverse projection; in-plane panel axis.
    """

    frame: Frame
    elements: tuple[RisElement, ...]
    rect: Rect
    element_pattern: AntennaPattern
    element_gain: float
    polarization_axis: Vec3

    @property
    def center(self) -> Vec3:
        return self.frame.origin

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    def element_centers(self) -> np.ndarray:
        """(M, 3) array of cell centers."""
        return np.array([el.center for el in self.elements])


def hex_ring_count(rings: int) -> int:
    """Cell count of a centered hexagonal lattice with ``rings`` rings."""
    if rings < 0:
        raise RisError("ring count must be >= 0")
    return 1 + 3 * rings * (rings + 1)


def _hex_lattice_coords(rings: int) -> list[tuple[int, int]]:
    """Axial lattice coordinates ring by ring (deterministic order helper)."""
    coords = [(0, 0)]
    for r in range(1, rings + 1):
        ring = []
        for q in range(-r, r + 1):
            for s in range(-r, r + 1):
                if (abs(q) + abs(s) + abs(q + s)) // 2 == r:
                    ring.append((q, s))
        coords.extend(ring)
    return coords


def default_element_gain(d_y: float, d_z: float, lam: float) -> float:
    """Peak gain of a cell with effective area d_y*d_z: 4*pi*A/lambda^2."""
    if d_y <= 0.0 or d_z <= 0.0 or lam <= 0.0:
        raise RisError("element dimensions and wavelength must be positive")
    return 4.0 * np.pi * d_y * d_z / (lam * lam)


def build_hex_panel(
    center: Vec3,
    frame: Frame,
    rings: int,
    pitch: float,
    d_y: float,
    d_z: float,
    rect_half_extents: tuple[float, float],
    gamma: complex = 1.0 + 0.0j,
    element_gain: float | None = None,
    lam: float | None = None,
) -> RisPanel:
    """Build a panel whose cells form a centered hexagonal lattice.

    Cell 0 sits at the panel center; ring r contributes 6*r cells appended
    ring by ring, each ring sorted by in-plane angle starting from the
    primary lattice axis.  One lattice axis is aligned with the panel's
    in-plane y axis; nearest-neighbor spacing equals ``pitch``.

    Args:
        center: panel center, world [m].
        frame: panel frame; z must be the panel normal.
        rings: number of hexagonal rings (>= 0).
        pitch: nearest-neighbor spacing [m].
        d_y, d_z: effective cell extents along the in-plane axes [m].
        rect_half_extents: half widths of the opaque bounding rectangle [m].
        gamma: initial reflection coefficient for every cell.
        element_gain: per-cell peak gain; when omitted it is derived from
            the cell area and ``lam`` via :func:`default_element_gain`.
        lam: wavelength [m]; required when ``element_gain`` is omitted.

    Raises:
        RisError: if the lattice does not fit inside the bounding rectangle.
    """
    if pitch <= 0.0:
        raise RisError("pitch must be positive")
    if element_gain is None:
        if lam is None:
            raise RisError("provide either element_gain or lam")
        element_gain = default_element_gain(d_y, d_z, lam)
    if not np.allclose(frame.origin, center, atol=1e-12):
        frame = Frame(np.asarray(center, float), frame.x, frame.y, frame.z)
    rect = Rect(frame, rect_half_extents)

    # primary lattice axis along the panel's in-plane y axis
    e1 = frame.y
    e2 = np.cross(frame.z, e1)
    a1 = pitch * np.array([1.0, 0.0])
    a2 = pitch * np.array([0.5, 0.5 * math.sqrt(3.0)])

    elements: list[RisElement] = []
    coords = _hex_lattice_coords(rings)
    cursor = 0
    for r in range(rings + 1):
        n_in_ring = 1 if r == 0 else 6 * r
        ring = coords[cursor : cursor + n_in_ring]
        cursor += n_in_ring
        planar = [(q * a1 + s * a2) for q, s in ring]
        if r > 0:
            ring_order = sorted(
                range(len(planar)),
                key=lambda i: math.atan2(planar[i][1], planar[i][0]) % (2.0 * math.pi),
            )
            planar = [planar[i] for i in ring_order]
        for uv in planar:
            u, v = float(uv[0]), float(uv[1])
            pos = frame.origin + u * e1 + v * e2
            rel = pos - frame.origin
            pu = float(np.dot(rel, frame.x))
            pv = float(np.dot(rel, frame.y))
            if abs(pu) > rect_half_extents[0] + 1e-12 or abs(pv) > rect_half_extents[1] + 1e-12:
                raise RisError(
                    f"lattice cell at in-plane ({pu:.4f}, {pv:.4f}) m falls outside "
                    f"the panel rectangle {rect_half_extents}"
                )
            elements.append(
                RisElement(
                    index=len(elements),
                    center=pos,
                    frame=Frame(pos, frame.x, frame.y, frame.z),
                    d_y=d_y,
                    d_z=d_z,
                    gamma=complex(gamma),
                )
            )

    return RisPanel(
        frame=frame,
        elements=tuple(elements),
        rect=rect,
        element_pattern=AntennaPattern.cosine(),
        element_gain=float(element_gain),
        polarization_axis=frame.y,
    )


def element_reemit(
    e_in: "complex | np.ndarray",
    element: RisElement,
    out_direction: Vec3,
    gain: float,
    mode: str = "scalar",
    incident_polarization: Vec3 | None = None,
    polarization_axis: Vec3 | None = None,
) -> "complex | np.ndarray":
    """Reemit an impinging field from one cell toward ``out_direction``.

    The reemitted magnitude is ``sqrt(gain * F(theta_out)) * |gamma| * |e_in|``
    with the cosine cell pattern evaluated in the cell frame; the zero phasor
    is returned for a back-hemisphere out-direction.  Linear in both the
    impinging field and the reflection coefficient.

    In vector mode the complex amplitude of ``e_in`` is recovered through
    ``incident_polarization`` (the real polarization axis the impinging field
    was built on) and the output is polarized along ``polarization_axis``
    projected transverse to the out-direction.
    """
    d = normalize(out_direction)
    # cosine pattern evaluated directly from the dot product so the
    # front/back boundary is exact
    f = max(float(np.dot(d, element.frame.z)), 0.0)
    if f <= 0.0:
        return np.zeros(3, np.complex128) if mode == "vector" else 0.0j
    factor = complex(np.sqrt(gain * f)) * element.gamma
    if mode == "scalar":
        return factor * e_in
    if mode != "vector":
        raise RisError(f"unknown propagation mode {mode!r}")
    if incident_polarization is None or polarization_axis is None:
        raise RisError("vector mode needs incident and output polarization axes")
    amplitude = complex(np.dot(np.asarray(incident_polarization, float), e_in))
    axis = np.asarray(polarization_axis, float)
    transverse = axis - float(np.dot(axis, d)) * d
    nrm = float(np.linalg.norm(transverse))
    if nrm < 1e-9:
        raise RisError("output polarization axis is parallel to the out-direction")
    return (factor * amplitude / nrm) * transverse.astype(np.complex128)


def get_config(panel: RisPanel) -> np.ndarray:
    """Reflection coefficients in element-index order, shape (M,)."""
    return np.array([el.gamma for el in panel.elements], dtype=np.complex128)


def set_config(
    panel: RisPanel, assignment: Sequence[complex], alphabet: Sequence[complex] | None = None
) -> RisPanel:
    """Return a new panel with the given reflection coefficients.

    Args:
        assignment: one coefficient per element, index order.
        alphabet: when given, every value must match an alphabet entry
            exactly (within 1e-12); raises otherwise.
    """
    if len(assignment) != panel.n_elements:
        raise RisError(
            f"assignment length {len(assignment)} != element count {panel.n_elements}"
        )
    values = [complex(g) for g in assignment]
    if alphabet is not None:
        allowed = [complex(a) for a in alphabet]
        for i, g in enumerate(values):
            if not any(abs(g - a) <= 1e-12 for a in allowed):
                raise RisError(f"element {i}: value {g} not in the alphabet")
    elements = tuple(
        replace(el, gamma=values[i]) for i, el in enumerate(panel.elements)
    )
    return replace(panel, elements=elements)


def configure_greedy(
    panel: RisPanel,
    alphabet: Sequence[complex],
    contribution_fn: Callable[[int], complex],
) -> np.ndarray:
    """Greedy per-element search maximizing the coherent sum at a target.

    Every element starts at the maximum-magnitude alphabet entry.  Elements
    are then swept in index order; each takes the alphabet entry maximizing
    ``|sum_m gamma_m * c_m|`` given all other assignments, ties resolved to
    the lowest alphabet index.  Sweeps repeat until an entire pass changes
    nothing.  The objective never decreases.

    Args:
        panel: panel to configure (not modified).
        alphabet: allowed reflection coefficients, in tie-break order.
        contribution_fn: maps element index -> complex field contribution at
            the target for unit reflection coefficient.

    Returns:
        (M,) complex array of chosen coefficients.

    Raises:
        RisError: empty alphabet, or no element contributes any field.
    """
    entries = [complex(a) for a in alphabet]
    if not entries:
        raise RisError("alphabet must not be empty")
    m_count = panel.n_elements
    contrib = np.array([complex(contribution_fn(m)) for m in range(m_count)])
    if not np.any(np.abs(contrib) > 0.0):
        raise RisError("no element contributes at the target (all dark)")

    start = entries[int(np.argmax([abs(a) for a in entries]))]
    gammas = np.full(m_count, start, dtype=np.complex128)
    total = complex(np.dot(gammas, contrib))

    previous_objective = -1.0
    for _ in range(10 * m_count + 10):
        changed = False
        for m in range(m_count):
            rest = total - gammas[m] * contrib[m]
            best_value = None
            best_entry = gammas[m]
            for entry in entries:
                value = abs(rest + entry * contrib[m])
                if best_value is None or value > best_value + 1e-18:
                    best_value = value
                    best_entry = entry
            if best_entry != gammas[m]:
                gammas[m] = best_entry
                changed = True
            total = rest + gammas[m] * contrib[m]
        objective = abs(complex(np.dot(gammas, contrib)))
        if objective + 1e-15 < previous_objective:
            raise RisError("objective decreased across a sweep (internal error)")
        previous_objective = objective
        if not changed:
            break
    return gammas


def save_ris_config(dest, gammas: Sequence[complex]) -> None:
    """Write ``index magnitude phase_degrees`` lines to a path or file."""
    lines = [RIS_CONFIG_HEADER]
    for i, g in enumerate(gammas):
        g = complex(g)
        mag = abs(g)
        phase = math.degrees(math.atan2(g.imag, g.real)) if mag > 0.0 else 0.0
        lines.append(f"{i} {mag:.12g} {phase:.12g}")
    text = "\n".join(lines) + "\n"
    if isinstance(dest, (str, bytes)) or hasattr(dest, "__fspath__"):
        with open(dest, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        dest.write(text)


def load_ris_config(source) -> np.ndarray:
    """Read a configuration written by :func:`save_ris_config`."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "r", encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source.read()
    gammas: list[complex] = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise RisError(f"line {line_no}: expected 'index magnitude phase_degrees'")
        idx, mag, phase = int(parts[0]), float(parts[1]), float(parts[2])
        if idx != len(gammas):
            raise RisError(f"line {line_no}: indices must be consecutive from 0")
        if mag < 0.0:
            raise RisError(f"line {line_no}: magnitude must be >= 0")
        gammas.append(mag * complex(math.cos(math.radians(phase)),
                                    math.sin(math.radians(phase))))
    if not gammas:
        raise RisError("configuration contains no elements")
    return np.array(gammas, dtype=np.complex128)
