"""Field propagation: spreading, reemission composition, reflection, power.

A field phasor is either a complex scalar (scalar mode: magnitude and phase
only) or a complex 3-vector (full-vector mode: magnitude, phase, and
polarization, kept transverse to the propagation direction).  Most
operations are plain complex scaling and work on both representations.

The chain for one path is::

    tx_launch_field           magnitude only, no distance factor
    impinging_field           spreading + phase over the TX->cell hop
    element_reemit            cell gain, pattern, reflection coefficient
    (fresnel_reflect)*        one specular bounce per wall in the sequence
    field_at_rx               spreading + phase over the unfolded RIS->RX
                              distance, receive pattern and aperture factor

and the received power of the coherent sum is |E|^2 / (2 * eta0).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .antennas import Antenna, AntennaPattern, ETA0, eval_pattern
from .geometry import Rect, Vec3, angles_in_frame, normalize

Phasor = Union[complex, np.ndarray]

#: Vacuum permittivity [F/m].
EPS0 = 8.8541878128e-12

#: Power floor used when serializing; fields below this are clamped [dBm].
DBM_FLOOR = -400.0


class PropagationError(ValueError):
    """Raised for invalid propagation input (bad angles, materials...)."""


class GrazingIncidenceError(PropagationError):
    """Reflection requested at (numerically) grazing incidence."""


@dataclass(frozen=True)
class Material:
    """Homogeneous wall material.

    Attributes:
        eps_r: real relative permittivity, >= 1.
        sigma: conductivity [S/m], >= 0.
    """

    eps_r: float
    sigma: float

    def __post_init__(self) -> None:
        if self.eps_r < 1.0:
            raise PropagationError("relative permittivity must be >= 1")
        if self.sigma < 0.0:
            raise PropagationError("conductivity must be >= 0")


def complex_permittivity(material: Material, frequency: float) -> complex:
    """Relative permittivity with conduction loss: eps_r - j*sigma/(2*pi*f*eps0)."""
    if frequency <= 0.0:
        raise PropagationError("frequency must be positive")
    return complex(material.eps_r, -material.sigma / (2.0 * np.pi * frequency * EPS0))


def phasor_magnitude(e: Phasor) -> float:
    """|E| for either representation."""
    if isinstance(e, np.ndarray):
        return float(np.sqrt(np.vdot(e, e).real))
    return abs(e)


def impinging_field(
    e_t: Phasor,
    d_t: float,
    theta_in: float,
    area: float,
    pattern: AntennaPattern,
    lam: float,
) -> Phasor:
    """Field collected by one cell from the launch phasor.

    Applies the capture factor ``sqrt(F(theta_in) * area / (4*pi*d_t^2))``
    and the propagation phase ``exp(-j*2*pi*d_t/lambda)`` to ``e_t``.

    Args:
        e_t: launch phasor (no distance dependence).
        d_t: TX-to-cell distance [m], > 0.
        theta_in: arrival elevation in the cell frame [rad].
        area: effective cell area [m^2].
        pattern: cell power pattern (evaluated at ``theta_in``).
        lam: wavelength [m].
    """
    if d_t <= 0.0:
        raise PropagationError("TX-to-cell distance must be positive")
    f = eval_pattern(pattern, theta_in)
    factor = np.sqrt(f * area / (4.0 * np.pi * d_t * d_t)) * np.exp(
        -2j * np.pi * d_t / lam
    )
    return factor * e_t


def combined_element_field(
    e_t: Phasor,
    gamma: complex,
    area: float,
    gain: float,
    d_t: float,
    theta_in: float,
    theta_out: float,
    lam: float,
) -> Phasor:
    """Fused capture + reemission for one cell (scalar form).

    Equals ``element_reemit(impinging_field(e_t, ...), ...)`` exactly up to
    floating-point association:
    ``sqrt(gain * F_in * F_out * area / (4*pi)) * (gamma / d_t) * exp(-j*2*pi*d_t/lam) * e_t``
    with the cosine cell pattern on both the in and out legs.
    """
    if d_t <= 0.0:
        raise PropagationError("TX-to-cell distance must be positive")
    f_in = max(np.cos(theta_in), 0.0)
    f_out = max(np.cos(theta_out), 0.0)
    factor = (
        np.sqrt(gain * f_in * f_out * area / (4.0 * np.pi))
        * (gamma / d_t)
        * np.exp(-2j * np.pi * d_t / lam)
    )
    return factor * e_t


def field_at_rx(
    e_ris: Phasor,
    d_r: float,
    rx: Antenna,
    arrival_direction: Vec3,
    lam: float,
    mode: str = "scalar",
) -> Phasor:
    """Field delivered to the receive antenna port.

    Applies ``sqrt(G_r * F_r) * (lambda / (4*pi*d_r)) * exp(-j*2*pi*d_r/lam)``
    where the receive pattern is evaluated at the reversed arrival ray (the
    direction from the RX back toward the last interaction point).

    Args:
        e_ris: phasor leaving the last interaction point.
        d_r: unfolded propagation distance since the reemitting cell [m].
        rx: receive antenna (gain, pattern, frame, polarization).
        arrival_direction: unit vector from the last interaction point
            toward the RX, world coordinates.
        lam: wavelength [m].
        mode: "scalar" or "vector"; vector mode additionally projects the
            arriving polarization onto the RX polarization axis.
    """
    if d_r <= 0.0:
        raise PropagationError("propagation distance must be positive")
    d = normalize(arrival_direction)
    _, theta_r = angles_in_frame(rx.frame, -d)
    f_r = eval_pattern(rx.pattern, theta_r)
    factor = (
        np.sqrt(rx.gain_linear * f_r)
        * (lam / (4.0 * np.pi * d_r))
        * np.exp(-2j * np.pi * d_r / lam)
    )
    if mode == "scalar":
        return factor * e_ris
    if mode != "vector":
        raise PropagationError(f"unknown propagation mode {mode!r}")
    p_rx = rx.world_polarization()
    projected = complex(np.dot(p_rx, e_ris))
    return factor * projected * p_rx.astype(np.complex128)


def fresnel_coefficients(cos_theta_i: float, eps_c: complex) -> tuple[complex, complex]:
    """Reflection coefficients on a half-space of relative permittivity eps_c.

    Args:
        cos_theta_i: cosine of the incidence angle (from the normal), in
            (0, 1].
        eps_c: complex relative permittivity of the wall (incident side is
            vacuum).

    Returns:
        ``(r_s, r_p)`` for perpendicular / parallel polarization.
    """
    if not (0.0 < cos_theta_i <= 1.0 + 1e-12):
        raise PropagationError("cos(theta_i) must lie in (0, 1]")
    sin2 = 1.0 - cos_theta_i * cos_theta_i
    root = np.sqrt(eps_c - sin2)
    r_s = (cos_theta_i - root) / (cos_theta_i + root)
    r_p = (eps_c * cos_theta_i - root) / (eps_c * cos_theta_i + root)
    return complex(r_s), complex(r_p)


def fresnel_reflect(
    e_in: Phasor,
    incident_direction: Vec3,
    surface: Rect,
    material: Material,
    frequency: float,
    mode: str = "scalar",
) -> tuple[Phasor, Vec3]:
    """Specularly reflect a field phasor off a wall.

    Args:
        e_in: incident phasor.
        incident_direction: unit propagation direction, must point *into*
            the surface (dot with the normal < 0).
        surface: the reflecting rectangle (normal = front side).
        material: wall material.
        frequency: carrier [Hz].
        mode: "scalar" applies the perpendicular coefficient r_s to the
            whole phasor; "vector" decomposes into s/p components.

    Returns:
        ``(reflected_phasor, reflected_direction)``.

    Raises:
        GrazingIncidenceError: |cos(theta_i)| < 1e-9.
        PropagationError: direction does not face the surface front.
    """
    d = normalize(incident_direction)
    n = surface.normal
    c = -float(np.dot(d, n))
    if abs(c) < 1e-9:
        raise GrazingIncidenceError("numerically grazing incidence")
    if c < 0.0:
        raise PropagationError("incident direction must face the surface front")
    eps_c = complex_permittivity(material, frequency)
    r_s, r_p = fresnel_coefficients(c, eps_c)
    d_ref = d + 2.0 * c * n
    if mode == "scalar":
        return r_s * e_in, d_ref
    if mode != "vector":
        raise PropagationError(f"unknown propagation mode {mode!r}")
    cross = np.cross(d, n)
    cross_norm = float(np.linalg.norm(cross))
    if cross_norm < 1e-9:
        # normal incidence: the s axis is degenerate; any transverse axis
        # works and both coefficients coincide, pick the surface x axis
        s_hat = surface.frame.x
    else:
        s_hat = cross / cross_norm
    p_in = np.cross(s_hat, d)
    p_ref = np.cross(s_hat, d_ref)
    e_s = complex(np.dot(s_hat, e_in))
    e_p = complex(np.dot(p_in, e_in))
    e_out = r_s * e_s * s_hat.astype(np.complex128) + r_p * e_p * p_ref.astype(
        np.complex128
    )
    return e_out, d_ref


def superpose(components: Sequence[Phasor]) -> Phasor:
    """Coherent sum of path phasors, in the order given.

    Callers pass components sorted by (element index, path rank) so the
    floating-point sum is reproducible; an empty sequence yields zero.
    """
    total: Phasor = 0.0j
    for c in components:
        total = total + c
    return total


def received_power(e: Phasor, eta0: float = ETA0) -> float:
    """Received power |E|^2 / (2 * eta0) [W]."""
    mag = phasor_magnitude(e)
    return mag * mag / (2.0 * eta0)


def watts_to_dbm(p: float) -> float:
    """Convert watts to dBm, clamped to the -400 dBm serialization floor."""
    if p <= 0.0:
        return DBM_FLOOR
    val = 10.0 * np.log10(p * 1e3)
    return float(max(val, DBM_FLOOR))
