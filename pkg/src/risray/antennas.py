"""Antenna models: radiation patterns, launch fields, effective aperture.

Patterns are normalized power patterns F(phi, theta) in [0, 1], evaluated
against a direction expressed in the antenna's own frame (theta from the
frame z axis, which is the boresight for the directional pattern and the
wire axis for the monopole).  All shipped patterns are rotationally
symmetric, so only theta enters the value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .geometry import Frame, Vec3, angles_in_frame, normalize, vec3

#: Exact speed of light [m/s].
C0 = 299792458.0

#: Free-space wave impedance used throughout, 120*pi [ohm].
ETA0 = 120.0 * np.pi


class AntennaError(ValueError):
    """Raised for invalid antenna or pattern parameters."""


class DegeneratePolarizationError(AntennaError):
    """Polarization parallel to the launch direction in full-vector mode."""


@dataclass(frozen=True)
class RadioParams:
    """Carrier settings shared by every antenna in a scene.

    Attributes:
        frequency: carrier frequency [Hz].
    """

    frequency: float

    def __post_init__(self) -> None:
        if not self.frequency > 0.0:
            raise AntennaError("frequency must be positive")

    @property
    def wavelength(self) -> float:
        """Free-space wavelength c / f [m]."""
        return C0 / self.frequency

    @property
    def eta0(self) -> float:
        return ETA0


@dataclass(frozen=True)
class AntennaPattern:
    """Normalized power pattern.

    Kinds:
        ``isotropic``    F = 1 everywhere.
        ``directional``  F = cos(theta) ** (g/2 - 1) for theta < pi/2, else 0,
                         where ``g`` is the antenna's *linear* gain.  The
                         exponent reproduces the classic identity
                         directivity = 2 * (n + 1) for a cos^n pattern,
                         so the pattern is self-consistent with ``g``.
        ``monopole``     quarter-wave-style wire of height h = ratio * lambda:
                         F = ((cos(2*pi*h/lambda * cos th) - cos(2*pi*h/lambda))
                         / sin th) ** 2, with the (zero) limit substituted on
                         the axis.  Restricted to ratio <= 0.25 so the raw
                         formula stays normalized.
        ``cosine``       F = max(cos theta, 0); used by RIS elements.
    """

    kind: str
    gain_linear: float = 1.0
    height_over_lambda: float = 0.25

    def __post_init__(self) -> None:
        if self.kind not in ("isotropic", "directional", "monopole", "cosine"):
            raise AntennaError(f"unknown pattern kind {self.kind!r}")
        if self.kind == "directional" and self.gain_linear < 2.0:
            raise AntennaError(
                "directional pattern needs linear gain >= 2 (non-negative exponent)"
            )
        if self.kind == "monopole" and not (0.0 < self.height_over_lambda <= 0.25):
            raise AntennaError(
                "monopole height must satisfy 0 < h/lambda <= 0.25 to stay normalized"
            )

    @staticmethod
    def isotropic() -> "AntennaPattern":
        return AntennaPattern("isotropic")

    @staticmethod
    def directional(gain_linear: float) -> "AntennaPattern":
        return AntennaPattern("directional", gain_linear=gain_linear)

    @staticmethod
    def monopole(height_over_lambda: float = 0.25) -> "AntennaPattern":
        return AntennaPattern("monopole", height_over_lambda=height_over_lambda)

    @staticmethod
    def cosine() -> "AntennaPattern":
        return AntennaPattern("cosine")


def eval_pattern(pattern: AntennaPattern, theta: float, lam: float | None = None) -> float:
    """Evaluate a normalized pattern at elevation ``theta`` [rad].

    The wavelength argument is accepted for signature uniformity; shipped
    patterns are parameterized in wavelengths and do not consume it.

    Returns:
        F(theta) in [0, 1].
    """
    if pattern.kind == "isotropic":
        return 1.0
    ct = np.cos(theta)
    if pattern.kind == "cosine":
        return float(max(ct, 0.0))
    if pattern.kind == "directional":
        if ct <= 0.0:
            return 0.0
        return float(ct ** (pattern.gain_linear / 2.0 - 1.0))
    # monopole
    st = np.sin(theta)
    if abs(st) < 1e-12:
        return 0.0
    kh = 2.0 * np.pi * pattern.height_over_lambda
    val = (np.cos(kh * ct) - np.cos(kh)) / st
    return float(val * val)


@dataclass(frozen=True)
class Antenna:
    """An antenna instance placed in the world.

    Attributes:
        frame: antenna frame; z is the pattern axis (boresight / wire axis).
        pattern: normalized power pattern.
        gain_linear: peak gain as a linear factor (not dB).
        power: transmit power [W]; None for receive-only antennas.
        polarization: unit vector in *frame coordinates* giving the nominal
            E-field axis; used only in full-vector mode.
    """

    frame: Frame
    pattern: AntennaPattern
    gain_linear: float
    power: float | None = None
    polarization: Vec3 = field(default_factory=lambda: vec3(0.0, 0.0, 1.0))

    def __post_init__(self) -> None:
        if self.gain_linear <= 0.0:
            raise AntennaError("gain must be a positive linear factor")
        if self.power is not None and self.power <= 0.0:
            raise AntennaError("transmit power must be positive")
        object.__setattr__(self, "polarization", normalize(np.asarray(self.polarization, float)))

    def world_polarization(self) -> Vec3:
        """Polarization axis transported to world coordinates."""
        return self.frame.direction_to_world(self.polarization)


def tx_launch_field(
    antenna: Antenna, direction: Vec3, mode: str = "scalar"
) -> "complex | np.ndarray":
    """Field phasor launched toward ``direction`` (unit, world coords).

    The launch carries no distance dependence: spreading is applied by the
    segment that consumes the ray.  Magnitude is
    ``sqrt(2 * eta0 * P * G * F(theta))`` with theta measured from the
    antenna boresight.

    Returns:
        complex scalar in scalar mode; complex 3-vector in vector mode whose
        direction is the antenna polarization projected orthogonal to the
        ray and renormalized (magnitude is mode-independent).

    Raises:
        AntennaError: if the antenna has no transmit power.
        DegeneratePolarizationError: vector mode with polarization parallel
            to the launch direction.
    """
    if antenna.power is None:
        raise AntennaError("launch requires an antenna with transmit power")
    d = normalize(direction)
    _, theta = angles_in_frame(antenna.frame, d)
    f = eval_pattern(antenna.pattern, theta)
    mag = float(np.sqrt(2.0 * ETA0 * antenna.power * antenna.gain_linear * f))
    if mode == "scalar":
        return complex(mag, 0.0)
    if mode != "vector":
        raise AntennaError(f"unknown propagation mode {mode!r}")
    pol = antenna.world_polarization()
    transverse = pol - float(np.dot(pol, d)) * d
    nrm = float(np.linalg.norm(transverse))
    if nrm < 1e-9:
        raise DegeneratePolarizationError(
            "polarization is parallel to the launch direction"
        )
    return (mag / nrm) * transverse.astype(np.complex128)


def effective_aperture(gain_linear: float, lam: float) -> float:
    """Effective collecting area G * lambda^2 / (4*pi) [m^2]."""
    if gain_linear <= 0.0 or lam <= 0.0:
        raise AntennaError("gain and wavelength must be positive")
    return gain_linear * lam * lam / (4.0 * np.pi)


def db_to_linear(db: float) -> float:
    """Convert a dB figure to a linear power ratio."""
    return float(10.0 ** (db / 10.0))


def dbm_to_watts(dbm: float) -> float:
    """Convert dBm to watts."""
    return float(10.0 ** (dbm / 10.0) * 1e-3)
