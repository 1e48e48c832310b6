"""Independent closed-form reference for the free-space panel link.

Everything here is written directly against the link-budget algebra, on
purpose without reusing the simulator's geometry, antenna, or propagation
helpers: the test suite holds the ray-traced solver to this module at tight
tolerance, so the two implementations must not share code.  Only the
no-bounce (free-space) case has a closed form.
"""

from __future__ import annotations

import numpy as np

_C0 = 299792458.0
_ETA0 = 120.0 * np.pi
_FLOOR_DBM = -400.0


def free_space_panel_field(
    frequency: float,
    tx_power: float,
    tx_gain: float,
    tx_position,
    tx_boresight,
    element_centers,
    element_gammas,
    element_gain: float,
    element_area: float,
    panel_normal,
    rx_points,
    rx_gain: float = 1.0,
    rx_axis=(0.0, 0.0, 1.0),
    monopole_height_over_lambda: float = 0.25,
) -> np.ndarray:
    """Total complex field at each receive point, free space, no bounces.

    Per cell and point the contribution is::

        sqrt(2*eta0*Pt*Gt*Ft) * sqrt(Fin*A/(4*pi*dt^2)) * sqrt(G*Fout)
        * gamma * sqrt(Gr*Fr) * lam/(4*pi*dr) * exp(-j*2*pi*(dt+dr)/lam)

    with a power-law transmit pattern, cosine cell patterns to both sides,
    and a wire monopole receive pattern about ``rx_axis``.  Cells are summed
    in index order.

    Args:
        frequency: carrier [Hz].
        tx_power: transmit power [W].
        tx_gain: transmit gain, linear (also sets the pattern exponent).
        tx_position: (3,) transmitter location.
        tx_boresight: (3,) unit transmit boresight.
        element_centers: (M, 3) cell centers.
        element_gammas: (M,) complex reflection coefficients.
        element_gain: cell gain, linear.
        element_area: cell collecting area [m^2].
        panel_normal: (3,) unit panel normal (cells are coplanar).
        rx_points: (P, 3) receive points.
        rx_gain: receive gain, linear.
        rx_axis: (3,) monopole wire axis.
        monopole_height_over_lambda: monopole height as a fraction of the
            wavelength.

    Returns:
        (P,) complex field sums.
    """
    lam = _C0 / float(frequency)
    tx_position = np.asarray(tx_position, dtype=np.float64)
    boresight = np.asarray(tx_boresight, dtype=np.float64)
    boresight = boresight / np.linalg.norm(boresight)
    centers = np.atleast_2d(np.asarray(element_centers, dtype=np.float64))
    gammas = np.asarray(element_gammas, dtype=np.complex128).ravel()
    normal = np.asarray(panel_normal, dtype=np.float64)
    normal = normal / np.linalg.norm(normal)
    points = np.atleast_2d(np.asarray(rx_points, dtype=np.float64))
    axis = np.asarray(rx_axis, dtype=np.float64)
    axis = axis / np.linalg.norm(axis)

    # transmitter -> cell leg, shape (M,)
    to_el = centers - tx_position
    d_t = np.linalg.norm(to_el, axis=1)
    u_t = to_el / d_t[:, None]
    cos_bore = np.clip(u_t @ boresight, 0.0, 1.0)
    f_t = cos_bore ** ((tx_gain - 2.0) / 2.0)
    f_in = np.clip(-(u_t @ normal), 0.0, 1.0)
    leg_in = (
        np.sqrt(2.0 * _ETA0 * tx_power * tx_gain * f_t)
        * np.sqrt(f_in * element_area / (4.0 * np.pi * d_t**2))
        * np.exp(-2j * np.pi * d_t / lam)
    )

    # cell -> receive-point leg, shape (P, M)
    sep = points[:, None, :] - centers[None, :, :]
    d_r = np.linalg.norm(sep, axis=2)
    u_r = sep / d_r[:, :, None]
    f_out = np.clip(u_r @ normal, 0.0, 1.0)
    cos_ax = np.clip(u_r @ axis, -1.0, 1.0)
    sin_ax = np.sqrt(np.clip(1.0 - cos_ax**2, 0.0, 1.0))
    kh = 2.0 * np.pi * monopole_height_over_lambda
    with np.errstate(divide="ignore", invalid="ignore"):
        f_r = ((np.cos(kh * cos_ax) - np.cos(kh)) / sin_ax) ** 2
    f_r = np.where(sin_ax < 1e-12, 0.0, f_r)
    leg_out = (
        np.sqrt(element_gain * f_out)
        * np.sqrt(rx_gain * f_r)
        * (lam / (4.0 * np.pi * d_r))
        * np.exp(-2j * np.pi * d_r / lam)
    )

    return (leg_in[None, :] * gammas[None, :] * leg_out).sum(axis=1)


def free_space_panel_power_dbm(*args, **kwargs) -> np.ndarray:
    """Received power [dBm] for :func:`free_space_panel_field` inputs."""
    field = free_space_panel_field(*args, **kwargs)
    power = np.abs(field) ** 2 / (2.0 * _ETA0)
    out = np.full(power.shape, _FLOOR_DBM)
    ok = power > 0.0
    out[ok] = np.maximum(10.0 * np.log10(power[ok] * 1000.0), _FLOOR_DBM)
    return out
