"""Field chain, Fresnel reflection, superposition, and power conversion."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risray.antennas import Antenna, AntennaPattern, ETA0, RadioParams
from risray.geometry import Frame, Rect, vec3
from risray.propagation import (
    DBM_FLOOR,
    GrazingIncidenceError,
    Material,
    PropagationError,
    combined_element_field,
    complex_permittivity,
    field_at_rx,
    fresnel_coefficients,
    fresnel_reflect,
    impinging_field,
    phasor_magnitude,
    received_power,
    superpose,
    watts_to_dbm,
)
from risray.ris import build_hex_panel, element_reemit, set_config

RADIO = RadioParams(23.8e9)
LAM = RADIO.wavelength
METAL = Material(eps_r=1.0, sigma=1e7)


def one_element_panel(gamma=1.25 + 0j):
    frame = Frame(vec3(0, 0, 0.5), vec3(0, 1, 0), vec3(0, 0, 1), vec3(1, 0, 0))
    return build_hex_panel(
        vec3(0, 0, 0.5), frame, 0, 0.0066, 0.0066, 0.0066, (0.06, 0.06),
        gamma=gamma, lam=LAM,
    )


# ------------------------------------------------------------ field factors


def test_impinging_field_magnitude_and_phase():
    e = impinging_field(
        1.0 + 0j, 1.86, 0.0, 0.0066 ** 2, AntennaPattern.cosine(), LAM
    )
    assert abs(abs(e) - 1.001e-3) < 2e-6
    expect_phase = np.exp(-2j * np.pi * 1.86 / LAM)
    assert e == pytest.approx(abs(e) * expect_phase, rel=1e-12)
    with pytest.raises(PropagationError):
        impinging_field(1.0 + 0j, 0.0, 0.0, 1.0, AntennaPattern.cosine(), LAM)


def test_combined_element_field_fixture():
    gain = 3.450
    e = combined_element_field(
        1.0 + 0j, 1.25 + 0j, 0.0066 ** 2, gain, 1.86, 0.0, 0.0, LAM
    )
    assert abs(abs(e) - 2.326e-3) < 5e-6


@settings(max_examples=100, deadline=None)
@given(
    theta_in=st.floats(min_value=0.0, max_value=1.4),
    theta_out=st.floats(min_value=0.0, max_value=1.4),
    d_t=st.floats(min_value=0.1, max_value=10.0),
    re=st.floats(min_value=-2.0, max_value=2.0),
    im=st.floats(min_value=-2.0, max_value=2.0),
)
def test_fused_equals_composed_chain(theta_in, theta_out, d_t, re, im):
    gamma = complex(re, im)
    panel = set_config(one_element_panel(), [gamma])
    el = panel.elements[0]
    gain = 3.45013
    e_t = 24.47 + 0j
    fused = combined_element_field(
        e_t, gamma, el.area, gain, d_t, theta_in, theta_out, LAM
    )
    out_dir = np.cos(theta_out) * el.frame.z + np.sin(theta_out) * el.frame.x
    composed = element_reemit(
        impinging_field(e_t, d_t, theta_in, el.area, AntennaPattern.cosine(), LAM),
        el,
        out_dir,
        gain,
    )
    assert fused == pytest.approx(composed, rel=1e-12, abs=1e-15)


def test_field_at_rx_monopole_broadside():
    rx = Antenna(Frame.identity(vec3(2, 0, 0)), AntennaPattern.monopole(), 1.0)
    # arrival along -x: the reversed ray is horizontal, theta_r = 90 deg
    e = field_at_rx(1.0 + 0j, 1.4, rx, vec3(1, 0, 0), LAM)
    assert abs(abs(e) - LAM / (4.0 * np.pi * 1.4)) < 1e-12
    with pytest.raises(PropagationError):
        field_at_rx(1.0 + 0j, 0.0, rx, vec3(1, 0, 0), LAM)


def test_field_at_rx_vector_projection():
    rx = Antenna(Frame.identity(vec3(2, 0, 0)), AntennaPattern.monopole(), 1.0)
    e_in = np.array([0, 0.6, 0.8], dtype=np.complex128)
    e = field_at_rx(e_in, 1.0, rx, vec3(1, 0, 0), LAM, mode="vector")
    # only the component along the RX polarization axis (world z) survives
    scale = LAM / (4.0 * np.pi)
    assert np.linalg.norm(e) == pytest.approx(0.8 * scale, rel=1e-12)
    np.testing.assert_allclose(np.cross(e.real, [0, 0, 1]), 0.0, atol=1e-15)


# ----------------------------------------------------------------- fresnel


def test_complex_permittivity_metal_fixture():
    eps_c = complex_permittivity(METAL, 23.8e9)
    assert eps_c.real == 1.0
    assert eps_c.imag == pytest.approx(-7.553e6, rel=1e-3)
    vac = complex_permittivity(Material(1.0, 0.0), 23.8e9)
    assert vac == 1.0 + 0.0j


def test_material_validation():
    with pytest.raises(PropagationError):
        Material(0.5, 0.0)
    with pytest.raises(PropagationError):
        Material(1.0, -1.0)


def test_fresnel_vacuum_is_transparent():
    r_s, r_p = fresnel_coefficients(np.cos(0.3), 1.0 + 0.0j)
    assert abs(r_s) < 1e-15 and abs(r_p) < 1e-15


def test_fresnel_metal_near_total_reflection():
    eps_c = complex_permittivity(METAL, 23.8e9)
    r_s, _ = fresnel_coefficients(1.0, eps_c)
    assert abs(r_s) > 0.999
    assert abs(r_s) <= 1.0
    # phase close to pi (the sign flip of a conducting boundary)
    assert abs(abs(np.angle(r_s)) - np.pi) < 0.01


def test_fresnel_matches_refraction_angle_oracle():
    # independent form: r = (cos_i - n cos_t) / (cos_i + n cos_t) with
    # n = sqrt(eps) and cos_t = sqrt(1 - sin^2/eps)
    for eps in (4.0 + 0.0j, 2.5 - 0.7j, complex_permittivity(METAL, 23.8e9)):
        for theta in (0.05, 0.4, 1.0, 1.4):
            ci = np.cos(theta)
            s2 = 1.0 - ci * ci
            n = np.sqrt(eps)
            ct = np.sqrt(1.0 - s2 / eps)
            want_s = (ci - n * ct) / (ci + n * ct)
            want_p = (eps * ci - n * ct) / (eps * ci + n * ct)
            got_s, got_p = fresnel_coefficients(ci, eps)
            assert got_s == pytest.approx(want_s, rel=1e-10)
            assert got_p == pytest.approx(want_p, rel=1e-10)


def test_fresnel_brewster_angle_dielectric():
    eps = 4.0 + 0.0j
    theta_b = np.arctan(2.0)
    _, r_p = fresnel_coefficients(np.cos(theta_b), eps)
    assert abs(r_p) < 1e-12


@settings(max_examples=300, deadline=None)
@given(
    eps_r=st.floats(min_value=1.0, max_value=20.0),
    sigma=st.floats(min_value=0.0, max_value=1e8),
    theta=st.floats(min_value=0.0, max_value=1.55),
)
def test_fresnel_passivity(eps_r, sigma, theta):
    eps_c = complex_permittivity(Material(eps_r, sigma), 23.8e9)
    r_s, r_p = fresnel_coefficients(np.cos(theta), eps_c)
    assert abs(r_s) <= 1.0 + 1e-9
    assert abs(r_p) <= 1.0 + 1e-9


def ground_rect():
    return Rect(Frame.identity(), (50.0, 50.0))


def test_fresnel_reflect_specular_direction():
    d_in = np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0)
    e_out, d_ref = fresnel_reflect(1.0 + 0j, d_in, ground_rect(), METAL, 23.8e9)
    np.testing.assert_allclose(d_ref, [1 / np.sqrt(2), 0, 1 / np.sqrt(2)], atol=1e-12)
    assert abs(e_out) <= 1.0


def test_fresnel_reflect_rejects_bad_directions():
    with pytest.raises(GrazingIncidenceError):
        fresnel_reflect(1.0 + 0j, vec3(1, 0, 0), ground_rect(), METAL, 23.8e9)
    with pytest.raises(PropagationError):
        fresnel_reflect(1.0 + 0j, vec3(0, 0, 1), ground_rect(), METAL, 23.8e9)


def test_fresnel_reflect_vector_s_polarized():
    d_in = np.array([1.0, 0.0, -1.0]) / np.sqrt(2.0)
    # s axis for this geometry is d x n = (0, 1, 0) direction
    e_in = np.array([0, 2.0, 0], dtype=np.complex128)
    e_out, d_ref = fresnel_reflect(
        e_in, d_in, ground_rect(), METAL, 23.8e9, mode="vector"
    )
    r_s, _ = fresnel_coefficients(
        1 / np.sqrt(2), complex_permittivity(METAL, 23.8e9)
    )
    # a purely s-polarized field reflects as r_s * e_in (s axis unchanged)
    np.testing.assert_allclose(e_out, r_s * e_in, rtol=1e-10)
    # transversality of the reflected field
    assert abs(np.dot(e_out, d_ref)) < 1e-12


def test_fresnel_reflect_vector_normal_incidence():
    e_in = np.array([2.0, 1.0, 0.0], dtype=np.complex128)
    e_out, d_ref = fresnel_reflect(
        e_in, vec3(0, 0, -1), ground_rect(), METAL, 23.8e9, mode="vector"
    )
    np.testing.assert_allclose(d_ref, [0, 0, 1], atol=1e-15)
    # magnitude preserved up to |r| for both components
    eps_c = complex_permittivity(METAL, 23.8e9)
    r_s, r_p = fresnel_coefficients(1.0, eps_c)
    assert np.linalg.norm(e_out) == pytest.approx(
        np.sqrt((abs(r_s) * 2.0) ** 2 + (abs(r_p) * 1.0) ** 2), rel=1e-9
    )


# ----------------------------------------------------- superposition, power


def test_superpose_is_order_stable_after_sorting():
    rng = np.random.default_rng(7)
    comps = [complex(a, b) for a, b in rng.normal(size=(40, 2))]
    keyed = sorted(range(40), key=lambda i: i)
    ref = superpose([comps[i] for i in keyed])
    for seed in range(5):
        perm = np.random.default_rng(seed).permutation(40)
        shuffled = [(int(i), comps[int(i)]) for i in perm]
        shuffled.sort(key=lambda t: t[0])
        again = superpose([c for _, c in shuffled])
        assert again == ref  # bit-identical, not merely close


def test_superpose_empty_and_cancellation():
    assert superpose([]) == 0.0j
    e = 0.3 - 0.7j
    # a path and its half-wavelength-shifted copy (phase shift of pi)
    shifted = e * np.exp(-1j * np.pi)
    assert abs(superpose([e, shifted])) < 1e-15
    # with the exact half-turn the cancellation is total
    total = superpose([e, -e])
    assert total == 0.0j
    assert watts_to_dbm(received_power(total)) == DBM_FLOOR


def test_received_power_fixture():
    p = received_power(1.0 + 0j)
    assert p == pytest.approx(1.327e-3, rel=1e-3)
    assert watts_to_dbm(p) == pytest.approx(1.227, abs=2e-3)
    vec = np.array([0.6, 0.8j, 0.0], dtype=np.complex128)
    assert received_power(vec) == pytest.approx(1.0 / (2 * ETA0), rel=1e-12)
    assert phasor_magnitude(vec) == pytest.approx(1.0, rel=1e-12)


def test_watts_to_dbm_floor():
    assert watts_to_dbm(0.0) == -400.0
    assert watts_to_dbm(-1.0) == -400.0
    assert watts_to_dbm(1e-80) == -400.0  # clamped from below
    assert watts_to_dbm(1e-3) == pytest.approx(0.0, abs=1e-12)
