"""Grid sweeps, greedy configuration glue, and result file formats."""

import io

import numpy as np
import pytest

from risray.kernels import available_backends
from risray.pathfinder import point_power_dbm, solve_point
from risray.propagation import DBM_FLOOR
from risray.ris import get_config, set_config
from risray.scene import (
    GridSpec,
    SceneError,
    anechoic_config,
    build_anechoic_scene,
    build_scene,
    build_table1_reflective_scene,
    scene_hash,
    table1_reflective_config,
)
from risray.sweep import (
    PowerGrid,
    config_digest,
    element_contributions,
    optimize_panel,
    read_grid_csv,
    sweep_grid,
    write_grid_csv,
    write_heatmap,
)

# Frozen regression fixture: greedy on/off configuration for the anechoic
# preset target.  Deterministic — any change means the optimizer or the
# propagation chain changed.
EXPECTED_ON_COUNT = 66
EXPECTED_CONFIG_DIGEST = "a5811e4df32b"
EXPECTED_TARGET_DBM = -55.72212949408184
EXPECTED_ALL_ON_DBM = -79.41738529293137
EXPECTED_GRID_MAX_DBM = -55.46535267964878


@pytest.fixture(scope="module")
def anechoic_optimized():
    scene = build_anechoic_scene()
    opt, gammas = optimize_panel(scene)
    return scene, opt, gammas


@pytest.fixture(scope="module")
def coarse_map(anechoic_optimized):
    _, opt, _ = anechoic_optimized
    return sweep_grid(opt)


def _symmetric_scene():
    """Anechoic variant with TX and target on the panel boresight axis."""
    cfg = anechoic_config()
    cfg["tx"]["position"] = {"cartesian_m": [1.8, 0.0, 0.5]}
    cfg["ris"][0]["target"] = {"cartesian_m": [0.9, 0.0, 0.5]}
    cfg["rx_grid"]["x_m"] = [0.7, 1.1]
    cfg["rx_grid"]["y_m"] = [-0.2, 0.2]
    cfg["rx_grid"]["z_m"] = 0.5
    cfg["rx_grid"]["step_m"] = 0.01
    return build_scene(cfg)


# --------------------------------------------------------------------------
# PowerGrid container


def test_power_grid_rejects_mismatched_shapes():
    g = GridSpec(x_range=(0.0, 0.1), y_range=(0.0, 0.1), z=0.5, step=0.05)
    ok = np.zeros((g.n_y, g.n_x))
    bad = np.zeros((g.n_y + 1, g.n_x))
    counts = np.zeros((g.n_y, g.n_x), dtype=np.int32)
    with pytest.raises(ValueError, match="values_dbm"):
        PowerGrid(grid=g, values_dbm=bad, path_count=counts, reflected_count=counts)
    PowerGrid(grid=g, values_dbm=ok, path_count=counts, reflected_count=counts)


def test_grid_point_count_formula_matches_enumeration():
    rng = np.random.default_rng(8)
    for _ in range(100):
        x0, y0 = rng.uniform(-2, 2, size=2)
        dx, dy = rng.uniform(0.01, 1.5, size=2)
        step = float(rng.uniform(0.003, 0.3))
        g = GridSpec(
            x_range=(float(x0), float(x0 + dx)),
            y_range=(float(y0), float(y0 + dy)),
            z=0.5,
            step=step,
        )
        pts = g.points()
        assert pts.shape == (g.n_x * g.n_y, 3)
        assert len(g.xs()) == g.n_x and len(g.ys()) == g.n_y


# --------------------------------------------------------------------------
# sweep_grid


def test_sweep_map_shape_census_and_metadata(coarse_map, anechoic_optimized):
    _, opt, gammas = anechoic_optimized
    pg = coarse_map
    assert pg.values_dbm.shape == (91, 61)
    assert np.all(pg.path_count == 127)
    assert np.all(pg.reflected_count == 0)
    meta = pg.metadata
    assert meta["scene"] == scene_hash(opt)
    assert meta["ris_config"] == config_digest(get_config(opt.panel))
    assert meta["max_order"] == 0
    assert meta["mode"] == "scalar"
    assert meta["backend"] in available_backends()


def test_sweep_values_match_reference_solver(coarse_map, anechoic_optimized):
    _, opt, _ = anechoic_optimized
    pg = coarse_map
    iy, ix = np.unravel_index(pg.values_dbm.argmax(), pg.values_dbm.shape)
    xs, ys = pg.grid.xs(), pg.grid.ys()
    for dy, dx in ((0, 0), (5, -7), (-11, 13)):
        a, b = iy + dy, ix + dx
        point = (xs[b], ys[a], pg.grid.z)
        assert pg.values_dbm[a, b] == pytest.approx(
            point_power_dbm(opt, point), abs=1e-6
        )


def test_sweep_row_zero_is_minimum_y(coarse_map, anechoic_optimized):
    _, opt, _ = anechoic_optimized
    pg = coarse_map
    corner = (pg.grid.x_range[0], pg.grid.y_range[0], pg.grid.z)
    assert pg.values_dbm[0, 0] == pytest.approx(point_power_dbm(opt, corner), abs=1e-6)


def test_sweep_grid_override_and_missing_grid():
    scene = build_anechoic_scene()
    small = GridSpec(x_range=(1.0, 1.1), y_range=(0.2, 0.3), z=0.114, step=0.05)
    pg = sweep_grid(scene, grid=small)
    assert pg.values_dbm.shape == (small.n_y, small.n_x)
    import dataclasses

    gridless = dataclasses.replace(scene, grid=None)
    with pytest.raises(SceneError, match="grid"):
        sweep_grid(gridless)


def test_thread_count_bit_identity():
    scene = _symmetric_scene()
    a = sweep_grid(scene, threads=1)
    b = sweep_grid(scene, threads=4)
    assert np.array_equal(a.values_dbm, b.values_dbm)
    assert np.array_equal(a.path_count, b.path_count)


def test_reflective_k0_equals_anechoic_when_walls_removed():
    bare = table1_reflective_config()
    bare["surfaces"] = []
    stripped = build_scene(bare)
    anech = build_scene(anechoic_config())
    pa = sweep_grid(anech)
    p0 = sweep_grid(stripped, max_order=0, mode="scalar")
    assert np.array_equal(pa.values_dbm, p0.values_dbm)
    assert np.array_equal(pa.path_count, p0.path_count)


def test_higher_order_dominates_path_count():
    scene = build_table1_reflective_scene()
    g2 = sweep_grid(scene)
    g0 = sweep_grid(scene, max_order=0)
    assert np.all(g2.path_count >= g0.path_count)
    assert np.all(g0.path_count == 127)
    assert np.all(g0.reflected_count == 0)
    assert g2.reflected_count.max() >= 2


# --------------------------------------------------------------------------
# greedy configuration workflow


def test_optimizer_regression_fixture(anechoic_optimized):
    scene, opt, gammas = anechoic_optimized
    target = scene.target
    assert point_power_dbm(scene, target) == pytest.approx(EXPECTED_ALL_ON_DBM, abs=1e-6)
    assert point_power_dbm(opt, target) == pytest.approx(EXPECTED_TARGET_DBM, abs=1e-6)
    on = np.abs(gammas) > 0
    assert int(on.sum()) == EXPECTED_ON_COUNT
    assert config_digest(gammas) == EXPECTED_CONFIG_DIGEST
    alphabet = scene.alphabet
    for g in gammas:
        assert min(abs(g - a) for a in alphabet) <= 1e-12


def test_optimizer_grid_max_regression(coarse_map):
    assert coarse_map.values_dbm.max() == pytest.approx(EXPECTED_GRID_MAX_DBM, abs=1e-6)


def test_optimizer_single_entry_alphabet_is_identity():
    cfg = anechoic_config()
    cfg["ris"][0]["alphabet"] = [[1.25, 0.0]]
    scene = build_scene(cfg)
    _, gammas = optimize_panel(scene)
    assert np.all(gammas == 1.25 + 0.0j)


def test_optimizer_explicit_target_override():
    scene = build_anechoic_scene()
    opt, gammas = optimize_panel(scene, target=(1.1, 0.5, 0.3))
    assert point_power_dbm(opt, (1.1, 0.5, 0.3)) > point_power_dbm(
        scene, (1.1, 0.5, 0.3)
    )
    import dataclasses

    no_target = dataclasses.replace(
        scene, ris=(dataclasses.replace(scene.ris[0], target=None),)
    )
    with pytest.raises(SceneError, match="target"):
        optimize_panel(no_target)


def test_symmetric_scene_yields_symmetric_config_and_map():
    scene = _symmetric_scene()
    opt, gammas = optimize_panel(scene)
    centers = np.array([el.center for el in scene.panel.elements])
    mirror = np.full(len(centers), -1)
    for i, c in enumerate(centers):
        j = np.where(
            (np.abs(centers[:, 0] - c[0]) < 1e-12)
            & (np.abs(centers[:, 1] + c[1]) < 1e-12)
            & (np.abs(centers[:, 2] - c[2]) < 1e-12)
        )[0]
        mirror[i] = j[0]
    assert np.all(mirror >= 0)
    assert np.all(gammas == gammas[mirror])

    pg = sweep_grid(opt)
    power = 10.0 ** (pg.values_dbm / 10.0)
    flipped = power[::-1, :]
    assert np.abs(power - flipped).max() <= 1e-12 * power.max()


def test_contributions_are_linear_in_coefficients_reflective_vector():
    scene = build_table1_reflective_scene()
    point = np.array([1.32, 0.22, 0.114])
    contrib = element_contributions(scene, point, max_order=2, mode="vector")
    rng = np.random.default_rng(5)
    gammas = np.where(rng.random(scene.panel.n_elements) < 0.5, 1.25, 0.0).astype(
        np.complex128
    )
    configured = scene.with_panel(set_config(scene.panel, gammas))
    field, _ = solve_point(configured, point)
    rx = configured.make_rx_antenna(point)
    p_rx = rx.world_polarization().astype(np.complex128)
    s_obj = complex(np.vdot(p_rx, field)) / complex(np.vdot(p_rx, p_rx))
    s_lin = complex(np.dot(gammas, contrib))
    assert abs(s_obj - s_lin) <= 1e-9 * max(abs(s_obj), 1e-300)


def test_contributions_are_linear_in_coefficients_anechoic_scalar():
    scene = build_anechoic_scene()
    point = np.asarray(scene.target)
    contrib = element_contributions(scene, point)
    rng = np.random.default_rng(11)
    gammas = np.where(rng.random(scene.panel.n_elements) < 0.5, 1.25, 0.0).astype(
        np.complex128
    )
    configured = scene.with_panel(set_config(scene.panel, gammas))
    field, _ = solve_point(configured, point)
    s_lin = complex(np.dot(gammas, contrib))
    assert abs(complex(field) - s_lin) <= 1e-9 * max(abs(field), 1e-300)


# --------------------------------------------------------------------------
# CSV format


def _tiny_grid():
    g = GridSpec(x_range=(0.5, 0.51), y_range=(0.2, 0.21), z=0.1, step=0.01)
    values = np.array([[DBM_FLOOR, -56.5], [-79.417385, -100.0]])
    counts = np.full((2, 2), 127, dtype=np.int32)
    zeros = np.zeros((2, 2), dtype=np.int32)
    return PowerGrid(grid=g, values_dbm=values, path_count=counts, reflected_count=zeros)


def test_grid_csv_round_trip_small():
    pg = _tiny_grid()
    buf = io.StringIO()
    write_grid_csv(buf, pg)
    text = buf.getvalue()
    lines = text.splitlines()
    assert lines[0] == "y\\x,0.500000,0.510000"
    assert lines[1] == "0.200000,-400.000000,-56.500000"
    assert lines[2] == "0.210000,-79.417385,-100.000000"
    xs, ys, vals = read_grid_csv(io.StringIO(text))
    assert np.allclose(xs, pg.grid.xs(), atol=5e-7)
    assert np.allclose(ys, pg.grid.ys(), atol=5e-7)
    assert np.allclose(vals, pg.values_dbm, atol=5e-7)


def test_grid_csv_coarse_shape(coarse_map, tmp_path):
    out = tmp_path / "grid.csv"
    write_grid_csv(out, coarse_map)
    lines = out.read_text().splitlines()
    assert len(lines) == 92
    assert all(len(ln.split(",")) == 62 for ln in lines)
    assert lines[0].startswith("y\\x,0.920000,0.930000,")
    xs, ys, vals = read_grid_csv(out)
    assert vals.shape == (91, 61)
    assert np.allclose(vals, coarse_map.values_dbm, atol=5e-7)


def test_grid_csv_reader_rejects_malformed():
    with pytest.raises(ValueError, match="header"):
        read_grid_csv(io.StringIO("x,0.1\n0.2,-50\n"))
    with pytest.raises(ValueError, match="cells"):
        read_grid_csv(io.StringIO("y\\x,0.1,0.2\n0.0,-50.0\n"))
    with pytest.raises(ValueError, match="empty"):
        read_grid_csv(io.StringIO("\n"))


# --------------------------------------------------------------------------
# PPM heatmap


def test_heatmap_header_size_and_determinism(coarse_map):
    a, b = io.BytesIO(), io.BytesIO()
    write_heatmap(a, coarse_map)
    write_heatmap(b, coarse_map)
    payload = a.getvalue()
    assert payload == b.getvalue()
    assert payload.startswith(b"P6\n# risray heatmap v1\n61 91\n255\n")
    header_len = payload.index(b"255\n") + 4
    assert len(payload) == header_len + 3 * 61 * 91


def test_heatmap_extreme_colors_and_range_validation():
    pg = _tiny_grid()
    buf = io.BytesIO()
    write_heatmap(buf, pg, vmin=-100.0, vmax=-56.5)
    body = buf.getvalue()
    pixels = np.frombuffer(body[body.index(b"255\n") + 4 :], dtype=np.uint8)
    pixels = pixels.reshape(2, 2, 3)
    assert tuple(pixels[0, 0]) == (13, 8, 135)  # floor cell -> darkest anchor
    assert tuple(pixels[0, 1]) == (240, 249, 33)  # at vmax -> brightest anchor
    assert tuple(pixels[1, 1]) == (13, 8, 135)  # at vmin -> darkest anchor
    with pytest.raises(ValueError, match="vmin < vmax"):
        write_heatmap(io.BytesIO(), pg, vmin=-50.0, vmax=-50.0)


def test_heatmap_uniform_map_is_uniform_image():
    g = GridSpec(x_range=(0.0, 0.02), y_range=(0.0, 0.02), z=0.1, step=0.01)
    values = np.full((3, 3), -70.0)
    counts = np.full((3, 3), 1, dtype=np.int32)
    pg = PowerGrid(grid=g, values_dbm=values, path_count=counts, reflected_count=counts)
    buf = io.BytesIO()
    write_heatmap(buf, pg)
    body = buf.getvalue()
    pixels = np.frombuffer(body[body.index(b"255\n") + 4 :], dtype=np.uint8).reshape(-1, 3)
    assert (pixels == pixels[0]).all()
