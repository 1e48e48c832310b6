"""Scene description: config schema, validation, presets, and serialization.

A scene file is a YAML document with a fixed schema::

    version: 1
    name: <identifier>
    assume_blocked_los: <bool>        # documentation flag only
    radio:    {frequency_ghz}
    tx:       {pattern, gain_db, power_dbm, position, boresight,
               polarization_world, monopole_height_over_lambda}
    rx_grid:  {pattern, gain_db, monopole_height_over_lambda,
               polarization_world, x_m, y_m, z_m, step_m}
    ris:      [{center_m, normal, up, rings, pitch_m, element_size_m,
                half_extents_m, alphabet, target}]
    surfaces: [{name, center_m, normal, up, half_extents_m,
                material: {eps_r, sigma_s_per_m}, reflective, blocking}]
    solver:   {max_order, center_prune, mode}

Unknown keys anywhere are rejected.  ``position`` / ``target`` entries are
either ``{cartesian_m: [x, y, z]}`` or ``{spherical_m_deg: [r, azimuth,
elevation]}``; spherical coordinates are resolved against a frame centered
on the panel whose x axis is the panel normal and whose z axis is the panel
"up" vector.  Parsing normalizes the document (defaults filled, key order
fixed), so parse -> serialize -> parse is a fixed point.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from importlib import resources
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import yaml

from .antennas import (
    Antenna,
    AntennaPattern,
    RadioParams,
    db_to_linear,
    dbm_to_watts,
)
from .geometry import Frame, GeometryError, Rect, Vec3, normalize, vec3
from .propagation import Material
from .ris import RisPanel, build_hex_panel, set_config

PRESET_NAMES = ("anechoic", "table1_reflective")


class SceneError(ValueError):
    """Raised when a scene document fails validation; names the field."""


# --------------------------------------------------------------------------
# dataclasses


@dataclass(frozen=True)
class GridSpec:
    """Receiver sampling grid: a rectangle of points in a horizontal plane.

    Points run ``x0 + i*step`` / ``y0 + j*step`` inclusive of the upper
    bounds (with a small guard so binary representations of the bounds do
    not drop the last sample).
    """

    x_range: tuple[float, float]
    y_range: tuple[float, float]
    z: float
    step: float

    def __post_init__(self) -> None:
        if self.step <= 0.0:
            raise SceneError("rx_grid.step_m: must be positive")
        if self.x_range[1] < self.x_range[0] or self.y_range[1] < self.y_range[0]:
            raise SceneError("rx_grid: ranges must satisfy lo <= hi")

    @staticmethod
    def _count(lo: float, hi: float, step: float) -> int:
        return int(np.floor((hi - lo) / step + 1e-9)) + 1

    @property
    def n_x(self) -> int:
        return self._count(self.x_range[0], self.x_range[1], self.step)

    @property
    def n_y(self) -> int:
        return self._count(self.y_range[0], self.y_range[1], self.step)

    @property
    def n_points(self) -> int:
        return self.n_x * self.n_y

    def xs(self) -> np.ndarray:
        return self.x_range[0] + self.step * np.arange(self.n_x)

    def ys(self) -> np.ndarray:
        return self.y_range[0] + self.step * np.arange(self.n_y)

    def points(self) -> np.ndarray:
        """(n_y * n_x, 3) world points, row-major (y rows, x columns)."""
        xs, ys = self.xs(), self.ys()
        xx, yy = np.meshgrid(xs, ys)
        out = np.empty((self.n_points, 3), dtype=np.float64)
        out[:, 0] = xx.ravel()
        out[:, 1] = yy.ravel()
        out[:, 2] = self.z
        return out


@dataclass(frozen=True, eq=False)
class Surface:
    """A wall or screen: finite rectangle with material and role flags."""

    name: str
    rect: Rect
    material: Material
    reflective: bool
    blocking: bool


@dataclass(frozen=True, eq=False)
class RisInstance:
    """A placed panel plus its configuration alphabet and intended target."""

    panel: RisPanel
    alphabet: tuple[complex, ...]
    target: Vec3


@dataclass(frozen=True)
class RxSpec:
    """Receive antenna template applied at every grid point."""

    pattern: AntennaPattern
    gain_linear: float
    polarization_world: tuple[float, float, float]


@dataclass(frozen=True)
class SolverSettings:
    max_order: int
    center_prune: bool
    mode: str


@dataclass(frozen=True, eq=False)
class Scene:
    """A fully resolved simulation scene.

    ``config`` holds the normalized document the scene was built from; it is
    the canonical serialization source, so two scenes with equal configs are
    operationally identical.
    """

    name: str
    config: dict
    radio: RadioParams
    tx: Antenna
    rx: RxSpec
    grid: GridSpec
    surfaces: tuple[Surface, ...]
    ris: tuple[RisInstance, ...]
    solver: SolverSettings
    assume_blocked_los: bool

    # -------------------------------------------------- derived geometry

    @property
    def panel(self) -> RisPanel:
        return self.ris[0].panel

    @property
    def alphabet(self) -> tuple[complex, ...]:
        return self.ris[0].alphabet

    @property
    def target(self) -> Vec3:
        return self.ris[0].target

    def blocking_rects(self) -> tuple[Rect, ...]:
        """All occluding rectangles: surfaces in config order, then panel
        bounding rectangles.  Indices into this tuple are the surface ids
        used by the path finder."""
        rects = [s.rect for s in self.surfaces]
        rects.extend(inst.panel.rect for inst in self.ris)
        return tuple(rects)

    def reflective_ids(self) -> tuple[int, ...]:
        return tuple(
            i for i, s in enumerate(self.surfaces) if s.reflective
        )

    def ris_rect_id(self, panel_index: int = 0) -> int:
        return len(self.surfaces) + panel_index

    def surface_material(self, surface_id: int) -> Material:
        return self.surfaces[surface_id].material

    def make_rx_antenna(self, position: Vec3) -> Antenna:
        """Receive antenna instance at a world position."""
        pol = vec3(*self.rx.polarization_world)
        frame = Frame.from_z(np.asarray(position, float), pol)
        return Antenna(
            frame=frame,
            pattern=self.rx.pattern,
            gain_linear=self.rx.gain_linear,
            power=None,
            polarization=vec3(0.0, 0.0, 1.0),  # frame z = world polarization
        )

    def with_panel(self, panel: RisPanel, panel_index: int = 0) -> "Scene":
        """Scene with one panel replaced (e.g. after configuration)."""
        inst = self.ris[panel_index]
        new_ris = tuple(
            replace(r, panel=panel) if i == panel_index else r
            for i, r in enumerate(self.ris)
        )
        return replace(self, ris=new_ris)


# --------------------------------------------------------------------------
# validation helpers


def _err(path: str, message: str) -> SceneError:
    return SceneError(f"{path}: {message}")


def _require_mapping(value: Any, path: str) -> Mapping:
    if not isinstance(value, Mapping):
        raise _err(path, "expected a mapping")
    return value


def _check_keys(d: Mapping, path: str, required: Iterable[str], optional: Iterable[str] = ()):
    required = set(required)
    allowed = required | set(optional)
    unknown = sorted(set(d) - allowed)
    if unknown:
        raise _err(path, f"unknown keys {unknown}")
    missing = sorted(required - set(d))
    if missing:
        raise _err(path, f"missing keys {missing}")


def _as_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _err(path, f"expected a number, got {value!r}")
    return float(value)


def _as_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _err(path, f"expected an integer, got {value!r}")
    return int(value)


def _as_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise _err(path, f"expected a boolean, got {value!r}")
    return value


def _as_vec3(value: Any, path: str) -> list[float]:
    if not isinstance(value, Sequence) or isinstance(value, (str, bytes)) or len(value) != 3:
        raise _err(path, "expected a list of three numbers")
    return [_as_float(v, f"{path}[{i}]") for i, v in enumerate(value)]


def _as_range(value: Any, path: str) -> list[float]:
    if not isinstance(value, Sequence) or isinstance(value, (str, bytes)) or len(value) != 2:
        raise _err(path, "expected [lo, hi]")
    lo = _as_float(value[0], f"{path}[0]")
    hi = _as_float(value[1], f"{path}[1]")
    if hi < lo:
        raise _err(path, "must satisfy lo <= hi")
    return [lo, hi]


def _as_position(value: Any, path: str) -> dict:
    d = _require_mapping(value, path)
    keys = set(d)
    if keys == {"cartesian_m"}:
        return {"cartesian_m": _as_vec3(d["cartesian_m"], f"{path}.cartesian_m")}
    if keys == {"spherical_m_deg"}:
        v = d["spherical_m_deg"]
        if not isinstance(v, Sequence) or len(v) != 3:
            raise _err(f"{path}.spherical_m_deg", "expected [r_m, azimuth_deg, elevation_deg]")
        r = _as_float(v[0], f"{path}.spherical_m_deg[0]")
        az = _as_float(v[1], f"{path}.spherical_m_deg[1]")
        el = _as_float(v[2], f"{path}.spherical_m_deg[2]")
        if r < 0:
            raise _err(f"{path}.spherical_m_deg[0]", "radius must be >= 0")
        if not (0.0 <= el <= 180.0):
            raise _err(f"{path}.spherical_m_deg[2]", "elevation must lie in [0, 180] deg")
        return {"spherical_m_deg": [r, az, el]}
    raise _err(path, "expected exactly one of 'cartesian_m' or 'spherical_m_deg'")


_PATTERNS = ("isotropic", "directional", "monopole", "cosine")
_MODES = ("scalar", "vector")


def _as_pattern_name(value: Any, path: str) -> str:
    if value not in _PATTERNS:
        raise _err(path, f"pattern must be one of {_PATTERNS}")
    return value


def _unit_or_err(v: list[float], path: str) -> Vec3:
    try:
        return normalize(vec3(*v))
    except GeometryError:
        raise _err(path, "vector must be non-zero") from None


# --------------------------------------------------------------------------
# normalization (raw dict -> canonical dict)


def normalize_config(raw: Any) -> dict:
    """Validate a parsed YAML document and return its canonical form.

    The canonical form has every default filled in and a fixed key order;
    it is what :func:`serialize_scene` emits and what scene hashes cover.
    """
    d = _require_mapping(raw, "scene")
    _check_keys(
        d,
        "scene",
        required=("version", "name", "radio", "tx", "rx_grid", "ris", "surfaces", "solver"),
        optional=("assume_blocked_los",),
    )
    if d["version"] != 1:
        raise _err("scene.version", "only version 1 is supported")
    if not isinstance(d["name"], str) or not d["name"]:
        raise _err("scene.name", "expected a non-empty string")

    radio = _require_mapping(d["radio"], "radio")
    _check_keys(radio, "radio", required=("frequency_ghz",))
    f_ghz = _as_float(radio["frequency_ghz"], "radio.frequency_ghz")
    if f_ghz <= 0:
        raise _err("radio.frequency_ghz", "must be positive")

    tx = _require_mapping(d["tx"], "tx")
    _check_keys(
        tx,
        "tx",
        required=("pattern", "gain_db", "power_dbm", "position", "boresight"),
        optional=("polarization_world", "monopole_height_over_lambda"),
    )
    tx_pattern = _as_pattern_name(tx["pattern"], "tx.pattern")
    tx_gain_db = _as_float(tx["gain_db"], "tx.gain_db")
    tx_power_dbm = _as_float(tx["power_dbm"], "tx.power_dbm")
    tx_position = _as_position(tx["position"], "tx.position")
    boresight = tx["boresight"]
    if boresight != "ris_center":
        boresight = _as_vec3(boresight, "tx.boresight")
    tx_pol = _as_vec3(tx.get("polarization_world", [0.0, 0.0, 1.0]), "tx.polarization_world")
    tx_h = _as_float(tx.get("monopole_height_over_lambda", 0.25), "tx.monopole_height_over_lambda")

    rx = _require_mapping(d["rx_grid"], "rx_grid")
    _check_keys(
        rx,
        "rx_grid",
        required=("pattern", "gain_db", "x_m", "y_m", "z_m", "step_m"),
        optional=("polarization_world", "monopole_height_over_lambda"),
    )
    rx_pattern = _as_pattern_name(rx["pattern"], "rx_grid.pattern")
    rx_gain_db = _as_float(rx["gain_db"], "rx_grid.gain_db")
    rx_h = _as_float(rx.get("monopole_height_over_lambda", 0.25), "rx_grid.monopole_height_over_lambda")
    rx_pol = _as_vec3(rx.get("polarization_world", [0.0, 0.0, 1.0]), "rx_grid.polarization_world")
    x_m = _as_range(rx["x_m"], "rx_grid.x_m")
    y_m = _as_range(rx["y_m"], "rx_grid.y_m")
    z_m = _as_float(rx["z_m"], "rx_grid.z_m")
    step_m = _as_float(rx["step_m"], "rx_grid.step_m")
    if step_m <= 0:
        raise _err("rx_grid.step_m", "must be positive")

    if not isinstance(d["ris"], Sequence) or isinstance(d["ris"], (str, bytes)):
        raise _err("ris", "expected a list of panel entries")
    if len(d["ris"]) != 1:
        raise _err("ris", "exactly one panel is supported")
    ris_entries = []
    for i, entry in enumerate(d["ris"]):
        path = f"ris[{i}]"
        e = _require_mapping(entry, path)
        _check_keys(
            e,
            path,
            required=(
                "center_m", "normal", "up", "rings", "pitch_m",
                "element_size_m", "half_extents_m", "alphabet", "target",
            ),
        )
        center = _as_vec3(e["center_m"], f"{path}.center_m")
        normal_v = _as_vec3(e["normal"], f"{path}.normal")
        up_v = _as_vec3(e["up"], f"{path}.up")
        n_unit = _unit_or_err(normal_v, f"{path}.normal")
        u_unit = _unit_or_err(up_v, f"{path}.up")
        if abs(float(np.dot(n_unit, u_unit))) > 0.999:
            raise _err(f"{path}.up", "must not be parallel to the normal")
        rings = _as_int(e["rings"], f"{path}.rings")
        if rings < 0:
            raise _err(f"{path}.rings", "must be >= 0")
        pitch = _as_float(e["pitch_m"], f"{path}.pitch_m")
        if pitch <= 0:
            raise _err(f"{path}.pitch_m", "must be positive")
        el_size = e["element_size_m"]
        if not isinstance(el_size, Sequence) or len(el_size) != 2:
            raise _err(f"{path}.element_size_m", "expected [d_y, d_z]")
        d_y = _as_float(el_size[0], f"{path}.element_size_m[0]")
        d_z = _as_float(el_size[1], f"{path}.element_size_m[1]")
        if d_y <= 0 or d_z <= 0:
            raise _err(f"{path}.element_size_m", "extents must be positive")
        he = e["half_extents_m"]
        if not isinstance(he, Sequence) or len(he) != 2:
            raise _err(f"{path}.half_extents_m", "expected [h_u, h_v]")
        h_u = _as_float(he[0], f"{path}.half_extents_m[0]")
        h_v = _as_float(he[1], f"{path}.half_extents_m[1]")
        if h_u <= 0 or h_v <= 0:
            raise _err(f"{path}.half_extents_m", "extents must be positive")
        alphabet = e["alphabet"]
        if not isinstance(alphabet, Sequence) or not alphabet:
            raise _err(f"{path}.alphabet", "expected a non-empty list")
        alpha_norm = []
        for j, g in enumerate(alphabet):
            if not isinstance(g, Sequence) or len(g) != 2:
                raise _err(f"{path}.alphabet[{j}]", "expected [magnitude, phase_deg]")
            mag = _as_float(g[0], f"{path}.alphabet[{j}][0]")
            ph = _as_float(g[1], f"{path}.alphabet[{j}][1]")
            if mag < 0:
                raise _err(f"{path}.alphabet[{j}][0]", "magnitude must be >= 0")
            alpha_norm.append([mag, ph])
        target = _as_position(e["target"], f"{path}.target")
        ris_entries.append(
            {
                "center_m": center,
                "normal": normal_v,
                "up": up_v,
                "rings": rings,
                "pitch_m": pitch,
                "element_size_m": [d_y, d_z],
                "half_extents_m": [h_u, h_v],
                "alphabet": alpha_norm,
                "target": target,
            }
        )

    if not isinstance(d["surfaces"], Sequence) or isinstance(d["surfaces"], (str, bytes)):
        raise _err("surfaces", "expected a list (possibly empty)")
    surf_entries = []
    for i, entry in enumerate(d["surfaces"]):
        path = f"surfaces[{i}]"
        e = _require_mapping(entry, path)
        _check_keys(
            e,
            path,
            required=(
                "name", "center_m", "normal", "up", "half_extents_m",
                "material", "reflective", "blocking",
            ),
        )
        if not isinstance(e["name"], str) or not e["name"]:
            raise _err(f"{path}.name", "expected a non-empty string")
        center = _as_vec3(e["center_m"], f"{path}.center_m")
        normal_v = _as_vec3(e["normal"], f"{path}.normal")
        up_v = _as_vec3(e["up"], f"{path}.up")
        n_unit = _unit_or_err(normal_v, f"{path}.normal")
        u_unit = _unit_or_err(up_v, f"{path}.up")
        if abs(float(np.dot(n_unit, u_unit))) > 0.999:
            raise _err(f"{path}.up", "must not be parallel to the normal")
        he = e["half_extents_m"]
        if not isinstance(he, Sequence) or len(he) != 2:
            raise _err(f"{path}.half_extents_m", "expected [h_u, h_v]")
        h_u = _as_float(he[0], f"{path}.half_extents_m[0]")
        h_v = _as_float(he[1], f"{path}.half_extents_m[1]")
        if h_u <= 0 or h_v <= 0:
            raise _err(f"{path}.half_extents_m", "extents must be positive")
        mat = _require_mapping(e["material"], f"{path}.material")
        _check_keys(mat, f"{path}.material", required=("eps_r", "sigma_s_per_m"))
        eps_r = _as_float(mat["eps_r"], f"{path}.material.eps_r")
        sigma = _as_float(mat["sigma_s_per_m"], f"{path}.material.sigma_s_per_m")
        if eps_r < 1.0:
            raise _err(f"{path}.material.eps_r", "must be >= 1")
        if sigma < 0.0:
            raise _err(f"{path}.material.sigma_s_per_m", "must be >= 0")
        reflective = _as_bool(e["reflective"], f"{path}.reflective")
        blocking = _as_bool(e["blocking"], f"{path}.blocking")
        surf_entries.append(
            {
                "name": e["name"],
                "center_m": center,
                "normal": normal_v,
                "up": up_v,
                "half_extents_m": [h_u, h_v],
                "material": {"eps_r": eps_r, "sigma_s_per_m": sigma},
                "reflective": reflective,
                "blocking": blocking,
            }
        )

    solver = _require_mapping(d["solver"], "solver")
    _check_keys(solver, "solver", required=("max_order", "center_prune", "mode"))
    max_order = _as_int(solver["max_order"], "solver.max_order")
    if max_order < 0:
        raise _err("solver.max_order", "must be >= 0")
    center_prune = _as_bool(solver["center_prune"], "solver.center_prune")
    mode = solver["mode"]
    if mode not in _MODES:
        raise _err("solver.mode", f"must be one of {_MODES}")

    return {
        "version": 1,
        "name": d["name"],
        "assume_blocked_los": _as_bool(d.get("assume_blocked_los", False), "scene.assume_blocked_los"),
        "radio": {"frequency_ghz": f_ghz},
        "tx": {
            "pattern": tx_pattern,
            "gain_db": tx_gain_db,
            "power_dbm": tx_power_dbm,
            "position": tx_position,
            "boresight": boresight,
            "polarization_world": tx_pol,
            "monopole_height_over_lambda": tx_h,
        },
        "rx_grid": {
            "pattern": rx_pattern,
            "gain_db": rx_gain_db,
            "monopole_height_over_lambda": rx_h,
            "polarization_world": rx_pol,
            "x_m": x_m,
            "y_m": y_m,
            "z_m": z_m,
            "step_m": step_m,
        },
        "ris": ris_entries,
        "surfaces": surf_entries,
        "solver": {
            "max_order": max_order,
            "center_prune": center_prune,
            "mode": mode,
        },
    }


# --------------------------------------------------------------------------
# building


def _placement_frame(center: Vec3, normal: Vec3, up: Vec3) -> Frame:
    """Frame used to resolve spherical placements: x = panel normal,
    z = panel up (orthonormalized), y completing the right-handed set."""
    x = normalize(normal)
    z_raw = normalize(up)
    z = normalize(z_raw - float(np.dot(z_raw, x)) * x)
    y = np.cross(z, x)
    return Frame(np.asarray(center, float), x, y, z)


def _resolve_position(spec: Mapping, frame: Frame) -> Vec3:
    if "cartesian_m" in spec:
        return vec3(*spec["cartesian_m"])
    r, az, el = spec["spherical_m_deg"]
    from .geometry import spherical_to_cartesian

    return spherical_to_cartesian(r, np.deg2rad(az), np.deg2rad(el), frame)


def _make_pattern(name: str, gain_linear: float, height: float) -> AntennaPattern:
    if name == "isotropic":
        return AntennaPattern.isotropic()
    if name == "directional":
        return AntennaPattern.directional(gain_linear)
    if name == "monopole":
        return AntennaPattern.monopole(height)
    return AntennaPattern.cosine()


def build_scene(config: dict) -> Scene:
    """Build a :class:`Scene` from a canonical (normalized) config dict."""
    cfg = normalize_config(config)
    radio = RadioParams(cfg["radio"]["frequency_ghz"] * 1e9)
    lam = radio.wavelength

    # ---- panel(s)
    ris_entries = []
    for i, e in enumerate(cfg["ris"]):
        center = vec3(*e["center_m"])
        normal_v = vec3(*e["normal"])
        up_v = vec3(*e["up"])
        panel_frame = Frame.from_z(center, normal_v, up_v)
        try:
            panel = build_hex_panel(
                center=center,
                frame=panel_frame,
                rings=e["rings"],
                pitch=e["pitch_m"],
                d_y=e["element_size_m"][0],
                d_z=e["element_size_m"][1],
                rect_half_extents=(e["half_extents_m"][0], e["half_extents_m"][1]),
                lam=lam,
            )
        except ValueError as exc:
            raise _err(f"ris[{i}]", str(exc)) from None
        alphabet = tuple(
            complex(m * np.cos(np.deg2rad(p)), m * np.sin(np.deg2rad(p)))
            for m, p in e["alphabet"]
        )
        # start every element at the maximum-magnitude alphabet entry
        start = alphabet[int(np.argmax([abs(a) for a in alphabet]))]
        panel = set_config(panel, [start] * panel.n_elements)
        place = _placement_frame(center, normal_v, up_v)
        target = _resolve_position(e["target"], place)
        ris_entries.append(RisInstance(panel=panel, alphabet=alphabet, target=target))

    place0 = _placement_frame(
        vec3(*cfg["ris"][0]["center_m"]),
        vec3(*cfg["ris"][0]["normal"]),
        vec3(*cfg["ris"][0]["up"]),
    )

    # ---- transmitter
    txc = cfg["tx"]
    tx_pos = _resolve_position(txc["position"], place0)
    if txc["boresight"] == "ris_center":
        aim = ris_entries[0].panel.center
    else:
        aim = vec3(*txc["boresight"])
    if np.linalg.norm(aim - tx_pos) < 1e-9:
        raise _err("tx.boresight", "coincides with the transmitter position")
    tx_gain = db_to_linear(txc["gain_db"])
    tx_frame = Frame.from_z(tx_pos, aim - tx_pos)
    pol_world = vec3(*txc["polarization_world"])
    try:
        pol_world = normalize(pol_world)
    except GeometryError:
        raise _err("tx.polarization_world", "must be non-zero") from None
    pol_frame = vec3(
        float(np.dot(pol_world, tx_frame.x)),
        float(np.dot(pol_world, tx_frame.y)),
        float(np.dot(pol_world, tx_frame.z)),
    )
    try:
        tx = Antenna(
            frame=tx_frame,
            pattern=_make_pattern(txc["pattern"], tx_gain, txc["monopole_height_over_lambda"]),
            gain_linear=tx_gain,
            power=dbm_to_watts(txc["power_dbm"]),
            polarization=pol_frame,
        )
    except ValueError as exc:
        raise _err("tx", str(exc)) from None

    # ---- receiver template and grid
    rxc = cfg["rx_grid"]
    rx_gain = db_to_linear(rxc["gain_db"])
    try:
        rx_spec = RxSpec(
            pattern=_make_pattern(rxc["pattern"], rx_gain, rxc["monopole_height_over_lambda"]),
            gain_linear=rx_gain,
            polarization_world=tuple(rxc["polarization_world"]),
        )
    except ValueError as exc:
        raise _err("rx_grid", str(exc)) from None
    grid = GridSpec(
        x_range=(rxc["x_m"][0], rxc["x_m"][1]),
        y_range=(rxc["y_m"][0], rxc["y_m"][1]),
        z=rxc["z_m"],
        step=rxc["step_m"],
    )

    # ---- surfaces
    surfaces = []
    for i, e in enumerate(cfg["surfaces"]):
        frame = Frame.from_z(vec3(*e["center_m"]), vec3(*e["normal"]), vec3(*e["up"]))
        try:
            rect = Rect(frame, (e["half_extents_m"][0], e["half_extents_m"][1]))
            material = Material(e["material"]["eps_r"], e["material"]["sigma_s_per_m"])
        except ValueError as exc:
            raise _err(f"surfaces[{i}]", str(exc)) from None
        surfaces.append(
            Surface(
                name=e["name"],
                rect=rect,
                material=material,
                reflective=e["reflective"],
                blocking=e["blocking"],
            )
        )

    sv = cfg["solver"]
    return Scene(
        name=cfg["name"],
        config=cfg,
        radio=radio,
        tx=tx,
        rx=rx_spec,
        grid=grid,
        surfaces=tuple(surfaces),
        ris=tuple(ris_entries),
        solver=SolverSettings(sv["max_order"], sv["center_prune"], sv["mode"]),
        assume_blocked_los=cfg["assume_blocked_los"],
    )


def load_scene(text: str) -> Scene:
    """Parse a YAML scene document."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise SceneError(f"scene: invalid YAML ({exc})") from None
    return build_scene(raw)


def load_scene_file(path) -> Scene:
    with open(path, "r", encoding="utf-8") as fh:
        return load_scene(fh.read())


def serialize_scene(scene: Scene) -> str:
    """Canonical YAML for a scene; parse(serialize(s)) equals s."""
    return yaml.safe_dump(scene.config, sort_keys=False, default_flow_style=None)


def scene_hash(scene: Scene) -> str:
    """Short content hash of the canonical scene document."""
    return hashlib.sha256(serialize_scene(scene).encode("utf-8")).hexdigest()[:12]


# --------------------------------------------------------------------------
# presets


def _table1_radio_tx_rx() -> tuple[dict, dict, dict]:
    radio = {"frequency_ghz": 23.8}
    tx = {
        "pattern": "directional",
        "gain_db": 19.0,
        "power_dbm": 10.0,
        "position": {"spherical_m_deg": [1.86, -36.0, 90.0]},
        "boresight": "ris_center",
        "polarization_world": [0.0, 0.0, 1.0],
        "monopole_height_over_lambda": 0.25,
    }
    rx_grid = {
        "pattern": "monopole",
        "gain_db": 0.0,
        "monopole_height_over_lambda": 0.25,
        "polarization_world": [0.0, 0.0, 1.0],
        "x_m": [0.92, 1.52],
        "y_m": [0.02, 0.92],
        "z_m": 0.114,
        "step_m": 0.01,
    }
    return radio, tx, rx_grid


def _table1_ris() -> dict:
    return {
        "center_m": [0.0, 0.0, 0.5],
        "normal": [1.0, 0.0, 0.0],
        "up": [0.0, 0.0, 1.0],
        "rings": 6,
        "pitch_m": 0.0066,
        "element_size_m": [0.0066, 0.0066],
        "half_extents_m": [0.06, 0.06],
        "alphabet": [[1.25, 0.0], [0.0, 0.0]],
        "target": {"spherical_m_deg": [1.4, 10.0, 106.0]},
    }


_METAL = {"eps_r": 1.0, "sigma_s_per_m": 1.0e7}


def anechoic_config() -> dict:
    """Free-space scene: panel and radios only, no walls or screens.

    The direct transmitter-receiver ray is taken as externally blocked
    (``assume_blocked_los``), matching the measurement arrangement the
    room parameters come from; the solver only ever traces panel paths.
    """
    radio, tx, rx_grid = _table1_radio_tx_rx()
    return {
        "version": 1,
        "name": "anechoic",
        "assume_blocked_los": True,
        "radio": radio,
        "tx": tx,
        "rx_grid": rx_grid,
        "ris": [_table1_ris()],
        "surfaces": [],
        "solver": {"max_order": 0, "center_prune": True, "mode": "scalar"},
    }


def table1_reflective_config() -> dict:
    """Metal-walled room scene: three reflecting walls, the panel wall, and
    a free-standing blocking screen between transmitter and receivers."""
    radio, tx, rx_grid = _table1_radio_tx_rx()
    surfaces = [
        {
            "name": "wall_y_neg",
            "center_m": [1.0, -1.2, 0.5],
            "normal": [0.0, 1.0, 0.0],
            "up": [0.0, 0.0, 1.0],
            "half_extents_m": [1.0, 0.5],
            "material": dict(_METAL),
            "reflective": True,
            "blocking": True,
        },
        {
            "name": "wall_y_pos",
            "center_m": [1.0, 1.2, 0.5],
            "normal": [0.0, -1.0, 0.0],
            "up": [0.0, 0.0, 1.0],
            "half_extents_m": [1.0, 0.5],
            "material": dict(_METAL),
            "reflective": True,
            "blocking": True,
        },
        {
            "name": "wall_back",
            "center_m": [2.0, 0.0, 0.5],
            "normal": [-1.0, 0.0, 0.0],
            "up": [0.0, 0.0, 1.0],
            "half_extents_m": [1.2, 0.5],
            "material": dict(_METAL),
            "reflective": True,
            "blocking": True,
        },
        {
            "name": "wall_ris_plane",
            "center_m": [0.0, 0.0, 0.5],
            "normal": [1.0, 0.0, 0.0],
            "up": [0.0, 0.0, 1.0],
            "half_extents_m": [1.2, 0.5],
            "material": dict(_METAL),
            "reflective": False,
            "blocking": True,
        },
        {
            "name": "screen",
            "center_m": [1.55, -0.475, 0.5],
            "normal": [0.0, 1.0, 0.0],
            "up": [0.0, 0.0, 1.0],
            "half_extents_m": [0.45, 0.5],
            "material": dict(_METAL),
            "reflective": False,
            "blocking": True,
        },
    ]
    return {
        "version": 1,
        "name": "table1_reflective",
        "assume_blocked_los": False,
        "radio": radio,
        "tx": tx,
        "rx_grid": rx_grid,
        "ris": [_table1_ris()],
        "surfaces": surfaces,
        "solver": {"max_order": 2, "center_prune": True, "mode": "vector"},
    }


def build_anechoic_scene() -> Scene:
    return build_scene(anechoic_config())


def build_table1_reflective_scene() -> Scene:
    return build_scene(table1_reflective_config())


def load_preset(name: str) -> Scene:
    """Load one of the shipped preset scene files by name."""
    if name not in PRESET_NAMES:
        raise SceneError(f"unknown preset {name!r}; available: {PRESET_NAMES}")
    text = resources.files("risray.presets").joinpath(f"{name}.yaml").read_text("utf-8")
    return load_scene(text)


def resolve_scene(spec: str) -> Scene:
    """Resolve a CLI scene argument: preset name or path to a YAML file."""
    if spec in PRESET_NAMES:
        return load_preset(spec)
    try:
        return load_scene_file(spec)
    except FileNotFoundError:
        raise SceneError(
            f"scene {spec!r}: no such file and not a preset {PRESET_NAMES}"
        ) from None
