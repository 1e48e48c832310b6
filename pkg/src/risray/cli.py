"""Command-line interface: configure panels, sweep grids, dump paths.

Exit codes: 0 success, 1 usage error, 2 input/configuration error,
3 runtime failure (including a failed validation run).
"""

from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from .closed_form import free_space_panel_field
from .kernels.backend import BackendError
from .pathfinder import find_paths, point_power_dbm, solve_point, write_path_dump
from .propagation import ETA0, received_power
from .ris import RisError, get_config, load_ris_config, save_ris_config, set_config
from .scene import GridSpec, Scene, SceneError, resolve_scene
from .sweep import optimize_panel, sweep_grid, write_grid_csv, write_heatmap

__all__ = ["main"]


class _ConfigFailure(Exception):
    """Bad user input (scene, RIS config, grid string): exit code 2."""


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on usage errors; the contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="risray",
        description="Deterministic ray tracer for RIS-assisted indoor radio links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid_flags: bool = False, solver_flags: bool = False):
        p.add_argument(
            "--scene",
            required=True,
            help="preset name (anechoic, table1_reflective) or scene file path",
        )
        p.add_argument("--out", default=".", metavar="DIR", help="output directory")
        p.add_argument(
            "--seed", type=int, default=20240822,
            help="random seed (only the validate data draws are random)",
        )
        if solver_flags:
            p.add_argument(
                "--max-order", type=int, default=None, metavar="K",
                help="maximum bounce count (default: scene solver setting)",
            )
            p.add_argument(
                "--mode", choices=("scalar", "vector"), default=None,
                help="field polarization handling (default: scene solver setting)",
            )
            p.add_argument(
                "--no-center-prune", action="store_true",
                help="disable panel-center sequence pruning (exhaustive per point)",
            )
        if grid_flags:
            p.add_argument(
                "--grid", metavar="x0,x1,y0,y1,z,step", default=None,
                help="override the scene's receiver grid",
            )
            p.add_argument(
                "--ris-config", metavar="FILE", default=None,
                help="reflection coefficients to apply (see the ris-config format)",
            )
            p.add_argument(
                "--threads", type=int, default=None, metavar="N",
                help="worker threads (clamped to the compiled maximum)",
            )

    p_opt = sub.add_parser("optimize", help="freeze a greedy panel configuration")
    common(p_opt)
    p_opt.set_defaults(func=_cmd_optimize)

    p_sweep = sub.add_parser("sweep", help="received power over the receiver grid")
    common(p_sweep, grid_flags=True, solver_flags=True)
    p_sweep.add_argument(
        "--dump-paths", action="store_true",
        help="also dump the path list at the maximum-power grid point",
    )
    p_sweep.set_defaults(func=_cmd_sweep)

    p_paths = sub.add_parser("paths", help="path dump for a single receiver point")
    common(p_paths, solver_flags=True)
    p_paths.add_argument(
        "--rx", required=True, metavar="x,y,z", help="receiver point [m]"
    )
    p_paths.set_defaults(func=_cmd_paths)

    p_val = sub.add_parser(
        "validate",
        help="compare the modular pipeline against the closed-form reference",
    )
    common(p_val)
    p_val.set_defaults(func=_cmd_validate)

    return parser


# --------------------------------------------------------------------------
# argument resolution helpers (failures here are exit code 2)


def _load_scene(args) -> Scene:
    try:
        return resolve_scene(args.scene)
    except (SceneError, OSError) as exc:
        raise _ConfigFailure(str(exc)) from exc


def _parse_vec3(text: str, flag: str) -> np.ndarray:
    parts = text.split(",")
    if len(parts) != 3:
        raise _ConfigFailure(f"{flag} expects x,y,z  (got {text!r})")
    try:
        return np.array([float(p) for p in parts], dtype=np.float64)
    except ValueError as exc:
        raise _ConfigFailure(f"{flag}: {exc}") from exc


def _parse_grid(text: str) -> GridSpec:
    parts = text.split(",")
    if len(parts) != 6:
        raise _ConfigFailure(f"--grid expects x0,x1,y0,y1,z,step  (got {text!r})")
    try:
        x0, x1, y0, y1, z, step = (float(p) for p in parts)
        return GridSpec(x_range=(x0, x1), y_range=(y0, y1), z=z, step=step)
    except (ValueError, SceneError) as exc:
        raise _ConfigFailure(f"--grid: {exc}") from exc


def _apply_ris_config(scene: Scene, path: str) -> Scene:
    try:
        gammas = load_ris_config(path)
        panel = set_config(scene.panel, gammas)
    except (RisError, OSError) as exc:
        raise _ConfigFailure(f"--ris-config {path}: {exc}") from exc
    return scene.with_panel(panel)


def _out_dir(args) -> str:
    os.makedirs(args.out, exist_ok=True)
    return args.out


# --------------------------------------------------------------------------
# subcommands


def _cmd_optimize(args) -> int:
    scene = _load_scene(args)
    out = _out_dir(args)
    target = scene.target
    before = point_power_dbm(scene, target, max_order=0, mode="scalar")
    optimized, gammas = optimize_panel(scene)
    after = point_power_dbm(optimized, target, max_order=0, mode="scalar")
    dest = os.path.join(out, "ris_config.txt")
    save_ris_config(dest, gammas)
    on = int(np.count_nonzero(np.abs(gammas) > 0.0))
    print(f"target ({target[0]:.4f}, {target[1]:.4f}, {target[2]:.4f}) m")
    print(f"direct-path power: {before:.3f} dBm initial -> {after:.3f} dBm optimized")
    print(f"{on}/{len(gammas)} elements active")
    print(f"wrote {dest}")
    return 0


def _cmd_sweep(args) -> int:
    scene = _load_scene(args)
    if args.ris_config is not None:
        scene = _apply_ris_config(scene, args.ris_config)
    grid = _parse_grid(args.grid) if args.grid is not None else None

    started = time.perf_counter()
    result = sweep_grid(
        scene,
        grid=grid,
        max_order=args.max_order,
        mode=args.mode,
        center_prune=False if args.no_center_prune else None,
        threads=args.threads,
    )
    elapsed = time.perf_counter() - started

    out = _out_dir(args)
    csv_path = os.path.join(out, "power_grid.csv")
    ppm_path = os.path.join(out, "heatmap.ppm")
    write_grid_csv(csv_path, result)
    write_heatmap(ppm_path, result)

    v = result.values_dbm
    iy, ix = np.unravel_index(int(v.argmax()), v.shape)
    xs, ys = result.grid.xs(), result.grid.ys()
    meta = result.metadata
    print(
        f"{v.size} points, K={meta['max_order']}, {meta['mode']} mode, "
        f"{meta['backend']} backend, {elapsed:.2f} s"
    )
    print(f"max {v.max():.3f} dBm at ({xs[ix]:.3f}, {ys[iy]:.3f}, {result.grid.z:.3f}) m")
    print(f"wrote {csv_path}")
    print(f"wrote {ppm_path}")

    if args.dump_paths:
        point = np.array([xs[ix], ys[iy], result.grid.z])
        paths = find_paths(
            scene,
            point,
            max_order=args.max_order,
            center_prune=False if args.no_center_prune else None,
        )
        dump_path = os.path.join(out, "paths.txt")
        write_path_dump(dump_path, paths)
        print(f"wrote {dump_path} ({len(paths)} paths at the maximum)")
    return 0


def _cmd_paths(args) -> int:
    scene = _load_scene(args)
    rx = _parse_vec3(args.rx, "--rx")
    paths = find_paths(
        scene,
        rx,
        max_order=args.max_order,
        center_prune=False if args.no_center_prune else None,
    )
    out = _out_dir(args)
    dest = os.path.join(out, "paths.txt")
    write_path_dump(dest, paths)
    reflected = sum(1 for p in paths if p.order > 0)
    print(f"{len(paths)} paths ({reflected} with bounces) at ({args.rx}) m")
    print(f"wrote {dest}")
    return 0


def _cmd_validate(args) -> int:
    scene = _load_scene(args)
    if scene.surfaces:
        raise _ConfigFailure(
            "validate needs a surface-free scene (the closed-form reference "
            "covers direct element-to-receiver links only); use --scene anechoic"
        )
    if scene.rx.pattern.kind != "monopole":
        raise _ConfigFailure(
            "validate needs a monopole receive pattern (the closed-form "
            "reference hard-codes it)"
        )
    rng = np.random.default_rng(args.seed)
    panel = scene.panel
    centers = np.array([el.center for el in panel.elements])
    alphabet = np.array(scene.alphabet, dtype=np.complex128)
    lo = np.array([0.92, 0.02, 0.10])
    hi = np.array([1.52, 0.92, 0.60])

    n_configs, n_points = 20, 50
    worst = 0.0
    for _ in range(n_configs):
        gammas = alphabet[rng.integers(0, len(alphabet), size=panel.n_elements)]
        if not np.any(np.abs(gammas) > 0.0):
            gammas[0] = alphabet[np.argmax(np.abs(alphabet))]
        configured = scene.with_panel(set_config(panel, gammas))
        points = lo + rng.random((n_points, 3)) * (hi - lo)
        reference = free_space_panel_field(
            frequency=scene.radio.frequency,
            tx_power=scene.tx.power,
            tx_gain=scene.tx.gain_linear,
            tx_position=scene.tx.frame.origin,
            tx_boresight=scene.tx.frame.z,
            element_centers=centers,
            element_gammas=gammas,
            element_gain=panel.element_gain,
            element_area=panel.elements[0].area,
            panel_normal=panel.frame.z,
            rx_points=points,
            rx_gain=scene.rx.gain_linear,
            rx_axis=scene.rx.polarization_world,
            monopole_height_over_lambda=scene.rx.pattern.height_over_lambda,
        )
        p_ref = np.abs(reference) ** 2 / (2.0 * ETA0)
        for i, point in enumerate(points):
            field, _ = solve_point(configured, point, max_order=0, mode="scalar")
            p_mod = received_power(field)
            worst = max(worst, abs(p_mod - p_ref[i]) / p_ref[i])
    ok = worst <= 1e-9
    print(
        f"closed-form comparison: {n_configs} configurations x {n_points} points, "
        f"max relative power error {worst:.3e}: {'PASS' if ok else 'FAIL'}"
    )
    return 0 if ok else 3


# --------------------------------------------------------------------------
# entry point


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _ConfigFailure as exc:
        print(f"risray: error: {exc}", file=sys.stderr)
        return 2
    except (SceneError, RisError) as exc:
        print(f"risray: error: {exc}", file=sys.stderr)
        return 2
    except BackendError as exc:
        print(f"risray: error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"risray: unexpected failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
