"""Compare the array-kernel backends on the shipped presets.

Runs the same packed sweep through every available backend, reports best
wall time, throughput, and cross-backend agreement.  The first timed pass
per backend is preceded by an untimed warmup so JIT compilation does not
pollute the numbers.

Usage:
    python3 benchmarks/backend_bench.py [--repeats 3] [--scene NAME ...]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from risray.kernels import available_backends, pack_scene, sweep_points
from risray.scene import PRESET_NAMES, load_preset
from risray.sweep import optimize_panel


def bench_scene(name: str, repeats: int) -> None:
    scene, _ = optimize_panel(load_preset(name))
    packed = pack_scene(scene)
    points = scene.grid.points()
    mode = "vector" if packed.mode_vector else "scalar"
    print(
        f"\n{name}: {len(points)} points, {packed.n_elements} elements, "
        f"K={packed.max_order}, {mode} mode"
    )
    print(f"{'backend':<8} {'best [s]':>10} {'points/s':>12} {'max |dF|':>12}")

    reference = None
    for backend in available_backends():
        fields, n_paths, _ = sweep_points(packed, points, backend=backend)  # warmup
        best = float("inf")
        for _ in range(repeats):
            started = time.perf_counter()
            fields, n_paths, _ = sweep_points(packed, points, backend=backend)
            best = min(best, time.perf_counter() - started)
        if reference is None:
            reference = fields
            deviation = 0.0
        else:
            deviation = float(np.max(np.abs(fields - reference)))
        print(
            f"{backend:<8} {best:>10.3f} {len(points) / best:>12.0f} "
            f"{deviation:>12.3e}"
        )


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument(
        "--scene",
        action="append",
        choices=PRESET_NAMES,
        help="preset to benchmark (default: all)",
    )
    args = parser.parse_args()
    for name in args.scene or PRESET_NAMES:
        bench_scene(name, args.repeats)


if __name__ == "__main__":
    main()
