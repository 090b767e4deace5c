"""Compare the numba kernels with the pure-numpy fallback.

Each backend runs in its own interpreter because the switch is read at
import time (``SADDLE_FRACTAL_NUMBA``).  Timings are best-of-``--repeat``
after one warm-up call, so numba compile time is excluded.

    python3 benchmarks/bench_kernels.py --repeat 3 --json bench.json
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

CASES = ("orbit_iterate", "union_length", "raster_spiral")


def _best(fn, repeat: int) -> float:
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run_cases(repeat: int) -> dict:
    from saddle_fractal import backend
    from saddle_fractal.dimension import EpsGrid, count_cells, sequence_measures
    from saddle_fractal.dimension.boxcount import PackedPolylines
    from saddle_fractal.dimension.formulas import induced_away_model
    from saddle_fractal.geometry import assemble_spiral
    from saddle_fractal.orbits1d import MapModel, generate_orbit

    model = MapModel("parabolic")
    orbit = generate_orbit(model, 0.5, 100_000)
    eps_min = 2.0**-12
    spiral = assemble_spiral(generate_orbit(induced_away_model(4), 0.5, 100_000), 1.0, 1.0, 1.0,
                             1 / 64, eps_min / 16, eps_min / 2)
    packed = PackedPolylines.from_polylines(spiral)
    grid = EpsGrid.default_2d()
    out = {"backend": backend()}
    out["orbit_iterate"] = _best(lambda: generate_orbit(model, 0.5, 100_000), repeat)
    out["union_length"] = _best(lambda: sequence_measures(orbit), repeat)
    out["raster_spiral"] = _best(lambda: [count_cells(packed, e) for e in grid], repeat)
    return out


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", default=None, help="write timings to this file")
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args(argv)
    if args.worker:
        print(json.dumps(run_cases(args.repeat)))
        return 0
    results = {}
    for name, flag in (("numba", "1"), ("numpy", "0")):
        env = dict(os.environ, SADDLE_FRACTAL_NUMBA=flag)
        proc = subprocess.run([sys.executable, __file__, "--worker", "--repeat", str(args.repeat)],
                              env=env, capture_output=True, text=True, check=True)
        results[name] = json.loads(proc.stdout.strip().splitlines()[-1])
    print(f"{'case':<16}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for case in CASES:
        a, b = results["numba"][case], results["numpy"][case]
        print(f"{case:<16}{a:>12.4f}{b:>12.4f}{b / a:>10.1f}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(results, fh, indent=2)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
