"""Coverage-grid timing: numba kernels vs the pure-numpy fallback.

Each backend runs in its own interpreter because the switch is read at
import time.  The first (compiling) call is timed separately from the steady
state.

    python3 benchmarks/bench_kernels.py [--n 60] [--repeat 3]
"""

import argparse
import json
import os
import subprocess
import sys

CHILD = """
import json, sys, time
from o2i import BACKEND
from o2i.coverage import coverage_grid
from o2i.fileio import fixture_scene

n, repeat = int(sys.argv[1]), int(sys.argv[2])
scene = fixture_scene()
tx = scene.tx("Tx1")
args = (scene, tx, (-20.0, -30.0), 120.0 / n, n, n)
t0 = time.perf_counter()
first = coverage_grid(*args)
warm = time.perf_counter() - t0
times = []
for _ in range(repeat):
    t0 = time.perf_counter()
    coverage_grid(*args)
    times.append(time.perf_counter() - t0)
print(json.dumps({"backend": BACKEND, "first": warm, "best": min(times),
                  "checksum": float(first.gain_linear[first.gain_linear == first.gain_linear].sum())}))
"""


def run(n, repeat, disable):
    env = dict(os.environ)
    env.pop("O2I_DISABLE_NUMBA", None)
    if disable:
        env["O2I_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", CHILD, str(n), str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--n", type=int, default=60, help="grid is n x n cells")
    p.add_argument("--repeat", type=int, default=3)
    a = p.parse_args()
    fast = run(a.n, a.repeat, disable=False)
    slow = run(a.n, a.repeat, disable=True)
    print(f"grid {a.n}x{a.n} ({a.n * a.n} cells), best of {a.repeat}")
    for r in (fast, slow):
        print(f"  {r['backend']:<6} first {r['first']:8.3f} s   steady {r['best']:8.3f} s")
    print(f"  speedup (steady) {slow['best'] / fast['best']:.1f}x")
    rel = abs(fast["checksum"] - slow["checksum"]) / abs(slow["checksum"])
    print(f"  checksum rel. diff {rel:.1e}")


if __name__ == "__main__":
    main()
