"""Compiled vs numpy tridiagonal kernels, and whole time steps under each backend.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The whole-step timings run in subprocesses so that CHEMOLV_PURE=1 can force
the fallback at import time.
"""
import argparse
import json
import os
import subprocess
import sys
import timeit

import numpy as np

from chemolv import kernels

STEP_SNIPPET = r"""
import json, sys, timeit
import numpy as np
from chemolv import kernels
from chemolv.core import Field, Params, build_grid
from chemolv.timestepper import SchemeConfig, make_state, step
L, N, dim, n = float(sys.argv[1]), int(sys.argv[2]), int(sys.argv[3]), int(sys.argv[4])
g = build_grid(L, N, dim)
rng = np.random.default_rng(0)
st = make_state(Field(rng.uniform(0.5, 1.0, g.shape), g), Field(rng.uniform(0.5, 1.0, g.shape), g))
p = Params.symmetric(0.2, 20.0, L, dim)
cfg = SchemeConfig(dt=0.05, t_end=1.0)
step(st, p, cfg)
best = min(timeit.repeat(lambda: step(st, p, cfg), number=n, repeat=3)) / n
print(json.dumps({"backend": kernels.BACKEND, "seconds": best}))
"""


def bench_kernel(B, N, repeat):
    rng = np.random.default_rng(1)
    sub = rng.uniform(-1, 0, (B, N))
    sup = rng.uniform(-1, 0, (B, N))
    diag = 2.5 + rng.uniform(0, 1, (B, N))
    rhs = rng.normal(size=(B, N))
    out = {}
    for backend in ("python", "cython"):
        if backend == "cython" and kernels.BACKEND != "cython":
            continue
        f = lambda: kernels.tridiag_solve_batch(sub, diag, sup, rhs, backend=backend)
        number = max(1, int(2e5 // (B * N)))
        out[backend] = min(timeit.repeat(f, number=number, repeat=repeat)) / number
    return out


def bench_step(L, N, dim, n, pure):
    env = dict(os.environ)
    if pure:
        env["CHEMOLV_PURE"] = "1"
    else:
        env.pop("CHEMOLV_PURE", None)
    res = subprocess.run([sys.executable, "-c", STEP_SNIPPET, str(L), str(N), str(dim), str(n)],
                         env=env, capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"compiled extension available: {kernels.BACKEND == 'cython'}")
    print("\nbatched Thomas solve")
    print(f"{'B':>6} {'N':>6} {'numpy [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for B, N in ((1, 1000), (1, 10000), (100, 100), (300, 300), (1000, 1000)):
        t = bench_kernel(B, N, args.repeat)
        c = t.get("cython", float("nan"))
        print(f"{B:>6} {N:>6} {t['python'] * 1e3:12.3f} {c * 1e3:12.3f} {t['python'] / c:8.1f}")
    print("\nwhole time step (chi = 20)")
    print(f"{'grid':>12} {'numpy [ms]':>12} {'cython [ms]':>12} {'speedup':>8}")
    for L, N, dim, n in ((30.0, 300, 1, 200), (30.0, 1000, 1, 100), (30.0, 100, 2, 5), (30.0, 300, 2, 2)):
        py = bench_step(L, N, dim, n, pure=True)["seconds"]
        cy = bench_step(L, N, dim, n, pure=False)
        label = f"{N}" if dim == 1 else f"{N}x{N}"
        if cy["backend"] != "cython":
            print(f"{label:>12} {py * 1e3:12.3f} {'n/a':>12}")
            continue
        print(f"{label:>12} {py * 1e3:12.3f} {cy['seconds'] * 1e3:12.3f} {py / cy['seconds']:8.2f}")


if __name__ == "__main__":
    main()
