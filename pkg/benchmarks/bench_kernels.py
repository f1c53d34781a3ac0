#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure numpy fallback.

Covers the hot paths: expression-tape evaluation (values / duals / jets) at
single-point and grid batch sizes, the two RK4 integrators, and an
end-to-end classification of the worked example. Run from the repo root:

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from helixlab import _pure, backend
from helixlab.expr import compile_program, parse

try:
    from helixlab import _core
except ImportError:
    _core = None


def timeit(fn, repeat, inner=1):
    best = float("inf")
    for _ in range(repeat):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def bench_tapes(repeat):
    rng = np.random.default_rng(0)
    prog = compile_program(
        parse("x*sin(y) + exp(z/4) - atan2(y, 1 + x^2) + sqrt(1 + x^2)^1.5"),
        ("x", "y", "z"),
    )
    jet_prog = compile_program(parse("2*sin(0.5*t)*cos(t)^2 + sqrt(1 + t^2)"),
                               ("t",))
    seeds = np.eye(3)
    rows = []
    for label, n in (("1 point", 1), ("1k grid", 1000), ("100k grid", 100_000)):
        pts = rng.uniform(0.1, 2.0, size=(n, 3))
        tpts = rng.uniform(-2, 2, size=(n, 1))
        inner = max(1, 2000 // max(1, n // 100))
        for name, fn in (
            (f"values / {label}",
             lambda m: backend.eval_values(prog, pts, backend=m)),
            (f"grad3  / {label}",
             lambda m: backend.eval_grad(prog, pts, seeds, backend=m)),
            (f"jet2   / {label}",
             lambda m: backend.eval_jet2(jet_prog, tpts, np.ones(1), backend=m)),
        ):
            t_pure = timeit(lambda: fn(_pure), repeat, inner)
            t_core = (
                timeit(lambda: fn(_core), repeat, inner) if _core else None
            )
            rows.append((name, t_pure, t_core))
    return rows


def bench_integrators(repeat):
    n = 8192
    stages = np.linspace(0.0, np.pi / 0.5, 2 * n + 1)
    kappa = 2.0 * np.sin(0.5 * stages)
    tau = 2.0 * np.cos(0.5 * stages)
    state0 = np.vstack([np.zeros(3), np.eye(3)])
    h = (np.pi / 0.5) / n
    mats = 0.1 * np.random.default_rng(1).normal(size=(2 * n + 1, 3, 3))
    v0 = np.array([1.0, 0.5, -0.25])
    rows = []
    for name, fn in (
        ("rk4 frame integrator / 8192 steps",
         lambda m: backend.rk4_frenet(kappa, tau, h, state0, 1e-3, backend=m)),
        ("rk4 transport / 8192 steps",
         lambda m: backend.rk4_linear3(mats, v0, h, backend=m)),
    ):
        t_pure = timeit(lambda: fn(_pure), repeat)
        t_core = timeit(lambda: fn(_core), repeat) if _core else None
        rows.append((name, t_pure, t_core))
    return rows


def bench_end_to_end(repeat):
    import os
    import subprocess
    import sys

    code = (
        "import numpy as np, time\n"
        "from helixlab.generate import example_2_1\n"
        "from helixlab.analysis import classify_pair\n"
        "curve, f, m = example_2_1()\n"
        "grid = np.linspace(0.0, curve.length, 1024)\n"
        "classify_pair(f, curve, m, grid)\n"  # warm caches
        "start = time.perf_counter()\n"
        "classify_pair(f, curve, m, grid)\n"
        "print(time.perf_counter() - start)\n"
    )
    rows = []
    times = {}
    for name in ("pure", "compiled") if _core else ("pure",):
        best = float("inf")
        for _ in range(repeat):
            env = dict(os.environ, HELIXLAB_BACKEND=name)
            out = subprocess.run([sys.executable, "-c", code], env=env,
                                 capture_output=True, text=True, check=True)
            best = min(best, float(out.stdout.strip()))
        times[name] = best
    rows.append(("classify Example 2.1 / grid 1024", times["pure"],
                 times.get("compiled")))
    return rows


def fmt(seconds):
    if seconds is None:
        return "     n/a"
    if seconds < 1e-3:
        return f"{seconds * 1e6:7.1f}us"
    if seconds < 1.0:
        return f"{seconds * 1e3:7.2f}ms"
    return f"{seconds:7.3f}s "


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args()

    print(f"compiled extension available: {_core is not None}")
    print(f"{'kernel':40s} {'pure':>10s} {'compiled':>10s} {'speedup':>8s}")
    print("-" * 72)
    rows = bench_tapes(args.repeat)
    rows += bench_integrators(args.repeat)
    rows += bench_end_to_end(max(2, args.repeat // 2))
    for name, t_pure, t_core in rows:
        speed = f"{t_pure / t_core:7.1f}x" if t_core else "     n/a"
        print(f"{name:40s} {fmt(t_pure):>10s} {fmt(t_core):>10s} {speed:>8s}")


if __name__ == "__main__":
    main()
