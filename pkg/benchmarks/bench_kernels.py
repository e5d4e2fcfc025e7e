#!/usr/bin/env python3
"""Benchmark the compiled kernel lane against the numpy/Python fallback.

Micro-benchmarks call both lanes in-process; the end-to-end row times a
full forecast day-task (12-week window) per lane in a subprocess, since
the lane is fixed at import time.

Usage: python benchmarks/bench_kernels.py [--repeat N] [--skip-e2e]
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from epfbench._kernels import _ref  # noqa: E402

try:
    from epfbench._kernels import _fast
except ImportError:
    _fast = None


def timeit(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_micro(repeat: int):
    rng = np.random.default_rng(0)
    y2016 = rng.normal(50, 10, 2016)
    rows = []

    cases = [
        ("loess n=2016 q=41", lambda k: k.loess_smooth(y2016, 41, None, False)),
        ("loess n=2016 q=285", lambda k: k.loess_smooth(y2016, 285, None, False)),
    ]

    xt = np.ascontiguousarray(rng.normal(size=(168, 70)))
    yv = rng.normal(size=70)
    w0 = np.zeros(168)
    cases.append((
        "enet_cd 70x168, 50 sweeps",
        lambda k: k.enet_cd(xt, yv, 0.01, 0.01, w0, 50, 0.0),
    ))

    x = rng.normal(size=(70, 168))
    sq = ((x[:, None, :] - x[None, :, :]) ** 2).sum(-1)
    kmat = np.exp(-sq / (168 * x.var()))
    ysvr = rng.normal(size=70)
    cases.append((
        "svr_smo n=70",
        lambda k: k.svr_smo(kmat, ysvr, 1.0, 0.1, 1e-3, 500_000),
    ))

    cases.append((
        "ets_sse Holt n=2016 x100",
        lambda k: [k.ets_sse(y2016, 1, 0.3, 0.1, 1.0) for _ in range(100)],
    ))

    for name, call in cases:
        t_ref = timeit(lambda: call(_ref), repeat)
        if _fast is not None:
            t_fast = timeit(lambda: call(_fast), repeat)
            rows.append((name, t_fast, t_ref, t_ref / t_fast))
        else:
            rows.append((name, float("nan"), t_ref, float("nan")))
    return rows


DAY_TASK_SNIPPET = r"""
import time, numpy as np
from epfbench._kernels import BACKEND
from epfbench.forecasters import mstl_forecast
rng = np.random.default_rng(0)
t = np.arange(2016.0)
values = 50 + 10*np.sin(2*np.pi*t/24) + 5*np.sin(2*np.pi*t/168) \
    + 2*rng.standard_normal(2016)
mstl_forecast(values)  # warm-up
t0 = time.perf_counter()
mstl_forecast(values)
print(f"{BACKEND} {time.perf_counter() - t0:.4f}")
"""


def bench_day_task():
    rows = []
    for pure in (False, True):
        env = dict(os.environ)
        env.pop("EPFBENCH_PURE_PYTHON", None)
        if pure:
            env["EPFBENCH_PURE_PYTHON"] = "1"
        out = subprocess.run(
            [sys.executable, "-c", DAY_TASK_SNIPPET],
            capture_output=True, text=True, env=env, check=True,
        )
        backend, seconds = out.stdout.split()
        rows.append((backend, float(seconds)))
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--skip-e2e", action="store_true")
    args = parser.parse_args()

    print(f"compiled extension available: {_fast is not None}\n")
    print(f"{'kernel':<28} {'compiled':>10} {'fallback':>10} {'speedup':>8}")
    for name, t_fast, t_ref, ratio in bench_micro(args.repeat):
        fast = f"{t_fast * 1e3:.2f}ms" if np.isfinite(t_fast) else "n/a"
        print(f"{name:<28} {fast:>10} {t_ref * 1e3:>8.2f}ms {ratio:>7.1f}x")

    if not args.skip_e2e:
        print("\nfull MSTL day-task (2016-hour window, decompose + smooth):")
        for backend, seconds in bench_day_task():
            print(f"  {backend:<8} {seconds * 1e3:8.1f}ms")


if __name__ == "__main__":
    main()
