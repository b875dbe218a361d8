"""Compare the compiled evaluation kernel against the NumPy fallback.

Runs the fused decode->synthesize->score kernel on a few problem shapes
with both backends, reports throughput and the worst relative disagreement.

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --repeats 9 --population 500
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from sinevolve import kernels
from sinevolve.encoding import ParameterSpec, sinusoid_layout
from sinevolve.signal_model import TWO_PI, Grid, SinusoidalComponent, synthesize


def build_case(n_components: int, n_samples: int, population: int, seed: int):
    a = ParameterSpec("a", 0.0, 2.0, 2.0 / 1023)
    f = ParameterSpec("f", 0.0, 0.5, 0.5 / 1023)
    phi = ParameterSpec("phi", 0.0, TWO_PI * 255 / 256, TWO_PI / 256)
    layout = sinusoid_layout(n_components, n_samples, a, f, phi)
    plan = kernels.make_plan(layout, n_samples)

    rng = np.random.default_rng(seed)
    truth = [
        SinusoidalComponent(1.0, 0.03 * (i + 1), 0.7 * i, 0, n_samples - 1)
        for i in range(n_components)
    ]
    data = synthesize(truth, Grid(0.0, 1.0, n_samples)).values
    bits = rng.integers(0, 2, size=(population, layout.total_bits), dtype=np.uint8)
    return plan, data, bits


def time_backend(backend, bits, plan, data, repeats):
    best = np.inf
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = kernels.evaluate_population(bits, plan, data, 1.0, "l1", backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--population", type=int, default=300)
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    if not kernels.HAVE_COMPILED:
        print("compiled extension not built; benchmarking the fallback alone")
    print(f"population={args.population} repeats={args.repeats} (best-of timing)")
    print(f"{'case':>18} {'python':>12} {'compiled':>12} {'speedup':>8} {'max rel diff':>13}")

    for n_components, n_samples in ((1, 64), (2, 128), (3, 500), (5, 1000)):
        plan, data, bits = build_case(n_components, n_samples, args.population, args.seed)
        t_py, out_py = time_backend("python", bits, plan, data, args.repeats)
        label = f"n={n_components} L={n_samples}"
        evals = args.population
        if not kernels.HAVE_COMPILED:
            print(f"{label:>18} {evals / t_py:>10.0f}/s {'-':>12} {'-':>8} {'-':>13}")
            continue
        t_c, out_c = time_backend("compiled", bits, plan, data, args.repeats)
        scale = np.maximum(np.abs(out_py), 1e-30)
        rel = float(np.max(np.abs(out_py - out_c) / scale))
        print(
            f"{label:>18} {evals / t_py:>10.0f}/s {evals / t_c:>10.0f}/s "
            f"{t_py / t_c:>7.1f}x {rel:>13.2e}"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
