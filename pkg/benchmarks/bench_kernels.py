"""Benchmark the numba kernels against the pure-numpy fallback.

Covers the two hot loops: module-path evolution (the martingale MC inner
loop) and truncated f/theta coefficient stepping.  Run as

    python benchmarks/bench_kernels.py [--paths 4000] [--steps 500]

Force one backend for the whole process with WZWSLE_BACKEND=numpy|numba;
this script times both explicitly regardless of the default.
"""

import argparse
import time

import numpy as np

from wzwsle import build_sl
from wzwsle.sde import kernels
from wzwsle.sde.laurent import NoisePath
from wzwsle.sde.martingale import TruncatedRep, build_simulation_matrices
from wzwsle.weylmod import build_weyl


def time_call(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_module_paths(paths, steps, seed=112358132134):
    M = build_weyl(build_sl(2), 1, (0,), 4)
    trep = TruncatedRep(M, 4)
    A, sigmas = build_simulation_matrices(trep, 2, 8 / 3, [1, 1, 1])
    b0 = np.eye(trep.total_dim, dtype=np.complex128) + 1e-3 * A
    sig = np.array(sigmas)
    w = trep.top_vector_total()
    rng = np.random.Generator(np.random.Philox(key=seed))
    dB = rng.standard_normal((paths, steps, len(sigmas))) * np.sqrt(1e-3)
    rows = []
    ref = None
    for backend in ("numpy", "numba") if kernels.BACKEND == "numba" else ("numpy",):
        kernels.evolve_module_paths(w, b0, sig, dB[:2], backend=backend)  # warm up
        out = {}
        elapsed = time_call(lambda: out.update(r=kernels.evolve_module_paths(
            w, b0, sig, dB, backend=backend)))
        if ref is None:
            ref = out["r"]
        else:
            assert np.allclose(ref, out["r"], atol=1e-9), "backends disagree"
        rows.append((f"module paths dim={trep.total_dim}", backend, elapsed))
    return rows


def bench_f_theta(paths, steps, seed=112358132134):
    depth, ngen, n = 12, 3, 2
    noise = NoisePath(seed, 1e-3, steps, [8 / 3] + [1.0] * ngen)
    dB = np.broadcast_to(noise.increments, (paths, steps, 1 + ngen)).copy()
    rows = []
    ref = None
    for backend in ("numpy", "numba") if kernels.BACKEND == "numba" else ("numpy",):
        def run():
            fc = np.zeros((paths, depth + 1))
            fc[:, 0] = 1.0
            th = np.zeros((paths, ngen, depth + 1))
            return kernels.evolve_f_theta(fc, th, dB, 1e-3, n, 2 - 0.5 * (8 / 3), backend=backend)
        run()  # warm up
        got = {}
        elapsed = time_call(lambda: got.update(r=run()))
        if ref is None:
            ref = got["r"][0]
        else:
            assert np.allclose(ref, got["r"][0], atol=1e-9), "backends disagree"
        rows.append((f"f/theta depth={depth}", backend, elapsed))
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=4000)
    ap.add_argument("--steps", type=int, default=500)
    args = ap.parse_args()
    print(f"active default backend: {kernels.active_backend()}")
    print(f"paths={args.paths} steps={args.steps}")
    rows = bench_module_paths(args.paths, args.steps) + bench_f_theta(args.paths, args.steps)
    print(f"{'kernel':<28}{'backend':<10}{'best (s)':>10}{'paths/s':>14}")
    for name, backend, elapsed in rows:
        print(f"{name:<28}{backend:<10}{elapsed:>10.3f}{args.paths / elapsed:>14.0f}")
    by_kernel = {}
    for name, backend, elapsed in rows:
        by_kernel.setdefault(name, {})[backend] = elapsed
    for name, t in by_kernel.items():
        if {"numpy", "numba"} <= set(t):
            print(f"speedup ({name}): numba is {t['numpy'] / t['numba']:.2f}x vs numpy")


if __name__ == "__main__":
    main()
