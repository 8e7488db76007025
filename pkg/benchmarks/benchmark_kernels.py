"""Benchmark the compiled stepping kernel against the pure-numpy fallback.

Times the raw exponential-sequence kernel on a propagation-sized workload and
a full end-to-end unitary run. Run as:

    python benchmarks/benchmark_kernels.py [--steps N] [--repeats R]
"""
import argparse
import time

import numpy as np

from ecdsim import SweepSpec, SystemParams, infidelity, propagate_unitary
from ecdsim._kernels import backend_name, fallback


def make_workload(n_steps, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n_steps, 4, 4)) + 1j * rng.normal(size=(n_steps, 4, 4))
    hmats = np.ascontiguousarray(0.5 * (a + a.conj().transpose(0, 2, 1)))
    dts = np.full(n_steps, 1e-3)
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    return hmats, dts, psi / np.linalg.norm(psi)


def time_kernel(fn, hmats, dts, psi, repeats):
    best = float("inf")
    for _ in range(repeats):
        work = psi.copy()
        t0 = time.perf_counter()
        fn(hmats, dts, work)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=200_000)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    hmats, dts, psi = make_workload(args.steps)
    results = {"fallback": time_kernel(fallback.apply_expm_sequence,
                                       hmats, dts, psi, args.repeats)}
    try:
        from ecdsim._kernels import _core
    except ImportError:
        _core = None
        print("compiled extension not available; benchmarking fallback only")
    else:
        results["compiled"] = time_kernel(_core.apply_expm_sequence,
                                          hmats, dts, psi, args.repeats)

    print(f"active backend: {backend_name()}")
    print(f"workload: {args.steps} exponential applications (4x4)")
    for name, seconds in results.items():
        print(f"  {name:>9}: {seconds:8.3f} s total, "
              f"{1e6 * seconds / args.steps:6.2f} us/step")
    if "compiled" in results:
        print(f"  speedup: {results['fallback'] / results['compiled']:.2f}x")

    # end-to-end: one driven propagation through the public API
    params = SystemParams()
    spec = SweepSpec.for_params("tan", params)
    t0 = time.perf_counter()
    final = propagate_unitary(spec, params, 200e-9, atol=1e-8)
    elapsed = time.perf_counter() - t0
    print(f"end-to-end 200 ns unassisted sweep ({backend_name()}): "
          f"{elapsed:.2f} s, infidelity {infidelity(final, spec, params):.3e}")
    print("set ECDSIM_PURE=1 to repeat the end-to-end timing on the fallback")


if __name__ == "__main__":
    main()
