"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_backends.py [--m 200] [--horizon 4096] [--reps 64]
"""
import argparse
import time

import numpy as np

from funcsgd import backend, theory
from funcsgd.engine import Schedule, run_replications
from funcsgd.model import ProcessSpec, build_slope
from funcsgd.spectral import EigenDecay, SpectralModel


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--m", type=int, default=200)
    p.add_argument("--horizon", type=int, default=4096)
    p.add_argument("--reps", type=int, default=64)
    p.add_argument("--tmax", type=int, default=10 ** 4)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    names = backend.available()
    print(f"backends: {', '.join(names)}")
    model = SpectralModel(EigenDecay.power(2.0, m=args.m), EigenDecay.power(2.0, m=args.m))
    slope = build_slope(model, 0.25)
    spec = ProcessSpec(noise_std=1.0, seed=1)
    sched = Schedule.online(1.0, 1 / 3)

    # kernel alone on pre-drawn inputs, then the full run including sampling
    rng = np.random.default_rng(0)
    x = rng.standard_normal((16, args.horizon, args.m)) * np.sqrt(model.lam_c)
    noise = rng.standard_normal((16, args.horizon))
    etas = sched.steps(1, args.horizon + 1)
    for name in names:
        impl = backend.get(name)
        dt, _ = best_of(lambda: impl.sgd_block(np.zeros((16, args.m)), x, noise, slope.coeffs, model.lam_k, etas),
                        args.repeat)
        print(f"sgd_block         {name:>6}: {dt:8.3f}s  {16 * args.horizon / dt / 1e6:7.2f} M updates/s")

    results = {}
    for name in names:
        dt, out = best_of(lambda: run_replications(model, slope, spec, sched, args.horizon, range(args.reps),
                                                   backend=name), args.repeat)
        updates = args.reps * args.horizon
        print(f"run_replications  {name:>6}: {dt:8.3f}s  {updates / dt / 1e6:7.2f} M updates/s "
              f"(m={args.m}, T={args.horizon}, N={args.reps})")
        results[name, "sgd"] = out
        dt, out = best_of(lambda: theory.stepsize_sums(args.tmax, 1.0, 0.5, 1.5, backend=name), args.repeat)
        print(f"stepsize_sums     {name:>6}: {dt:8.3f}s  (t_max={args.tmax})")
        results[name, "sums"] = out

    if len(names) == 2:
        d_pred = np.max(np.abs(results["cython", "sgd"][1] / results["python", "sgd"][1] - 1))
        d_sums = np.max(np.abs(results["cython", "sums"] / results["python", "sums"] - 1))
        print(f"max relative difference: errors {d_pred:.2e}, step-size sums {d_sums:.2e}")


if __name__ == "__main__":
    main()
