"""Compare the compiled and numpy leapfrog kernels on a matched classical ensemble.

    python benchmarks/bench_leapfrog.py [--trajectories N] [--steps S] [--repeat R]
"""
import argparse
import time

import numpy as np

from dqnl import kernels
from dqnl.classical import default_classical_dt, sample_matched_ensemble
from dqnl.potentials import DoubleWellModel
from dqnl.units import MASS


def time_kernel(backend, x0, p0, steps, dt, model, repeat):
    kernel = kernels.get_kernel(backend)
    best = float("inf")
    for _ in range(repeat):
        x, p = x0.copy(), p0.copy()
        t0 = time.perf_counter()
        kernel(x, p, steps, dt, MASS, model.spring, 0.5 * model.L)
        best = min(best, time.perf_counter() - t0)
    return best, x, p


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trajectories", type=int, default=10000)
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    model = DoubleWellModel.from_lattice_depth(35.0, 0.3)
    ens = sample_matched_ensemble(model, args.trajectories, seed=1)
    dt = default_classical_dt(model.omega)
    x0, p0 = np.array(ens.x), np.array(ens.p)
    work = args.trajectories * args.steps

    results = {}
    for backend in kernels.available_backends():
        results[backend] = time_kernel(backend, x0, p0, args.steps, dt, model, args.repeat)
        secs = results[backend][0]
        print(f"{backend:>7}: {secs:8.4f} s  ({secs / work * 1e9:6.2f} ns per trajectory-step)")
    if len(results) == 2:
        (tc, xc, pc), (tp, xp, pp) = results["cython"], results["python"]
        same = np.array_equal(xc, xp) and np.array_equal(pc, pp)
        print(f"speed-up {tp / tc:.1f}x; results bitwise identical: {same}")
    else:
        print("compiled extension not built; only the numpy kernel was timed")


if __name__ == "__main__":
    main()
