"""Compare the numba-compiled kernels with their plain numpy versions.

Run with ``python3 benchmarks/bench_kernels.py``. Compilation time is
excluded by a warm-up call.
"""
import argparse
import time

import numpy as np

from oscint import _kernels
from oscint._accel import NUMBA_AVAILABLE
from oscint.filters import get_filter
from oscint.integrator import make_workspace
from oscint.system import random_state, random_system


def _best_of(fn, repeat):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_trajectory(d, n_steps, repeat):
    rng = np.random.default_rng(0)
    sys = random_system(rng, d, a_norm=2.0)
    s0 = random_state(rng, d)
    ws = make_workspace(sys, 0.1, get_filter("deuflhard"))
    args = (sys.omegas, ws.cos, ws.hsinc, ws.omsin, ws.psi1, ws.phi, sys.coupling,
            s0.q, s0.qdot, 0.1, n_steps, 1, False, False)
    out = {}
    for name, kern in (("numpy", _kernels.linear_trajectory_py),
                       ("numba", _kernels.linear_trajectory_jit)):
        if kern is None:
            continue
        kern(*args[:10], 10, *args[11:])
        out[name] = _best_of(lambda k=kern: k(*args), repeat) / n_steps
    return out


def bench_jacobi(n, repeat):
    rng = np.random.default_rng(1)
    B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    M = B + B.conj().T
    tol = 1e-14 * np.linalg.norm(M)
    out = {}
    for name, kern in (("numpy", _kernels.jacobi_hermitian_py),
                       ("numba", _kernels.jacobi_hermitian_jit)):
        if kern is None:
            continue
        kern(M.copy(), tol, 100)
        out[name] = _best_of(lambda k=kern: k(M.copy(), tol, 100), repeat)
    return out


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--steps", type=int, default=20000)
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args()
    if not NUMBA_AVAILABLE:
        print("numba not installed; timing the numpy path only")
    print("trajectory kernel, seconds per step")
    for d in (4, 8, 32):
        r = bench_trajectory(d, args.steps, args.repeat)
        line = "  ".join(f"{k}={v:.3e}" for k, v in r.items())
        if len(r) == 2:
            line += f"  speedup={r['numpy'] / r['numba']:.1f}x"
        print(f"  d={d:<4d} {line}")
    print("jacobi eigensolver, seconds per call")
    for n in (8, 32):
        r = bench_jacobi(n, args.repeat)
        line = "  ".join(f"{k}={v:.3e}" for k, v in r.items())
        if len(r) == 2:
            line += f"  speedup={r['numpy'] / r['numba']:.1f}x"
        print(f"  n={n:<4d} {line}")


if __name__ == "__main__":
    main()
