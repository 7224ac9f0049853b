"""Compare the numba kernels with the numpy fallback.

Run with ``python3 benchmarks/bench_kernels.py``. Each kernel is timed on
identical inputs after a warm-up call (which triggers JIT compilation), and
the two outputs are checked for agreement.
"""

import argparse
import time

import numpy as np

from bwgeo import _kernels


def _spd_stack(rng, m, n):
    a = rng.standard_normal((m, n, n))
    return a @ np.swapaxes(a, 1, 2) + 0.1 * np.eye(n)


def _cases(rng, n, m):
    sig, lam, mix = (_spd_stack(rng, 1, n)[0] for _ in range(3))
    mats = _spd_stack(rng, m, n)
    d, u = np.linalg.eigh(mats)
    roots = (u * np.sqrt(d)[..., None, :]) @ np.swapaxes(u, 1, 2)
    traces = np.trace(mats, axis1=1, axis2=2)
    a = np.abs(rng.standard_normal(n)) + 0.5
    bp = rng.standard_normal((n, n))
    return {
        "sylvester_eigbasis": (bp, a),
        "segment_grid": (sig, lam, mix, np.linspace(0.0, 1.0, m)),
        "sqrt_psd_batch": (mats, 1e-9),
        "pairwise_bw_sq": (roots, traces),
    }


def _time(fn, args, repeat):
    fn(*args)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=6, help="matrix size")
    parser.add_argument("--m", type=int, default=33, help="stack / grid size")
    parser.add_argument("--repeat", type=int, default=20)
    args = parser.parse_args(argv)
    if _kernels.numba_kernels is None:
        print("numba is not installed; nothing to compare")
        return 0
    cases = _cases(np.random.default_rng(0), args.n, args.m)
    print(f"{'kernel':<22}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, inputs in cases.items():
        f_np = getattr(_kernels.numpy_kernels, name)
        f_nb = getattr(_kernels.numba_kernels, name)
        t_np = _time(f_np, inputs, args.repeat)
        t_nb = _time(f_nb, inputs, args.repeat)
        diff = float(np.max(np.abs(f_np(*inputs) - f_nb(*inputs))))
        print(f"{name:<22}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.2f}{diff:>12.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
