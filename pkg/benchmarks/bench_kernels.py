"""Throughput comparison of the compiled kernels against their numpy fallbacks.

Run with ``python3 benchmarks/bench_kernels.py``.  The compiled path is
what ``import shelab`` picks by default when numba is installed; setting
``SHELAB_NUMBA=0`` in the environment forces the numpy path everywhere.
Here both variants are timed side by side and checked for bit-identical
output.
"""

import time

import numpy as np

from shelab import _accel


def _timeit(fn, *args, repeat=5):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def bench_kernel_sum_box(n_jumps=20_000, n_pts=2_500, n_times=4, d=2, seed=0):
    rng = np.random.default_rng(seed)
    times = np.linspace(0.1, 1.0, n_times)
    pts = rng.uniform(-1, 1, size=(n_pts, d))
    jt = np.sort(rng.uniform(0, 1, n_jumps))
    jx = rng.uniform(-1, 1, size=(n_jumps, d))
    jw = rng.standard_normal(n_jumps)
    args = (times, pts, jt, jx, jw)
    return ("kernel_sum_box",
            _timeit(_accel._kernel_sum_box_numpy, *args),
            _timeit(_accel.kernel_sum_box, *args))


def bench_kernel_sum_interval(n_jumps=20_000, n_xs=2_000, n_times=8, seed=0):
    rng = np.random.default_rng(seed)
    times = np.linspace(0.1, 1.0, n_times)
    xs = np.linspace(0.05, np.pi - 0.05, n_xs)
    jt = np.sort(rng.uniform(0, 1, n_jumps))
    jx = rng.uniform(0.01, np.pi - 0.01, n_jumps)
    jw = rng.standard_normal(n_jumps)
    args = (times, xs, jt, jx, jw, 3)
    return ("kernel_sum_interval",
            _timeit(_accel._kernel_sum_interval_numpy, *args),
            _timeit(_accel.kernel_sum_interval, *args))


def bench_sine_coeff_frames(n_jumps=2_000, n_times=64, n_max=512, seed=0):
    rng = np.random.default_rng(seed)
    times = np.linspace(0.05, 1.0, n_times)
    jt = np.sort(rng.uniform(0, 1, n_jumps))
    jx = rng.uniform(0.01, np.pi - 0.01, n_jumps)
    jw = rng.standard_normal(n_jumps)
    args = (times, jt, jx, jw, n_max, True)
    return ("sine_coeff_frames",
            _timeit(_accel._sine_coeff_frames_numpy, *args),
            _timeit(_accel.sine_coeff_frames, *args))


def main():
    print(f"numba path enabled: {_accel.NUMBA_ENABLED}")
    print(f"{'kernel':<22}{'numpy (s)':>12}{'dispatch (s)':>14}{'speedup':>10}  max rel diff")
    for name, (t_np, out_np), (t_d, out_d) in (bench_kernel_sum_box(),
                                               bench_kernel_sum_interval(),
                                               bench_sine_coeff_frames()):
        rel = np.max(np.abs(out_np - out_d) / np.maximum(np.abs(out_np), 1e-300))
        print(f"{name:<22}{t_np:>12.4f}{t_d:>14.4f}{t_np / t_d:>10.2f}  {rel:.2e}")


if __name__ == "__main__":
    main()
