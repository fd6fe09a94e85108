"""Timing comparison of the numba-jitted kernels against the pure-numpy
fallback.

Run with: python3 benchmarks/bench_backends.py
The backend is toggled in-process (the kernels branch at call time), so a
single run times both paths on identical inputs.
"""

import time

import numpy as np

from convpca import accel
from convpca.neural import kernels as K
from convpca import streetgraph as sg
from convpca import synthdata as sd


def _time(fn, repeat=5):
    fn()  # warm-up (also triggers jit compilation on the numba path)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench_conv(use_numba):
    rng = np.random.default_rng(0)
    x = rng.random((8, 64, 64, 4))
    w = rng.random((3, 3, 4, 8))
    b = np.zeros(8)
    old = K.USE_NUMBA
    K.USE_NUMBA = use_numba
    try:
        y = K.conv_fwd(x, w, b, 2, 1)
        fwd = _time(lambda: K.conv_fwd(x, w, b, 2, 1))
        bwd_d = _time(lambda: K.conv_bwd_data(y, w, x.shape, 2, 1))
        bwd_w = _time(lambda: K.conv_bwd_weights(x, y, w.shape, 2, 1))
    finally:
        K.USE_NUMBA = old
    return fwd, bwd_d, bwd_w


def bench_raster():
    g = sd.gen_grid_network(12, 12, spacing=125.0, jitter=20.0, seed=3)
    xmin, ymin, xmax, ymax = g.bbox()
    bbox = (xmin - 10, ymin - 10, xmax + 10, ymax + 10)
    return _time(lambda: sg.rasterize(g, bbox, size=256))


def main():
    print(f"active backend flag: {accel.BACKEND}")
    if not accel.USE_NUMBA:
        print("note: CONVPCA_BACKEND=numpy, so the 'numba' rows below also "
              "run the numpy fallback")

    rows = []
    for label, use_numba in (("numba", accel.USE_NUMBA), ("numpy", False)):
        fwd, bwd_d, bwd_w = bench_conv(use_numba)
        rows.append((label, fwd, bwd_d, bwd_w))

    print()
    print(f"{'conv kernels':<14}{'fwd':>12}{'bwd_data':>12}{'bwd_wts':>12}")
    for label, fwd, bwd_d, bwd_w in rows:
        print(f"{label:<14}{fwd * 1e3:>10.2f}ms{bwd_d * 1e3:>10.2f}ms"
              f"{bwd_w * 1e3:>10.2f}ms")
    if rows[1][1] > 0:
        print(f"{'speedup':<14}{rows[1][1] / rows[0][1]:>11.2f}x"
              f"{rows[1][2] / rows[0][2]:>11.2f}x"
              f"{rows[1][3] / rows[0][3]:>11.2f}x")

    t = bench_raster()
    print()
    print(f"rasterize 256x256 (backend {accel.BACKEND}): {t * 1e3:.2f} ms")
    print("(rasterization shares one source; rerun with CONVPCA_BACKEND=numpy "
          "to time the interpreted path)")


if __name__ == "__main__":
    main()
