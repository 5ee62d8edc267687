"""Time each hot kernel and a full simulation on the numba and numpy backends.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--t-end 2.0]
"""

import argparse
import timeit

import numpy as np

from ksobs import kernels
from ksobs.dynamics import ModelParams, SimulationConfig, simulate
from ksobs.sensing import REFERENCE_EIGHTHS, sensor_points


def kernel_cases(rng):
    N, M = 200, 2048
    y, F, G = rng.standard_normal((3, N))
    a = -rng.random(N) * 1e4
    u, dx = rng.standard_normal((2, M))
    c = rng.standard_normal(N)
    x = rng.random(36)
    return {
        "imex_update": lambda f: f(y, a, F, G, 1e-3),
        "flame_density": lambda f: f(dx, 1e-2),
        "fluid_density": lambda f: f(u, dx, 1.0),
        "eval_series": lambda f: f(c, x),
    }


def best_of(fn, repeat, number):
    return min(timeit.repeat(fn, repeat=repeat, number=number)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--t-end", type=float, default=2.0)
    args = ap.parse_args()
    if not kernels.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'numpy [us]':>12}{'numba [us]':>12}{'speedup':>10}")
    for name, call in kernel_cases(rng).items():
        f_np = getattr(kernels, f"{name}_numpy")
        f_nb = getattr(kernels, f"{name}_numba")
        call(f_nb)                                   # compile outside the timer
        t_np = best_of(lambda: call(f_np), args.repeat, 2000)
        t_nb = best_of(lambda: call(f_nb), args.repeat, 2000)
        print(f"{name:<16}{t_np * 1e6:>12.2f}{t_nb * 1e6:>12.2f}{t_np / t_nb:>10.2f}")

    cfg = SimulationConfig(ModelParams.standard("flame"), sensor_points(REFERENCE_EIGHTHS, 9),
                           t_end=args.t_end, keep_states=False)
    times = {}
    for backend in ("numpy", "numba"):
        with kernels.use_backend(backend):
            simulate(SimulationConfig(cfg.params, cfg.sensors, t_end=0.01))
            times[backend] = best_of(lambda: simulate(cfg), max(1, args.repeat // 2), 1)
    print(f"\nsimulate t_end={args.t_end} ({cfg.steps} steps, N={cfg.N}, M={cfg.grid_M})")
    for backend, t in times.items():
        print(f"  {backend:<6} {t:8.3f} s")
    print(f"  speedup {times['numpy'] / times['numba']:.2f}x")


if __name__ == "__main__":
    main()
