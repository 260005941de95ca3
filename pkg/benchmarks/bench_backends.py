"""Compare the compiled and pure-Python kernels on table-sized inputs.

    python benchmarks/bench_backends.py [--repeat 3]
"""
import argparse
import timeit

import numpy as np

from zakai_rbf import _fallback, backend, build_fd, build_propagators, build_system, get_model
from zakai_rbf import generate_wendland, radius_schedule, uniform_grid_1d
from zakai_rbf.config import default_config

try:
    from zakai_rbf import _core
except ImportError:  # extension not built
    _core = None


def cases():
    cfg = default_config()
    model = get_model(cfg.model)
    N, n, S = 32, 1024, 50
    R = radius_schedule(N, cfg.kernel.tau)
    system = build_system(generate_wendland(1, cfg.kernel.tau, cfg.kernel.scale), uniform_grid_1d(N, R))
    xi = np.linspace(-2, 2, 41)[:, None]
    props = build_propagators(model, system, xi)
    rng = np.random.default_rng(0)
    u0 = np.broadcast_to(model.u0(system.points), (S, N))
    v0 = np.broadcast_to(model.u0(xi), (S, 41))
    dw = rng.normal(0, np.sqrt(1 / n), size=(S, n, 1))
    fd = build_fd(model, N, R)
    lo, cp, dn = fd.implicit_factor(1 / n)
    kern = generate_wendland(1, 4)
    power, q = kern.factored()
    q = np.array([float(c) for c in q])
    r = rng.uniform(0, 1.2, size=200_000)
    return {
        "collocation_march (S=50, n=1024, N=32)": lambda m: m.collocation_march(props.P, props.E, u0, v0, 1 / n, dw),
        "fd_march (S=50, n=1024, N=32)": lambda m: m.fd_march(lo, cp, dn, u0, dw[:, :, 0]),
        "truncated_profile (200k points)": lambda m: m.truncated_profile(q, power, r),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"active backend: {backend.NAME}")
    if _core is None:
        print("compiled extension not available; only the Python backend is timed")
    print(f"{'kernel':42s} {'python [s]':>11s} {'cython [s]':>11s} {'speedup':>8s}")
    for name, fn in cases().items():
        tp = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeat))
        if _core is None:
            print(f"{name:42s} {tp:11.4f} {'-':>11s} {'-':>8s}")
            continue
        tc = min(timeit.repeat(lambda: fn(_core), number=1, repeat=args.repeat))
        print(f"{name:42s} {tp:11.4f} {tc:11.4f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
