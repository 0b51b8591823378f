"""Compiled vs numpy kernel timings.

Usage: python benchmarks/bench_kernels.py [--repeat 5]

Times batch fidelity, region counting and one DE generation for both
circuit kinds at a few sizes, and checks that both backends agree.
"""
import argparse
import time

import numpy as np

from qboolearn.kernels import FidelityKernel, available_backends
from qboolearn.learners import _draw_generation


def best_time(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench(kind, n_bits, batch, repeat):
    rng = np.random.default_rng(0)
    P = rng.random((batch, 1 << n_bits))
    pop = rng.random((50, 1 << n_bits))
    gen = _draw_generation(rng, 50, 1 << n_bits)
    row = {}
    outputs = {}
    for name in available_backends():
        k = FidelityKernel(kind, n_bits, backend=name)
        outputs[name] = k(P)
        F0 = k(pop)

        def one_generation():
            k.de_generation(pop.copy(), F0.copy(), *gen, 0.4, 0.85)

        row[name] = (
            best_time(lambda: k(P), repeat),
            best_time(lambda: k.count_at_least(P, 0.95), repeat),
            best_time(one_generation, repeat),
        )
    diff = 0.0
    if len(outputs) == 2:
        diff = float(np.max(np.abs(outputs["cython"] - outputs["python"])))
    return row, diff


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--batch", type=int, default=1 << 16)
    args = ap.parse_args()
    backends = available_backends()
    print(f"backends: {', '.join(backends)}; batch {args.batch}, best of {args.repeat}")
    print(f"{'kind':10s} {'N':>2s} {'backend':8s} {'fidelity':>10s} {'count':>10s} "
          f"{'DE gen':>10s}")
    for kind in ("classical", "quantum"):
        for n_bits in (1, 3, 5, 7):
            row, diff = bench(kind, n_bits, args.batch, args.repeat)
            for name, (tf, tc, tg) in row.items():
                print(f"{kind:10s} {n_bits:2d} {name:8s} {tf * 1e3:8.2f}ms "
                      f"{tc * 1e3:8.2f}ms {tg * 1e6:8.1f}us")
            if len(row) == 2:
                speed = row["python"][0] / row["cython"][0]
                print(f"{'':13s} speedup x{speed:.1f}, max |diff| {diff:.1e}")


if __name__ == "__main__":
    main()
