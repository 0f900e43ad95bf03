"""Compare the compiled and pure-Python convolution backends.

    python3 benchmarks/bench_mul.py [--orders 1000 10000 100000] [--repeat 3]

Times three workloads per order: a full 3-factor generating function, a dense
product of two already-dense series, and a sparse theta times dense product.
Results from both backends are checked for equality before timing is reported.
The compiled backend hands dense x dense products to the big-int kernel, so
that row mostly measures the dispatch overhead.
"""

import argparse
import time

from qtheta import kernels
from qtheta.fps import mul
from qtheta.seq import SeqSpec, gf, theta


def _best(fn, repeat):
    best, result = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - start)
    return best, result


def workloads(order):
    dense = gf(SeqSpec("N", (1, 1, 1)), order)
    sparse = theta("psi", 3, order)
    return {
        "gf N(1,2,3)": lambda: gf(SeqSpec("N", (1, 2, 3)), order),
        "dense x dense": lambda: mul(dense, dense),
        "sparse x dense": lambda: mul(sparse, dense),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--orders", type=int, nargs="+", default=[1000, 10_000, 100_000])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    backends = kernels.available_backends()
    if "c" not in backends:
        print("compiled kernel not built; only the Python backend is timed")
    header = f"{'order':>8}  {'workload':<16}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) > 1:
        header += f"{'speedup':>10}"
    print(header)
    old = kernels.BACKEND
    try:
        for order in args.orders:
            for name, fn in workloads(order).items():
                times, results = [], []
                for backend in backends:
                    kernels.set_backend(backend)
                    t, r = _best(fn, args.repeat)
                    times.append(t)
                    results.append(r)
                if any(r != results[0] for r in results):
                    raise SystemExit(f"backends disagree on {name} at order {order}")
                line = f"{order:>8}  {name:<16}" + "".join(f"{t:>11.4f}s" for t in times)
                if len(times) > 1:
                    line += f"{times[1] / times[0]:>9.1f}x"
                print(line)
    finally:
        kernels.set_backend(old)


if __name__ == "__main__":
    main()
