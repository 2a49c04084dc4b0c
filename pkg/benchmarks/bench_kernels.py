"""Time the compiled and pure-Python chi kernels on the same X(n, c) scan.

Usage: python benchmarks/bench_kernels.py [--cmax 400] [--group G1]
"""
import argparse
import time

import numpy as np

from index7.eisenstein import make_kernel
from index7.kernels import PythonChiKernel, compiled_kernel_class


def timed(kernel, cmax, ns):
    t = time.perf_counter()
    x = kernel.x_values(1, cmax, ns, 1)
    return time.perf_counter() - t, x


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cmax", type=int, default=400)
    ap.add_argument("--group", default="G1")
    args = ap.parse_args()
    ns = [1, 2, 4]
    walks = sum(range(1, args.cmax + 1))
    tp, xp = timed(make_kernel(args.group, PythonChiKernel), args.cmax, ns)
    print(f"python   {tp:9.3f} s  {1e9 * tp / walks:10.1f} ns/walk")
    cls = compiled_kernel_class()
    if cls is None:
        print("compiled extension not built")
        return
    tc, xc = timed(make_kernel(args.group, cls), args.cmax, ns)
    print(f"compiled {tc:9.3f} s  {1e9 * tc / walks:10.1f} ns/walk")
    print(f"speedup  {tp / tc:9.1f}x  max |diff| {np.max(np.abs(xc - xp)):.2e}")


if __name__ == "__main__":
    main()
