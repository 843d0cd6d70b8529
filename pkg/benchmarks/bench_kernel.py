"""Compare the compiled and pure-Python elimination kernels.

Usage: python benchmarks/bench_kernel.py [--repeat R]

Cases: raw ``rref_int`` on the largest Hochschild differential block of
CP^2, full homology of the Hochschild complex and of the loop model of
CP^2, and a dense random matrix whose entries outgrow 64 bits (the compiled
kernel then falls back to Python integers, so parity is expected there).
"""

import argparse
import random
import timeit

from stringtop import kernel, linalg
from stringtop.bar import HochschildComplex
from stringtop.cdga import FreeCDGA, loop_space_model
from stringtop.graded import homology
from stringtop.pd import standard_models

CP2 = standard_models()["CP2"]


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def _per_backend(job, repeat):
    times = {}
    for name in sorted(kernel.BACKENDS):
        previous = kernel.use_backend(name)
        try:
            times[name] = _time(job, repeat)
        finally:
            kernel.use_backend(previous)
    return times


def cases():
    c = HochschildComplex(CP2).complex(17)
    p = max(range(0, 16), key=lambda q: c.basis.dim(q) * c.basis.dim(q + 1))
    block = [linalg._int_row(r) for r in c.d(p)]
    ncols = c.basis.dim(p)
    yield (f"rref_int CH(CP2) d^{p} ({len(block)}x{ncols})",
           lambda: kernel.rref_int(block, ncols))
    yield "homology CH(CP2), degrees 0..16", lambda: homology(c, range(0, 17))
    loop = loop_space_model(FreeCDGA([("x", 2), ("y", 5)], {"y": "x^3"})).cochain_complex(31)
    yield "homology loop model CP2, 0..30", lambda: homology(loop, range(0, 31))
    rng = random.Random(0)
    dense = [[rng.randint(-9, 9) for _ in range(40)] for _ in range(40)]
    yield "rref_int dense random 40x40", lambda: kernel.rref_int(dense, 40)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = sorted(kernel.BACKENDS)
    print(f"{'case':40}" + "".join(f"{b:>12}" for b in backends) + f"{'speedup':>10}")
    for label, job in cases():
        times = _per_backend(job, args.repeat)
        row = f"{label:40}" + "".join(f"{times[b]:>11.4f}s" for b in backends)
        if "compiled" in times:
            row += f"{times['python'] / times['compiled']:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
