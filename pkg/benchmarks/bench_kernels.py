"""Compare the compiled kernel with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from whorlsim import _backend
from whorlsim.dynamics import whorl_family

WINDOW = (-1.6, 1.6, -1.2, 1.2)
EQ_X, EQ_Y = [0.0, 1.0, -1.0], [0.0, 0.0, 0.0]


def _terms(fld):
    return ([(i, j, c) for (i, j), c in fld.p.items()],
            [(i, j, c) for (i, j), c in fld.q.items()])


def workloads(kernel):
    xs = np.linspace(-1.6, 1.6, 256)
    ys = np.linspace(1.2, -1.2, 192)
    return {
        "eval x 100k": lambda: [kernel.eval(0.3, 0.2) for _ in range(100_000)],
        "rk4 fixed, 20k steps": lambda: kernel.integrate_fixed(0.5, 0.0, 1e-3, 20.0, WINDOW),
        "dopri5 adaptive, t=50": lambda: kernel.integrate_adaptive(
            0.01, 0.0, 50.0, 1.0, 1e-10, 1e-12, 1e-3, 1e-12, 0.1, WINDOW, EQ_X, EQ_Y, 1e-6),
        "orientation 256x192": lambda: kernel.orientation_grid(xs, ys, 1e-12),
    }


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    p, q = _terms(whorl_family(0.2))
    kernels = {"python": _backend.PyFieldKernel(p, q)}
    if _backend.CompiledFieldKernel is not None:
        kernels["cython"] = _backend.CompiledFieldKernel(p, q)
    else:
        print("compiled kernel not available; timing the fallback only")
    results = {name: {k: best_of(fn, args.repeat) for k, fn in workloads(kern).items()}
               for name, kern in kernels.items()}
    names = list(kernels)
    print(f"{'workload':<26}" + "".join(f"{n:>12}" for n in names)
          + ("     speedup" if len(names) == 2 else ""))
    for work in results["python"]:
        row = f"{work:<26}" + "".join(f"{results[n][work]:>11.4f}s" for n in names)
        if len(names) == 2:
            row += f"{results['python'][work] / results['cython'][work]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
