"""Compare the compiled kernels with the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Times the tridiagonal solve, the shooting integrator, and two end-to-end
workloads (an evolve run and a shooting-oracle profile) with each backend
swapped into ``radchemo.kernels``.
"""
import argparse
import importlib
import timeit

import numpy as np

from radchemo import _pykernels, kernels
from radchemo.evolve import StepControl, run
from radchemo.grid import make_grid
from radchemo.model import InitialData, ModelParams
from radchemo.oracle import shoot_stationary


def workloads():
    rng = np.random.default_rng(0)
    m = 1024
    a, c = rng.uniform(-1, 0, m), rng.uniform(-1, 0, m)
    b, d = 3 + rng.uniform(0, 1, m), rng.normal(size=m)
    rb = np.linspace(0.01, 1.0, 256)
    g = make_grid(2, 1.0, 256)
    p = ModelParams(2, 1.0, 1.0)
    init = InitialData(5 * np.exp(-(g.cell_centers / 0.2) ** 2), np.ones(256))
    ctl = StepControl(dt_max=0.01, t_end=1.0, output_every=1.0)
    return {
        "thomas (M=1024)": lambda: kernels.thomas(a, b, c, d),
        "shoot (20k RK4 steps)": lambda: kernels.shoot(1.0, 3, 0.5, 1e-6, rb, 5e-5),
        "evolve (M=256, 100 steps)": lambda: run(g, init, p, ctl, diagnostics=False),
        "shooting oracle profile": lambda: shoot_stationary(1.0, 1.0, 3, 1.0, rb),
    }


def use(backend):
    kernels.thomas = backend.thomas
    kernels.shoot = backend.shoot


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n\n")[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    try:
        compiled = importlib.import_module("radchemo._ckernels")
    except ImportError:
        compiled = None
        print("compiled extension not built; timing the fallback only")
    backends = [("python", _pykernels)] + ([("cython", compiled)] if compiled else [])

    print(f"{'workload':<28}" + "".join(f"{name:>14}" for name, _ in backends) + ("     speedup" if compiled else ""))
    for label, fn in workloads().items():
        times = []
        for _, mod in backends:
            use(mod)
            number = 1
            while timeit.timeit(fn, number=number) < 0.2 and number < 10_000:
                number *= 2
            times.append(min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number)
        row = f"{label:<28}" + "".join(f"{t * 1e3:>11.3f} ms" for t in times)
        if compiled:
            row += f"{times[0] / times[1]:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
