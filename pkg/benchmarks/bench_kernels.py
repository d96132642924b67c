"""Compare the compiled and pure-Python kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5] [--end-to-end]

Each row reports the best-of-``repeat`` time per call for both backends and
the speed-up.  ``--end-to-end`` also times one seeded gate optimization in
a subprocess per backend (selected with ``NSFEED_PURE``).
"""

from __future__ import annotations

import argparse
import os
import subprocess
import sys
import time
import timeit

import numpy as np

from nsfeed import _pure
from nsfeed.network import su3_template
from nsfeed.optimize import ChainConfig, _encode_branches, chain_problem

try:
    from nsfeed import _core
except ImportError:  # pragma: no cover
    sys.exit("compiled extension not built; run `pip install -e . --no-build-isolation` first")


def _unitary(d: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d)))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def cases():
    for n in (4, 6, 8, 10):
        m = _unitary(n, n)
        yield f"permanent n={n}", (lambda mod, m=m: mod.permanent(m))
    lam = _unitary(3, 1)
    yield "matrix_element |2,1,1>", (lambda mod: mod.matrix_element(lam, (2, 1, 1), (1, 2, 1)))
    yield "conditional_amplitudes", (lambda mod: mod.conditional_amplitudes(lam, (1, 0), (1, 0), 2))
    pairs = [(1, 2), (0, 1), (1, 2)]
    ang = np.array([0.3, 1.2, 2.1])
    yield "compose_rotations", (lambda mod: mod.compose_rotations(3, pairs, ang))
    t = su3_template(0, 0, 0)
    prob = chain_problem(t, t, ChainConfig(), third_template=t)
    enc = _encode_branches(prob)
    mats = np.stack(prob.matrices(np.linspace(0.1, 2.0, prob.dim)))
    yield "penalized_objective (chain)", (lambda mod: mod.penalized_objective(mats, enc, prob.target, 1e4))


def best_time(fn, repeat: int) -> float:
    timer = timeit.Timer(fn)
    number, _ = timer.autorange()
    return min(timer.repeat(repeat, number)) / number


END_TO_END = (
    "import time; from nsfeed import BACKEND; from nsfeed.network import su3_template; "
    "from nsfeed.optimize import OptimizerConfig, optimize_single; t0 = time.perf_counter(); "
    "r = optimize_single(su3_template(0, 0, 0), (1, 0), (1, 0), config=OptimizerConfig(restarts=4)); "
    "print(BACKEND, time.perf_counter() - t0, r.objective_value)"
)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--end-to-end", action="store_true")
    args = ap.parse_args(argv)

    print(f"{'kernel':<30} {'cython':>12} {'python':>12} {'speed-up':>9}")
    for name, fn in cases():
        tc = best_time(lambda: fn(_core), args.repeat)
        tp = best_time(lambda: fn(_pure), args.repeat)
        print(f"{name:<30} {tc * 1e6:>10.2f}us {tp * 1e6:>10.2f}us {tp / tc:>8.1f}x")

    if args.end_to_end:
        print()
        for pure in ("0", "1"):
            env = dict(os.environ, NSFEED_PURE=pure)
            t0 = time.perf_counter()
            out = subprocess.run([sys.executable, "-c", END_TO_END], env=env, capture_output=True,
                                 text=True, check=True)
            backend, seconds, obj = out.stdout.split()
            print(f"optimize_single, 4 restarts [{backend}]: {float(seconds):.2f}s, objective {float(obj):.8f}"
                  f" (process {time.perf_counter() - t0:.2f}s)")


if __name__ == "__main__":
    main()
