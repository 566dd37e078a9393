"""Time the per-fiber phase sums on both backends and check they agree.

    python3 benchmarks/bench_kernels.py [--levels 100 400 1000] [--repeat 5]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from seifert_wrt._kernels import _pykernel
from seifert_wrt.exact import _phase_table
from seifert_wrt.numtheory import rho_sigma

try:
    from seifert_wrt._kernels import _ckernel
except ImportError:
    _ckernel = None

FIBERS = [(2, 1), (3, 1), (7, 1), (11, 4)]


def run_level(r: int, repeat: int) -> dict:
    gammas = np.arange(1, r, dtype=np.int64)
    row = {"r": r}
    outs = {}
    backends = {"python": _pykernel}
    if _ckernel is not None:
        backends["cython"] = _ckernel
    for name, mod in backends.items():
        def work(mod=mod):
            res = []
            for a, b in FIBERS:
                rho, _ = rho_sigma(a, b)
                res.append(mod.fiber_sums(r, gammas, a, b, rho, _phase_table(4 * r * a)))
            return res
        outs[name] = work()
        row[name] = min(timeit.repeat(work, number=1, repeat=repeat))
    if "cython" in outs:
        row["max_diff"] = max(float(np.max(np.abs(np.asarray(p) - np.asarray(c))))
                              for p, c in zip(outs["python"], outs["cython"]))
        row["speedup"] = row["python"] / row["cython"]
    return row


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--levels", type=int, nargs="+", default=[100, 400, 1000, 2000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _ckernel is None:
        print("compiled kernel not built; timing the numpy backend only")
    print(f"{'r':>6} {'python s':>10} {'cython s':>10} {'speedup':>8} {'max diff':>10}")
    for r in args.levels:
        row = run_level(r, args.repeat)
        print(f"{row['r']:>6} {row['python']:>10.5f} {row.get('cython', float('nan')):>10.5f} "
              f"{row.get('speedup', float('nan')):>8.2f} {row.get('max_diff', float('nan')):>10.2e}")


if __name__ == "__main__":
    main()
