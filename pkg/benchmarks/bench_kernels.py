"""Time the t_NC and accessibility kernels, compiled versus plain Python.

Chain SCGs S0 -> S1 -> ... with self-loops, one intervention on S0 at
time -1, accessibility anchored at the last series at time 0.

    python benchmarks/bench_kernels.py --sizes 1000 10000 100000 --repeat 3
"""

import argparse
import time

import numpy as np

from scgbackdoor import _kernels
from scgbackdoor.cone import CausalQuery, release_maps
from scgbackdoor.graph import SCG


def chain(n):
    names = [f"S{i}" for i in range(n)]
    edges = [(a, b) for a, b in zip(names, names[1:])] + [(a, a) for a in names]
    return SCG(names, edges)


def kernel_inputs(g, q):
    n = len(g.vertices)
    ch_ptr, ch_idx = _kernels.csr(g, "children")
    par_ptr, par_idx = _kernels.csr(g, "parents")
    blk = {g.index(s): m for s, m in release_maps(q.interventions).items()}
    blk_ptr, blk_time, blk_up, blk_down = _kernels.blocked_arrays(n, blk)
    roots_s = np.asarray([g.index(v.series) for v in q.interventions], np.int64)
    roots_t = np.asarray([v.time for v in q.interventions], np.int64)
    return dict(n=n, ch=(ch_ptr, ch_idx), par=(par_ptr, par_idx), roots=(roots_s, roots_t),
                blk=(blk_ptr, blk_time, blk_up, blk_down))


def run_t_nc(fn, a):
    return fn(a["n"], *a["ch"], *a["roots"], a["blk"][0], a["blk"][1], a["blk"][2])


def run_access(fn, a, tnc, fin, anchor):
    s = np.asarray([anchor], np.int64)
    t = np.asarray([0], np.int64)
    return fn(a["n"], *a["par"], tnc, fin, a["blk"][0], a["blk"][1], a["blk"][3], s, t, -1, -1)


def best_of(repeat, fn):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 10000, 100000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--skip-python-above", type=int, default=10 ** 6,
                    help="skip the plain-Python kernels for larger chains")
    args = ap.parse_args()

    backends = [("python", _kernels.t_nc_python, _kernels.access_python)]
    if _kernels.NUMBA:
        backends.insert(0, ("numba", _kernels.t_nc_kernel, _kernels.access_kernel))
        # compile outside the timed region
        small = kernel_inputs(chain(3), CausalQuery([("S0", -1)], [("S2", 0)]))
        tnc, fin, _ = run_t_nc(_kernels.t_nc_kernel, small)
        run_access(_kernels.access_kernel, small, tnc, fin, 2)
    else:
        print("numba unavailable or disabled; timing the plain-Python kernels only")

    print(f"{'n':>8} {'backend':>8} {'t_nc [s]':>10} {'access [s]':>11}")
    for n in args.sizes:
        g = chain(n)
        q = CausalQuery([("S0", -1)], [(f"S{n - 1}", 0)])
        a = kernel_inputs(g, q)
        results = {}
        for name, t_nc_fn, access_fn in backends:
            if name == "python" and n > args.skip_python_above:
                continue
            t1, (tnc, fin, _) = best_of(args.repeat, lambda: run_t_nc(t_nc_fn, a))
            t2, (ceil, has, _, _) = best_of(args.repeat, lambda: run_access(access_fn, a, tnc, fin, n - 1))
            results[name] = (tnc.copy(), ceil.copy(), has.copy())
            print(f"{n:>8} {name:>8} {t1:>10.4f} {t2:>11.4f}")
        if len(results) == 2:
            (t_a, c_a, h_a), (t_b, c_b, h_b) = results.values()
            same = np.array_equal(t_a, t_b) and np.array_equal(c_a, c_b) and np.array_equal(h_a, h_b)
            print(f"{n:>8} {'match':>8} {str(same):>10}")


if __name__ == "__main__":
    main()
