"""Hot traversal kernels over CSR adjacency arrays.

Both kernels are written once in a numba-compatible subset of Python.
When numba is importable (and not disabled through the environment) they
are compiled with ``@njit``; otherwise the very same functions run as
plain Python on numpy arrays.  Set ``SCGBACKDOOR_DISABLE_NUMBA=1`` to
force the fallback.

Infinite thresholds never leave this module as numbers: every int64
result array comes with a boolean "finite" mask.
"""

import heapq
import os
import types
from itertools import chain

import numpy as np

_DISABLED = os.environ.get("SCGBACKDOOR_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit
    NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    NUMBA = False


def backend():
    return "numba" if NUMBA else "python"


def _find(arr, lo, hi, value):
    # binary search for value inside the sorted slice arr[lo:hi]; -1 if absent
    end = hi
    while lo < hi:
        mid = (lo + hi) // 2
        if arr[mid] < value:
            lo = mid + 1
        else:
            hi = mid
    if lo < end and arr[lo] == value:
        return lo
    return -1


def _t_nc(n, ch_ptr, ch_idx, root_series, root_time, blk_ptr, blk_time, blk_up):
    """Per-series first time in the non-conditionable set.

    Roots are the interventions sorted by increasing time (decreasing
    gamma).  The seen flag is shared across roots: once a series has been
    reached from an earlier intervention, all its descendants were too.
    ``blk_up[k]`` is the release time of the blocked instant ``blk_time[k]``.
    """
    tnc = np.zeros(n, np.int64)
    seen = np.zeros(n, np.bool_)
    visits = np.zeros(n, np.int64)
    queue = np.empty(n, np.int64)
    for k in range(len(root_series)):
        x = root_series[k]
        t = root_time[k]
        visits[x] += 1
        if seen[x]:
            continue
        head = 0
        tail = 0
        u = x
        while True:
            for j in range(ch_ptr[u], ch_ptr[u + 1]):
                d = ch_idx[j]
                if seen[d]:
                    continue
                seen[d] = True
                visits[d] += 1
                pos = _find(blk_time, blk_ptr[d], blk_ptr[d + 1], t)
                tnc[d] = blk_up[pos] if pos >= 0 else t
                queue[tail] = d
                tail += 1
            if head == tail:
                break
            u = queue[head]
            head += 1
    return tnc, seen, visits


def _lower_nc(p, bound, tnc, fin, blk_ptr, blk_time, blk_down):
    # latest t1 <= bound with p_t1 in NC and not blocked; (0, False) if none
    if not fin[p] or bound < tnc[p]:
        return 0, False
    pos = _find(blk_time, blk_ptr[p], blk_ptr[p + 1], bound)
    if pos >= 0:
        bound = blk_down[pos]
        if bound < tnc[p]:
            return 0, False
    return bound, True


def _access(n, par_ptr, par_idx, tnc, fin, blk_ptr, blk_time, blk_down,
            seed_series, seed_time, forb_parent, forb_child):
    """Max-priority traversal computing accessibility ceilings.

    Seeds are anchor vertices (one for a plain anchor, one per intervention
    for the combined profile).  Each popped (S, t_s) relaxes every parent P
    to the latest NC instant of P not after t_s; when (P, S) is the
    forbidden edge only lagged realizations count, so the bound drops to
    t_s - 1.  Pops come in decreasing time order so a series is final the
    first time it is popped.
    """
    ceil = np.zeros(n, np.int64)
    has = np.zeros(n, np.bool_)
    done = np.zeros(n, np.bool_)
    pred_series = np.full(n, -1, np.int64)
    pred_time = np.zeros(n, np.int64)
    heap = [(np.int64(0), np.int64(0))]
    heap.pop()
    for k in range(len(seed_series)):
        s = seed_series[k]
        t = seed_time[k]
        for j in range(par_ptr[s], par_ptr[s + 1]):
            p = par_idx[j]
            bound = t - 1 if (p == forb_parent and s == forb_child) else t
            c, ok = _lower_nc(p, bound, tnc, fin, blk_ptr, blk_time, blk_down)
            if ok and (not has[p] or c > ceil[p]):
                ceil[p] = c
                has[p] = True
                pred_series[p] = s
                pred_time[p] = t
                heapq.heappush(heap, (-c, p))
    while len(heap) > 0:
        negt, s = heapq.heappop(heap)
        t = -negt
        if done[s] or ceil[s] != t:
            continue
        done[s] = True
        for j in range(par_ptr[s], par_ptr[s + 1]):
            p = par_idx[j]
            if done[p]:
                continue
            bound = t - 1 if (p == forb_parent and s == forb_child) else t
            c, ok = _lower_nc(p, bound, tnc, fin, blk_ptr, blk_time, blk_down)
            if ok and (not has[p] or c > ceil[p]):
                ceil[p] = c
                has[p] = True
                pred_series[p] = s
                pred_time[p] = t
                heapq.heappush(heap, (-c, p))
    return ceil, has, pred_series, pred_time


def _rebind(fn, namespace):
    return types.FunctionType(fn.__code__, namespace, fn.__name__, fn.__defaults__)


# plain-Python variants whose helpers are also plain Python; used for the
# fallback path, the benchmark and equivalence tests
_py_ns = dict(globals())
_py_ns["_lower_nc"] = _rebind(_lower_nc, _py_ns)
t_nc_python = _rebind(_t_nc, _py_ns)
access_python = _rebind(_access, _py_ns)

if NUMBA:
    _find = njit(cache=True)(_find)
    _lower_nc = njit(cache=True)(_lower_nc)
    t_nc_kernel = njit(cache=True)(_t_nc)
    access_kernel = njit(cache=True)(_access)
else:
    t_nc_kernel = t_nc_python
    access_kernel = access_python


def csr(g, direction):
    """CSR arrays (ptr, idx) of children or parents, cached on the SCG.

    Neighbours come out sorted by index, which is name order, matching
    ``children_of`` / ``parents_of``.
    """
    if g._csr is None:
        n = len(g.vertices)
        index = g._index
        out = {}
        for name, table in (("children", g._children), ("parents", g._parents)):
            lists = [table[v] for v in g.vertices]
            ptr = np.zeros(n + 1, np.int64)
            np.cumsum(np.fromiter(map(len, lists), np.int64, n), out=ptr[1:])
            idx = np.fromiter(map(index.__getitem__, chain.from_iterable(lists)), np.int64, int(ptr[-1]))
            out[name] = (ptr, idx)
        g._csr = out
    return g._csr[direction]


def blocked_arrays(n, blocked):
    """Pack {series index: {time: (up, down)}} into sorted CSR arrays."""
    counts = np.zeros(n + 1, np.int64)
    times, ups, downs = [], [], []
    for i in sorted(blocked):
        entry = blocked[i]
        counts[i + 1] = len(entry)
        for t in sorted(entry):
            up, down = entry[t]
            times.append(t)
            ups.append(up)
            downs.append(down)
    return (np.cumsum(counts), np.asarray(times, np.int64), np.asarray(ups, np.int64),
            np.asarray(downs, np.int64))
