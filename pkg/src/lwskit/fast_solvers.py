"""Accelerated solvers.

The divide-and-conquer driver splits the index space into coordinate-sum
bands and hands each cross-band step to a static solver.  Static solvers
come in four kinds (naive, rank-1 envelope, slice-rank-1, hierarchy); all
return exactly the values of the naive band-to-band minimum.
"""
from __future__ import annotations

import enum
import random
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .dp_core import (HALF, Arith, KdLwsInstance, PtInstance, StaticKdInstance, Band, DpTable,
                      band_values, kd_work, _cell_naive, _given_bound, dense_work, pick_arith)
from .tensors import INF, INF_CODE, CostTensor, CpTensor, check_word, DenseTensor, SliceTensor, SliceTerm, cp_as_slice


class PreconditionError(ValueError):
    """The instance is outside the class a solver supports."""


# ----------------------------------------------------------------------------
# lower envelope of lines

class LineEnvelope:
    """Exact minimum of integer lines over a fixed set of integer query points.

    A Li Chao tree over the sorted distinct query points: each node keeps
    the line that wins at its midpoint, so insertion and lookup both walk
    one root-to-leaf path.
    """

    def __init__(self, points: Iterable[int]):
        self.xs = sorted(set(int(x) for x in points))
        self._pos = {x: i for i, x in enumerate(self.xs)}
        self._tree: dict[int, tuple[int, int]] = {}

    def add(self, slope: int, intercept) -> None:
        if intercept == INF or not self.xs:
            return
        line = (int(slope), int(intercept))
        node, lo, hi = 1, 0, len(self.xs) - 1
        while True:
            cur = self._tree.get(node)
            if cur is None:
                self._tree[node] = line
                return
            mid = (lo + hi) // 2
            xm, xl = self.xs[mid], self.xs[lo]
            better_mid = line[0] * xm + line[1] < cur[0] * xm + cur[1]
            better_lo = line[0] * xl + line[1] < cur[0] * xl + cur[1]
            if better_mid:
                self._tree[node], line = line, cur
            if lo == hi:
                return
            if better_lo != better_mid:
                node, hi = 2 * node, mid
            else:
                node, lo = 2 * node + 1, mid + 1

    def query(self, x: int):
        """Minimum value at ``x``, which must be one of the construction points."""
        i = self._pos[int(x)]
        node, lo, hi = 1, 0, len(self.xs) - 1
        best = INF
        while node in self._tree:
            s, c = self._tree[node]
            v = s * x + c
            if v < best:
                best = v
            if lo == hi:
                break
            mid = (lo + hi) // 2
            if i <= mid:
                node, hi = 2 * node, mid
            else:
                node, lo = 2 * node + 1, mid + 1
        return best


def envelope_batch_min(lines: Iterable[tuple[int, int]], queries: Sequence[int]) -> list:
    """``[min over lines of slope * x + intercept for x in queries]``, exactly.

    Lines with an infinite intercept are ignored; with no finite line every
    answer is ``INF``.
    """
    env = LineEnvelope(queries)
    for s, c in lines:
        env.add(s, c)
    return [env.query(x) for x in queries]


def solve_static_lws_rank1(given: Mapping[int, object], targets: Iterable[int], a, b=None) -> dict:
    """``T'[j] = min_i given[i] + a[i] * b[j]`` over ``i`` in ``given`` with ``i < j``.

    ``a`` and ``b`` are indexable by item index.  Alternatively pass one
    rank-1 :class:`CpTensor` as ``a`` with ``w[i, j] = entry(i, j)``.
    """
    if isinstance(a, CostTensor):
        if not isinstance(a, CpTensor) or a.rank != 1:
            raise PreconditionError("rank-1 static LWS needs a CP tensor of rank 1")
        fa, fb = a.factors
        a = {i: int(fa[i - 1, 0]) for i in range(1, a.n + 1)}
        b = {j: int(fb[j - 1, 0]) for j in range(1, len(fb) + 1)}
    elif b is None:
        raise TypeError("need both factor vectors")
    targets = sorted(targets)
    src = sorted(given)
    if src and targets and src[-1] >= targets[0]:
        # items are only visible to later targets; sweep in target order
        out = {}
        env_pts = [b[j] for j in targets]
        env = LineEnvelope(env_pts)
        pi = 0
        for j in targets:
            while pi < len(src) and src[pi] < j:
                env.add(a[src[pi]], given[src[pi]])
                pi += 1
            out[j] = env.query(b[j])
        return out
    vals = envelope_batch_min(((a[i], given[i]) for i in src), [b[j] for j in targets])
    return dict(zip(targets, vals))


# ----------------------------------------------------------------------------
# static band-to-band solvers on work arrays

class StaticSolverKind(enum.Enum):
    NAIVE = "naive"
    RANK1_ENVELOPE = "rank1"
    SLICE_RANK1 = "slicerank1"
    HIERARCHY = "hierarchy"


def _axis_groups(k: int, n: int, ell: int):
    """Group tuples (other coordinates, 0-based) for axis ``ell``."""
    return np.ndindex(*([n] * (k - 1)))


def _ranges(o, n, src, dst):
    """1-based target and predecessor windows for one group."""
    so = sum(o) + len(o)
    return so, range(max(1, dst[0] - so), min(n, dst[1] - 1 - so) + 1)


def _axis_naive(Wl, ar, G, out, ell, src, dst, groups=None):
    k, n = G.ndim, G.shape[0]
    Gm = np.moveaxis(G, ell, -1)
    Om = np.moveaxis(out, ell, -1)
    Wm = np.moveaxis(Wl, ell, k - 1)
    for o in (groups or _axis_groups(k, n, ell)):
        so, js = _ranges(o, n, src, dst)
        for j in js:
            lo = max(1, src[0] - so)
            hi = min(j - 1, src[1] - 1 - so)
            if lo > hi:
                continue
            m = ar.amin(ar.add(Gm[o][lo - 1:hi].copy(), Wm[o][j - 1, lo - 1:hi]))
            if m < Om[o][j - 1]:
                Om[o][j - 1] = m


def _finite(ar: Arith, v) -> bool:
    return v != INF if ar.exact else v < HALF


def _axis_lines(ar, G, out, ell, src, dst, slope_of, query_of):
    """Envelope per group: lines ``(slope_of(o, i), G[o, i])``, points ``query_of(o, j)``."""
    k, n = G.ndim, G.shape[0]
    Gm = np.moveaxis(G, ell, -1)
    Om = np.moveaxis(out, ell, -1)
    for o in _axis_groups(k, n, ell):
        so, js = _ranges(o, n, src, dst)
        if not js:
            continue
        lo = max(1, src[0] - so)
        hi = min(n, src[1] - 1 - so)
        given = {i: (int(Gm[o][i - 1]) if _finite(ar, Gm[o][i - 1]) else INF) for i in range(lo, hi + 1)}
        if not given:
            continue
        a = {i: slope_of(o, i) for i in given}
        b = {j: query_of(o, j) for j in js}
        res = solve_static_lws_rank1(given, js, a, b)
        for j, v in res.items():
            if v != INF and v < Om[o][j - 1]:
                Om[o][j - 1] = v


def _static_rank1(ws, ar, W, G, src, dst):
    k = G.ndim
    out = ar.full(G.shape)
    for ell, w in enumerate(ws):
        if not isinstance(w, CpTensor):
            raise PreconditionError("rank-1 envelope solver needs CP tensors")
        if w.rank != 1:
            # the geometric rank-d machinery is out of reach; scan directly
            _axis_naive(W[ell], ar, G, out, ell, src, dst)
            continue
        f = [w.factors[ax][:, 0] for ax in range(k + 1)]

        def coef(o, f=f, ell=ell):
            c = 1
            others = [ax for ax in range(k) if ax != ell]
            for ax, v in zip(others, o):
                c *= int(f[ax][v])
            return c

        _axis_lines(ar, G, out, ell, src, dst,
                    slope_of=lambda o, i, f=f: int(f[k][i - 1]),
                    query_of=lambda o, j, f=f, ell=ell, coef=coef: coef(o) * int(f[ell][j - 1]))
    return out


def single_term(w: CostTensor) -> SliceTerm:
    """The lone slice term of ``w``; rank-1 CP tensors are converted."""
    if isinstance(w, CpTensor) and w.rank <= 1:
        w = cp_as_slice(w, axis=w.order) if w.rank == 1 else SliceTensor([], k=w.k, n=w.n)
    if not isinstance(w, SliceTensor) or len(w.terms) > 1:
        raise PreconditionError("slice-rank-1 solver needs a single slice term per tensor")
    if not w.terms:
        return SliceTerm(w.order, np.zeros(w.n, dtype=np.int64), DenseTensor(np.zeros((w.n,) * w.k, dtype=np.int64)))
    return w.terms[0]


def _static_slice1(ws, ar, W, G, src, dst):
    k = G.ndim
    out = ar.full(G.shape)
    for ell, w in enumerate(ws):
        term = single_term(w)
        s = term.axis - 1
        B = term.b.materialize().data
        a = term.a
        if s == k:
            # vector on the predecessor: slope a[i], query b[j]
            Bm = np.moveaxis(B, ell, -1)
            _axis_lines(ar, G, out, ell, src, dst,
                        slope_of=lambda o, i, a=a: int(a[i - 1]),
                        query_of=lambda o, j, Bm=Bm: int(Bm[o][j - 1]))
        elif s == ell:
            # vector on the moving coordinate: slope b[o, i], query a[j]
            _axis_lines(ar, G, out, ell, src, dst,
                        slope_of=lambda o, i, B=B: int(B[o + (i - 1,)]),
                        query_of=lambda o, j, a=a: int(a[j - 1]))
        else:
            # vector on a fixed coordinate leaves a general matrix per group
            _axis_naive(W[ell], ar, G, out, ell, src, dst)
    return out


def _static_1d(w: CostTensor, ar, Wd, g, src, dst):
    """1D band step on a length-n slice; ``w`` is ``[target, predecessor]``."""
    n = g.shape[0]
    out = ar.full(n)
    js = range(max(1, dst[0]), min(n, dst[1] - 1) + 1)
    if isinstance(w, CpTensor) and w.rank == 1:
        given = {i: (int(g[i - 1]) if _finite(ar, g[i - 1]) else INF)
                 for i in range(max(1, src[0]), min(n, src[1] - 1) + 1)}
        fj, fi = w.factors[0][:, 0], w.factors[1][:, 0]
        res = solve_static_lws_rank1(given, js, {i: int(fi[i - 1]) for i in given},
                                     {j: int(fj[j - 1]) for j in js})
        for j, v in res.items():
            if v != INF:
                out[j - 1] = v
        return out
    if Wd is None:
        Wd = dense_work(w, ar)
    for j in js:
        lo, hi = max(1, src[0]), min(j - 1, src[1] - 1)
        if lo <= hi:
            out[j - 1] = ar.amin(ar.add(g[lo - 1:hi].copy(), Wd[j - 1, lo - 1:hi]))
    return out


def _fix_rest(w: CostTensor, values) -> CostTensor:
    """Pin axes 2..len(values)+1 of ``w`` to ``values`` (1-based)."""
    for v in values:
        w = w.fix(2, v)
    return w


def _static_hier(ws, ar, G, src, dst, map_fn=map):
    k, n = G.ndim, G.shape[0]
    if k == 1:
        return _static_1d(ws[0], ar, None, G, src, dst)
    out = ar.full(G.shape)

    def first_axis(o):
        so = sum(o) + len(o)
        w1 = _fix_rest(ws[0], [v + 1 for v in o])
        sl = (slice(None),) + tuple(o)
        return o, _static_1d(w1, ar, None, G[sl], (src[0] - so, src[1] - so), (dst[0] - so, dst[1] - so))

    def slab(v):
        sub = [w.fix(1, v) for w in ws[1:]]
        return v, _static_hier(sub, ar, G[v - 1], (src[0] - v, src[1] - v), (dst[0] - v, dst[1] - v))

    for o, col in map_fn(first_axis, list(np.ndindex(*([n] * (k - 1))))):
        sl = (slice(None),) + tuple(o)
        out[sl] = np.minimum(out[sl], col)
    for v, part in map_fn(slab, range(1, n + 1)):
        out[v - 1] = np.minimum(out[v - 1], part)
    return out


def static_arrays(kind: StaticSolverKind, ws, ar, W, G, src, dst, map_fn=map):
    """Dispatch one band-to-band step; returns new values on ``dst``."""
    if kind is StaticSolverKind.NAIVE:
        out = ar.full(G.shape)
        for ell in range(G.ndim):
            _axis_naive(W[ell], ar, G, out, ell, src, dst)
        return out
    if kind is StaticSolverKind.RANK1_ENVELOPE:
        return _static_rank1(ws, ar, W, G, src, dst)
    if kind is StaticSolverKind.SLICE_RANK1:
        return _static_slice1(ws, ar, W, G, src, dst)
    if kind is StaticSolverKind.HIERARCHY:
        return _static_hier(list(ws), ar, G, src, dst, map_fn)
    raise ValueError(f"unknown static solver {kind!r}")


def solve_static_kd(inst: StaticKdInstance, kind: StaticSolverKind = StaticSolverKind.NAIVE,
                    map_fn=map) -> dict:
    ar, W = kd_work(inst.base, extra=_given_bound(inst))
    G = inst.given_array(ar)
    out = static_arrays(kind, inst.base.w, ar, W, G, (inst.a, inst.a + inst.N),
                        (inst.a + inst.N, inst.a + 2 * inst.N), map_fn)
    return band_values(out, inst.target, ar)


def solve_static_kd_via_hierarchy(inst: StaticKdInstance, map_fn=map) -> dict:
    """Peel one axis at a time: a 1D solve per line along axis 1, then a
    (k-1)-dimensional solve on each slab ``j_1 = v``."""
    if inst.base.k < 2:
        raise PreconditionError("the hierarchy needs k >= 2")
    return solve_static_kd(inst, StaticSolverKind.HIERARCHY, map_fn)


# ----------------------------------------------------------------------------
# divide and conquer

def solve_kdlws_dc(inst: KdLwsInstance, static_solver: StaticSolverKind = StaticSolverKind.NAIVE,
                   cutoff: int = 1, trace: Callable | None = None, map_fn=map,
                   return_table: bool = False):
    """kD LWS through band halving.

    ``S([alpha, beta))`` solves the left half, pushes its contribution into
    the right half with one static step, then solves the right half.  Bands
    of width at most ``cutoff`` are evaluated directly.  ``trace`` receives
    ``(event, alpha, mid, beta, t)`` with event ``"leaf"`` or ``"merge"``;
    ``t`` is the int64-coded seed array after a merge.
    """
    k, n = inst.k, inst.n
    if isinstance(static_solver, str):
        static_solver = StaticSolverKind(static_solver)
    ar, W = kd_work(inst)
    T = ar.full((n,) * k)
    t = ar.full((n,) * k)
    t[(0,) * k] = 0

    def leaf(alpha, beta):
        for idx in Band(alpha, beta, k, n, strict=False):
            j = tuple(i - 1 for i in idx)
            best = _cell_naive(T, W, ar, j, lo_sum=alpha - k)
            T[j] = t[j] if t[j] < best else best
        if trace:
            trace("leaf", alpha, None, beta, None)

    def S(alpha, beta):
        if beta - alpha <= max(1, cutoff):
            leaf(alpha, beta)
            return
        m = (beta - alpha + 1) // 2
        S(alpha, alpha + m)
        new = static_arrays(static_solver, inst.w, ar, W, T, (alpha, alpha + m), (alpha + m, beta), map_fn)
        np.minimum(t, new, out=t)
        if trace:
            trace("merge", alpha, alpha + m, beta, ar.to_codes(t))
        S(alpha + m, beta)

    S(k, k * n + 1)
    table = DpTable(k, n, ar.to_codes(T))
    ans = table[(n,) * k]
    return (table, ans) if return_table else ans


# ----------------------------------------------------------------------------
# slice rank 1 in two dimensions, compiled

def _padded(x: np.ndarray) -> np.ndarray:
    """Copy with a zero row and column 0 in front (1-based kernels)."""
    x = np.atleast_2d(x)
    out = np.empty((x.shape[0] + 1, x.shape[1] + 1), dtype=np.int64)
    out[0] = 0
    out[:, 0] = 0
    out[1:, 1:] = x
    return out


def _axis_arrays(term: SliceTerm, ell: int, n: int):
    """Kernel arrays ``(P, ps, Q, qs, mode)`` for axis ``ell`` (0 or 1)."""
    a = term.a
    B = term.b.materialize(budget=1 << 30).data
    s = term.axis - 1
    if s == 2:
        # a[p] * b[j1, j2]
        return _padded(a[None, :])[1:], 0, _kernels.padded_transpose(B) if ell == 0 else _padded(B), 1, 0
    if s == ell:
        # a[moving] * b[other, p]
        return _padded(B), 1, _padded(a[None, :])[1:], 0, 0
    # a[other] * b[moving, p]
    return _padded(B), 1, _padded(np.repeat(a[:, None], n, axis=1)), 1, 1


def _headroom_ok(n: int, axes) -> bool:
    def amax(x):
        return max(int(x.max()), -int(x.min()))
    pmax = max(amax(ax[0]) for ax in axes)
    qmax = max(amax(ax[2]) for ax in axes)
    wmax = pmax * qmax
    vmax = (2 * n + 2) * wmax
    return vmax < 2**58 and 16 * (vmax + wmax) * (pmax + 1) < 2**62


def slicerank1_arrays(inst: KdLwsInstance):
    if inst.k != 2:
        raise PreconditionError("the compiled slice-rank-1 solver is two-dimensional")
    return [_axis_arrays(single_term(w), ell, inst.n) for ell, w in enumerate(inst.w)]


def solve_2dlws_slicerank1(inst: KdLwsInstance, cutoff: int = 48, return_table: bool = False):
    """2D LWS with one slice term per tensor, in sub-cubic time.

    Orientations with the vector on the predecessor or on the moving
    coordinate become per-group lower envelopes.  A vector on the other
    coordinate leaves a general matrix per group, which is scanned.  Falls
    back to the exact Python path when int64 headroom is insufficient.
    """
    axes = slicerank1_arrays(inst)
    n = inst.n
    if not _headroom_ok(n, axes):
        return solve_kdlws_dc(inst, StaticSolverKind.SLICE_RANK1, return_table=return_table)
    ax1, ax2 = axes
    # every table cell is written by a leaf before anything reads it
    G1 = np.empty((n + 1, n + 1), dtype=np.int64)
    G2 = np.empty((n + 1, n + 1), dtype=np.int64)
    t1 = np.full((n + 1, n + 1), _kernels.INF, dtype=np.int64)
    t2 = t1.copy()
    t1[1, 1] = 0
    win = np.empty(n + 2, np.int64)
    hs = np.empty(n + 2, np.int64)
    hc = np.empty(n + 2, np.int64)
    cutoff = max(1, cutoff)

    def S(alpha, beta):
        if beta - alpha <= cutoff:
            _kernels.leaf(G1, G2, t1, t2, alpha, beta, n, *ax1, *ax2)
            return
        m = (beta - alpha + 1) // 2
        S(alpha, alpha + m)
        _kernels.static_stage(G1, G2, t1, t2, alpha, alpha + m, beta, n, *ax1, *ax2, win, hs, hc, _kernels.DIRECT)
        S(alpha + m, beta)

    S(2, 2 * n + 1)
    return _finish_2d(G2, n, return_table)


def _finish_2d(G2, n, return_table):
    if not return_table:
        v = int(G2[n, n])
        return INF if v >= _kernels.HALF else v
    codes = G2[1:, 1:].copy()
    codes[codes >= _kernels.HALF] = INF_CODE
    table = DpTable(2, n, codes)
    return table, table[n, n]


def solve_2dlws_slicerank1_naive_compiled(inst: KdLwsInstance, return_table: bool = False):
    """Cubic compiled baseline on the same arrays (used by benchmarks)."""
    axes = slicerank1_arrays(inst)
    if not _headroom_ok(inst.n, axes):
        raise PreconditionError("weights too large for the compiled baseline")
    return _finish_2d(_kernels.naive_2d(inst.n, *axes[0], *axes[1]), inst.n, return_table)


# ----------------------------------------------------------------------------
# Knuth-style interval speedup

def _k_free(w: CostTensor, i: int, j: int, ks) -> bool:
    vals = {w.entry(i, j, k) for k in ks}
    return len(vals) <= 1


def check_knuth_preconditions(inst: PtInstance, samples: int = 2000, seed: int = 0,
                              exhaustive: bool = False) -> str | None:
    """Return None if the sampled checks pass, otherwise a reason.

    Checks that the weight ignores the split point and, as a function
    ``c(i, j)`` of the interval, obeys the quadrangle inequality and is
    monotone under inclusion.
    """
    n, w = inst.n, inst.w
    rng = random.Random(seed)

    def c(i, j):
        return w.entry(i, j, i + 1)

    if exhaustive:
        quads = [(a, b, cc, d) for a in range(1, n + 1) for b in range(a, n + 1)
                 for cc in range(b, n + 1) for d in range(cc, n + 1) if d - a >= 2]
    else:
        quads = []
        for _ in range(samples):
            q = sorted(rng.randint(1, n) for _ in range(4))
            if q[3] - q[0] >= 2:
                quads.append(tuple(q))
    for i in range(1, n + 1):
        for j in range(i + 2, n + 1):
            ks = range(i + 1, j) if exhaustive or j - i < 4 else rng.sample(range(i + 1, j), 3)
            if not _k_free(w, i, j, ks):
                return f"weight depends on the split point at ({i}, {j})"
    for a, b, cc, d in quads:
        vals = []
        for (x, y) in ((a, cc), (b, d), (a, d), (b, cc)):
            vals.append(c(x, y) if y - x >= 2 else 0)
        if INF in vals:
            return "infinite weights are not supported"
        if vals[0] + vals[1] > vals[2] + vals[3]:
            return f"quadrangle inequality fails at {(a, b, cc, d)}"
        if vals[3] > vals[2]:
            return f"weight not monotone at {(a, b, cc, d)}"
    return None


def solve_pt_knuth(inst: PtInstance, samples: int = 2000, seed: int = 0, exhaustive: bool = False):
    """Interval DP with monotone split points, ``O(n^2)`` after the checks."""
    n = inst.n
    if n < 2:
        raise ValueError("PT needs at least two nodes")
    why = check_knuth_preconditions(inst, samples, seed, exhaustive)
    if why:
        raise PreconditionError(why)
    T = [[0] * (n + 1) for _ in range(n + 1)]
    opt = [[0] * (n + 1) for _ in range(n + 1)]
    for i in range(1, n - 1):
        T[i][i + 2] = inst.w.entry(i, i + 2, i + 1)
        opt[i][i + 2] = i + 1
    for length in range(3, n):
        for i in range(1, n - length + 1):
            j = i + length
            wij = inst.w.entry(i, j, i + 1)
            best, arg = INF, None
            for k in range(opt[i][j - 1], opt[i + 1][j] + 1):
                v = T[i][k] + T[k][j]
                if v < best:
                    best, arg = v, k
            T[i][j] = best + wij
            opt[i][j] = arg
    return T[1][n] if T[1][n] == INF else check_word(T[1][n])
