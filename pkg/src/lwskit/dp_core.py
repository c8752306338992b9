"""Reference dynamic programs.

Everything here is the straightforward evaluation of a recurrence and serves
as ground truth for the accelerated solvers.  Tables are numpy arrays; when
the weights are small enough they are int64 with a saturating infinity,
otherwise object arrays of Python ints (exact, overflow-checked on output).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

from .tensors import (INF, INF_CODE, WORD_MAX, CostTensor, DenseTensor, check_word,
                      tensor_from_json, tensor_to_json, SCHEMA)

# int64 work arrays: three BIGs still fit in a word, and any sum reaching
# HALF is infinite.  Finite magnitudes must stay below SAFE.
BIG = 2**60
HALF = 2**59
SAFE = 2**57


class Arith:
    """Numeric backend for work arrays (int64 saturating or exact objects)."""

    def __init__(self, exact: bool):
        self.exact = exact
        self.dtype = object if exact else np.int64
        self.inf = INF if exact else BIG

    def full(self, shape, value=None):
        v = self.inf if value is None else value
        if self.exact:
            out = np.empty(shape, dtype=object)
            out.fill(v)
            return out
        return np.full(shape, v, dtype=np.int64)

    def add(self, x, y):
        s = x + y
        if self.exact:
            return s
        if np.ndim(s):
            s[s >= HALF] = BIG
            return s
        return BIG if s >= HALF else s

    def minimum(self, x, y):
        return np.minimum(x, y)

    def amin(self, x):
        if len(x) == 0:
            return self.inf
        return x.min()

    def from_dense(self, data: np.ndarray) -> np.ndarray:
        if self.exact:
            out = data.astype(object)
            out[data == INF_CODE] = INF
            return out
        return np.where(data == INF_CODE, BIG, data)

    def to_ext(self, v):
        if self.exact:
            return v if v == INF else check_word(int(v))
        v = int(v)
        return INF if v >= HALF else v

    def to_codes(self, arr: np.ndarray) -> np.ndarray:
        """Convert a work array to int64 storage codes, checking the word range."""
        if self.exact:
            out = np.empty(arr.shape, dtype=np.int64)
            for idx in np.ndindex(*arr.shape):
                v = arr[idx]
                out[idx] = INF_CODE if v == INF else check_word(int(v))
            return out
        return np.where(arr >= HALF, INF_CODE, arr)


def pick_arith(tensors: Sequence[CostTensor], steps: int, extra: int = 0) -> Arith:
    """int64 when ``steps`` weights plus ``extra`` cannot reach ``SAFE``."""
    bound = steps * max((t.max_abs() for t in tensors), default=0) + abs(extra)
    return Arith(exact=bound >= SAFE)


def dense_work(t: CostTensor, ar: Arith) -> np.ndarray:
    return ar.from_dense(t.materialize(budget=1 << 28).data)


# ----------------------------------------------------------------------------
# instances and tables

class Band:
    """Tuples of ``[1, n]^k`` whose coordinate sum lies in ``[a, b)``."""

    def __init__(self, a: int, b: int, k: int, n: int, strict: bool = True):
        if strict and not (k <= a <= b <= k * n + 1):
            raise ValueError(f"band [{a},{b}) outside [{k},{k * n + 1}]")
        self.a, self.b, self.k, self.n = a, b, k, n

    def __contains__(self, idx) -> bool:
        return all(1 <= v <= self.n for v in idx) and self.a <= sum(idx) < self.b

    def __iter__(self) -> Iterator[tuple[int, ...]]:
        """Tuples in non-decreasing sum, lexicographic within a sum."""
        for s in range(max(self.a, self.k), min(self.b, self.k * self.n + 1)):
            yield from _tuples_with_sum(s, self.k, self.n)

    def __len__(self) -> int:
        return sum(1 for _ in self)

    def __repr__(self) -> str:
        return f"Band([{self.a},{self.b}), k={self.k}, n={self.n})"


def _tuples_with_sum(s: int, k: int, n: int):
    if k == 1:
        if 1 <= s <= n:
            yield (s,)
        return
    for first in range(max(1, s - (k - 1) * n), min(n, s - (k - 1)) + 1):
        for rest in _tuples_with_sum(s - first, k - 1, n):
            yield (first,) + rest


@dataclass(frozen=True)
class DpTable:
    """A k-dimensional table of extended integers.

    ``origin`` is the smallest index on every axis (0 for classic LWS,
    1 for kD LWS).  ``data`` holds int64 codes with ``INF_CODE`` for +inf.
    """

    k: int
    n: int
    data: np.ndarray
    origin: int = 1

    def __post_init__(self):
        self.data.setflags(write=False)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        if len(idx) != self.k:
            raise IndexError(f"expected {self.k} indices")
        pos = tuple(i - self.origin for i in idx)
        if any(p < 0 or p >= self.data.shape[0] for p in pos):
            raise IndexError(f"index {idx} out of range")
        v = int(self.data[pos])
        return INF if v == INF_CODE else v

    def items(self):
        for pos in np.ndindex(*self.data.shape):
            yield tuple(p + self.origin for p in pos), self[tuple(p + self.origin for p in pos)]


@dataclass(frozen=True)
class LwsInstance:
    """Classic LWS on items ``0..n``.

    ``w`` is an order-2 tensor of side ``n + 1``; the weight of jumping
    from item i to item j is ``w.entry(i + 1, j + 1)``.
    """

    n: int
    w: CostTensor

    def __post_init__(self):
        if self.w.order != 2 or self.w.n != self.n + 1:
            raise ValueError("LWS weights must be an (n+1) x (n+1) matrix")

    def weight(self, i: int, j: int):
        return self.w.entry(i + 1, j + 1)


@dataclass(frozen=True)
class KdLwsInstance:
    k: int
    n: int
    w: tuple

    def __post_init__(self):
        object.__setattr__(self, "w", tuple(self.w))
        if self.k < 1 or len(self.w) != self.k:
            raise ValueError("need k >= 1 and exactly k weight tensors")
        for t in self.w:
            if t.k != self.k or t.n != self.n:
                raise ValueError("every weight tensor must have order k+1 and side n")


@dataclass(frozen=True)
class PtInstance:
    n: int
    w: CostTensor

    def __post_init__(self):
        if self.w.order != 3 or self.w.n != self.n:
            raise ValueError("PT weights must be an n x n x n tensor")


@dataclass(frozen=True)
class Interval2dInstance:
    """2D LWS with a single shared tensor, evaluated in the flipped order."""

    n: int
    w: CostTensor

    def __post_init__(self):
        if self.w.order != 3 or self.w.n != self.n:
            raise ValueError("need an n x n x n tensor")


@dataclass(frozen=True)
class StaticKdInstance:
    """Band-to-band instance: given values on ``[a, a+N)``, targets on ``[a+N, a+2N)``.

    ``given`` maps index tuples to extended integers and must cover the
    whole source band.
    """

    base: KdLwsInstance
    a: int
    N: int
    given: Mapping = field(repr=False)

    def __post_init__(self):
        k, n = self.base.k, self.base.n
        if self.N < 1:
            raise ValueError("N must be positive")
        src = Band(self.a, self.a + self.N, k, n, strict=False)
        for idx in src:
            if idx not in self.given:
                raise KeyError(f"missing given value at {idx}")

    @property
    def source(self) -> Band:
        return Band(self.a, self.a + self.N, self.base.k, self.base.n, strict=False)

    @property
    def target(self) -> Band:
        return Band(self.a + self.N, self.a + 2 * self.N, self.base.k, self.base.n, strict=False)

    def given_array(self, ar: Arith) -> np.ndarray:
        n, k = self.base.n, self.base.k
        g = ar.full((n,) * k)
        for idx in self.source:
            v = self.given[idx]
            g[tuple(i - 1 for i in idx)] = ar.inf if v == INF else v
        return g


# ----------------------------------------------------------------------------
# classic LWS

def solve_lws_naive(inst: LwsInstance) -> tuple[DpTable, int | float]:
    n = inst.n
    ar = pick_arith([inst.w], n + 1)
    W = dense_work(inst.w, ar)
    T = ar.full(n + 1)
    T[0] = 0
    for j in range(1, n + 1):
        T[j] = ar.amin(ar.add(T[:j].copy(), W[:j, j]))
    table = DpTable(1, n, ar.to_codes(T), origin=0)
    return table, table[n]


def lws_witness(inst: LwsInstance) -> list[int]:
    """Optimal item chain ``0 = i_0 < ... < n``; ties go to the smallest index."""
    table, ans = solve_lws_naive(inst)
    if ans == INF:
        return []
    path = [inst.n]
    j = inst.n
    while j > 0:
        for i in range(j):
            ti = table[i]
            wij = inst.weight(i, j)
            if ti != INF and wij != INF and ti + wij == table[j]:
                path.append(i)
                j = i
                break
    return path[::-1]


def lws_as_kd(inst: LwsInstance) -> KdLwsInstance:
    """Embed classic LWS as 1D LWS on ``[1, n+1]``.

    The 1D tensor is indexed ``[target, predecessor]``, so item i becomes
    index i + 1 and the matrix is transposed.
    """
    from .tensors import transpose_matrix
    return KdLwsInstance(1, inst.n + 1, (transpose_matrix(inst.w),))


def kd_as_lws(inst: KdLwsInstance) -> LwsInstance:
    """Inverse of :func:`lws_as_kd` for ``k == 1``."""
    from .tensors import transpose_matrix
    if inst.k != 1:
        raise ValueError("only 1D instances map to classic LWS")
    return LwsInstance(inst.n - 1, transpose_matrix(inst.w[0]))


# ----------------------------------------------------------------------------
# kD LWS

def kd_work(inst: KdLwsInstance, extra: int = 0):
    ar = pick_arith(inst.w, inst.k * inst.n + 1, extra)
    return ar, [dense_work(t, ar) for t in inst.w]


def _cell_naive(T, W, ar, j, lo_sum=None):
    """min over axes and predecessors of T[pred] + w; ``j`` is 0-based.

    With ``lo_sum`` only predecessors whose 0-based coordinate sum is at
    least ``lo_sum`` take part.
    """
    k = len(j)
    s = sum(j)
    best = ar.inf
    for ell in range(k):
        lo = 0 if lo_sum is None else max(0, lo_sum - (s - j[ell]))
        if lo >= j[ell]:
            continue
        pre = j[:ell] + (slice(lo, j[ell]),) + j[ell + 1:]
        cand = ar.add(T[pre].copy(), W[ell][j + (slice(lo, j[ell]),)])
        m = ar.amin(cand)
        if m < best:
            best = m
    return best


def solve_kdlws_naive(inst: KdLwsInstance, order: str = "band") -> tuple[DpTable, int | float]:
    """Evaluate every cell of the kD recurrence.

    ``order`` is ``"band"`` (non-decreasing coordinate sum) or ``"lex"``;
    both are topological and give identical tables.
    """
    k, n = inst.k, inst.n
    ar, W = kd_work(inst)
    T = ar.full((n,) * k)
    if order == "band":
        cells = (tuple(i - 1 for i in idx) for idx in Band(k, k * n + 1, k, n))
    elif order == "lex":
        cells = itertools.product(range(n), repeat=k)
    else:
        raise ValueError(f"unknown order {order!r}")
    for j in cells:
        T[j] = 0 if not any(j) else _cell_naive(T, W, ar, j)
    table = DpTable(k, n, ar.to_codes(T))
    return table, table[(n,) * k]


def static_naive_arrays(W, ar, G, src: tuple[int, int], dst: tuple[int, int]) -> np.ndarray:
    """Band-to-band minimum on work arrays, sums 1-based as in :class:`Band`.

    Returns an array of the table shape holding the new values on ``dst``
    and infinity elsewhere.
    """
    k = G.ndim
    n = G.shape[0]
    out = ar.full(G.shape)
    for idx in Band(dst[0], dst[1], k, n, strict=False):
        j = tuple(i - 1 for i in idx)
        s = sum(idx)
        best = ar.inf
        for ell in range(k):
            rest = s - idx[ell]
            lo = max(1, src[0] - rest)
            hi = min(idx[ell] - 1, src[1] - 1 - rest)
            if lo > hi:
                continue
            pre = j[:ell] + (slice(lo - 1, hi),) + j[ell + 1:]
            m = ar.amin(ar.add(G[pre].copy(), W[ell][j + (slice(lo - 1, hi),)]))
            if m < best:
                best = m
        out[j] = best
    return out


def _given_bound(inst: StaticKdInstance) -> int:
    return max((abs(v) for v in inst.given.values() if v != INF), default=0)


def band_values(arr: np.ndarray, band: Band, ar: Arith) -> dict:
    return {idx: ar.to_ext(arr[tuple(i - 1 for i in idx)]) for idx in band}


def solve_static_kdlws_naive(inst: StaticKdInstance) -> dict:
    """Values on the target band as a ``{tuple: ExtInt}`` mapping."""
    ar, W = kd_work(inst.base, extra=_given_bound(inst))
    G = inst.given_array(ar)
    src = (inst.a, inst.a + inst.N)
    dst = (inst.a + inst.N, inst.a + 2 * inst.N)
    out = static_naive_arrays(W, ar, G, src, dst)
    return band_values(out, inst.target, ar)


# ----------------------------------------------------------------------------
# interval recurrences

def solve_pt_naive(inst: PtInstance) -> tuple[DpTable, int | float]:
    n = inst.n
    if n < 2:
        raise ValueError("PT needs at least two nodes")
    ar = pick_arith([inst.w], 2 * n)
    W = dense_work(inst.w, ar)
    T = ar.full((n, n))
    for i in range(n):
        for j in range(i, min(n, i + 2)):
            T[i, j] = 0
    for length in range(2, n):
        for i in range(n - length):
            j = i + length
            ks = slice(i + 1, j)
            cand = ar.add(ar.add(T[i, ks].copy(), T[ks, j]), W[i, j, ks])
            T[i, j] = ar.amin(cand)
    table = DpTable(2, n, ar.to_codes(T))
    return table, table[1, n]


def pt_witness(inst: PtInstance) -> list[tuple[int, int, int]]:
    """Triangles ``(i, k, j)`` of an optimal split; ties go to the smallest k."""
    table, _ = solve_pt_naive(inst)
    out: list[tuple[int, int, int]] = []
    stack = [(1, inst.n)]
    while stack:
        i, j = stack.pop()
        if j - i <= 1:
            continue
        for k in range(i + 1, j):
            parts = (table[i, k], table[k, j], inst.w.entry(i, j, k))
            if INF not in parts and sum(parts) == table[i, j]:
                out.append((i, k, j))
                stack.extend([(k, j), (i, k)])
                break
    return out


def solve_interval_2dlws_naive(inst: Interval2dInstance) -> int | float:
    """2D LWS with ``w_1 = w_2 = w`` under the flipped ordering.

    ``T[i, j] = min(min_{k<j} T[i, k] + w[i, j, k], min_{i<k<=n} T[k, j] + w[i, j, k])``
    evaluated with i decreasing and j increasing.  A cell whose candidate
    sets are both empty is 0.
    """
    n = inst.n
    if n == 1:
        return 0
    ar = pick_arith([inst.w], 2 * n + 1)
    W = dense_work(inst.w, ar)
    T = ar.full((n, n))
    for i in range(n - 1, -1, -1):
        for j in range(n):
            if j == 0 and i == n - 1:
                T[i, j] = 0
                continue
            best = ar.inf
            if j > 0:
                best = ar.amin(ar.add(T[i, :j].copy(), W[i, j, :j]))
            if i < n - 1:
                m = ar.amin(ar.add(T[i + 1:, j].copy(), W[i, j, i + 1:]))
                if m < best:
                    best = m
            T[i, j] = best
    return ar.to_ext(T[0, n - 1])


# ----------------------------------------------------------------------------
# JSON

def instance_to_json(inst) -> dict:
    if isinstance(inst, LwsInstance):
        return {"schema": SCHEMA, "problem": "lws", "k": 1, "n": inst.n, "w": [tensor_to_json(inst.w, tag=False)]}
    if isinstance(inst, KdLwsInstance):
        return {"schema": SCHEMA, "problem": "kdlws", "k": inst.k, "n": inst.n,
                "w": [tensor_to_json(t, tag=False) for t in inst.w]}
    if isinstance(inst, PtInstance):
        return {"schema": SCHEMA, "problem": "pt", "k": 2, "n": inst.n, "w": [tensor_to_json(inst.w, tag=False)]}
    if isinstance(inst, Interval2dInstance):
        return {"schema": SCHEMA, "problem": "interval2d", "k": 2, "n": inst.n,
                "w": [tensor_to_json(inst.w, tag=False)]}
    if isinstance(inst, StaticKdInstance):
        d = instance_to_json(inst.base)
        d.update(problem="static", a=inst.a, N=inst.N,
                 given=[[list(idx), "inf" if v == INF else v] for idx, v in sorted(inst.given.items())])
        return d
    raise TypeError(f"cannot serialize {type(inst).__name__}")


def instance_from_json(d: dict):
    if d.get("schema", SCHEMA) != SCHEMA:
        raise ValueError(f"unsupported schema {d.get('schema')!r}")
    prob = d.get("problem")
    ws = [tensor_from_json(t) for t in d["w"]]
    if prob == "lws":
        return LwsInstance(d["n"], ws[0])
    if prob == "kdlws":
        return KdLwsInstance(d["k"], d["n"], tuple(ws))
    if prob == "pt":
        return PtInstance(d["n"], ws[0])
    if prob == "interval2d":
        return Interval2dInstance(d["n"], ws[0])
    if prob == "static":
        given = {tuple(idx): (INF if v == "inf" else int(v)) for idx, v in d["given"]}
        return StaticKdInstance(KdLwsInstance(d["k"], d["n"], tuple(ws)), d["a"], d["N"], given)
    raise ValueError(f"unknown problem {prob!r}")
