"""Applications written as LWS, kD LWS or polygon-triangulation instances.

Each encoder returns an instance of :mod:`lwskit.dp_core`; the matching
``decode_*`` (where the DP value is not the answer itself) turns the DP
value back into the application's answer.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np

from .dp_core import KdLwsInstance, LwsInstance, PtInstance
from .tensors import (INF, CpTensor, DenseTensor, SliceTensor, SliceTerm, intro_identity,
                      refuel_identity)


# ----------------------------------------------------------------------------
# 1D

def encode_lis(xs: Sequence[int]) -> LwsInstance:
    """LIS as LWS over items ``0..n+1``.

    Item 0 is a sentinel below everything, item n+1 a free exit.  Stepping
    onto a larger value costs -1, so the LIS length is ``-T[n+1]``.
    """
    xs = [int(x) for x in xs]
    n = len(xs)
    W = np.full((n + 2, n + 2), INF, dtype=object)
    for j in range(1, n + 1):
        W[0, j] = -1
        for i in range(1, j):
            if xs[i - 1] < xs[j - 1]:
                W[i, j] = -1
    W[:n + 1, n + 1] = 0
    return LwsInstance(n + 1, DenseTensor(W))


def decode_lis(value) -> int:
    return -value


def encode_refuel_1d(x: Sequence[int], hop: int) -> LwsInstance:
    """Stops ``x[0] < ... < x[n]``; a leg of length L costs ``(L - hop)**2`` (CP rank 4)."""
    return LwsInstance(len(x) - 1, refuel_identity(x, hop))


# ----------------------------------------------------------------------------
# kD refuelling

def encode_refuel_kd(k: int, n: int, hop: int | None = None,
                     cost: Callable[[int], int] | None = None) -> KdLwsInstance:
    """k independent coordinates on the grid ``[1, n]``; a move covers one axis.

    With ``hop`` a move of length L costs ``(L - hop)**2`` and every tensor
    is CP rank 4.  Otherwise ``cost(L)`` is tabulated densely.
    """
    if (hop is None) == (cost is None):
        raise ValueError("give exactly one of hop and cost")
    ws = []
    if hop is not None:
        rows, cols = intro_identity(n, hop).factors
        ones = np.ones((n, rows.shape[1]), dtype=np.int64)
        for ell in range(k):
            fs = [rows if a == ell else ones for a in range(k)] + [cols]
            ws.append(CpTensor(fs))
        return KdLwsInstance(k, n, tuple(ws))
    M = np.array([[cost(i - j) for j in range(1, n + 1)] for i in range(1, n + 1)], dtype=object)
    for ell in range(k):
        view = M.reshape([n if a in (ell, k) else 1 for a in range(k + 1)])
        ws.append(DenseTensor(np.broadcast_to(view, (n,) * (k + 1)).copy()))
    return KdLwsInstance(k, n, tuple(ws))


def encode_refuel_arrival_fee(k: int, n: int, c) -> KdLwsInstance:
    """Landing on cell ``i`` costs ``c[i]`` whichever axis moved.

    Each tensor is one slice term: the all-ones vector on the predecessor
    axis times ``c`` on the target axes.
    """
    c = c if isinstance(c, DenseTensor) else DenseTensor(np.asarray(c))
    if c.order != k or c.n != n:
        raise ValueError("arrival costs must be an n^k table")
    term = SliceTerm(k + 1, np.ones(n, dtype=np.int64), c)
    return KdLwsInstance(k, n, tuple(SliceTensor([term]) for _ in range(k)))


# ----------------------------------------------------------------------------
# nested boxes

def _box_key(box):
    return (int(np.prod(box)), tuple(box))


def encode_nested_boxes(boxes: Sequence[Sequence[int]], piles: int) -> KdLwsInstance:
    """One axis per pile on ``[1, n+2]``: 1 is an empty pile, ``r+1`` box r, ``n+2`` closed.

    Boxes are sorted by volume.  Placing box ``p`` on a pile whose top is
    ``q`` costs -1 when ``q`` fits inside ``p`` and ``p`` is above every
    other pile's top (so each box is used at most once).  Closing a pile is
    free.  The number of boxes placed is ``-T[n+2, ..., n+2]``.
    """
    order = sorted((tuple(int(v) for v in b) for b in boxes), key=_box_key)
    n = len(order)
    N = n + 2
    k = piles
    if k < 1:
        raise ValueError("need at least one pile")

    def fits(a, b):
        return all(x <= y for x, y in zip(a, b))

    # step[q, p]: may box p (index, 2..n+1) go on top q (1 = empty pile)
    step = np.zeros((N + 1, N + 1), dtype=bool)
    for p in range(2, n + 2):
        step[1, p] = True
        for q in range(2, p):
            step[q, p] = fits(order[q - 2], order[p - 2])
    ws = []
    grids = np.indices((N,) * (k + 1)) + 1
    for ell in range(k):
        p = grids[ell]
        q = grids[k]
        others = [grids[t] for t in range(k) if t != ell]
        top = np.ones_like(p, dtype=bool)
        for o in others:
            top &= p > o
        W = np.full((N,) * (k + 1), INF, dtype=object)
        W[step[q, p] & top & (p <= n + 1)] = -1
        W[(p == N) & (q < p)] = 0
        ws.append(DenseTensor(W))
    return KdLwsInstance(k, N, tuple(ws))


def decode_nested_boxes(value) -> int:
    return 0 if value == INF else -value


# ----------------------------------------------------------------------------
# interval problems

def _rank1_pt(x: Sequence[int]) -> PtInstance:
    col = np.asarray(x, dtype=np.int64).reshape(-1, 1)
    return PtInstance(len(x), CpTensor([col, col, col]))


def encode_polygon_triangulation(weights: Sequence[int]) -> PtInstance:
    """Triangle ``(i, k, j)`` costs ``x_i x_k x_j``."""
    if len(weights) < 3:
        raise ValueError("a polygon needs three vertices")
    return _rank1_pt(weights)


def encode_matrix_chain(dims: Sequence[int]) -> PtInstance:
    """Matrices ``A_t`` of shape ``dims[t-1] x dims[t]`` as a polygon on ``m+1`` nodes.

    Node t carries ``dims[t-1]``; the triangle ``(i, k, j)`` is the product
    of the blocks ``A_i..A_{k-1}`` and ``A_k..A_{j-1}``.
    """
    if len(dims) < 2:
        raise ValueError("need at least one matrix")
    return _rank1_pt(dims)


def encode_optimal_bst(p: Sequence[int]) -> PtInstance:
    """Keys 1..n with integer frequencies, as a polygon on ``n+2`` nodes.

    The interval ``(u, v)`` holds keys ``u..v-2``; its root adds one level
    to each of them, so ``w[u, v, k] = sum(p[u..v-2])`` regardless of k.
    """
    p = [int(v) for v in p]
    n = len(p)
    N = n + 2
    pre = np.concatenate([[0], np.cumsum(p)]).astype(np.int64)
    B = np.zeros((N, N), dtype=np.int64)
    for u in range(1, N + 1):
        for v in range(u + 2, N + 1):
            B[u - 1, v - 1] = pre[v - 2] - pre[u - 1]
    return PtInstance(N, SliceTensor([SliceTerm(3, np.ones(N, dtype=np.int64), DenseTensor(B))]))


def parenthesization_cost(dims: Sequence[int], tree) -> int:
    """Cost of a fixed parenthesization, e.g. ``(1, (2, 3))`` for A1(A2A3)."""
    def go(t):
        if isinstance(t, int):
            return t, t + 1, 0
        (i, k, x), (k2, j, y) = go(t[0]), go(t[1])
        if k != k2:
            raise ValueError("subtrees are not adjacent")
        return i, j, x + y + dims[i - 1] * dims[k - 1] * dims[j - 1]
    return go(tree)[2]


PROBLEMS = {
    "lis": encode_lis,
    "refuel": encode_refuel_1d,
    "refuel-kd": encode_refuel_kd,
    "arrival-fee": encode_refuel_arrival_fee,
    "nested-boxes": encode_nested_boxes,
    "matrix-chain": encode_matrix_chain,
    "optimal-bst": encode_optimal_bst,
    "triangulation": encode_polygon_triangulation,
}
