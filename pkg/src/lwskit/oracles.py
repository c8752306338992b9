"""Brute-force ground truth.

None of these functions touch the DP solvers; each enumerates the objects
of its problem directly.  Every oracle has a hard size budget and raises
:class:`~lwskit.tensors.BudgetError` rather than truncating.
"""
from __future__ import annotations

import bisect
import itertools
import math
from typing import Sequence

from .tensors import INF, BudgetError


def _guard(count: int, budget: int, what: str) -> None:
    if count > budget:
        raise BudgetError(f"{what}: {count} cases exceed the budget of {budget}")


def _kprod(vectors) -> int:
    total = 0
    for coords in zip(*vectors):
        p = 1
        for c in coords:
            p *= c
        total += p
    return total


def brute_kminip(inst, budget: int = 10**7) -> int | float:
    """Minimum k-wise inner product over all tuples of ``inst.sets``."""
    sets = inst.sets
    _guard(math.prod(len(s) for s in sets) * max(inst.d, 1), budget, "kMin-IP scan")
    return min((_kprod(tup) for tup in itertools.product(*sets)), default=INF)


def brute_kov(inst, budget: int = 10**7) -> bool:
    """True iff some tuple has k-wise inner product 0."""
    sets = inst.sets
    _guard(math.prod(len(s) for s in sets) * max(inst.d, 1), budget, "kOV scan")
    return any(_kprod(tup) == 0 for tup in itertools.product(*sets))


def _triangulations(i: int, j: int):
    """All triangulations of the polygon on nodes i..j as lists of (i, k, j)."""
    if j - i <= 1:
        yield []
        return
    for k in range(i + 1, j):
        for left in _triangulations(i, k):
            for right in _triangulations(k, j):
                yield left + right + [(i, k, j)]


def catalan(m: int) -> int:
    return math.comb(2 * m, m) // (m + 1)


def brute_triangulations(inst, max_n: int = 16) -> int | float:
    """Cheapest triangulation of the polygon ``1..n``; triangle cost ``w[i, j, k]``."""
    n = inst.n
    if n > max_n:
        raise BudgetError(f"{catalan(n - 2)} triangulations for n={n}")
    best = INF
    for tri in _triangulations(1, n):
        cost = 0
        for i, k, j in tri:
            v = inst.w.entry(i, j, k)
            if v == INF:
                cost = INF
                break
            cost += v
        best = min(best, cost)
    return best


def brute_negative_triangle(g, budget: int = 10**7) -> int | float:
    """Minimum total weight over triangles of ``g`` (``INF`` if there are none)."""
    n = g.n
    _guard(n**3, budget, "triangle scan")
    best = INF
    for a, b, c in itertools.combinations(range(1, n + 1), 3):
        ws = (g.weight(a, b), g.weight(b, c), g.weight(a, c))
        if INF not in ws:
            best = min(best, sum(ws))
    return best


def brute_sat(phi, max_vars: int = 20) -> bool:
    n = phi.n
    if n > max_vars:
        raise BudgetError(f"2^{n} assignments")
    for bits in itertools.product((False, True), repeat=n):
        if all(any(bits[abs(l) - 1] == (l > 0) for l in cl) for cl in phi.clauses):
            return True
    return False


def lis_patience(xs: Sequence[int]) -> int:
    """Length of the longest strictly increasing subsequence."""
    tops: list = []
    for x in xs:
        pos = bisect.bisect_left(tops, x)
        if pos == len(tops):
            tops.append(x)
        else:
            tops[pos] = x
    return len(tops)


def lis_exhaustive(xs: Sequence[int], max_n: int = 20) -> int:
    if len(xs) > max_n:
        raise BudgetError(f"2^{len(xs)} subsequences")
    best = 0
    for mask in range(1 << len(xs)):
        sub = [x for t, x in enumerate(xs) if mask >> t & 1]
        if all(a < b for a, b in zip(sub, sub[1:])):
            best = max(best, len(sub))
    return best


def fits(a: Sequence[int], b: Sequence[int]) -> bool:
    """Box a fits into box b: every side of a is at most the matching side of b."""
    return all(x <= y for x, y in zip(a, b))


def brute_nested_boxes(boxes: Sequence[Sequence[int]], piles: int, max_n: int = 8) -> int:
    """Most boxes placeable in ``piles`` piles, each pile a nesting chain.

    Every assignment of boxes to a pile (or to no pile) is tried; a pile is
    valid when its boxes are pairwise comparable under :func:`fits`.
    """
    n = len(boxes)
    if n > max_n:
        raise BudgetError(f"{(piles + 1) ** n} assignments for {n} boxes")
    best = 0
    for assign in itertools.product(range(piles + 1), repeat=n):
        groups = [[boxes[i] for i in range(n) if assign[i] == p] for p in range(1, piles + 1)]
        if all(fits(a, b) or fits(b, a) for g in groups for a, b in itertools.combinations(g, 2)):
            best = max(best, sum(len(g) for g in groups))
    return best


def _bst_shapes(lo: int, hi: int):
    """All BSTs on keys lo..hi as nested (root, left, right) tuples."""
    if lo > hi:
        yield None
        return
    for r in range(lo, hi + 1):
        for left in _bst_shapes(lo, r - 1):
            for right in _bst_shapes(r + 1, hi):
                yield (r, left, right)


def _bst_cost(tree, p, depth=1) -> int:
    if tree is None:
        return 0
    r, left, right = tree
    return p[r - 1] * depth + _bst_cost(left, p, depth + 1) + _bst_cost(right, p, depth + 1)


def brute_optimal_bst(p: Sequence[int], max_n: int = 12) -> int:
    """Least sum of ``p[key] * depth`` over every BST shape (root depth 1)."""
    if len(p) > max_n:
        raise BudgetError(f"{catalan(len(p))} trees")
    return min(_bst_cost(t, p) for t in _bst_shapes(1, len(p)))


def brute_grid_paths(k: int, n: int, cost, budget: int = 10**6) -> int | float:
    """Cheapest monotone jump path from ``(1,..,1)`` to ``(n,..,n)``.

    A move raises one coordinate by any positive amount and costs
    ``cost(landing cell)``.
    """
    count = 0
    best = INF

    def walk(cell, acc):
        nonlocal count, best
        count += 1
        _guard(count, budget, "grid path enumeration")
        if all(c == n for c in cell):
            best = min(best, acc)
            return
        for ax in range(k):
            for v in range(cell[ax] + 1, n + 1):
                nxt = cell[:ax] + (v,) + cell[ax + 1:]
                c = cost(*nxt)
                if c != INF:
                    walk(nxt, acc + c)

    walk((1,) * k, 0)
    return best


def brute_refuel(x: Sequence[int], hop: int) -> int:
    """Cheapest flight plan from ``x[0]`` to ``x[-1]`` over every subset of stops."""
    inner = list(x[1:-1])
    if len(inner) > 20:
        raise BudgetError(f"2^{len(inner)} stop subsets")
    best = None
    for mask in range(1 << len(inner)):
        stops = [x[0]] + [s for t, s in enumerate(inner) if mask >> t & 1] + [x[-1]]
        cost = sum((b - a - hop) ** 2 for a, b in zip(stops, stops[1:]))
        best = cost if best is None else min(best, cost)
    return best


def chain_cost(dims: Sequence[int], tree) -> int:
    """Scalar multiplications for a parenthesization.

    ``tree`` is a matrix number (1-based) or a pair of subtrees, so
    ``(1, (2, 3))`` is A1(A2 A3).
    """
    def go(t):
        if isinstance(t, int):
            return dims[t - 1], dims[t], 0
        (r1, c1, x), (r2, c2, y) = go(t[0]), go(t[1])
        if c1 != r2:
            raise ValueError("incompatible split")
        return r1, c2, x + y + r1 * c1 * c2
    return go(tree)[2]


def _parenthesizations(lo: int, hi: int):
    if lo == hi:
        yield lo
        return
    for m in range(lo, hi):
        for a in _parenthesizations(lo, m):
            for b in _parenthesizations(m + 1, hi):
                yield (a, b)


def brute_matrix_chain(dims: Sequence[int], max_m: int = 12) -> int:
    m = len(dims) - 1
    if m > max_m:
        raise BudgetError(f"{catalan(m - 1)} parenthesizations")
    return min(chain_cost(dims, t) for t in _parenthesizations(1, m))
