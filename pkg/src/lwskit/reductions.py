"""Instance transformations between the hard problems and the DP recurrences.

Each ``encode_*`` / ``*_to_*`` function is pure.  The ``certify_*``
helpers solve both sides (target with the naive DP, source with a brute
force oracle) and return a :class:`Certificate`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import oracles
from .crr import CrrCodec, crr_build, kwise_inner
from .dp_core import (Interval2dInstance, KdLwsInstance, PtInstance, solve_interval_2dlws_naive,
                      solve_kdlws_naive, solve_pt_naive)
from .tensors import (INF, SCHEMA, WORD_MAX, BudgetError, CostTensor, CpTensor, DenseTensor, SliceTensor,
                      SliceTerm)


# ----------------------------------------------------------------------------
# source problems

@dataclass(frozen=True)
class MinIpInstance:
    """k sets of n integer vectors of length d."""

    k: int
    n: int
    d: int
    sets: tuple

    def __post_init__(self):
        sets = tuple(tuple(tuple(int(v) for v in vec) for vec in s) for s in self.sets)
        object.__setattr__(self, "sets", sets)
        if len(sets) != self.k:
            raise ValueError(f"expected {self.k} sets, got {len(sets)}")
        for s in sets:
            if len(s) != self.n or any(len(v) != self.d for v in s):
                raise ValueError(f"every set needs {self.n} vectors of length {self.d}")

    @classmethod
    def from_sets(cls, sets) -> "MinIpInstance":
        sets = [list(s) for s in sets]
        return cls(len(sets), len(sets[0]), len(sets[0][0]) if sets[0] else 0, tuple(sets))

    @classmethod
    def random(cls, k: int, n: int, d: int, lo: int, hi: int, rng) -> "MinIpInstance":
        sets = [rng.integers(lo, hi + 1, size=(n, d)).tolist() for _ in range(k)]
        return cls(k, n, d, tuple(sets))

    def is_binary(self) -> bool:
        return all(v in (0, 1) for s in self.sets for vec in s for v in vec)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "problem": "kminip", "k": self.k, "n": self.n, "d": self.d,
                "sets": [[list(v) for v in s] for s in self.sets]}


@dataclass(frozen=True)
class SatFormula:
    """CNF over variables 1..n; literal ``-v`` is the negation of ``v``."""

    n: int
    clauses: tuple

    def __post_init__(self):
        cl = tuple(tuple(int(x) for x in c) for c in self.clauses)
        object.__setattr__(self, "clauses", cl)
        for c in cl:
            for lit in c:
                if lit == 0 or abs(lit) > self.n:
                    raise ValueError(f"literal {lit} outside variables 1..{self.n}")

    @classmethod
    def random(cls, n: int, m: int, width: int, rng) -> "SatFormula":
        clauses = []
        for _ in range(m):
            vs = rng.choice(n, size=min(width, n), replace=False) + 1
            signs = rng.choice([-1, 1], size=len(vs))
            clauses.append([int(v * s) for v, s in zip(vs, signs)])
        return cls(n, tuple(clauses))

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "problem": "sat", "n": self.n, "clauses": [list(c) for c in self.clauses]}


class WeightedGraph:
    """Undirected graph on vertices 1..n; absent edges and loops weigh ``INF``."""

    def __init__(self, n: int, edges: dict):
        self.n = n
        self._w = {}
        for (a, b), v in edges.items():
            if a == b or not (1 <= a <= n and 1 <= b <= n):
                raise ValueError(f"bad edge {(a, b)}")
            if v != INF:
                self._w[(min(a, b), max(a, b))] = int(v)

    def weight(self, a: int, b: int):
        if a == b:
            return INF
        return self._w.get((min(a, b), max(a, b)), INF)

    def edges(self) -> dict:
        return dict(self._w)

    def max_abs(self) -> int:
        return max((abs(v) for v in self._w.values()), default=0)

    @classmethod
    def complete(cls, n: int, weight: Callable[[int, int], int]) -> "WeightedGraph":
        return cls(n, {(a, b): weight(a, b) for a, b in itertools.combinations(range(1, n + 1), 2)})

    @classmethod
    def random(cls, n: int, p: float, lo: int, hi: int, rng) -> "WeightedGraph":
        edges = {}
        for a, b in itertools.combinations(range(1, n + 1), 2):
            if rng.random() < p:
                edges[(a, b)] = int(rng.integers(lo, hi + 1))
        return cls(n, edges)

    def to_json(self) -> dict:
        return {"schema": SCHEMA, "problem": "negtriangle", "n": self.n,
                "edges": [[a, b, v] for (a, b), v in sorted(self._w.items())]}


def source_from_json(d: dict):
    prob = d.get("problem")
    if prob in ("kminip", "kov"):
        return MinIpInstance(d["k"], d["n"], d["d"], tuple(d["sets"]))
    if prob == "sat":
        return SatFormula(d["n"], tuple(d["clauses"]))
    if prob == "negtriangle":
        return WeightedGraph(d["n"], {(a, b): v for a, b, v in d["edges"]})
    raise ValueError(f"unknown source problem {prob!r}")


# ----------------------------------------------------------------------------
# kMin-IP -> (k-1)D LWS

def encode_kminip_as_kdlws(src: MinIpInstance) -> KdLwsInstance:
    """(k-1)-dimensional LWS on side ``k*n`` whose corner value is the min inner product.

    Sets 1..k-1 occupy the last ``n`` slots of their axis (zeros before);
    set k is repeated on the first ``(k-1)*n`` predecessor slots.  All k-1
    weight tensors are the same rank-d CP tensor.
    """
    k, n, d = src.k, src.n, src.d
    if k < 2:
        raise ValueError("need k >= 2")
    N = k * n
    bound = math.prod(max((abs(v) for vec in s for v in vec), default=0) for s in src.sets) * max(d, 1)
    if bound >= WORD_MAX:
        raise OverflowError("products leave the word range")
    factors = []
    for ell in range(k - 1):
        f = np.zeros((N, d), dtype=np.int64)
        f[(k - 1) * n:] = np.array(src.sets[ell], dtype=np.int64).reshape(n, d)
        factors.append(f)
    last = np.zeros((N, d), dtype=np.int64)
    xs = np.array(src.sets[k - 1], dtype=np.int64).reshape(n, d)
    for r in range(k - 1):
        last[r * n:(r + 1) * n] = xs
    factors.append(last)
    w = CpTensor(factors)
    return KdLwsInstance(k - 1, N, (w,) * (k - 1))


def certify_kminip(src: MinIpInstance) -> "Certificate":
    tgt = encode_kminip_as_kdlws(src)
    _, got = solve_kdlws_naive(tgt)
    return Certificate("kminip->kdlws", oracles.brute_kminip(src), got)


# ----------------------------------------------------------------------------
# NegativeTriangle -> 2D LWS (slice rank 3)

def negtriangle_big(g: WeightedGraph) -> int:
    """Finite stand-in for a missing edge; any triangle using one weighs at least ``big - 2M``."""
    return 5 * g.max_abs() + 1


def encode_negtriangle_as_2dlws(g: WeightedGraph) -> KdLwsInstance:
    """Side ``2n``; both tensors ``f1(i,k) g1(j) + f2(i,j) g2(k) + f3(k,j) g3(i)``.

    Slice bodies must be finite, so missing edges and loops carry
    :func:`negtriangle_big`; decode the corner with :func:`decode_negtriangle`.
    """
    n = g.n
    if n < 3:
        raise ValueError("need at least three vertices")
    big = negtriangle_big(g)
    W = np.full((n, n), big, dtype=np.int64)
    for (a, b), v in g.edges().items():
        W[a - 1, b - 1] = W[b - 1, a - 1] = v
    N = 2 * n
    hi = np.zeros(N, dtype=np.int64)
    hi[n:] = 1
    lo = 1 - hi
    f1 = np.zeros((N, N), dtype=np.int64)   # [i, k]
    f1[n:, :n] = W
    f2 = np.zeros((N, N), dtype=np.int64)   # [i, j]
    f2[n:, n:] = W
    f3 = np.zeros((N, N), dtype=np.int64)   # stored as [j, k] = w(v_k, v_{j-n})
    f3[n:, :n] = W.T
    alpha = SliceTensor([SliceTerm(2, hi, DenseTensor(f1)),
                         SliceTerm(3, lo, DenseTensor(f2)),
                         SliceTerm(1, hi, DenseTensor(f3))])
    return KdLwsInstance(2, N, (alpha, alpha))


def decode_negtriangle(g: WeightedGraph, value):
    big = negtriangle_big(g)
    if value == INF or value >= big - 2 * g.max_abs():
        return INF
    return value


def certify_negtriangle(g: WeightedGraph) -> "Certificate":
    tgt = encode_negtriangle_as_2dlws(g)
    _, raw = solve_kdlws_naive(tgt)
    return Certificate("negtriangle->2dlws", oracles.brute_negative_triangle(g), decode_negtriangle(g, raw))


# ----------------------------------------------------------------------------
# flipped 2D LWS -> polygon triangulation

def encode_2dlws_as_pt(src: Interval2dInstance) -> PtInstance:
    """Rank-preserving lift to ``2n`` nodes: ``mu' = [mu; 0]``, ``sigma' = [0; sigma]``, ``tau' = [tau; tau]``."""
    w = src.w
    if not isinstance(w, CpTensor):
        raise TypeError("the rank lift needs a CP tensor")
    n = src.n
    mu, sigma, tau = w.factors
    z = np.zeros_like(mu)
    return PtInstance(2 * n, CpTensor([np.vstack([mu, z]), np.vstack([z, sigma]), np.vstack([tau, tau])]))


def _lift_term(term: SliceTerm, n: int) -> SliceTerm:
    a = np.asarray(term.a, dtype=np.int64)
    z = np.zeros(n, dtype=np.int64)
    B = term.b.materialize(budget=1 << 30).data
    out = np.zeros((2 * n, 2 * n), dtype=np.int64)
    if term.axis == 2:
        # f(i, k) g(j): f' lives on i <= n for both halves of k, g' on j > n
        out[:n, :n] = B
        out[:n, n:] = B
        return SliceTerm(2, np.concatenate([z, a]), DenseTensor(out))
    if term.axis == 3:
        # f(i, j) g(k)
        out[:n, n:] = B
        return SliceTerm(3, np.concatenate([a, a]), DenseTensor(out))
    # f(j, k) g(i)
    out[n:, :n] = B
    out[n:, n:] = B
    return SliceTerm(1, np.concatenate([a, z]), DenseTensor(out))


def encode_2dlws_as_pt_slicerank(src: Interval2dInstance) -> PtInstance:
    """Slice-rank-preserving variant of :func:`encode_2dlws_as_pt`: one lifted term per term."""
    w = src.w
    if not isinstance(w, SliceTensor):
        raise TypeError("the slice lift needs a slice tensor")
    n = src.n
    terms = [_lift_term(t, n) for t in w.terms]
    return PtInstance(2 * n, SliceTensor(terms, k=2, n=2 * n))


def certify_2dlws_pt(src: Interval2dInstance, slice_form: bool = False) -> "Certificate":
    tgt = encode_2dlws_as_pt_slicerank(src) if slice_form else encode_2dlws_as_pt(src)
    name = "2dlws->pt-slice" if slice_form else "2dlws->pt"
    return Certificate(name, solve_interval_2dlws_naive(src), solve_pt_naive(tgt)[1])


# ----------------------------------------------------------------------------
# SAT -> kOV

KOV_BUDGET = 1 << 16


def sat_to_kov(phi: SatFormula, k: int, budget: int = KOV_BUDGET) -> MinIpInstance:
    """k sets of clause-violation vectors, one per partial assignment.

    Variables are padded with unconstrained dummies to a multiple of ``k``.
    Coordinate c of a vector is 0 when the partial assignment already
    satisfies clause c.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    per = -(-phi.n // k) if phi.n else 0
    if 2**per > budget:
        raise BudgetError(f"2^{per} vectors per set exceed the budget of {budget}")
    sets = []
    for part in range(k):
        vars_ = range(part * per + 1, (part + 1) * per + 1)
        vecs = []
        for bits in itertools.product((False, True), repeat=per):
            val = dict(zip(vars_, bits))
            vecs.append([0 if any(abs(l) in val and val[abs(l)] == (l > 0) for l in cl) else 1
                         for cl in phi.clauses])
        sets.append(vecs)
    return MinIpInstance(k, 2**per, len(phi.clauses), tuple(sets))


def certify_sat(phi: SatFormula, k: int = 2) -> "Certificate":
    return Certificate("sat->kov", oracles.brute_sat(phi), oracles.brute_kov(sat_to_kov(phi, k)))


# ----------------------------------------------------------------------------
# kOV -> Z-kOV family

def kov_to_zkov_family(src: MinIpInstance, l: int, budget: int = 10**6) -> tuple[CrrCodec, list]:
    """Encode every vector with ``psi_{d/l, l}`` and emit one instance per ``t`` in V.

    Member ``t`` appends ``-t`` to the first set and ``1`` to the others,
    so its zero inner products are exactly the code tuples hitting ``t``.
    Dimensions not divisible by ``l`` are zero-padded.
    """
    if not src.is_binary():
        raise ValueError("kOV instances are 0/1")
    if not 1 <= l <= max(src.d, 1):
        raise ValueError("need 1 <= l <= d")
    l = max(l, 2)
    b = max(1, -(-src.d // l))
    codec = crr_build(b, l, src.k)
    pad = b * l - src.d
    coded = [[codec.encode(list(v) + [0] * pad) for v in s] for s in src.sets]
    family = []
    for t in codec.values(budget):
        sets = [[c + [-t] for c in coded[0]]] + [[c + [1] for c in s] for s in coded[1:]]
        family.append((t, ZkovInstance(src.k, src.n, l + 1, tuple(tuple(map(tuple, s)) for s in sets))))
    return codec, family


@dataclass(frozen=True)
class ZkovInstance:
    """Integer vectors of unbounded size; the question is a zero k-wise inner product."""

    k: int
    n: int
    d: int
    sets: tuple

    def has_zero(self) -> bool:
        return any(kwise_inner(tup) == 0 for tup in itertools.product(*self.sets))


def certify_zkov(src: MinIpInstance, l: int) -> "Certificate":
    _, family = kov_to_zkov_family(src, l)
    return Certificate("kov->zkov", oracles.brute_kov(src), any(m.has_zero() for _, m in family))


def certify_crr(codec: CrrCodec, xs: Sequence[Sequence[int]]) -> "Certificate":
    """One tuple: orthogonal inputs versus codes landing in V."""
    return Certificate("crr", kwise_inner(xs) == 0, codec.accepts(kwise_inner([codec.encode(x) for x in xs])))


# ----------------------------------------------------------------------------
# arity lift

def kov_solver_lift(inner: Callable[[MinIpInstance], object]) -> Callable[[MinIpInstance], object]:
    """Solver for arity k from one for arity k-1.

    For each vector of the first set, its coordinatewise products with the
    second set replace both sets.  Boolean answers are OR-ed, numeric ones
    minimized.
    """
    def solve(inst: MinIpInstance):
        if inst.k < 3:
            raise ValueError("the lift needs k >= 3")
        results = []
        for x in inst.sets[0]:
            merged = [tuple(a * b for a, b in zip(x, y)) for y in inst.sets[1]]
            results.append(inner(MinIpInstance(inst.k - 1, inst.n, inst.d, (merged,) + inst.sets[2:])))
        if all(isinstance(r, (bool, np.bool_)) for r in results):
            return any(results)
        return min(results, default=INF)
    return solve


# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    reduction: str
    source: object
    target: object

    @property
    def ok(self) -> bool:
        return self.source == self.target

    def __str__(self):
        return f"{self.reduction}: source={self.source} target={self.target} {'PASS' if self.ok else 'FAIL'}"


REDUCTIONS = {
    ("kminip", "kdlws"): encode_kminip_as_kdlws,
    ("negtriangle", "2dlws"): encode_negtriangle_as_2dlws,
    ("2dlws", "pt"): encode_2dlws_as_pt,
    ("2dlws", "pt-slice"): encode_2dlws_as_pt_slicerank,
    ("sat", "kov"): sat_to_kov,
}
