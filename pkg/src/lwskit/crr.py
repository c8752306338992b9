"""Chinese-remainder compression of long 0/1 vectors.

``CrrCodec(b, l, k)`` maps ``x`` in {0,1}^(b*l) to ``l`` non-negative
integers such that a k-tuple of inputs is orthogonal exactly when the
k-wise inner product of the codes lands in the acceptance set ``V``.

Two modes:

* direct (``b < l``): each block of ``b`` bits becomes the integer that
  is congruent to bit t modulo prime q_t.  Block sums of k-products are at
  most ``l`` and every q_t exceeds ``l``, so orthogonality is
  "divisible by every q_t".
* recursive (``b >= l``): blocks are cut into micro groups of ``b_micro``
  bits, the j-th micro groups of all blocks are encoded by an inner codec,
  and the inner codes are recombined by CRT with primes larger than any
  inner inner-product.

V is kept as a predicate; :meth:`CrrCodec.values` enumerates it under a
budget.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from sympy import nextprime
from sympy.ntheory.modular import crt

from .tensors import BudgetError

V_BUDGET = 10**6


def log_star(x: float) -> int:
    """Iterated base-2 logarithm; 0 for x <= 1."""
    n = 0
    while x > 1:
        x = math.log2(x)
        n += 1
    return n


def code_bound(b: int, l: int, k: int) -> int:
    """Exclusive upper bound ``l ** ((3k) ** log*(b) * b)`` on code coordinates."""
    return l ** ((3 * k) ** log_star(b) * b)


def choose_b_micro(b: int, l: int, k: int) -> int:
    bm = 1
    while code_bound(bm, l, k) < b:
        bm += 1
    return bm


def _primes_from(lo: int, count: int) -> list[int]:
    out = []
    p = lo - 1
    for _ in range(count):
        p = nextprime(p)
        out.append(int(p))
    return out


def _crt(residues: Sequence[int], primes: Sequence[int]) -> int:
    if len(primes) == 1:
        return residues[0] % primes[0]
    return int(crt(primes, residues)[0])


@dataclass
class CrrCodec:
    b: int
    l: int
    k: int
    primes: list[int]
    b_micro: int | None = None
    inner: "CrrCodec | None" = None
    vmax: int = field(init=False)

    def __post_init__(self):
        self.modulus = math.prod(self.primes)
        # largest possible k-wise inner product of l codes
        self.vmax = self.l * (self.modulus - 1) ** self.k

    @property
    def mode(self) -> str:
        return "direct" if self.inner is None else "recursive"

    @property
    def groups(self) -> int:
        return len(self.primes)

    # -- encoding ----------------------------------------------------------

    def encode(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.b * self.l:
            raise ValueError(f"expected {self.b * self.l} bits, got {len(x)}")
        if any(v not in (0, 1) for v in x):
            raise ValueError("input must be a 0/1 vector")
        blocks = [list(x[i * self.b:(i + 1) * self.b]) for i in range(self.l)]
        if self.inner is None:
            return [_crt(blk, self.primes) for blk in blocks]
        bm, g = self.b_micro, self.groups
        # zero padding keeps orthogonality unchanged
        blocks = [blk + [0] * (g * bm - self.b) for blk in blocks]
        inner = [self.inner.encode([bit for blk in blocks for bit in blk[j * bm:(j + 1) * bm]])
                 for j in range(g)]
        return [_crt([inner[j][i] for j in range(g)], self.primes) for i in range(self.l)]

    # -- acceptance set ----------------------------------------------------

    def accepts(self, v: int) -> bool:
        if v < 0 or v > self.vmax:
            return False
        if self.inner is None:
            return v % self.modulus == 0
        return all(self.inner.accepts(v % q) for q in self.primes)

    __contains__ = accepts

    def count_bound(self) -> int:
        """Upper bound on ``len(V)`` used to refuse hopeless enumerations."""
        reps = self.vmax // self.modulus + 1
        if self.inner is None:
            return reps
        return self.inner.count_bound() ** self.groups * reps

    def values(self, budget: int = V_BUDGET) -> Iterator[int]:
        """Every member of V in increasing order of residue class."""
        if self.count_bound() > budget:
            raise BudgetError(f"acceptance set may hold {self.count_bound()} values, budget {budget}")
        if self.inner is None:
            yield from range(0, self.vmax + 1, self.modulus)
            return
        inner_vals = list(self.inner.values(budget))
        seen = []
        for res in itertools.product(inner_vals, repeat=self.groups):
            seen.append(_crt(list(res), self.primes))
        for base in sorted(set(seen)):
            yield from range(base, self.vmax + 1, self.modulus)

    def levels(self) -> list["CrrCodec"]:
        out, c = [], self
        while c is not None:
            out.append(c)
            c = c.inner
        return out


def crr_build(b: int, l: int, k: int = 2, primes: Sequence[int] | None = None) -> CrrCodec:
    """Codec for ``b``-bit blocks, ``l`` blocks, arity ``k``.

    ``primes`` forces direct mode with the given moduli (each must exceed
    ``l``); otherwise the smallest admissible primes are taken.
    """
    if b < 1 or l < 2:
        raise ValueError("need b >= 1 and l >= 2")
    if k < 2:
        raise ValueError("arity must be at least 2")
    if primes is not None:
        primes = [int(p) for p in primes]
        if len(primes) != b or len(set(primes)) != b or min(primes) <= l:
            raise ValueError(f"need {b} distinct primes above {l}")
        return CrrCodec(b, l, k, primes)
    if b < l:
        ps = _primes_from(l + 1, b)
        if ps[-1] > l * l:
            raise ValueError(f"only {sum(p <= l * l for p in ps)} primes in [{l + 1}, {l * l}]")
        return CrrCodec(b, l, k, ps)
    bm = choose_b_micro(b, l, k)
    inner = crr_build(bm, l, k)
    g = -(-b // bm)
    # residues must recover inner products exactly
    lo = max(b**k * l, inner.vmax + 1)
    return CrrCodec(b, l, k, _primes_from(lo, g), b_micro=bm, inner=inner)


def crr_encode(codec: CrrCodec, x: Sequence[int]) -> list[int]:
    return codec.encode(x)


def kwise_inner(vectors: Sequence[Sequence[int]]) -> int:
    total = 0
    for coords in zip(*vectors):
        total += math.prod(coords)
    return total
