"""Structured cost tensors.

A cost tensor of order ``k + 1`` over side length ``n`` is stored in one of
three forms: a dense grid, a CP (sum of outer products) factorization, or a
sum of slice terms.  Indices are 1-based at the public surface.

Entries are extended integers: Python ints in the signed 64-bit range, or
``math.inf``.  Infinity can only live in dense tensors.
"""
from __future__ import annotations

import itertools
import math
import random
from typing import Callable, Iterable, Sequence

import numpy as np

INF = math.inf
WORD_MAX = 2**63 - 1
# int64 slot reserved for +inf inside dense storage
INF_CODE = np.iinfo(np.int64).max
DEFAULT_BUDGET = 1 << 24


class BudgetError(RuntimeError):
    """Raised when an operation would exceed its configured size budget."""


def check_word(v: int) -> int:
    if v > WORD_MAX - 1 or v < -WORD_MAX:
        raise OverflowError(f"value {v} leaves the 64-bit word range")
    return v


def ext_add(*xs) -> int | float:
    """Saturating, overflow-checked sum of extended integers."""
    total = 0
    for x in xs:
        if x == INF:
            return INF
        total += x
    return check_word(total)


def ext_min(xs: Iterable) -> int | float:
    best = INF
    for x in xs:
        if x < best:
            best = x
    return best


def _as_int_array(x, ndim: int | None = None, name: str = "array") -> np.ndarray:
    arr = np.asarray(x)
    if arr.dtype == object or arr.dtype.kind == "f":
        # reject fractional or infinite values instead of truncating
        flat = [v for v in arr.ravel().tolist()]
        for v in flat:
            if isinstance(v, float) and not v.is_integer():
                raise ValueError(f"{name} must hold integers, got {v}")
        arr = np.array([int(v) for v in flat], dtype=np.int64).reshape(arr.shape)
    elif arr.dtype.kind not in "iub":
        raise ValueError(f"{name} must hold integers")
    arr = arr.astype(np.int64, copy=True)
    if ndim is not None and arr.ndim != ndim:
        raise ValueError(f"{name} must have {ndim} dimensions, got {arr.ndim}")
    if arr.size and (arr.max() >= INF_CODE or arr.min() < -WORD_MAX):
        raise OverflowError(f"{name} has entries outside the word range")
    return arr


def _check_index(idx: Sequence[int], order: int, n: int) -> tuple[int, ...]:
    if len(idx) != order:
        raise IndexError(f"expected {order} indices, got {len(idx)}")
    for v in idx:
        if not 1 <= v <= n:
            raise IndexError(f"index {tuple(idx)} outside [1,{n}]^{order}")
    return tuple(int(v) - 1 for v in idx)


class CostTensor:
    """Base class: an order-(k+1) tensor with side length n."""

    kind = "abstract"

    def __init__(self, k: int, n: int):
        if k < -1 or n < 1:
            raise ValueError("need k >= -1 and n >= 1")
        self.k = k
        self.n = n

    @property
    def order(self) -> int:
        return self.k + 1

    def entry(self, *idx) -> int | float:
        if len(idx) == 1 and isinstance(idx[0], (tuple, list)):
            idx = tuple(idx[0])
        return self._entry(_check_index(idx, self.order, self.n))

    def _entry(self, idx0: tuple[int, ...]) -> int | float:
        raise NotImplementedError

    def has_inf(self) -> bool:
        return False

    def max_abs(self) -> int:
        """Upper bound on the magnitude of every finite entry."""
        raise NotImplementedError

    def materialize(self, budget: int = DEFAULT_BUDGET) -> "DenseTensor":
        size = self.n**self.order
        if size > budget:
            raise BudgetError(f"{size} entries exceed the budget of {budget}")
        return DenseTensor(self._dense_int64())

    def _dense_int64(self) -> np.ndarray:
        # generic fallback through entry(); subclasses vectorize this
        out = np.empty((self.n,) * self.order, dtype=np.int64)
        for idx in itertools.product(range(self.n), repeat=self.order):
            v = self._entry(idx)
            out[idx] = INF_CODE if v == INF else v
        return out

    def fix(self, axis: int, value: int) -> "CostTensor":
        """Tensor of one lower order with index ``axis`` pinned to ``value``."""
        raise NotImplementedError

    def scaled(self, c: int) -> "CostTensor":
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}(k={self.k}, n={self.n})"


class DenseTensor(CostTensor):
    kind = "dense"

    def __init__(self, data, n: int | None = None):
        arr = data if isinstance(data, np.ndarray) else np.asarray(data, dtype=object)
        if arr.dtype == np.int64:
            # int64 input is taken as already encoded, INF_CODE meaning +inf
            arr = arr.copy()
        elif arr.dtype.kind in "iub":
            arr = _as_int_array(arr, name="dense data")
        else:
            arr = _dense_from_values(arr)
        shape = arr.shape
        if len(shape) == 0:
            if n is None:
                raise ValueError("a 0-order tensor needs an explicit n")
            super().__init__(-1, n)
        else:
            if len(set(shape)) != 1:
                raise ValueError(f"dense tensor must be cubical, got shape {shape}")
            super().__init__(len(shape) - 1, shape[0])
        self.data = arr
        self.data.setflags(write=False)

    @classmethod
    def from_function(cls, f: Callable, k: int, n: int) -> "DenseTensor":
        out = np.empty((n,) * (k + 1), dtype=object)
        for idx in itertools.product(range(1, n + 1), repeat=k + 1):
            out[tuple(i - 1 for i in idx)] = f(*idx)
        return cls(out)

    def _entry(self, idx0):
        v = int(self.data[idx0])
        return INF if v == INF_CODE else v

    def has_inf(self) -> bool:
        return bool((self.data == INF_CODE).any())

    def max_abs(self) -> int:
        finite = self.data[self.data != INF_CODE]
        return int(np.abs(finite).max()) if finite.size else 0

    def materialize(self, budget: int = DEFAULT_BUDGET) -> "DenseTensor":
        return self

    def _dense_int64(self):
        return self.data

    def fix(self, axis, value):
        if not 1 <= axis <= self.order or not 1 <= value <= self.n:
            raise IndexError("fix position out of range")
        return DenseTensor(np.ascontiguousarray(self.data.take(value - 1, axis=axis - 1)), n=self.n)

    def scaled(self, c):
        if self.has_inf():
            if c < 0:
                raise ValueError("cannot scale an infinite entry by a negative factor")
            if c == 0:
                raise ValueError("0 * inf is undefined")
        out = np.empty(self.data.shape, dtype=object)
        for idx in np.ndindex(*self.data.shape):
            v = int(self.data[idx])
            out[idx] = INF if v == INF_CODE else check_word(v * c)
        return DenseTensor(out, n=self.n)

    def to_json(self):
        def enc(x):
            if isinstance(x, list):
                return [enc(v) for v in x]
            return "inf" if x == INF_CODE else int(x)
        return {"kind": "dense", "n": self.n, "k": self.k, "data": enc(self.data.tolist())}


def _dense_from_values(arr: np.ndarray) -> np.ndarray:
    out = np.empty(arr.shape, dtype=np.int64)
    for idx in np.ndindex(*arr.shape):
        v = arr[idx]
        if isinstance(v, str) and v == "inf" or (isinstance(v, float) and v == INF):
            out[idx] = INF_CODE
            continue
        if isinstance(v, float) and not v.is_integer():
            raise ValueError(f"dense entries must be integers or inf, got {v}")
        iv = int(v)
        if iv >= INF_CODE or iv < -WORD_MAX:
            raise OverflowError(f"entry {iv} leaves the word range")
        out[idx] = iv
    return out


class CpTensor(CostTensor):
    """Sum over t of the outer product of column t of each factor.

    ``factors[a]`` is an ``n x d`` integer matrix for axis ``a``.  With
    ``d == 0`` the tensor is identically zero.
    """

    kind = "cp"

    def __init__(self, factors: Sequence, n: int | None = None):
        if len(factors) == 0:
            raise ValueError("need at least one factor")
        fs = [_as_int_array(f, 2, "factor") for f in factors]
        sides = {f.shape[0] for f in fs}
        ranks = {f.shape[1] for f in fs}
        if len(sides) != 1 or len(ranks) != 1:
            raise ValueError("factors must share side length and rank")
        super().__init__(len(fs) - 1, sides.pop())
        if n is not None and n != self.n:
            raise ValueError("side length mismatch")
        self.rank = ranks.pop()
        for f in fs:
            f.setflags(write=False)
        self.factors = tuple(fs)

    def _entry(self, idx0):
        total = 0
        for t in range(self.rank):
            p = 1
            for f, i in zip(self.factors, idx0):
                p *= int(f[i, t])
            total += p
        return check_word(total)

    def max_abs(self) -> int:
        total = 0
        for t in range(self.rank):
            p = 1
            for f in self.factors:
                p *= int(np.abs(f[:, t]).max())
            total += p
        return total

    def _dense_int64(self):
        bound = self.max_abs()
        if bound >= WORD_MAX:
            return super()._dense_int64()
        out = np.zeros((self.n,) * self.order, dtype=np.int64)
        for t in range(self.rank):
            term = self.factors[0][:, t]
            for f in self.factors[1:]:
                term = np.multiply.outer(term, f[:, t])
            out += term
        return out

    def fix(self, axis, value):
        if not 1 <= axis <= self.order or not 1 <= value <= self.n:
            raise IndexError("fix position out of range")
        rest = [f for a, f in enumerate(self.factors) if a != axis - 1]
        if not rest:
            return DenseTensor(np.int64(self._entry((value - 1,))), n=self.n)
        scale = self.factors[axis - 1][value - 1, :]
        first = rest[0] * scale[None, :]
        if self.rank and np.abs(rest[0]).max(initial=0) * np.abs(scale).max(initial=0) >= WORD_MAX:
            raise OverflowError("scaled factor leaves the word range")
        return CpTensor([first] + rest[1:])

    def scaled(self, c):
        f0 = [[check_word(int(v) * c) for v in row] for row in self.factors[0].tolist()]
        return CpTensor([np.array(f0, dtype=np.int64).reshape(self.n, self.rank)] + list(self.factors[1:]))

    def to_json(self):
        return {"kind": "cp", "n": self.n, "k": self.k, "rank": self.rank,
                "factors": [f.tolist() for f in self.factors]}


class SliceTerm:
    """``a[i_axis] * b[remaining indices in original order]`` with ``axis`` 1-based."""

    def __init__(self, axis: int, a, b: CostTensor):
        self.a = _as_int_array(a, 1, "slice vector")
        self.a.setflags(write=False)
        if not isinstance(b, (DenseTensor, CpTensor)):
            raise TypeError("slice term body must be dense or CP")
        if b.has_inf():
            raise ValueError("slice term body must be finite")
        if b.n != self.a.shape[0]:
            raise ValueError("slice vector and body disagree on n")
        if not 1 <= axis <= b.order + 1:
            raise ValueError(f"axis {axis} out of range for order {b.order + 1}")
        self.axis = axis
        self.b = b

    @property
    def n(self) -> int:
        return self.b.n

    @property
    def order(self) -> int:
        return self.b.order + 1

    def entry0(self, idx0):
        ax = self.axis - 1
        rest = idx0[:ax] + idx0[ax + 1:]
        return check_word(int(self.a[idx0[ax]]) * self.b._entry(rest))

    def max_abs(self) -> int:
        return int(np.abs(self.a).max(initial=0)) * self.b.max_abs()

    def dense_int64(self) -> np.ndarray:
        body = self.b._dense_int64()
        if self.max_abs() >= WORD_MAX:
            raise OverflowError("slice term leaves the word range")
        shape = [1] * self.order
        shape[self.axis - 1] = self.n
        return np.expand_dims(body, self.axis - 1) * self.a.reshape(shape)

    def to_json(self):
        return {"axis": self.axis, "a": self.a.tolist(), "b": tensor_to_json(self.b, tag=False)}


class SliceTensor(CostTensor):
    """Sum of slice terms.  An empty term list is the zero tensor."""

    kind = "slice"

    def __init__(self, terms: Sequence[SliceTerm], k: int | None = None, n: int | None = None):
        terms = list(terms)
        if terms:
            k0, n0 = terms[0].order - 1, terms[0].n
            if any(t.order - 1 != k0 or t.n != n0 for t in terms):
                raise ValueError("slice terms disagree on shape")
            if (k is not None and k != k0) or (n is not None and n != n0):
                raise ValueError("slice terms disagree with the declared shape")
            k, n = k0, n0
        elif k is None or n is None:
            raise ValueError("an empty slice tensor needs explicit k and n")
        super().__init__(k, n)
        self.terms = tuple(terms)

    def _entry(self, idx0):
        return check_word(sum(t.entry0(idx0) for t in self.terms))

    def max_abs(self) -> int:
        return sum(t.max_abs() for t in self.terms)

    def _dense_int64(self):
        if self.max_abs() >= WORD_MAX:
            raise OverflowError("slice tensor leaves the word range")
        out = np.zeros((self.n,) * self.order, dtype=np.int64)
        for t in self.terms:
            out += t.dense_int64()
        return out

    def fix(self, axis, value):
        if not 1 <= axis <= self.order or not 1 <= value <= self.n:
            raise IndexError("fix position out of range")
        if self.order == 1:
            return DenseTensor(np.int64(self._entry((value - 1,))), n=self.n)
        if any(t.axis == axis for t in self.terms):
            # pinning a term's own axis leaves a bare body, not a slice term
            return self.materialize().fix(axis, value)
        terms = []
        for t in self.terms:
            b_axis = axis if axis < t.axis else axis - 1
            new_axis = t.axis if axis > t.axis else t.axis - 1
            terms.append(SliceTerm(new_axis, t.a, t.b.fix(b_axis, value)))
        return SliceTensor(terms, k=self.k - 1, n=self.n)

    def scaled(self, c):
        return SliceTensor([SliceTerm(t.axis, [check_word(int(v) * c) for v in t.a], t.b) for t in self.terms],
                           k=self.k, n=self.n)

    def to_json(self):
        return {"kind": "slice", "n": self.n, "k": self.k, "terms": [t.to_json() for t in self.terms]}


def cp_as_slice(t: CpTensor, axis: int = 1) -> SliceTensor:
    """Rewrite a rank-d CP tensor as d slice terms bound on ``axis``."""
    terms = []
    for r in range(t.rank):
        rest = [f[:, r:r + 1] for a, f in enumerate(t.factors) if a != axis - 1]
        terms.append(SliceTerm(axis, t.factors[axis - 1][:, r], CpTensor(rest)))
    return SliceTensor(terms, k=t.k, n=t.n)


def transpose_matrix(t: CostTensor) -> CostTensor:
    """Swap the two indices of an order-2 tensor."""
    if t.order != 2:
        raise ValueError("transpose_matrix needs an order-2 tensor")
    if isinstance(t, DenseTensor):
        return DenseTensor(np.ascontiguousarray(t.data.T))
    if isinstance(t, CpTensor):
        return CpTensor([t.factors[1], t.factors[0]])
    return SliceTensor([SliceTerm(3 - s.axis, s.a, s.b) for s in t.terms], k=1, n=t.n)


def check_identity(t: CostTensor, f: Callable, samples: int = 100_000, seed: int = 0) -> bool:
    """True iff ``t.entry`` agrees with ``f`` on the checked index tuples.

    Every tuple is checked when ``n**(k+1) <= samples``; otherwise ``samples``
    tuples are drawn with a seeded generator.
    """
    order, n = t.order, t.n
    if n**order <= samples:
        tuples: Iterable = itertools.product(range(1, n + 1), repeat=order)
    else:
        rng = random.Random(seed)
        tuples = (tuple(rng.randint(1, n) for _ in range(order)) for _ in range(samples))
    return all(t.entry(*idx) == f(*idx) for idx in tuples)


def intro_identity(n: int, hop: int) -> CpTensor:
    """Rank-4 factors of ``(hop - (i - j))**2`` over ``[1, n]^2``."""
    i = np.arange(1, n + 1, dtype=np.int64)
    one = np.ones(n, dtype=np.int64)
    rows = np.stack([i * i, one, i - hop, 2 * i - hop], axis=1)
    cols = np.stack([one, i * i, -2 * i, np.full(n, -hop, dtype=np.int64)], axis=1)
    return CpTensor([rows, cols])


def refuel_identity(x: Sequence[int], hop: int) -> CpTensor:
    """Rank-4 factors of ``(x[j] - x[i] - hop)**2``; entry (i, j) is 1-based."""
    x = np.asarray([int(v) for v in x], dtype=np.int64)
    one = np.ones(len(x), dtype=np.int64)
    rows = np.stack([one, x * x, x + hop, hop * (2 * x + hop)], axis=1)
    cols = np.stack([x * x, one, -2 * x, one], axis=1)
    return CpTensor([rows, cols])


def tensor_to_json(t: CostTensor, tag: bool = True) -> dict:
    d = t.to_json()
    if tag:
        d = {"schema": SCHEMA, **d}
    return d


def tensor_from_json(d: dict) -> CostTensor:
    kind = d.get("kind")
    if kind == "dense":
        data = d["data"]
        if d.get("k") == -1:
            return DenseTensor(np.int64(INF_CODE if data == "inf" else int(data)), n=d["n"])
        t = DenseTensor(np.array(data, dtype=object))
    elif kind == "cp":
        rank = d.get("rank")
        fs = [np.array(f, dtype=np.int64).reshape(d["n"], rank if rank is not None else -1) for f in d["factors"]]
        t = CpTensor(fs)
    elif kind == "slice":
        terms = [SliceTerm(s["axis"], s["a"], tensor_from_json(s["b"])) for s in d["terms"]]
        t = SliceTensor(terms, k=d["k"], n=d["n"])
    else:
        raise ValueError(f"unknown tensor kind {kind!r}")
    if t.n != d["n"] or t.k != d["k"]:
        raise ValueError("tensor JSON shape fields disagree with its data")
    return t


SCHEMA = "lwskit/1"
