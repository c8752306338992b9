"""Seeded random instances for tests, the verify command and benchmarks."""
from __future__ import annotations

import numpy as np

from .dp_core import Interval2dInstance, KdLwsInstance, LwsInstance, PtInstance
from .tensors import INF, CpTensor, DenseTensor, SliceTensor, SliceTerm


def rng_for(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def dense_tensor(order: int, n: int, rng, lo: int = -9, hi: int = 9, inf_prob: float = 0.0) -> DenseTensor:
    vals = rng.integers(lo, hi + 1, size=(n,) * order)
    if inf_prob <= 0:
        return DenseTensor(vals.astype(np.int64))
    out = vals.astype(object)
    out[rng.random(vals.shape) < inf_prob] = INF
    return DenseTensor(out)


def cp_tensor(order: int, n: int, d: int, rng, lo: int = -4, hi: int = 4) -> CpTensor:
    return CpTensor([rng.integers(lo, hi + 1, size=(n, d)) for _ in range(order)])


def slice_term(order: int, n: int, rng, axis: int | None = None, lo: int = -4, hi: int = 4) -> SliceTerm:
    axis = int(rng.integers(1, order + 1)) if axis is None else axis
    body = DenseTensor(rng.integers(lo, hi + 1, size=(n,) * (order - 1)))
    return SliceTerm(axis, rng.integers(lo, hi + 1, size=n), body)


def random_lws(n: int, seed=0, lo: int = -9, hi: int = 9) -> LwsInstance:
    rng = rng_for(seed)
    return LwsInstance(n, dense_tensor(2, n + 1, rng, lo, hi))


def random_kdlws(k: int, n: int, seed=0, lo: int = -9, hi: int = 9, inf_prob: float = 0.0) -> KdLwsInstance:
    rng = rng_for(seed)
    return KdLwsInstance(k, n, tuple(dense_tensor(k + 1, n, rng, lo, hi, inf_prob) for _ in range(k)))


def random_rank1_kdlws(k: int, n: int, seed=0, lo: int = -5, hi: int = 5) -> KdLwsInstance:
    rng = rng_for(seed)
    return KdLwsInstance(k, n, tuple(cp_tensor(k + 1, n, 1, rng, lo, hi) for _ in range(k)))


def random_cp_kdlws(k: int, n: int, d: int, seed=0, lo: int = -4, hi: int = 4) -> KdLwsInstance:
    rng = rng_for(seed)
    return KdLwsInstance(k, n, tuple(cp_tensor(k + 1, n, d, rng, lo, hi) for _ in range(k)))


def random_slicerank1_kdlws(k: int, n: int, seed=0, lo: int = -5, hi: int = 5,
                            axes: tuple | None = None) -> KdLwsInstance:
    """One slice term per tensor; ``axes[l]`` pins the term axis of tensor l (random otherwise)."""
    rng = rng_for(seed)
    ws = []
    for ell in range(k):
        axis = None if axes is None else axes[ell]
        ws.append(SliceTensor([slice_term(k + 1, n, rng, axis, lo, hi)]))
    return KdLwsInstance(k, n, tuple(ws))


def bench_slicerank1_2d(n: int, seed=0) -> KdLwsInstance:
    """Benchmark family: vector on the predecessor, slopes in [-50, 50), body in [0, 50)."""
    rng = rng_for(seed)
    ws = [SliceTensor([SliceTerm(3, rng.integers(-50, 50, n), DenseTensor(rng.integers(0, 50, (n, n))))])
          for _ in range(2)]
    return KdLwsInstance(2, n, tuple(ws))


def random_pt(n: int, seed=0, lo: int = -9, hi: int = 9) -> PtInstance:
    rng = rng_for(seed)
    return PtInstance(n, dense_tensor(3, n, rng, lo, hi))


def random_interval2d_cp(n: int, d: int, seed=0, lo: int = -3, hi: int = 3) -> Interval2dInstance:
    rng = rng_for(seed)
    return Interval2dInstance(n, cp_tensor(3, n, d, rng, lo, hi))


def random_interval2d_slice(n: int, terms: int, seed=0, lo: int = -3, hi: int = 3) -> Interval2dInstance:
    rng = rng_for(seed)
    return Interval2dInstance(n, SliceTensor([slice_term(3, n, rng, None, lo, hi) for _ in range(terms)], k=2, n=n))
