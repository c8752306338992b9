import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwskit.tensors import (INF, BudgetError, CpTensor, DenseTensor, SliceTensor, SliceTerm, check_identity,
                            cp_as_slice, ext_add, ext_min, intro_identity, refuel_identity, tensor_from_json,
                            tensor_to_json, transpose_matrix)


def all_idx(t):
    return itertools.product(range(1, t.n + 1), repeat=t.order)


# -- extended integers ---------------------------------------------------------

def test_ext_add_saturates():
    assert ext_add(INF, 5) == INF
    assert ext_add(-3, INF, 7) == INF
    assert ext_add(2, 3) == 5


def test_ext_add_overflow_is_an_error():
    with pytest.raises(OverflowError):
        ext_add(2**62, 2**62)


def test_ext_min():
    assert ext_min([INF, 4, 9]) == 4
    assert ext_min([]) == INF


# -- entry ----------------------------------------------------------------------

def test_cp_entry_single_term():
    t = CpTensor([[[2], [3]], [[5], [7]]])
    assert t.entry(2, 1) == 15


def test_dense_zero_entry():
    t = DenseTensor(np.zeros((3, 3, 3), dtype=np.int64))
    assert all(t.entry(idx) == 0 for idx in all_idx(t))


def test_slice_entry_hand_value():
    term = SliceTerm(3, [1, 0], DenseTensor([[4, 5], [6, 7]]))
    t = SliceTensor([term])
    # a[1] * b[2, 1]
    assert t.entry(2, 1, 1) == 6


def test_entry_index_checks():
    t = CpTensor([[[1], [2]], [[3], [4]]])
    with pytest.raises(IndexError):
        t.entry(0, 1)
    with pytest.raises(IndexError):
        t.entry(1, 3)
    with pytest.raises(IndexError):
        t.entry(1, 1, 1)


def test_cp_overflow_is_an_error():
    big = 2**40
    t = CpTensor([[[big]], [[big]]])
    with pytest.raises(OverflowError):
        t.entry(1, 1)
    with pytest.raises(OverflowError):
        t.materialize()


def test_inf_only_in_dense():
    d = DenseTensor(np.array([[0, INF], [1, 2]], dtype=object))
    assert d.entry(1, 2) == INF and d.has_inf()
    with pytest.raises(ValueError):
        SliceTerm(1, [1, 1], d)
    with pytest.raises(ValueError):
        CpTensor([[[1.5]], [[1]]])


# -- materialize ------------------------------------------------------------------

def test_materialize_rank0_cp_is_zero():
    t = CpTensor([np.zeros((3, 0), dtype=np.int64)] * 3)
    assert t.rank == 0
    assert not t.materialize().data.any()


def test_materialize_dense_identity():
    d = DenseTensor(np.arange(27).reshape(3, 3, 3))
    m = d.materialize()
    assert (np.asarray(m.data) == np.asarray(d.data)).all()


def test_materialize_random_cp_agrees_everywhere():
    rng = np.random.default_rng(4)
    t = CpTensor([rng.integers(-5, 6, (4, 2)) for _ in range(3)])
    m = t.materialize()
    cells = list(all_idx(t))
    assert len(cells) == 64
    assert all(m.entry(idx) == t.entry(idx) for idx in cells)


def test_materialize_budget():
    t = CpTensor([np.ones((20, 1), dtype=np.int64)] * 4)
    with pytest.raises(BudgetError):
        t.materialize(budget=1000)


small = st.integers(-6, 6)


@st.composite
def tensors(draw):
    n = draw(st.integers(1, 4))
    order = draw(st.integers(2, 3))
    kind = draw(st.sampled_from(["dense", "cp", "slice"]))
    if kind == "dense":
        vals = draw(st.lists(small, min_size=n**order, max_size=n**order))
        return DenseTensor(np.array(vals, dtype=np.int64).reshape((n,) * order))
    if kind == "cp":
        d = draw(st.integers(0, 3))
        fs = [np.array(draw(st.lists(small, min_size=n * d, max_size=n * d)), dtype=np.int64).reshape(n, d)
              for _ in range(order)]
        return CpTensor(fs, n=n)
    terms = []
    for _ in range(draw(st.integers(1, 3))):
        axis = draw(st.integers(1, order))
        a = draw(st.lists(small, min_size=n, max_size=n))
        body = draw(st.lists(small, min_size=n ** (order - 1), max_size=n ** (order - 1)))
        terms.append(SliceTerm(axis, a, DenseTensor(np.array(body, dtype=np.int64).reshape((n,) * (order - 1)))))
    return SliceTensor(terms)


@settings(max_examples=80, deadline=None)
@given(tensors())
def test_materialize_agrees_with_entry(t):
    m = t.materialize()
    assert all(m.entry(idx) == t.entry(idx) for idx in all_idx(t))


@settings(max_examples=60, deadline=None)
@given(tensors())
def test_json_round_trip(t):
    back = tensor_from_json(json.loads(json.dumps(tensor_to_json(t))))
    assert type(back) is type(t)
    assert all(back.entry(idx) == t.entry(idx) for idx in all_idx(t))


def test_json_round_trip_with_inf():
    d = DenseTensor(np.array([[0, INF], [INF, -4]], dtype=object))
    back = tensor_from_json(json.loads(json.dumps(tensor_to_json(d))))
    assert back.entry(1, 2) == INF and back.entry(2, 2) == -4


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(0, 3), st.integers(1, 3), st.integers(0, 2**31))
def test_cp_as_slice_same_entries(n, d, axis, seed):
    rng = np.random.default_rng(seed)
    t = CpTensor([rng.integers(-4, 5, (n, d)) for _ in range(3)], n=n)
    s = cp_as_slice(t, axis)
    assert len(s.terms) == d
    assert all(s.entry(idx) == t.entry(idx) for idx in all_idx(t))


def test_entry_is_pure():
    rng = np.random.default_rng(0)
    t = SliceTensor([SliceTerm(2, rng.integers(-3, 4, 3), CpTensor([rng.integers(-3, 4, (3, 2))] * 2))])
    first = [t.entry(idx) for idx in all_idx(t)]
    assert first == [t.entry(idx) for idx in all_idx(t)]


def test_fix_pins_an_axis():
    rng = np.random.default_rng(2)
    for t in [DenseTensor(rng.integers(-5, 5, (3, 3, 3))),
              CpTensor([rng.integers(-3, 4, (3, 2)) for _ in range(3)]),
              SliceTensor([SliceTerm(a, rng.integers(-3, 4, 3), DenseTensor(rng.integers(-3, 4, (3, 3))))
                           for a in (1, 2, 3)])]:
        for axis in (1, 2, 3):
            f = t.fix(axis, 2)
            for idx in itertools.product(range(1, 4), repeat=2):
                full = list(idx)
                full.insert(axis - 1, 2)
                assert f.entry(idx) == t.entry(*full)


def test_transpose_matrix():
    rng = np.random.default_rng(9)
    for t in [DenseTensor(rng.integers(-5, 5, (3, 3))), CpTensor([rng.integers(-3, 4, (3, 2))] * 2),
              SliceTensor([SliceTerm(1, [1, 2, 3], DenseTensor([4, 5, 6]))])]:
        tt = transpose_matrix(t)
        assert all(tt.entry(i, j) == t.entry(j, i) for i, j in all_idx(t))


# -- identities -------------------------------------------------------------------

def test_intro_identity_point():
    t = intro_identity(6, 3)
    assert t.rank == 4
    assert t.entry(5, 2) == 0
    row = t.factors[0][4]
    col = t.factors[1][1]
    assert [int(v) for v in row * col] == [25, 4, (5 - 3) * (-4), (2 * 5 - 3) * (-3)]


def test_zero_tensor_identity():
    assert check_identity(DenseTensor(np.zeros((4, 4), dtype=np.int64)), lambda i, j: 0)


def test_refuel_identity_corrected():
    x, hop = [0, 3, 7], 2
    t = refuel_identity(x, hop)
    assert t.rank == 4
    assert check_identity(t, lambda i, j: (x[j - 1] - x[i - 1] - hop) ** 2)


def test_refuel_identity_as_printed_fails():
    # with 2*hop inside the cross term the expansion misses by 2*hop*x_j
    x = np.array([0, 3, 7])
    hop = 2
    one = np.ones(3, dtype=np.int64)
    rows = np.stack([one, x * x, x + 2 * hop, hop * (2 * x + hop)], axis=1)
    cols = np.stack([x * x, one, -2 * x, one], axis=1)
    printed = CpTensor([rows, cols])
    assert not check_identity(printed, lambda i, j: (x[j - 1] - x[i - 1] - hop) ** 2)


def test_check_identity_samples_large_grids():
    t = intro_identity(500, 7)
    assert check_identity(t, lambda i, j: (7 - (i - j)) ** 2, samples=2000)
    assert not check_identity(t, lambda i, j: (7 - (i - j)) ** 2 + (i == 250), samples=10**6)
