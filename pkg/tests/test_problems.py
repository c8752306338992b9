import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwskit import oracles
from lwskit.dp_core import solve_kdlws_naive, solve_lws_naive, solve_pt_naive
from lwskit.fast_solvers import StaticSolverKind, solve_2dlws_slicerank1, solve_kdlws_dc
from lwskit.problems import (decode_lis, decode_nested_boxes, encode_lis, encode_matrix_chain,
                             encode_nested_boxes, encode_optimal_bst, encode_polygon_triangulation,
                             encode_refuel_1d, encode_refuel_arrival_fee, encode_refuel_kd, parenthesization_cost)
from lwskit.tensors import CpTensor, SliceTensor


# -- LIS --------------------------------------------------------------------------------------

def lis(xs):
    return decode_lis(solve_lws_naive(encode_lis(xs))[1])


def test_lis_examples():
    assert lis([3, 1, 4, 1, 5, 9, 2, 6]) == 4
    assert lis([9, 7, 5, 3]) == 1
    assert lis([1, 2, 3, 4, 5]) == 5
    assert lis([]) == 0


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-20, 20), max_size=14))
def test_lis_matches_patience(xs):
    assert lis(xs) == oracles.lis_patience(xs)


# -- refuelling -------------------------------------------------------------------------------

def test_refuel_examples():
    assert solve_lws_naive(encode_refuel_1d([0, 3, 7], 2))[1] == 5
    assert solve_lws_naive(encode_refuel_1d([0, 4], 4))[1] == 0
    assert solve_lws_naive(encode_refuel_1d([2, 10], 3))[1] == 25


def test_refuel_is_rank4():
    inst = encode_refuel_1d([0, 1, 5, 6], 2)
    assert isinstance(inst.w, CpTensor) and inst.w.rank == 4


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(0, 60), min_size=2, max_size=10, unique=True), st.integers(0, 15))
def test_refuel_matches_subset_enumeration(stops, hop):
    x = sorted(stops)
    assert solve_lws_naive(encode_refuel_1d(x, hop))[1] == oracles.brute_refuel(x, hop)


def test_refuel_kd_hop_against_dense_cost():
    for k, n, hop in [(1, 7, 2), (2, 5, 1), (3, 3, 2)]:
        a = encode_refuel_kd(k, n, hop=hop)
        b = encode_refuel_kd(k, n, cost=lambda L, h=hop: (L - h) ** 2)
        assert all(isinstance(w, CpTensor) and w.rank == 4 for w in a.w)
        assert solve_kdlws_naive(a)[1] == solve_kdlws_naive(b)[1]
        if k > 1:
            assert solve_kdlws_dc(a, StaticSolverKind.HIERARCHY) == solve_kdlws_naive(b)[1]


def test_refuel_kd_needs_one_cost():
    with pytest.raises(ValueError):
        encode_refuel_kd(2, 3)
    with pytest.raises(ValueError):
        encode_refuel_kd(2, 3, hop=1, cost=lambda L: L)


def test_arrival_fee_unit_costs():
    inst = encode_refuel_arrival_fee(2, 3, np.ones((3, 3), dtype=np.int64))
    # two moves reach the corner, one per axis
    assert solve_kdlws_naive(inst)[1] == 2
    assert oracles.brute_grid_paths(2, 3, lambda i, j: 1) == 2


def test_arrival_fee_zero():
    assert solve_kdlws_naive(encode_refuel_arrival_fee(2, 4, np.zeros((4, 4), dtype=np.int64)))[1] == 0


def test_arrival_fee_matches_paths():
    rng = np.random.default_rng(6)
    for k, n in [(2, 2), (2, 4), (3, 3)]:
        for _ in range(5):
            c = rng.integers(-3, 10, (n,) * k)
            inst = encode_refuel_arrival_fee(k, n, c)
            assert all(isinstance(w, SliceTensor) and len(w.terms) == 1 for w in inst.w)
            want = oracles.brute_grid_paths(k, n, lambda *i: int(c[tuple(v - 1 for v in i)]))
            assert solve_kdlws_naive(inst)[1] == want
            if k == 2:
                assert solve_2dlws_slicerank1(inst) == want


def test_arrival_fee_shape_check():
    with pytest.raises(ValueError):
        encode_refuel_arrival_fee(2, 3, np.ones((3,), dtype=np.int64))


# -- nested boxes ----------------------------------------------------------------------------

def boxes_dp(boxes, piles):
    return decode_nested_boxes(solve_kdlws_naive(encode_nested_boxes(boxes, piles))[1])


def test_nested_boxes_examples():
    assert boxes_dp([(1, 1), (2, 2), (3, 3)], 2) == 3
    assert boxes_dp([(1, 2), (2, 1)], 2) == 2
    assert boxes_dp([(1, 2), (2, 1)], 1) == 1
    assert boxes_dp([], 2) == 0


def test_nested_boxes_equal_boxes_share_a_pile():
    assert boxes_dp([(2, 2), (2, 2), (2, 2)], 1) == 3


def test_nested_boxes_random():
    rng = np.random.default_rng(31)
    for _ in range(40):
        n, d, piles = int(rng.integers(1, 6)), int(rng.integers(1, 4)), int(rng.integers(1, 4))
        boxes = rng.integers(1, 5, (n, d)).tolist()
        assert boxes_dp(boxes, piles) == oracles.brute_nested_boxes(boxes, piles)


# -- interval problems -----------------------------------------------------------------------

def test_matrix_chain():
    assert solve_pt_naive(encode_matrix_chain([10, 20, 30, 40]))[1] == 18000
    assert parenthesization_cost([10, 20, 30, 40], (1, (2, 3))) == 32000
    assert parenthesization_cost([10, 20, 30, 40], ((1, 2), 3)) == 18000
    assert solve_pt_naive(encode_matrix_chain([2, 3, 4, 5]))[1] == 64
    assert solve_pt_naive(encode_matrix_chain([7, 9]))[1] == 0


def test_matrix_chain_random():
    rng = np.random.default_rng(13)
    for _ in range(30):
        dims = rng.integers(1, 30, size=int(rng.integers(2, 9))).tolist()
        inst = encode_matrix_chain(dims)
        assert isinstance(inst.w, CpTensor) and inst.w.rank == 1
        assert solve_pt_naive(inst)[1] == oracles.brute_matrix_chain(dims)


def test_parenthesization_rejects_bad_tree():
    with pytest.raises(ValueError):
        parenthesization_cost([1, 2, 3, 4], ((1, 3), 2))


def test_optimal_bst():
    assert solve_pt_naive(encode_optimal_bst([1]))[1] == 1
    assert solve_pt_naive(encode_optimal_bst([1, 1]))[1] == 3
    assert solve_pt_naive(encode_optimal_bst([4, 2, 6]))[1] == 20
    assert solve_pt_naive(encode_optimal_bst([1, 1, 1, 1]))[1] == oracles.brute_optimal_bst([1, 1, 1, 1])


def test_optimal_bst_random():
    rng = np.random.default_rng(14)
    for _ in range(50):
        p = rng.integers(0, 20, size=int(rng.integers(1, 9))).tolist()
        inst = encode_optimal_bst(p)
        assert isinstance(inst.w, SliceTensor) and len(inst.w.terms) == 1
        assert solve_pt_naive(inst)[1] == oracles.brute_optimal_bst(p)


def test_polygon_triangulation():
    assert solve_pt_naive(encode_polygon_triangulation([2, 3, 5]))[1] == 30
    assert solve_pt_naive(encode_polygon_triangulation([1, 2, 3, 4]))[1] == 18
    assert solve_pt_naive(encode_polygon_triangulation([1] * 6))[1] == 4
    with pytest.raises(ValueError):
        encode_polygon_triangulation([1, 2])


def test_polygon_triangulation_random():
    rng = np.random.default_rng(15)
    for n in range(3, 11):
        inst = encode_polygon_triangulation(rng.integers(-5, 9, n).tolist())
        assert solve_pt_naive(inst)[1] == oracles.brute_triangulations(inst)
