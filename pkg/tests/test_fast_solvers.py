import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lwskit import oracles
from lwskit.dp_core import Band, KdLwsInstance, PtInstance, StaticKdInstance, solve_kdlws_naive, solve_pt_naive
from lwskit.fast_solvers import (LineEnvelope, PreconditionError, StaticSolverKind, _headroom_ok,
                                 check_knuth_preconditions, envelope_batch_min, slicerank1_arrays,
                                 solve_2dlws_slicerank1, solve_2dlws_slicerank1_naive_compiled, solve_kdlws_dc,
                                 solve_pt_knuth, solve_static_kd, solve_static_kd_via_hierarchy,
                                 solve_static_lws_rank1)
from lwskit.generate import (bench_slicerank1_2d, random_cp_kdlws, random_kdlws, random_pt, random_rank1_kdlws,
                             random_slicerank1_kdlws)
from lwskit.problems import encode_matrix_chain, encode_optimal_bst, encode_refuel_arrival_fee
from lwskit.tensors import INF, CpTensor, DenseTensor, SliceTensor, SliceTerm


# -- envelopes ----------------------------------------------------------------------------

def test_envelope_symmetric_pair():
    assert envelope_batch_min([(1, 0), (-1, 0)], [5]) == [-5]


def test_envelope_single_line():
    assert envelope_batch_min([(3, 2)], [4]) == [14]


def test_envelope_no_finite_line():
    assert envelope_batch_min([(1, INF)], [0, 1]) == [INF, INF]
    assert envelope_batch_min([], [3]) == [INF]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(-10**6, 10**6), st.integers(-10**9, 10**9)), min_size=1, max_size=50),
       st.lists(st.integers(-10**4, 10**4), min_size=1, max_size=50))
def test_envelope_matches_scan(lines, queries):
    want = [min(s * x + c for s, c in lines) for x in queries]
    assert envelope_batch_min(lines, queries) == want


def test_envelope_incremental():
    env = LineEnvelope(range(-5, 6))
    env.add(2, 1)
    assert env.query(3) == 7
    env.add(-1, 0)
    assert env.query(3) == -3 and env.query(-5) == -9


# -- static rank-1 LWS ----------------------------------------------------------------------

def test_static_rank1_zero_given_unit_slope():
    given = {i: 0 for i in range(1, 4)}
    b = {j: 10 * j - 7 for j in range(4, 8)}
    a = {i: 1 for i in given}
    assert solve_static_lws_rank1(given, b, a, b) == b


def test_static_rank1_flat_lines():
    given = {1: 5, 2: -3, 3: 8}
    a = {i: 0 for i in given}
    b = {j: j * j for j in range(4, 9)}
    assert set(solve_static_lws_rank1(given, b, a, b).values()) == {-3}


def test_static_rank1_random_64():
    rng = np.random.default_rng(64)
    N = 64
    a = {i: int(v) for i, v in enumerate(rng.integers(-50, 51, 2 * N), start=1)}
    b = {j: int(v) for j, v in enumerate(rng.integers(-50, 51, 2 * N), start=1)}
    given = {i: int(rng.integers(-1000, 1001)) for i in range(1, N + 1)}
    targets = range(N + 1, 2 * N + 1)
    want = {j: min(given[i] + a[i] * b[j] for i in given) for j in targets}
    assert solve_static_lws_rank1(given, targets, a, b) == want


def test_static_rank1_overlapping_items():
    rng = np.random.default_rng(3)
    w = CpTensor([rng.integers(-5, 6, (20, 1)), rng.integers(-5, 6, (20, 1))])
    given = {i: int(rng.integers(-9, 10)) for i in range(1, 15)}
    targets = range(5, 21)
    want = {j: min((given[i] + w.entry(i, j) for i in given if i < j), default=INF) for j in targets}
    assert solve_static_lws_rank1(given, targets, w) == want


def test_static_rank1_rejects_higher_rank():
    w = CpTensor([np.ones((3, 2), dtype=np.int64)] * 2)
    with pytest.raises(PreconditionError):
        solve_static_lws_rank1({1: 0}, [2], w)


# -- divide and conquer -------------------------------------------------------------------

def _same(a, b):
    return (a.data == b.data).all()


def test_dc_rank1_k1_n32():
    inst = random_rank1_kdlws(1, 32, 5)
    ref, _ = solve_kdlws_naive(inst)
    got, _ = solve_kdlws_dc(inst, StaticSolverKind.RANK1_ENVELOPE, return_table=True)
    assert _same(ref, got)


def test_dc_naive_static_dense_2d():
    inst = random_kdlws(2, 12, 9)
    ref, ans = solve_kdlws_naive(inst)
    got, ans2 = solve_kdlws_dc(inst, StaticSolverKind.NAIVE, return_table=True)
    assert _same(ref, got) and ans == ans2


def test_dc_all_zero_weights():
    z = DenseTensor(np.zeros((12, 12, 12), dtype=np.int64))
    assert solve_kdlws_dc(KdLwsInstance(2, 12, (z, z))) == 0


@pytest.mark.parametrize("kind", list(StaticSolverKind))
@pytest.mark.parametrize("cutoff", [1, 2, 5])
def test_dc_every_kind_on_compatible_instances(kind, cutoff):
    for seed in range(6):
        for k, n in [(1, 9), (2, 6), (3, 3)]:
            if kind is StaticSolverKind.RANK1_ENVELOPE:
                inst = random_rank1_kdlws(k, n, seed)
            elif kind is StaticSolverKind.SLICE_RANK1:
                inst = random_slicerank1_kdlws(k, n, seed)
            else:
                inst = random_cp_kdlws(k, n, 2, seed) if seed % 2 else random_kdlws(k, n, seed, inf_prob=0.2)
            ref, _ = solve_kdlws_naive(inst)
            got, _ = solve_kdlws_dc(inst, kind, cutoff=cutoff, return_table=True)
            assert _same(ref, got), (kind, cutoff, seed, k)


def test_dc_trace_seeds_match_definition():
    inst = random_kdlws(2, 5, 1)
    ref, _ = solve_kdlws_naive(inst)
    events = []
    solve_kdlws_dc(inst, trace=lambda *e: events.append(e))
    merges = [e for e in events if e[0] == "merge"]
    assert merges
    for _, alpha, mid, beta, seed in merges:
        # after a merge every cell in the right half holds a finite upper bound or inf
        for idx in Band(mid, beta, 2, 5):
            v = seed[tuple(i - 1 for i in idx)]
            assert v >= ref.data[tuple(i - 1 for i in idx)]


def test_dc_rank1_rejects_dense():
    with pytest.raises(PreconditionError):
        solve_kdlws_dc(random_kdlws(2, 4, 0), StaticSolverKind.RANK1_ENVELOPE)


# -- static hierarchy ----------------------------------------------------------------------

def _static(k, n, a, N, seed, cp=False):
    rng = np.random.default_rng(seed)
    base = random_cp_kdlws(k, n, 2, seed) if cp else random_kdlws(k, n, seed)
    given = {idx: int(rng.integers(-20, 21)) for idx in Band(a, a + N, k, n, strict=False)}
    return StaticKdInstance(base, a, N, given)


def test_hierarchy_matches_naive_on_100_instances():
    rng = np.random.default_rng(100)
    for seed in range(100):
        k = int(rng.integers(2, 4))
        n = int(rng.integers(1, 11 if k == 2 else 6))
        a = int(rng.integers(k, k * n + 1))
        N = int(rng.integers(1, n + 1))
        inst = _static(k, n, a, N, seed, cp=seed % 2 == 0)
        assert solve_static_kd_via_hierarchy(inst) == solve_static_kd(inst, StaticSolverKind.NAIVE)


def test_hierarchy_band_of_one():
    inst = _static(2, 6, 5, 1, 0)
    assert solve_static_kd_via_hierarchy(inst) == solve_static_kd(inst)


def test_hierarchy_all_zero():
    z = DenseTensor(np.zeros((4, 4, 4), dtype=np.int64))
    base = KdLwsInstance(2, 4, (z, z))
    inst = StaticKdInstance(base, 3, 2, {idx: 0 for idx in Band(3, 5, 2, 4)})
    assert set(solve_static_kd_via_hierarchy(inst).values()) <= {0, INF}
    assert all(v == 0 for idx, v in solve_static_kd_via_hierarchy(inst).items() if max(idx) > 1)


def test_hierarchy_needs_two_dimensions():
    with pytest.raises(PreconditionError):
        solve_static_kd_via_hierarchy(_static(1, 5, 1, 2, 0))


# -- compiled slice-rank-1 2D --------------------------------------------------------------

def test_slicerank1_arrival_fee_n10():
    c = np.random.default_rng(10).integers(0, 20, (10, 10))
    inst = encode_refuel_arrival_fee(2, 10, c)
    assert solve_2dlws_slicerank1(inst) == solve_kdlws_naive(inst)[1]


def test_slicerank1_zero():
    t = SliceTensor([SliceTerm(1, np.zeros(5, dtype=np.int64), DenseTensor(np.zeros((5, 5), dtype=np.int64)))])
    assert solve_2dlws_slicerank1(KdLwsInstance(2, 5, (t, t))) == 0


def test_slicerank1_mixed_orientations_100():
    rng = np.random.default_rng(16)
    for seed in range(100):
        n = int(rng.integers(1, 17))
        axes = tuple(int(v) for v in rng.integers(1, 4, size=2))
        inst = random_slicerank1_kdlws(2, n, seed, axes=axes)
        ref, _ = solve_kdlws_naive(inst)
        got, _ = solve_2dlws_slicerank1(inst, cutoff=int(rng.integers(1, 8)), return_table=True)
        assert _same(ref, got), (seed, axes)


@pytest.mark.parametrize("n", [50, 130, 200])
def test_slicerank1_bench_family_matches_compiled_naive(n):
    inst = bench_slicerank1_2d(n, n)
    assert solve_2dlws_slicerank1(inst) == solve_2dlws_slicerank1_naive_compiled(inst)


def test_slicerank1_large_values_fall_back_exactly():
    big = 2**25
    rng = np.random.default_rng(0)
    ws = [SliceTensor([SliceTerm(3, rng.integers(-big, big, 6), DenseTensor(rng.integers(-big, big, (6, 6))))])
          for _ in range(2)]
    inst = KdLwsInstance(2, 6, tuple(ws))
    assert not _headroom_ok(6, slicerank1_arrays(inst))
    assert solve_2dlws_slicerank1(inst) == solve_kdlws_naive(inst)[1]


def test_slicerank1_word_overflow_is_an_error():
    big = 2**40
    ws = [SliceTensor([SliceTerm(3, [big] * 3, DenseTensor(np.full((3, 3), big)))])] * 2
    with pytest.raises(OverflowError):
        solve_2dlws_slicerank1(KdLwsInstance(2, 3, tuple(ws)))


def test_slicerank1_rejects_other_shapes():
    with pytest.raises(PreconditionError):
        solve_2dlws_slicerank1(random_slicerank1_kdlws(3, 3, 0))
    two = SliceTensor([SliceTerm(1, [1, 1], DenseTensor([[1, 1], [1, 1]]))] * 2)
    with pytest.raises(PreconditionError):
        solve_2dlws_slicerank1(KdLwsInstance(2, 2, (two, two)))


# -- monotone split points -------------------------------------------------------------------

def test_knuth_bst_uniform():
    inst = encode_optimal_bst([1, 1, 1, 1])
    assert solve_pt_knuth(inst, exhaustive=True) == solve_pt_naive(inst)[1]


def test_knuth_three_nodes():
    inst = encode_optimal_bst([5])
    assert solve_pt_knuth(inst) == solve_pt_naive(inst)[1] == 5


def test_knuth_random_bst():
    rng = np.random.default_rng(12)
    for _ in range(50):
        p = rng.integers(0, 30, size=int(rng.integers(1, 13))).tolist()
        inst = encode_optimal_bst(p)
        assert solve_pt_knuth(inst) == solve_pt_naive(inst)[1] == oracles.brute_optimal_bst(p)


def test_knuth_rejects_split_dependent_weights():
    with pytest.raises(PreconditionError):
        solve_pt_knuth(encode_matrix_chain([10, 20, 30, 40]))
    assert check_knuth_preconditions(random_pt(6, 0)) is not None


def test_knuth_rejects_quadrangle_violation():
    n = 5
    B = np.zeros((n, n), dtype=np.int64)
    B[0, 4] = -100
    inst = PtInstance(n, SliceTensor([SliceTerm(3, np.ones(n, dtype=np.int64), DenseTensor(B))]))
    with pytest.raises(PreconditionError):
        solve_pt_knuth(inst, exhaustive=True)
