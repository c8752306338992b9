"""Least-weight-subsequence recurrences in one and more dimensions.

Modules
    tensors        structured cost tensors (dense, CP, slice)
    dp_core        reference dynamic programs and instance types
    fast_solvers   divide and conquer with rank-1 / slice-rank-1 static steps
    reductions     hard problems encoded as LWS instances, plus the CRR pipeline
    problems       application encoders (refuelling, boxes, matrix chains, BSTs)
    oracles        brute force ground truth
"""
from .tensors import (INF, BudgetError, CpTensor, DenseTensor, SliceTensor, SliceTerm, check_identity,
                      intro_identity, refuel_identity)
from .dp_core import (DpTable, Interval2dInstance, KdLwsInstance, LwsInstance, PtInstance, StaticKdInstance,
                      solve_interval_2dlws_naive, solve_kdlws_naive, solve_lws_naive, solve_pt_naive,
                      solve_static_kdlws_naive)
from .fast_solvers import (PreconditionError, StaticSolverKind, solve_2dlws_slicerank1, solve_kdlws_dc,
                           solve_pt_knuth, solve_static_kd, solve_static_lws_rank1)

__version__ = "0.1.0"
