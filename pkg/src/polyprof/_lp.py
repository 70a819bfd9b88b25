"""Thin HiGHS wrapper for the small dense LPs solved thousands of times per profile.

``scipy.optimize.linprog`` drives the same solver but spends most of its time
validating arguments; calling highspy directly is about 3x faster here.
"""

from __future__ import annotations

from enum import Enum

import highspy
import numpy as np

INF = highspy.kHighsInf
_STATUS = highspy.HighsModelStatus


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    FAILED = "failed"


def _model(c, A, ub, lower, upper) -> highspy.HighsLp:
    m, n = A.shape
    lp = highspy.HighsLp()
    lp.num_col_ = n
    lp.num_row_ = m
    lp.col_cost_ = np.asarray(c, dtype=float)
    lp.col_lower_ = np.asarray(lower, dtype=float)
    lp.col_upper_ = np.asarray(upper, dtype=float)
    lp.row_lower_ = np.full(m, -INF)
    lp.row_upper_ = np.asarray(ub, dtype=float)
    mat = lp.a_matrix_
    mat.format_ = highspy.MatrixFormat.kRowwise
    mat.num_col_ = n
    mat.num_row_ = m
    mat.start_ = np.arange(0, m * n + 1, n, dtype=np.int32)
    mat.index_ = np.tile(np.arange(n, dtype=np.int32), m)
    mat.value_ = np.ascontiguousarray(A, dtype=float).ravel()
    return lp


def _solver(presolve: bool = True) -> highspy.Highs:
    h = highspy.Highs()
    h.setOptionValue("output_flag", False)
    h.setOptionValue("primal_feasibility_tolerance", 1e-10)
    h.setOptionValue("dual_feasibility_tolerance", 1e-10)
    h.setOptionValue("random_seed", 0)
    if not presolve:
        h.setOptionValue("presolve", "off")
    return h


def minimize(c, A, ub, lower, upper) -> tuple[LPStatus, np.ndarray | None, float]:
    """``min c.x  s.t.  A x <= ub,  lower <= x <= upper`` (dense A)."""
    A = np.asarray(A, dtype=float)
    for presolve in (True, False):
        h = _solver(presolve)
        h.passModel(_model(c, A, ub, lower, upper))
        h.run()
        st = h.getModelStatus()
        if st == _STATUS.kOptimal:
            x = np.array(h.getSolution().col_value, dtype=float)
            return LPStatus.OPTIMAL, x, float(h.getInfo().objective_function_value)
        if st == _STATUS.kInfeasible:
            return LPStatus.INFEASIBLE, None, np.inf
        if st == _STATUS.kUnbounded:
            return LPStatus.UNBOUNDED, None, -np.inf
        # kUnboundedOrInfeasible comes out of presolve; the plain simplex run decides it
    return LPStatus.FAILED, None, np.nan
