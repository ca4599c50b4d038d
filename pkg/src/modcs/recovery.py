"""Modified-CS (truncated l1) and Basis Pursuit solved as linear programs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from modcs import lp as _lp
from modcs.numkit import DimensionError, IndexSet, as_matrix, as_vector

DEFAULT_RECOVERY_TOL = 1e-6


class InfeasibleSystem(ValueError):
    """``A x = y`` has no solution."""


@dataclass(frozen=True, eq=False)
class RecoveryProblem:
    A: np.ndarray
    y: np.ndarray
    T: IndexSet

    def __post_init__(self):
        A = as_matrix(self.A)
        y = as_vector(self.y)
        if y.size != A.shape[0]:
            raise DimensionError(f"y has length {y.size}, A has {A.shape[0]} rows")
        if self.T.universe != A.shape[1]:
            raise DimensionError(f"known support universe {self.T.universe} != {A.shape[1]} columns")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "y", y)


def modified_cs_lp(p: RecoveryProblem) -> _lp.LinearProgram:
    """LP over ``(u, v) >= 0`` with ``x = u - v``; unit cost on coordinates outside T."""
    n = p.A.shape[1]
    weight = np.ones(n)
    weight[list(p.T.members)] = 0.0
    return _lp.LinearProgram.standard(
        np.concatenate([weight, weight]), np.hstack([p.A, -p.A]), p.y
    )


def solve_modified_cs(p: RecoveryProblem, feas_tol: float = _lp.DEFAULT_FEAS_TOL) -> np.ndarray:
    """Minimize ``sum(|x_k| for k not in T)`` subject to ``A x = y``.

    When the minimizer is not unique the vertex reached by the
    (deterministic) simplex is returned.
    """
    sol = _lp.solve(modified_cs_lp(p), feas_tol)
    if sol.status is _lp.LpStatus.INFEASIBLE:
        raise InfeasibleSystem("measurements are not in the column space of A")
    if sol.status is not _lp.LpStatus.OPTIMAL:
        # cannot happen: the objective is bounded below by zero
        raise _lp.NumericalFailure(f"unexpected LP status {sol.status.value}")
    n = p.A.shape[1]
    return sol.point[:n] - sol.point[n:]


def solve_basis_pursuit(A, y, feas_tol: float = _lp.DEFAULT_FEAS_TOL) -> np.ndarray:
    A = as_matrix(A)
    return solve_modified_cs(RecoveryProblem(A, y, IndexSet(A.shape[1])), feas_tol)


def recovered(xhat, xstar, tol: float = DEFAULT_RECOVERY_TOL) -> bool:
    xhat = np.asarray(xhat, dtype=np.float64)
    xstar = np.asarray(xstar, dtype=np.float64)
    if xhat.shape != xstar.shape:
        raise DimensionError(f"length mismatch: {xhat.shape} vs {xstar.shape}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    return bool(np.max(np.abs(xhat - xstar), initial=0.0) <= tol)


def truncated_l1(x, T: IndexSet) -> float:
    x = np.asarray(x, dtype=np.float64)
    mask = np.ones(x.size, dtype=bool)
    mask[list(T.members)] = False
    return float(np.abs(x[mask]).sum())
