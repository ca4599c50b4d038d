"""Dense linear programming: two-phase simplex and a vertex-enumeration oracle.

Problems are stated as

    minimize  c . z   subject to  E z = f,  z_j >= 0 for j in ``nonneg``

with every other variable free.  ``solve`` converts to standard form (each
free variable becomes a nonnegative pair), then runs a dense tableau simplex
with most-negative pricing and Bland's smallest-index rule on degenerate
stretches, so it always terminates.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.linalg.blas import dger

from modcs.numkit import IndexSet

DEFAULT_FEAS_TOL = 1e-9
PIVOT_TOL = 1e-9
COST_TOL = 1e-10
DEGENERATE_SWITCH = 20
MAX_ORACLE_VARS = 24
MAX_ORACLE_ROWS = 12


class LpError(RuntimeError):
    pass


class MaxIterationsExceeded(LpError):
    pass


class NumericalFailure(LpError):
    pass


class InstanceTooLarge(LpError):
    pass


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearProgram:
    objective: np.ndarray
    eq_lhs: np.ndarray
    eq_rhs: np.ndarray
    nonneg: IndexSet

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=np.float64).reshape(-1)
        E = np.asarray(self.eq_lhs, dtype=np.float64)
        if E.ndim == 1 and E.size == 0:
            E = E.reshape(0, c.size)
        f = np.asarray(self.eq_rhs, dtype=np.float64).reshape(-1)
        if E.ndim != 2 or E.shape[1] != c.size:
            raise ValueError(f"constraint matrix {E.shape} does not match {c.size} variables")
        if f.size != E.shape[0]:
            raise ValueError(f"{f.size} right-hand sides for {E.shape[0]} rows")
        if c.size < 1:
            raise ValueError("need at least one variable")
        if self.nonneg.universe != c.size:
            raise ValueError("nonneg index universe must equal the variable count")
        for arr in (c, E, f):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP data must be finite")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "eq_lhs", E)
        object.__setattr__(self, "eq_rhs", f)

    @classmethod
    def standard(cls, objective, eq_lhs, eq_rhs) -> LinearProgram:
        """All variables nonnegative."""
        c = np.asarray(objective, dtype=np.float64).reshape(-1)
        return cls(c, eq_lhs, eq_rhs, IndexSet(c.size, tuple(range(c.size))))

    @property
    def num_vars(self) -> int:
        return self.objective.size

    @property
    def num_rows(self) -> int:
        return self.eq_lhs.shape[0]

    def with_equality(self, row, rhs: float) -> LinearProgram:
        """Copy with one extra equality row appended."""
        row = np.asarray(row, dtype=np.float64).reshape(1, -1)
        return LinearProgram(
            self.objective,
            np.vstack([self.eq_lhs, row]),
            np.append(self.eq_rhs, rhs),
            self.nonneg,
        )


@dataclass(frozen=True, eq=False)
class LpSolution:
    status: LpStatus
    value: float | None = None
    point: np.ndarray | None = None
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass
class _StandardForm:
    c: np.ndarray
    E: np.ndarray
    f: np.ndarray
    pos: np.ndarray  # standard column carrying +z_j
    neg: np.ndarray  # standard column carrying -z_j, or -1
    num_vars: int = field(default=0)

    def recover(self, z: np.ndarray) -> np.ndarray:
        x = z[self.pos].copy()
        free = self.neg >= 0
        x[free] -= z[self.neg[free]]
        return x


def _standard_form(lp: LinearProgram) -> _StandardForm:
    n = lp.num_vars
    is_nonneg = np.zeros(n, dtype=bool)
    is_nonneg[list(lp.nonneg.members)] = True
    pos = np.arange(n)
    neg = np.full(n, -1)
    free = np.flatnonzero(~is_nonneg)
    neg[free] = n + np.arange(free.size)
    E = np.hstack([lp.eq_lhs, -lp.eq_lhs[:, free]])
    c = np.concatenate([lp.objective, -lp.objective[free]])
    return _StandardForm(c, E, lp.eq_rhs.copy(), pos, neg, n)


def _pivot(T: np.ndarray, i: int, j: int) -> None:
    # T is C-contiguous, so T.T is a Fortran view that dger updates in place
    row = T[i] / T[i, j]
    col = T[:, j].copy()
    dger(-1.0, row, col, a=T.T, overwrite_a=1)
    T[i] = row


def _iterate(T, basis, allowed, state, max_iter):
    """Simplex iterations on tableau ``T`` (last row = reduced costs, last column = rhs).

    Entering columns are priced by most negative reduced cost.  After
    ``DEGENERATE_SWITCH`` consecutive degenerate pivots the smallest-index
    (Bland) rule takes over until the objective moves again, which rules out
    cycling.
    """
    r = T.shape[0] - 1
    while True:
        d = T[-1, :-1]
        cand = np.flatnonzero((d < -COST_TOL) & allowed)
        if cand.size == 0:
            return LpStatus.OPTIMAL
        if state["degenerate_run"] >= DEGENERATE_SWITCH:
            j = int(cand[0])
        else:
            j = int(cand[np.argmin(d[cand])])
        col = T[:r, j]
        mask = col > PIVOT_TOL
        if not mask.any():
            return LpStatus.UNBOUNDED
        rows = np.flatnonzero(mask)
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * (1.0 + abs(best))]
        i = int(ties[np.argmin(basis[ties])])
        if state["iterations"] >= max_iter:
            raise MaxIterationsExceeded(f"simplex exceeded {max_iter} iterations")
        _pivot(T, i, j)
        basis[i] = j
        # roundoff below zero in the rhs breaks the ratio test and can cycle
        np.maximum(T[:r, -1], 0.0, out=T[:r, -1])
        state["iterations"] += 1
        state["degenerate_run"] = state["degenerate_run"] + 1 if best <= 0.0 else 0


def solve(lp: LinearProgram, feas_tol: float = DEFAULT_FEAS_TOL,
          max_iter: int | None = None) -> LpSolution:
    """Solve ``lp`` by the two-phase simplex method.

    Raises ``MaxIterationsExceeded`` when the iteration cap (default
    ``50 * (rows + cols)`` of the standard form) is hit and
    ``NumericalFailure`` when the final basis does not reproduce a feasible
    point within ``feas_tol``.
    """
    if feas_tol <= 0:
        raise ValueError("feas_tol must be positive")
    sf = _standard_form(lp)
    E, f = sf.E.copy(), sf.f.copy()
    r, N = E.shape
    if max_iter is None:
        max_iter = 50 * (r + N)

    flip = f < 0
    E[flip] *= -1
    f[flip] *= -1

    # phase 1: artificial identity basis, minimize the artificial sum
    T = np.zeros((r + 1, N + r + 1))
    T[:r, :N] = E
    T[:r, N:N + r] = np.eye(r)
    T[:r, -1] = f
    T[-1, :N] = -E.sum(axis=0)
    T[-1, -1] = -f.sum()
    basis = np.arange(N, N + r)
    allowed = np.zeros(N + r, dtype=bool)
    allowed[:N] = True
    state = {"iterations": 0, "degenerate_run": 0}
    _iterate(T, basis, allowed, state, max_iter)
    if -T[-1, -1] > feas_tol:
        return LpSolution(LpStatus.INFEASIBLE, iterations=state["iterations"])

    # drive remaining artificials out of the basis, dropping redundant rows
    keep = []
    for i in range(r):
        if basis[i] >= N:
            row = np.abs(T[i, :N])
            j = int(np.argmax(row)) if N else -1
            if N and row[j] > PIVOT_TOL:
                _pivot(T, i, j)
                basis[i] = j
            else:
                continue
        keep.append(i)
    T = np.ascontiguousarray(T[keep + [r]][:, list(range(N)) + [N + r]])
    basis = basis[keep]
    r2 = len(keep)

    # phase 2 cost row from the original objective
    cB = sf.c[basis]
    T[-1, :N] = sf.c - cB @ T[:r2, :N]
    T[-1, -1] = -cB @ T[:r2, -1]
    status = _iterate(T, basis, np.ones(N, dtype=bool), state, max_iter)
    if status is LpStatus.UNBOUNDED:
        return LpSolution(LpStatus.UNBOUNDED, iterations=state["iterations"])

    z = np.zeros(N)
    z[basis] = T[:r2, -1]
    if r2:
        # recompute the basic solution from the original data to shed tableau drift
        zb, *_ = np.linalg.lstsq(sf.E[:, basis], sf.f, rcond=None)
        z[:] = 0.0
        z[basis] = zb
    if np.any(z < -feas_tol) or (r and np.max(np.abs(sf.E @ z - sf.f)) > feas_tol):
        raise NumericalFailure("final basis does not yield a feasible point")
    z = np.maximum(z, 0.0)
    x = sf.recover(z)
    return LpSolution(LpStatus.OPTIMAL, float(lp.objective @ x), x, state["iterations"])


def _independent_rows(E: np.ndarray, f: np.ndarray, tol: float):
    """Greedy maximal set of linearly independent rows; None if inconsistent."""
    keep: list[int] = []
    for i in range(E.shape[0]):
        trial = keep + [i]
        if np.linalg.matrix_rank(E[trial], tol=tol) == len(trial):
            keep.append(i)
    if keep:
        sol, *_ = np.linalg.lstsq(E[keep], f[keep], rcond=None)
        if np.max(np.abs(E @ sol - f)) > 1e3 * tol:
            return None
    elif np.any(np.abs(f) > tol):
        return None
    return keep


def enumerate_optimal_vertices(lp: LinearProgram, feas_tol: float = DEFAULT_FEAS_TOL,
                               chunk: int = 20000) -> list[np.ndarray]:
    """All optimal basic feasible solutions, found by brute force over bases.

    Intended as an independent oracle for tiny instances: at most 24
    standard-form variables and 12 rows.  Points are returned in the
    original variable space, deduplicated in the infinity norm.  The LP must
    be bounded; an unbounded LP yields the best vertex, not a ray.
    """
    sf = _standard_form(lp)
    r, N = sf.E.shape
    if N > MAX_ORACLE_VARS or r > MAX_ORACLE_ROWS:
        raise InstanceTooLarge(f"oracle guard: {N} vars x {r} rows")
    keep = _independent_rows(sf.E, sf.f, 1e-10)
    if keep is None:
        return []
    E, f = sf.E[keep], sf.f[keep]
    k = len(keep)
    if k == 0:
        # only the origin of the standard form is a vertex
        candidates = [np.zeros(N)]
    else:
        candidates = []
        combos = itertools.combinations(range(N), k)
        while True:
            block = np.array(list(itertools.islice(combos, chunk)), dtype=np.intp)
            if block.size == 0:
                break
            B = E[:, block].transpose(1, 0, 2)  # (batch, k, k)
            sv = np.linalg.svd(B, compute_uv=False)
            ok = sv[:, -1] > 1e-10 * np.maximum(sv[:, 0], 1.0)
            if not ok.any():
                continue
            block, B = block[ok], B[ok]
            zb = np.linalg.solve(B, np.broadcast_to(f, (B.shape[0], k))[..., None])[..., 0]
            feasible = np.all(zb >= -feas_tol, axis=1)
            for cols, vals in zip(block[feasible], zb[feasible]):
                z = np.zeros(N)
                z[cols] = np.maximum(vals, 0.0)
                candidates.append(z)
    if not candidates:
        return []
    Z = np.array(candidates)
    Z = Z[np.max(np.abs(Z @ sf.E.T - sf.f), axis=1) <= 1e3 * feas_tol] if r else Z
    if Z.size == 0:
        return []
    values = Z @ sf.c
    best = values.min()
    X = [sf.recover(z) for z in Z[values <= best + feas_tol]]
    unique: list[np.ndarray] = []
    for x in X:
        if all(np.max(np.abs(x - u)) > feas_tol for u in unique):
            unique.append(x)
    return unique
