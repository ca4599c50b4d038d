"""Exact-recovery certificate for modified-CS.

``x*`` is the unique minimizer of ``sum_{k not in T} |x_k|`` subject to
``A x = A x*`` if and only if

* ``A_T`` has full column rank, and
* for every subset ``I`` of the unknown support part ``delta``, every
  null-space direction ``d`` with ``sum_{k not in T} |d_k| = 1`` whose signs
  agree with ``x*`` on ``I`` and disagree (or vanish) on ``delta \\ I``
  puts strictly less than half of that mass on ``I``.

The second condition is checked with one LP per subset (maximize the mass on
``I``), so the cost is ``2 ** len(delta)`` LP solves.  The strict sign
constraints are relaxed to non-strict ones; a direction with ``d_k = 0`` for
some ``k`` in ``I`` is feasible for ``I - {k}`` with the same objective, so
enumerating all subsets makes the relaxation exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from modcs import lp as _lp
from modcs.numkit import IndexSet, SignPattern, as_matrix, as_vector, columns, rank
from modcs.recovery import DEFAULT_RECOVERY_TOL, RecoveryProblem, recovered, solve_modified_cs

DEFAULT_MARGIN_TOL = 1e-7
MAX_DELTA = 30


class EnumerationTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class SncInstance:
    A: np.ndarray
    T: IndexSet
    delta: IndexSet
    signs: SignPattern

    def __post_init__(self):
        A = as_matrix(self.A)
        n = A.shape[1]
        if self.T.universe != n or self.delta.universe != n:
            raise ValueError(f"index sets must live in [0, {n})")
        if not self.T.isdisjoint(self.delta):
            raise ValueError("known support and unknown support part overlap")
        if self.signs.support != self.delta:
            raise ValueError("sign pattern must be defined exactly on delta")
        object.__setattr__(self, "A", A)

    @classmethod
    def from_signal(cls, A, T: IndexSet, xstar) -> SncInstance:
        """Instance for a concrete signal: ``delta = supp(x*) \\ T``."""
        xstar = as_vector(xstar)
        delta = IndexSet(xstar.size, tuple(k for k in np.flatnonzero(xstar) if k not in T))
        signs = SignPattern(delta, tuple(int(np.sign(xstar[k])) for k in delta))
        return cls(A, T, delta, signs)


@dataclass(frozen=True)
class SncReport:
    recoverable: bool
    rank_ok: bool
    worst_subset: IndexSet | None
    worst_margin: float | None
    subsets_checked: int
    marginal: bool = False

    def to_json(self) -> dict:
        return {
            "recoverable": self.recoverable,
            "rank_ok": self.rank_ok,
            "worst_margin": self.worst_margin,
            "worst_subset": None if self.worst_subset is None else list(self.worst_subset),
            "subsets_checked": self.subsets_checked,
            "marginal": self.marginal,
        }


def _layout(inst: SncInstance, I: IndexSet) -> np.ndarray:
    """Matrix mapping LP variables to the direction ``d``.

    Variable order: one signed magnitude per member of delta, then a
    ``(u, v)`` pair per coordinate outside ``T`` and delta, then one free
    variable per member of ``T``.
    """
    n = inst.A.shape[1]
    in_I = set(I.members)
    sign = inst.signs.as_dict()
    rest = [k for k in inst.T.complement() if k not in sign]
    cols = []
    for k in inst.delta:
        cols.append((k, sign[k] if k in in_I else -sign[k]))
    for k in rest:
        cols.append((k, 1.0))
        cols.append((k, -1.0))
    for k in inst.T:
        cols.append((k, 1.0))
    M = np.zeros((n, len(cols)))
    for j, (k, s) in enumerate(cols):
        M[k, j] = s
    return M


def build_subset_lp(inst: SncInstance, I: IndexSet) -> _lp.LinearProgram:
    """LP maximizing the null-space mass on ``I`` (as a minimization of its negative)."""
    if not I.issubset(inst.delta):
        raise ValueError(f"{I.members} is not a subset of delta {inst.delta.members}")
    M = _layout(inst, I)
    nvars = M.shape[1]
    n_free = len(inst.T)
    n_signed = nvars - n_free
    normalization = np.zeros(nvars)
    normalization[:n_signed] = 1.0
    objective = np.zeros(nvars)
    delta_pos = {k: j for j, k in enumerate(inst.delta)}
    for k in I:
        objective[delta_pos[k]] = -1.0
    E = np.vstack([inst.A @ M, normalization])
    f = np.zeros(E.shape[0])
    f[-1] = 1.0
    return _lp.LinearProgram(objective, E, f, IndexSet(nvars, tuple(range(n_signed))))


def subset_direction(inst: SncInstance, I: IndexSet, point) -> np.ndarray:
    """Map a point of ``build_subset_lp(inst, I)`` back to the direction ``d``."""
    return _layout(inst, I) @ np.asarray(point, dtype=np.float64)


def subset_max(inst: SncInstance, I: IndexSet, feas_tol: float = _lp.DEFAULT_FEAS_TOL) -> float:
    """Largest mass on ``I``; an infeasible subset program contributes 0."""
    sol = _lp.solve(build_subset_lp(inst, I), feas_tol)
    if sol.status is _lp.LpStatus.INFEASIBLE:
        return 0.0
    if sol.status is not _lp.LpStatus.OPTIMAL:
        raise _lp.NumericalFailure(f"subset program reported {sol.status.value}")
    return -sol.value


def subsets(delta: IndexSet):
    """All subsets of ``delta``, ordered by bitmask over its sorted members."""
    members = delta.members
    for mask in range(1 << len(members)):
        yield IndexSet(delta.universe, tuple(k for b, k in enumerate(members) if mask >> b & 1))


def check_snc(inst: SncInstance, margin_tol: float = DEFAULT_MARGIN_TOL,
              feas_tol: float = _lp.DEFAULT_FEAS_TOL) -> SncReport:
    if margin_tol <= 0:
        raise ValueError("margin_tol must be positive")
    if len(inst.delta) > MAX_DELTA:
        raise EnumerationTooLarge(f"|delta| = {len(inst.delta)} exceeds {MAX_DELTA}")
    if rank(columns(inst.A, inst.T)) != len(inst.T):
        return SncReport(False, False, None, None, 0)

    worst_subset, worst_value, checked = None, -np.inf, 0
    for I in subsets(inst.delta):
        value = subset_max(inst, I, feas_tol)
        checked += 1
        if value > worst_value:
            worst_subset, worst_value = I, value
    worst_margin = 0.5 - worst_value
    return SncReport(
        recoverable=worst_margin > margin_tol,
        rank_ok=True,
        worst_subset=worst_subset,
        worst_margin=float(worst_margin),
        subsets_checked=checked,
        marginal=abs(worst_margin) <= margin_tol,
    )


def check_by_solving(A, T: IndexSet, delta: IndexSet, signs: SignPattern,
                     magnitudes=None, tol: float = DEFAULT_RECOVERY_TOL,
                     known_true: IndexSet | None = None,
                     feas_tol: float = _lp.DEFAULT_FEAS_TOL) -> bool:
    """Recover one concrete signal with the given sign pattern and compare.

    The signal is supported on ``known_true`` (default: all of ``T``) plus
    ``delta``; ``magnitudes`` lists one positive value per support member in
    increasing index order and defaults to all ones.  Entries on
    ``known_true`` are taken positive.
    """
    A = as_matrix(A)
    n = A.shape[1]
    known_true = T if known_true is None else known_true
    if not known_true.issubset(T):
        raise ValueError("known_true must be a subset of T")
    if not T.isdisjoint(delta) or signs.support != delta:
        raise ValueError("inconsistent support description")
    support = known_true.union(delta)
    mags = np.ones(len(support)) if magnitudes is None else as_vector(magnitudes)
    if mags.size != len(support):
        raise ValueError(f"{mags.size} magnitudes for a support of size {len(support)}")
    if np.any(mags <= 0):
        raise ValueError("magnitudes must be strictly positive")
    sign = signs.as_dict()
    xstar = np.zeros(n)
    for k, mag in zip(support, mags):
        xstar[k] = sign.get(k, 1) * mag
    xhat = solve_modified_cs(RecoveryProblem(A, A @ xstar, T), feas_tol)
    return recovered(xhat, xstar, tol)
