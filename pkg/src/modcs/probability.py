"""Recovery probability of a fixed matrix, exactly and by Monte Carlo.

The sample space ``Z`` holds one *quad* per combination of

* support ``N`` (size ``ell``),
* correctly known part ``S`` of ``N`` (size ``p2 = p - p1``),
* wrongly known indices ``H`` outside ``N`` (size ``p1``),
* sign pattern on ``N \\ S``.

Every quad carries equal weight, so the nested average over supports, known
parts, error sets and sign patterns collapses to ``recoverable / |Z|``.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator

import numpy as np

from modcs.numkit import IndexSet, SeededStream, SignPattern, as_generator, as_matrix
from modcs.snc import DEFAULT_MARGIN_TOL, SncInstance, check_by_solving, check_snc

DEFAULT_SPACE_CAP = 10**8
DEFAULT_ALPHA = 0.01
SNC_AUTO_LIMIT = 4096

# sub-stream tag for Monte Carlo quad draws under a master seed
QUAD_STREAM = 1


class SpaceTooLarge(ValueError):
    pass


class CheckerKind(str, Enum):
    SNC = "snc"
    DIRECT = "solve"

    @classmethod
    def auto(cls, scenario: Scenario) -> CheckerKind:
        return cls.SNC if 2 ** scenario.unknown <= SNC_AUTO_LIMIT else cls.DIRECT


@dataclass(frozen=True)
class Scenario:
    n: int
    ell: int
    p: int
    p1: int

    def __post_init__(self):
        for violated, ok in [
            ("ell >= 1", self.ell >= 1),
            ("0 <= p1", 0 <= self.p1),
            ("p1 <= p", self.p1 <= self.p),
            ("p2 <= ell (p - p1 <= ell)", self.p - self.p1 <= self.ell),
            ("ell <= n", self.ell <= self.n),
            ("p1 <= n - ell", self.p1 <= self.n - self.ell),
        ]:
            if not ok:
                raise ValueError(f"invalid scenario {self}: requires {violated}")

    @property
    def p2(self) -> int:
        return self.p - self.p1

    @property
    def unknown(self) -> int:
        """Size of the unknown support part, ``ell - p2``."""
        return self.ell - self.p2


@dataclass(frozen=True)
class Quad:
    support_N: IndexSet
    known_true_S: IndexSet
    errors_H: IndexSet
    pattern_t: SignPattern

    @property
    def T(self) -> IndexSet:
        return self.known_true_S.union(self.errors_H)

    @property
    def delta(self) -> IndexSet:
        return self.support_N.difference(self.known_true_S)

    def snc_instance(self, A) -> SncInstance:
        return SncInstance(A, self.T, self.delta, self.pattern_t)


@dataclass(frozen=True)
class ProbabilityEstimate:
    value: float
    method: str
    recoverable_count: int
    total_count: int
    hoeffding_halfwidth: float | None = None
    seed: int | None = None
    checker: str | None = None

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "method": self.method,
            "recoverable_count": self.recoverable_count,
            "total_count": self.total_count,
            "hoeffding_halfwidth": self.hoeffding_halfwidth,
            "seed": self.seed,
            "checker": self.checker,
        }


def quad_space_size(s: Scenario) -> int:
    return (math.comb(s.n, s.ell) * math.comb(s.ell, s.p2)
            * math.comb(s.n - s.ell, s.p1) * 2 ** s.unknown)


def enumerate_quads(s: Scenario, cap: int = DEFAULT_SPACE_CAP) -> Iterator[Quad]:
    """Every element of the quad space once, in lexicographic order.

    Supports vary slowest, then known parts, then error sets; sign patterns
    run as binary counters with bit ``b`` (of the b-th unknown index) set
    meaning a negative sign.
    """
    size = quad_space_size(s)
    if size > cap:
        raise SpaceTooLarge(f"quad space has {size} elements, cap is {cap}")
    n = s.n
    for N in itertools.combinations(range(n), s.ell):
        outside = [k for k in range(n) if k not in N]
        N_set = IndexSet(n, N)
        for S in itertools.combinations(N, s.p2):
            S_set = IndexSet(n, S)
            delta = N_set.difference(S_set)
            for H in itertools.combinations(outside, s.p1):
                H_set = IndexSet(n, H)
                for bits in range(1 << s.unknown):
                    signs = tuple(-1 if bits >> b & 1 else 1 for b in range(s.unknown))
                    yield Quad(N_set, S_set, H_set, SignPattern(delta, signs))


def _partial_shuffle(pool: list[int], k: int, rng: np.random.Generator) -> list[int]:
    """First ``k`` entries of a Fisher-Yates shuffle of ``pool``."""
    pool = list(pool)
    for i in range(k):
        j = i + int(rng.integers(len(pool) - i))
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def sample_quad(s: Scenario, rng) -> Quad:
    """Uniform draw from the quad space."""
    gen = as_generator(rng)
    n = s.n
    N = sorted(_partial_shuffle(list(range(n)), s.ell, gen))
    S = sorted(_partial_shuffle(N, s.p2, gen))
    outside = [k for k in range(n) if k not in set(N)]
    H = sorted(_partial_shuffle(outside, s.p1, gen))
    N_set, S_set = IndexSet(n, tuple(N)), IndexSet(n, tuple(S))
    delta = N_set.difference(S_set)
    signs = tuple(int(v) for v in gen.choice(np.array([1, -1]), size=len(delta)))
    return Quad(N_set, S_set, IndexSet(n, tuple(H)), SignPattern(delta, signs))


def quad_checker(A, checker: CheckerKind, margin_tol: float = DEFAULT_MARGIN_TOL,
                 ) -> Callable[[Quad], bool]:
    A = as_matrix(A)
    if checker is CheckerKind.SNC:
        # the certificate sees only (T, delta, signs); quads differing in how
        # T splits into S and H share one verdict
        memo: dict[tuple, bool] = {}

        def check(q: Quad) -> bool:
            key = (q.T.members, q.delta.members, q.pattern_t.signs)
            if key not in memo:
                memo[key] = check_snc(q.snc_instance(A), margin_tol).recoverable
            return memo[key]

        return check
    if checker is CheckerKind.DIRECT:
        return lambda q: check_by_solving(A, q.T, q.delta, q.pattern_t, known_true=q.known_true_S)
    raise ValueError(f"unknown checker {checker!r}")


def _resolve_checker(checker, s: Scenario) -> CheckerKind:
    if checker is None or checker == "auto":
        return CheckerKind.auto(s)
    return CheckerKind(checker)


def _check_matrix(A, s: Scenario) -> np.ndarray:
    A = as_matrix(A)
    if A.shape[1] != s.n:
        raise ValueError(f"matrix has {A.shape[1]} columns, scenario has n = {s.n}")
    return A


def exact_probability(A, s: Scenario, checker: CheckerKind | str | None = None,
                      margin_tol: float = DEFAULT_MARGIN_TOL,
                      cap: int = DEFAULT_SPACE_CAP) -> ProbabilityEstimate:
    """Exhaust the quad space and count recoverable quads."""
    A = _check_matrix(A, s)
    kind = _resolve_checker(checker, s)
    total = quad_space_size(s)
    check = quad_checker(A, kind, margin_tol)
    hits = sum(1 for q in enumerate_quads(s, cap) if check(q))
    return ProbabilityEstimate(hits / total, "exact", hits, total, checker=kind.value)


def hoeffding_halfwidth(M: int, alpha: float = DEFAULT_ALPHA) -> float:
    return math.sqrt(math.log(2.0 / alpha) / (2.0 * M))


def mc_verdicts(A, s: Scenario, M: int, seed: int,
                checker: CheckerKind | str | None = None,
                margin_tol: float = DEFAULT_MARGIN_TOL,
                deadline: float | None = None) -> np.ndarray:
    """Recoverability of draws ``0..M-1``; draw ``k`` uses sub-stream ``(seed, QUAD_STREAM, k)``.

    Stops early (returning a shorter array) once ``time.monotonic()`` passes
    ``deadline``.
    """
    A = _check_matrix(A, s)
    check = quad_checker(A, _resolve_checker(checker, s), margin_tol)
    root = SeededStream(seed).child(QUAD_STREAM)
    out = np.zeros(M, dtype=bool)
    for k in range(M):
        if deadline is not None and time.monotonic() > deadline:
            return out[:k]
        out[k] = check(sample_quad(s, root.child(k)))
    return out


def mc_probability(A, s: Scenario, M: int, seed: int,
                   checker: CheckerKind | str | None = None,
                   margin_tol: float = DEFAULT_MARGIN_TOL,
                   alpha: float = DEFAULT_ALPHA) -> ProbabilityEstimate:
    """Estimate the recovery probability as ``K / M`` over uniform quad draws."""
    if M < 1:
        raise ValueError("M must be at least 1")
    kind = _resolve_checker(checker, s)
    hits = int(mc_verdicts(A, s, M, seed, kind, margin_tol).sum())
    return ProbabilityEstimate(hits / M, "monte_carlo", hits, M,
                               hoeffding_halfwidth(M, alpha), int(seed), kind.value)


__all__ = [
    "CheckerKind",
    "ProbabilityEstimate",
    "Quad",
    "Scenario",
    "SpaceTooLarge",
    "enumerate_quads",
    "exact_probability",
    "hoeffding_halfwidth",
    "mc_probability",
    "mc_verdicts",
    "quad_checker",
    "quad_space_size",
    "sample_quad",
]

