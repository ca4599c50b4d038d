"""Dense linear algebra helpers and the index-set / sign-pattern types.

Matrices and vectors are plain ``numpy.ndarray`` objects of dtype float64;
``as_matrix`` and ``as_vector`` validate them at module boundaries.  All
indices are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

DEFAULT_PIVOT_TOL = 1e-10


class DimensionError(ValueError):
    """Operand shapes do not line up."""


def as_matrix(A) -> np.ndarray:
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {A.shape}")
    if A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"matrix must have at least one row and column, got {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def as_vector(x) -> np.ndarray:
    x = np.array(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionError(f"expected a 1-d vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("vector entries must be finite")
    return x


@dataclass(frozen=True)
class IndexSet:
    """Sorted, duplicate-free subset of ``range(universe)``."""

    universe: int
    members: tuple[int, ...] = ()

    def __post_init__(self):
        if self.universe < 1:
            raise ValueError("universe must be positive")
        members = tuple(int(k) for k in self.members)
        if any(b <= a for a, b in zip(members, members[1:])):
            raise ValueError(f"members must be strictly increasing: {members}")
        if members and (members[0] < 0 or members[-1] >= self.universe):
            raise ValueError(f"members must lie in [0, {self.universe})")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, universe: int, members: Iterable[int]) -> IndexSet:
        """Build from an arbitrary iterable; duplicates are rejected."""
        members = list(members)
        ordered = sorted(set(int(k) for k in members))
        if len(ordered) != len(members):
            raise ValueError(f"duplicate indices in {members}")
        return cls(universe, tuple(ordered))

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, k) -> bool:
        return k in self.members

    def complement(self) -> IndexSet:
        present = set(self.members)
        return IndexSet(self.universe, tuple(k for k in range(self.universe) if k not in present))

    def union(self, other: IndexSet) -> IndexSet:
        self._same_universe(other)
        return IndexSet(self.universe, tuple(sorted(set(self.members) | set(other.members))))

    def difference(self, other: IndexSet) -> IndexSet:
        self._same_universe(other)
        drop = set(other.members)
        return IndexSet(self.universe, tuple(k for k in self.members if k not in drop))

    def intersection(self, other: IndexSet) -> IndexSet:
        self._same_universe(other)
        keep = set(other.members)
        return IndexSet(self.universe, tuple(k for k in self.members if k in keep))

    def issubset(self, other: IndexSet) -> bool:
        return set(self.members) <= set(other.members)

    def isdisjoint(self, other: IndexSet) -> bool:
        return not set(self.members) & set(other.members)

    def _same_universe(self, other: IndexSet) -> None:
        if other.universe != self.universe:
            raise ValueError(f"universe mismatch: {self.universe} vs {other.universe}")


@dataclass(frozen=True)
class SignPattern:
    """One sign in {+1, -1} per member of ``support``, in support order."""

    support: IndexSet
    signs: tuple[int, ...] = ()

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != len(self.support):
            raise ValueError(f"{len(signs)} signs for a support of size {len(self.support)}")
        if any(s not in (1, -1) for s in signs):
            raise ValueError(f"signs must be +1 or -1, got {signs}")
        object.__setattr__(self, "signs", signs)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.support.members, self.signs))

    def negated(self) -> SignPattern:
        return SignPattern(self.support, tuple(-s for s in self.signs))


def mat_vec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1 or A.ndim != 2 or x.shape[0] != A.shape[1]:
        raise DimensionError(f"cannot multiply {A.shape} matrix by vector of shape {x.shape}")
    return A @ x


def columns(A: np.ndarray, S: IndexSet | Sequence[int]) -> np.ndarray:
    """Column submatrix ``A[:, S]``; an empty selection gives an m x 0 matrix."""
    A = np.asarray(A, dtype=np.float64)
    if isinstance(S, IndexSet):
        if S.universe != A.shape[1]:
            raise DimensionError(f"index universe {S.universe} != matrix columns {A.shape[1]}")
        idx = list(S.members)
    else:
        idx = [int(k) for k in S]
    return A[:, idx].reshape(A.shape[0], len(idx))


def rank(A: np.ndarray, pivot_tol: float = DEFAULT_PIVOT_TOL) -> int:
    """Numerical rank by Gaussian elimination with partial pivoting.

    A pivot counts when its magnitude exceeds ``pivot_tol`` times the largest
    initial entry magnitude (or times 1 for the zero matrix).
    """
    if pivot_tol <= 0:
        raise ValueError("pivot_tol must be positive")
    W = np.array(A, dtype=np.float64, copy=True)
    if W.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {W.shape}")
    m, n = W.shape
    if m == 0 or n == 0:
        return 0
    scale = float(np.max(np.abs(W)))
    threshold = pivot_tol * (scale if scale > 0 else 1.0)
    r = 0
    for j in range(n):
        if r == m:
            break
        p = r + int(np.argmax(np.abs(W[r:, j])))
        if abs(W[p, j]) <= threshold:
            continue
        if p != r:
            W[[r, p]] = W[[p, r]]
        W[r + 1:, j:] -= np.outer(W[r + 1:, j] / W[r, j], W[r, j:])
        r += 1
    return r


@dataclass(frozen=True)
class SeededStream:
    """Counter-based random stream addressed by ``(seed, key path)``.

    Every stream maps to a Philox-4x32 generator keyed by
    ``SeedSequence(seed, spawn_key=path)``.  Child streams extend the path,
    so draw ``k`` of a computation can be regenerated on its own, in any
    order, without touching the draws before it.
    """

    seed: int
    path: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")

    def child(self, *keys: int) -> SeededStream:
        return SeededStream(self.seed, self.path + tuple(int(k) for k in keys))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(int(self.seed), spawn_key=self.path)
        return np.random.Generator(np.random.Philox(ss))


def as_generator(rng) -> np.random.Generator:
    if isinstance(rng, SeededStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise TypeError(f"expected SeededStream or numpy Generator, got {type(rng).__name__}")
