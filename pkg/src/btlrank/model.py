"""Core domain types: skill profiles, rankings, and the logistic link."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

# Absolute slack for gap/range checks; the generators emit exact values,
# so this only absorbs float noise.
GAP_TOL = 1e-12


def sigmoid(t):
    """Logistic link 1 / (1 + exp(-t)); saturates instead of overflowing."""
    return expit(t)


def sigmoid_prime(t):
    """Derivative of the logistic link, sigmoid(t) * sigmoid(-t). Even in t."""
    return expit(t) * expit(-t)


class SpaceKind(enum.Enum):
    """Which gap constraint a skill profile declares.

    STANDARD requires a gap between sorted positions k and k+1; ENLARGED
    only between k and k+2, leaving the (k+1)-th skill unconstrained
    inside the gap.
    """

    STANDARD = "standard"
    ENLARGED = "enlarged"


@dataclass(frozen=True, eq=False)
class SkillProfile:
    """Sorted (nonincreasing) skill vector with its gap/range metadata.

    ``delta`` is the declared separation between the top-k block and the
    rest, ``kappa`` the declared dynamic range (first minus last entry),
    both in natural-log units.  Construction only checks shapes and
    signs; the relational invariants are checked by
    :func:`validate_profile`, which treats violations as data rather
    than faults.
    """

    values: np.ndarray
    k: int
    delta: float
    kappa: float
    space_kind: SpaceKind = SpaceKind.STANDARD

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a nonempty 1-D vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if not 1 <= int(self.k) <= values.size:
            raise ValueError(f"k must be in 1..{values.size}, got {self.k}")
        if self.delta < 0 or self.kappa < 0:
            raise ValueError("delta and kappa must be nonnegative")

    @property
    def n(self) -> int:
        return self.values.size

    def __eq__(self, other):
        if not isinstance(other, SkillProfile):
            return NotImplemented
        return (
            np.array_equal(self.values, other.values)
            and self.k == other.k
            and self.delta == other.delta
            and self.kappa == other.kappa
            and self.space_kind is other.space_kind
        )


@dataclass(frozen=True, eq=False)
class Ranking:
    """A permutation of {1..n}; rank 1 is the best player."""

    ranks: np.ndarray

    def __post_init__(self):
        ranks = np.array(self.ranks, dtype=np.int64)
        if ranks.ndim != 1 or ranks.size == 0:
            raise ValueError("ranks must be a nonempty 1-D vector")
        n = ranks.size
        if not np.array_equal(np.sort(ranks), np.arange(1, n + 1)):
            raise ValueError("ranks must be a permutation of 1..n")
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)

    @classmethod
    def identity(cls, n: int) -> "Ranking":
        return cls(np.arange(1, n + 1))

    @property
    def n(self) -> int:
        return self.ranks.size

    def top_set(self, k: int) -> np.ndarray:
        """Boolean mask of the players ranked in the top k."""
        return self.ranks <= k

    def __eq__(self, other):
        if not isinstance(other, Ranking):
            return NotImplemented
        return np.array_equal(self.ranks, other.ranks)


@dataclass(frozen=True, eq=False)
class CenteredScores:
    """Score vector constrained to sum to (numerically) zero."""

    theta: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta, dtype=float)
        if theta.ndim != 1 or theta.size == 0:
            raise ValueError("theta must be a nonempty 1-D vector")
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta must be finite")
        if abs(theta.sum()) > _centering_tolerance(theta):
            raise ValueError("theta does not sum to zero; call center() first")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def n(self) -> int:
        return self.theta.size

    def __eq__(self, other):
        if not isinstance(other, CenteredScores):
            return NotImplemented
        return np.array_equal(self.theta, other.theta)


def _centering_tolerance(theta: np.ndarray) -> float:
    # floored at the smallest normal float so subnormal-scale vectors
    # do not demand sub-ulp cancellation
    scale = max(np.max(np.abs(theta), initial=0.0), np.finfo(float).tiny)
    return theta.size * np.finfo(float).eps * scale


def validate_profile(profile: SkillProfile) -> str | None:
    """Check a profile against its declared constraints.

    Returns None if every invariant holds, otherwise a short report
    naming the first violated constraint.  Violations are data, not
    faults; nothing is raised.
    """
    v = profile.values
    n, k = profile.n, profile.k

    diffs = v[:-1] - v[1:]
    if diffs.size and diffs.min() < -GAP_TOL:
        i = int(np.argmax(diffs < -GAP_TOL))
        return f"monotonicity: values[{i}] < values[{i + 1}]"

    gap_idx = k if profile.space_kind is SpaceKind.STANDARD else k + 1
    if gap_idx < n:  # constraint is vacuous when it points past the vector
        gap = v[k - 1] - v[gap_idx]
        if gap < profile.delta - GAP_TOL:
            return (
                f"gap: values[{k - 1}] - values[{gap_idx}] = {gap:.6g} "
                f"< delta = {profile.delta:.6g}"
            )

    spread = v[0] - v[-1]
    if spread > profile.kappa + GAP_TOL:
        return f"range: values[0] - values[-1] = {spread:.6g} > kappa = {profile.kappa:.6g}"

    if profile.delta > profile.kappa + GAP_TOL:
        return f"delta-kappa: delta = {profile.delta:.6g} > kappa = {profile.kappa:.6g}"

    return None


def center(theta) -> CenteredScores:
    """Subtract the mean so the vector sums to zero; order is unchanged.

    Idempotent: an input that already satisfies the centering tolerance
    is returned as-is.
    """
    theta = np.asarray(theta, dtype=float)
    if theta.size == 0:
        raise ValueError("cannot center an empty vector")
    if not np.all(np.isfinite(theta)):
        raise ValueError("cannot center a vector with non-finite entries")
    out = theta
    if abs(out.sum()) > _centering_tolerance(out):
        out = theta - theta.mean()
        for _ in range(6):  # fsum passes kill the rounding residue exactly
            if abs(out.sum()) <= _centering_tolerance(out):
                break
            out = out - math.fsum(out) / out.size
    return CenteredScores(out)


def ranking_from_scores(scores) -> Ranking:
    """Rank players by score, best first; ties go to the smaller index."""
    s = np.asarray(scores, dtype=float)
    if s.ndim != 1 or s.size == 0:
        raise ValueError("scores must be a nonempty 1-D vector")
    if np.isnan(s).any():
        raise ValueError("scores contain NaN")
    n = s.size
    # lexsort: last key is primary -> descending score, then ascending index
    order = np.lexsort((np.arange(n), -s))
    ranks = np.empty(n, dtype=np.int64)
    ranks[order] = np.arange(1, n + 1)
    return Ranking(ranks)
