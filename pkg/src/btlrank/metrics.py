"""Losses and recovery indicators comparing estimates to the truth."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import CenteredScores, Ranking, SkillProfile, center


def _check_pair(r_hat: Ranking, r_star: Ranking) -> int:
    if r_hat.n != r_star.n:
        raise ValueError(f"rankings differ in length: {r_hat.n} vs {r_star.n}")
    return r_hat.n


def hamming_topk(r_hat: Ranking, r_star: Ranking, k: int) -> float:
    """Normalized Hamming top-k loss: |top-k set symmetric difference| / (2k).

    Zero exactly when the two top-k sets coincide; symmetric in its
    ranking arguments and insensitive to order within the sets.
    """
    n = _check_pair(r_hat, r_star)
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    a = r_hat.top_set(k)
    b = r_star.top_set(k)
    return float(np.sum(a != b)) / (2 * k)


def exact_recovery(r_hat: Ranking, r_star: Ranking, k: int) -> bool:
    """True iff the estimated and true top-k sets coincide."""
    return hamming_topk(r_hat, r_star, k) == 0.0


def _count_inversions(seq) -> int:
    def rec(a):
        if len(a) < 2:
            return a, 0
        mid = len(a) // 2
        left, cl = rec(a[:mid])
        right, cr = rec(a[mid:])
        merged = []
        count = cl + cr
        i = j = 0
        while i < len(left) and j < len(right):
            if left[i] <= right[j]:
                merged.append(left[i])
                i += 1
            else:
                merged.append(right[j])
                j += 1
                count += len(left) - i
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return rec(list(seq))[1]


def kendall_tau(r_hat: Ranking, r_star: Ranking) -> int:
    """Number of discordant pairs between the two rankings.

    Counted exactly by a merge sort: order the players by the true
    ranking and count inversions of the estimated ranks.  Zero iff the
    rankings are identical.
    """
    _check_pair(r_hat, r_star)
    order = np.argsort(r_star.ranks, kind="stable")
    return _count_inversions(r_hat.ranks[order])


def estimation_errors(
    theta_hat: CenteredScores, profile: SkillProfile, r_star: Ranking
) -> tuple[float, float]:
    """Squared l2 and squared l-infinity error of the fitted scores.

    The truth is the profile read off at each player's true rank,
    centered to match theta_hat's identifiability constraint.
    """
    if theta_hat.n != profile.n or theta_hat.n != r_star.n:
        raise ValueError("theta_hat, profile, and r_star must agree in length")
    truth = center(profile.values[r_star.ranks - 1]).theta
    diff = theta_hat.theta - truth
    return float(diff @ diff), float(np.max(np.abs(diff)) ** 2)


@dataclass(frozen=True)
class EvalReport:
    """One evaluation of a fit against the truth.

    l2_sq and linf_sq are None when the scores live on a different
    scale than the true skills (the spectral method's stationary
    probabilities).
    """

    hamming_topk: float
    exact_recovery: bool
    kendall: int
    l2_sq: float | None = None
    linf_sq: float | None = None

    def __post_init__(self):
        if self.exact_recovery != (self.hamming_topk == 0.0):
            raise ValueError("exact_recovery must equal (hamming_topk == 0)")


def evaluate(
    r_hat: Ranking,
    r_star: Ranking,
    k: int,
    theta_hat: CenteredScores | None = None,
    profile: SkillProfile | None = None,
) -> EvalReport:
    """Bundle the ranking losses (and, when comparable, the score errors)."""
    h = hamming_topk(r_hat, r_star, k)
    l2_sq = linf_sq = None
    if theta_hat is not None and profile is not None:
        l2_sq, linf_sq = estimation_errors(theta_hat, profile, r_star)
    return EvalReport(
        hamming_topk=h,
        exact_recovery=h == 0.0,
        kendall=kendall_tau(r_hat, r_star),
        l2_sq=l2_sq,
        linf_sq=linf_sq,
    )
