"""Rank Centrality: win-fraction Markov chain and its stationary distribution."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegreeOverflowError, DisconnectedGraphError, NotConvergedError, ReducibleChainError
from .mle import FitResult
from .simulate import ComparisonDataset, connected_from_pairs

# Dense linear solve is both fast and exact at small n; power iteration
# takes over beyond this size.
DIRECT_SOLVE_MAX_N = 64

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITERS = 10**6


@dataclass(frozen=True, eq=False)
class TransitionMatrix:
    """Row-stochastic matrix of the comparison chain.

    Off-diagonal (i, j) is proportional to j's win fraction over i, so
    probability mass flows toward winners; the diagonal completes each
    row to one.
    """

    n: int
    d: float
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        if m.shape != (self.n, self.n):
            raise ValueError(f"matrix must be {self.n}x{self.n}")
        if m.min() < -1e-14:
            raise ValueError("transition matrix has negative entries")
        rows = m.sum(axis=1)
        if np.max(np.abs(rows - 1.0)) > 1e-12:
            raise ValueError("rows must sum to 1")
        if self.d <= 0:
            raise ValueError("d must be positive")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    """Probability vector pi with its certified stationarity residual
    ||pi^T P - pi^T||_1."""

    pi: np.ndarray
    residual: float
    iterations: int = 0

    def __post_init__(self):
        pi = np.array(self.pi, dtype=float)
        if pi.min() < 0:
            raise ValueError("pi must be nonnegative")
        if abs(pi.sum() - 1.0) > 1e-10:
            raise ValueError("pi must sum to 1")
        pi.setflags(write=False)
        object.__setattr__(self, "pi", pi)


def build_transition(dataset: ComparisonDataset) -> TransitionMatrix:
    """Assemble the comparison chain with normalizer d = 2*n*p.

    Uses the recorded generation probability; when the dataset was
    loaded without one, falls back to d = 2 * max degree with a warning.
    Raises DegreeOverflowError if any degree exceeds d (the diagonal
    would go negative) or if a diagonal entry lands exactly at zero.
    """
    g = dataset.graph
    if g.num_edges == 0:
        raise ValueError("dataset has no comparisons")
    n = g.n
    if g.p is not None:
        d = 2.0 * n * g.p
    else:
        d = 2.0 * float(g.degrees().max())
        warnings.warn(
            "dataset has no recorded edge probability; using d = 2 * max degree",
            stacklevel=2,
        )
    deg = g.degrees()
    if deg.max() > d:
        raise DegreeOverflowError(
            f"max degree {int(deg.max())} exceeds the normalizer d = {d:g}"
        )
    i, j = g.edges[:, 0], g.edges[:, 1]
    yb = dataset.ybar
    m = np.zeros((n, n))
    m[i, j] = (1.0 - yb) / d  # i -> j moves in proportion to j's wins over i
    m[j, i] = yb / d
    m[np.diag_indices(n)] = 1.0 - m.sum(axis=1)
    if np.any(np.diag(m) <= 0.0):
        raise DegreeOverflowError(
            "a diagonal entry is not positive; increase d (chain would lose aperiodicity)"
        )
    return TransitionMatrix(n=n, d=float(d), matrix=m)


def _check_irreducible(p: TransitionMatrix) -> None:
    m = p.matrix.copy()
    np.fill_diagonal(m, 0.0)
    support = np.argwhere((m > 0) | (m.T > 0))
    if not connected_from_pairs(p.n, support):
        raise ReducibleChainError("the chain's support graph is disconnected")


def _power_iteration(m: np.ndarray, tol: float, max_iters: int):
    n = m.shape[0]
    pi = np.full(n, 1.0 / n)
    for it in range(max_iters + 1):
        nxt = pi @ m
        resid = float(np.abs(nxt - pi).sum())
        if resid <= tol:
            return pi, resid, it
        pi = nxt / nxt.sum()
    raise NotConvergedError(
        f"power iteration residual {resid:.3e} above tol {tol:.1e} after {max_iters} iterations"
    )


def _direct_solve(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    a = np.vstack([m.T - np.eye(n), np.ones((1, n))])
    b = np.zeros(n + 1)
    b[-1] = 1.0
    pi, *_ = np.linalg.lstsq(a, b, rcond=None)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def stationary_distribution(
    p: TransitionMatrix,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
    method: str = "auto",
) -> StationaryDistribution:
    """Stationary distribution of the comparison chain.

    method "auto" picks a dense linear solve for n <= 64 and power
    iteration from the uniform vector otherwise; "power" and "direct"
    force one path (the two are cross-checked against each other in the
    test suite).  The returned residual ||pi^T P - pi^T||_1 is always
    verified against tol.
    """
    if method not in ("auto", "power", "direct"):
        raise ValueError(f"unknown method {method!r}")
    _check_irreducible(p)
    if method == "auto":
        method = "direct" if p.n <= DIRECT_SOLVE_MAX_N else "power"
    if method == "power":
        pi, resid, iters = _power_iteration(p.matrix, tol, max_iters)
    else:
        pi = _direct_solve(p.matrix)
        resid = float(np.abs(pi @ p.matrix - pi).sum())
        iters = 0
        if resid > tol:
            raise NotConvergedError(
                f"direct solve residual {resid:.3e} above tol {tol:.1e}"
            )
    return StationaryDistribution(pi=pi, residual=resid, iterations=iters)


def fit_spectral(
    dataset: ComparisonDataset,
    tol: float = DEFAULT_TOL,
    max_iters: int = DEFAULT_MAX_ITERS,
) -> FitResult:
    """Rank players by the stationary distribution of the comparison chain.

    Returns a FitResult whose scores are the stationary probabilities
    (summing to one) and whose final_grad_norm field carries the
    stationarity residual.
    """
    if not dataset.graph.is_connected():
        raise DisconnectedGraphError(
            "comparison graph is disconnected; the chain has no unique stationary distribution"
        )
    p = build_transition(dataset)
    sd = stationary_distribution(p, tol=tol, max_iters=max_iters)
    return FitResult(
        scores=sd.pi,
        iterations=sd.iterations,
        converged=True,
        final_grad_norm=sd.residual,
        method="spectral",
    )
