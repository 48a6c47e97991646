"""Negative log-likelihood machinery and the maximum-likelihood fitters."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DisconnectedGraphError, DivergedError
from .model import CenteredScores, Ranking, center, ranking_from_scores, sigmoid, sigmoid_prime
from .simulate import ComparisonDataset

# The vanilla MLE has no finite minimizer when a player is perfectly
# separated; abort once the iterate leaves this box (far beyond any
# dynamic range in scope).
DIVERGENCE_GUARD = 40.0

_ARMIJO_SLOPE = 1e-4
_ARMIJO_FACTOR = 0.5


@dataclass(frozen=True)
class MleOptions:
    """Solver configuration.

    mode is one of "vanilla" (no penalty), "regularized" (adds the ridge
    term lam/2 * ||theta||^2), or "box" (minimizes over the centered
    subspace intersected with ||theta||_inf <= bound).
    """

    mode: str = "vanilla"
    lam: float = 0.0
    bound: float = DIVERGENCE_GUARD
    grad_tol: float = 1e-10
    max_iters: int | None = None  # defaults: 200 for Newton, 10**6 for gradient descent
    solver: str = "newton"

    def __post_init__(self):
        if self.mode not in ("vanilla", "regularized", "box"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.solver not in ("newton", "gd"):
            raise ValueError(f"unknown solver {self.solver!r}")
        if self.grad_tol <= 0:
            raise ValueError("grad_tol must be positive")
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.mode == "box" and self.bound <= 0:
            raise ValueError("bound must be positive")

    @property
    def effective_lam(self) -> float:
        return self.lam if self.mode == "regularized" else 0.0

    def iter_budget(self, solver: str) -> int:
        if self.max_iters is not None:
            return self.max_iters
        return 200 if solver == "newton" else 10**6


@dataclass(frozen=True, eq=False)
class FitResult:
    """Fitted scores plus solver diagnostics.

    ``scores`` holds the centered theta-hat for likelihood fits and the
    stationary distribution for spectral fits; the induced ranking is
    derived at construction so it always matches the scores.  For
    spectral fits ``final_grad_norm`` carries the stationarity residual.
    """

    scores: np.ndarray
    iterations: int
    converged: bool
    final_grad_norm: float
    boundary_hit: bool = False
    method: str = "mle"
    ranking: Ranking = field(init=False)

    def __post_init__(self):
        scores = np.array(self.scores, dtype=float)
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "ranking", ranking_from_scores(scores))


@dataclass(frozen=True, eq=False)
class LikelihoodState:
    """Objective value and gradient norm at a particular theta."""

    dataset: ComparisonDataset
    theta: CenteredScores
    value: float
    grad_norm_inf: float

    @classmethod
    def at(cls, dataset: ComparisonDataset, theta) -> "LikelihoodState":
        c = center(theta)
        g = gradient(dataset, c.theta)
        return cls(dataset, c, neg_log_likelihood(dataset, c.theta),
                   float(np.max(np.abs(g))))


def _check_theta(dataset: ComparisonDataset, theta) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (dataset.n,):
        raise ValueError(f"theta must have shape ({dataset.n},), got {theta.shape}")
    return theta


def neg_log_likelihood(dataset: ComparisonDataset, theta) -> float:
    """Cross-entropy of the observed win fractions under scores theta.

    Shift-invariant and nonnegative; computed with softplus so large
    score differences do not overflow.
    """
    theta = _check_theta(dataset, theta)
    e = dataset.graph.edges
    if not e.size:
        return 0.0
    d = theta[e[:, 0]] - theta[e[:, 1]]
    yb = dataset.ybar
    # -log sigmoid(d) = softplus(-d)
    return float(np.sum(yb * np.logaddexp(0.0, -d) + (1.0 - yb) * np.logaddexp(0.0, d)))


def gradient(dataset: ComparisonDataset, theta) -> np.ndarray:
    """Gradient of the negative log-likelihood; sums to zero by shift invariance.

    Coordinate m is minus the sum over m's edges of (observed win
    fraction minus the model win probability).
    """
    theta = _check_theta(dataset, theta)
    n = dataset.n
    e = dataset.graph.edges
    if not e.size:
        return np.zeros(n)
    i, j = e[:, 0], e[:, 1]
    r = dataset.ybar - sigmoid(theta[i] - theta[j])  # residual seen from i
    return np.bincount(i, weights=-r, minlength=n) + np.bincount(j, weights=r, minlength=n)


def hessian(dataset: ComparisonDataset, theta) -> np.ndarray:
    """Hessian of the negative log-likelihood.

    The Laplacian of the graph weighted by sigmoid_prime of the score
    differences: off-diagonal (i, j) is minus the edge weight, each
    diagonal entry makes its row sum to zero.  Positive semidefinite
    with the all-ones vector in its kernel.
    """
    theta = _check_theta(dataset, theta)
    n = dataset.n
    h = np.zeros((n, n))
    e = dataset.graph.edges
    if not e.size:
        return h
    i, j = e[:, 0], e[:, 1]
    w = sigmoid_prime(theta[i] - theta[j])
    h[i, j] = -w
    h[j, i] = -w
    diag = np.bincount(i, weights=w, minlength=n) + np.bincount(j, weights=w, minlength=n)
    h[np.diag_indices(n)] = diag
    return h


def _step_scale(dataset: ComparisonDataset, lam: float) -> float:
    """The 1 / (lam + n*p) gradient step, with max degree standing in for n*p
    when the generation probability was not recorded."""
    g = dataset.graph
    npp = g.n * g.p if g.p is not None else float(max(g.degrees().max(), 1))
    return 1.0 / (lam + npp)


def _backtrack(objective, theta, value, direction, slope, t0=1.0):
    """Armijo backtracking; returns (new_theta, new_value, accepted_step)."""
    t = t0
    while t > 1e-14:
        cand = center(theta - t * direction).theta
        cand_val = objective(cand)
        if cand_val <= value - _ARMIJO_SLOPE * t * slope:
            return cand, cand_val, t
        t *= _ARMIJO_FACTOR
    return theta, value, 0.0


def _newton(dataset, lam, grad_tol, max_iters, guard, x0=None):
    """Newton iterations on the centered subspace.

    The all-ones kernel direction is pinned by adding a rank-one term
    before solving; since the gradient is centered, the step stays
    centered.  Raises DivergedError when the iterate leaves the guard
    box (guard=None disables the check).
    """
    n = dataset.n

    def objective(th):
        v = neg_log_likelihood(dataset, th)
        return v + 0.5 * lam * float(th @ th) if lam else v

    theta = np.zeros(n) if x0 is None else center(x0).theta
    value = objective(theta)
    ones_shift = np.ones((n, n)) / n
    gnorm = np.inf
    for it in range(max_iters + 1):
        g = gradient(dataset, theta) + lam * theta
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= grad_tol:
            return theta, it, gnorm, True
        if it == max_iters:
            break
        h = hessian(dataset, theta) + lam * np.eye(n) + ones_shift
        try:
            step = np.linalg.solve(h, g)
        except np.linalg.LinAlgError:
            step = None
        if step is None or not np.all(np.isfinite(step)):
            step = g * _step_scale(dataset, lam)  # fall back to a gradient step
        slope = float(g @ step)
        if slope <= 0:  # not a descent direction (numerically); use the gradient
            step = g * _step_scale(dataset, lam)
            slope = float(g @ step)
        theta, value, accepted = _backtrack(objective, theta, value, step, slope)
        if guard is not None and np.max(np.abs(theta)) > guard:
            raise DivergedError(
                f"iterate exceeded the divergence guard {guard}; "
                "a player is likely perfectly separated"
            )
        if accepted == 0.0:  # line search stalled at a non-stationary point
            return theta, it, gnorm, False
    return theta, max_iters, gnorm, False


def _gradient_descent(dataset, lam, grad_tol, max_iters, guard, x0=None):
    n = dataset.n

    def objective(th):
        v = neg_log_likelihood(dataset, th)
        return v + 0.5 * lam * float(th @ th) if lam else v

    theta = np.zeros(n) if x0 is None else center(x0).theta
    value = objective(theta)
    eta = _step_scale(dataset, lam)
    gnorm = np.inf
    for it in range(max_iters + 1):
        g = gradient(dataset, theta) + lam * theta
        gnorm = float(np.max(np.abs(g)))
        if gnorm <= grad_tol:
            return theta, it, gnorm, True
        if it == max_iters:
            break
        theta, value, accepted = _backtrack(objective, theta, value, g, float(g @ g), t0=eta)
        if guard is not None and np.max(np.abs(theta)) > guard:
            raise DivergedError(
                f"iterate exceeded the divergence guard {guard}; "
                "a player is likely perfectly separated"
            )
        if accepted == 0.0:
            return theta, it, gnorm, False
    return theta, max_iters, gnorm, False


def _project_box_centered(v: np.ndarray, bound: float) -> np.ndarray:
    """Euclidean projection onto {x: sum(x) = 0, |x_i| <= bound}.

    The projection is clip(v - t, -bound, bound) for the t making the sum
    vanish; the sum is continuous and nonincreasing in t, so bisection
    nails it.
    """
    lo = float(v.min()) - bound
    hi = float(v.max()) + bound
    for _ in range(128):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, -bound, bound).sum() > 0:
            lo = mid
        else:
            hi = mid
    return np.clip(v - 0.5 * (lo + hi), -bound, bound)


def _fit_box(dataset, options: MleOptions):
    """Box-constrained fit: Newton fast path when the solution is interior,
    projected gradient descent on the box otherwise."""
    bound = options.bound
    try:
        theta, iters, gnorm, conv = _newton(
            dataset, 0.0, options.grad_tol, options.iter_budget("newton"), guard=bound
        )
        if conv and np.max(np.abs(theta)) <= bound:
            hit = bool(np.max(np.abs(theta)) >= bound - 1e-9)
            return theta, iters, gnorm, True, hit
    except DivergedError:
        pass  # unconstrained minimizer is outside the box (or absent)

    n = dataset.n
    theta = np.zeros(n)
    value = neg_log_likelihood(dataset, theta)
    eta = _step_scale(dataset, 0.0)
    max_iters = options.iter_budget("gd")
    pg_norm = np.inf
    converged = False
    for it in range(max_iters + 1):
        g = gradient(dataset, theta)
        pg = theta - _project_box_centered(theta - g, bound)
        pg_norm = float(np.max(np.abs(pg)))
        if pg_norm <= options.grad_tol:
            converged = True
            iters = it
            break
        if it == max_iters:
            iters = it
            break
        t = eta
        while t > 1e-14:
            cand = _project_box_centered(theta - t * g, bound)
            cand_val = neg_log_likelihood(dataset, cand)
            if cand_val <= value + _ARMIJO_SLOPE * float(g @ (cand - theta)):
                break
            t *= _ARMIJO_FACTOR
        if t <= 1e-14:
            iters = it
            break
        theta, value = cand, cand_val
    hit = bool(np.max(np.abs(theta)) >= bound - 1e-9)
    return theta, iters, pg_norm, converged, hit


def fit_mle(dataset: ComparisonDataset, options: MleOptions | None = None, x0=None) -> FitResult:
    """Fit the comparison model by (penalized or constrained) maximum likelihood.

    Parameters
    ----------
    dataset : ComparisonDataset
        Comparison graph with per-edge win counts; must be connected.
    options : MleOptions, optional
        Mode, solver, and tolerances; defaults to the vanilla Newton fit.
    x0 : array, optional
        Warm start; centered before use.

    Returns
    -------
    FitResult
        Centered scores, induced ranking, and solver diagnostics.

    Raises
    ------
    DisconnectedGraphError
        If the comparison graph is not connected (the fit would not be
        identifiable).
    DivergedError
        Vanilla mode only: the iterate left the divergence guard box,
        which happens exactly when some player won or lost every game.
    """
    options = options or MleOptions()
    if dataset.n < 2:
        raise ValueError("need at least two players")
    if not dataset.graph.is_connected():
        raise DisconnectedGraphError(
            "comparison graph is disconnected; relative skills are not identifiable"
        )

    if options.mode == "box":
        theta, iters, gnorm, conv, hit = _fit_box(dataset, options)
        return FitResult(center(theta).theta, iters, conv, gnorm, boundary_hit=hit)

    lam = options.effective_lam
    guard = DIVERGENCE_GUARD if options.mode == "vanilla" else None
    solve = _newton if options.solver == "newton" else _gradient_descent
    theta, iters, gnorm, conv = solve(
        dataset, lam, options.grad_tol, options.iter_budget(options.solver), guard, x0=x0
    )
    return FitResult(center(theta).theta, iters, conv, gnorm)


def topk_threshold_error(scores, truth_rank: Ranking, k: int) -> float:
    """Best achievable top-k error of any score threshold, normalized by k.

    Scans the n+1 candidate thresholds between consecutive sorted scores
    and returns (1/k) * min_t [#top players at or below t + #bottom
    players at or above t].  Upper-bounds the normalized Hamming loss of
    the ranking induced by the scores.
    """
    s = np.asarray(scores, dtype=float)
    n = s.size
    if truth_rank.n != n:
        raise ValueError("scores and truth_rank must have the same length")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in 1..{n}")
    is_top = truth_rank.top_set(k)
    order = np.argsort(s, kind="stable")
    s_sorted = s[order]
    top_sorted = is_top[order]
    prefix_top = np.concatenate([[0], np.cumsum(top_sorted)])
    prefix_bot = np.concatenate([[0], np.cumsum(~top_sorted)])
    total_bot = n - k
    # threshold in gap m lies strictly between s_sorted[m-1] and s_sorted[m]
    costs = prefix_top + (total_bot - prefix_bot)
    valid = np.ones(n + 1, dtype=bool)
    valid[1:n] = s_sorted[1:] > s_sorted[:-1]
    return float(costs[valid].min()) / k
