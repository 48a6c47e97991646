"""Independent reference computations the tests check the library against.

Everything here recomputes quantities from first principles (explicit
formulas, dense enumeration, finite differences) without touching the
library code paths under test.
"""

import numpy as np


def oracle_nll(edges, ybar, theta):
    """Direct evaluation of the comparison cross-entropy.

    Uses plain log/exp (no softplus rearrangement), so it is an
    independent computation of the objective the solvers minimize.
    """
    total = 0.0
    for (i, j), y in zip(edges, ybar):
        pij = 1.0 / (1.0 + np.exp(-(theta[i] - theta[j])))
        total += y * np.log(1.0 / pij) + (1.0 - y) * np.log(1.0 / (1.0 - pij))
    return total


def fd_gradient(fun, theta, h=1e-5):
    """Central finite differences of a scalar function."""
    g = np.empty_like(theta, dtype=float)
    for m in range(theta.size):
        e = np.zeros_like(theta, dtype=float)
        e[m] = h
        g[m] = (fun(theta + e) - fun(theta - e)) / (2 * h)
    return g


def fd_jacobian(vecfun, theta, h=1e-5):
    """Central finite differences of a vector function, columnwise."""
    cols = []
    for m in range(theta.size):
        e = np.zeros_like(theta, dtype=float)
        e[m] = h
        cols.append((vecfun(theta + e) - vecfun(theta - e)) / (2 * h))
    return np.column_stack(cols)


def grid_mle_3(edges, ybar, half_width=6.0, coarse=0.01, fine=1e-4):
    """Dense grid search for the 3-player centered-subspace minimizer.

    Parameterizes theta = (a, b, -a-b), scans a coarse grid over
    [-half_width, half_width]^2, then a fine local grid around the
    incumbent.  Returns the full centered 3-vector.
    """

    def objective_grid(avals, bvals):
        a = avals[:, None]
        b = bvals[None, :]
        theta = {0: a, 1: b, 2: -a - b}
        total = 0.0
        for (i, j), y in zip(edges, ybar):
            d = theta[i] - theta[j]
            total = total + y * np.logaddexp(0.0, -d) + (1.0 - y) * np.logaddexp(0.0, d)
        return total

    avals = np.arange(-half_width, half_width + coarse, coarse)
    grid = objective_grid(avals, avals)
    ia, ib = np.unravel_index(int(np.argmin(grid)), grid.shape)
    a0, b0 = avals[ia], avals[ib]

    afine = np.arange(a0 - 2 * coarse, a0 + 2 * coarse + fine, fine)
    bfine = np.arange(b0 - 2 * coarse, b0 + 2 * coarse + fine, fine)
    grid = objective_grid(afine, bfine)
    ia, ib = np.unravel_index(int(np.argmin(grid)), grid.shape)
    a, b = afine[ia], bfine[ib]
    theta = np.array([a, b, -a - b])
    return theta - theta.mean()


def brute_threshold_error(scores, top_mask, k):
    """Enumerate every useful threshold position directly."""
    scores = np.asarray(scores, dtype=float)
    candidates = [scores.min() - 1.0, scores.max() + 1.0]
    svals = np.sort(np.unique(scores))
    candidates.extend((svals[:-1] + svals[1:]) / 2.0)
    best = None
    for t in candidates:
        cost = int(np.sum(top_mask & (scores <= t))) + int(np.sum(~top_mask & (scores >= t)))
        best = cost if best is None else min(best, cost)
    return best / k


def brute_kendall(r_hat, r_star):
    """Quadratic discordant-pair count."""
    n = len(r_hat)
    count = 0
    for i in range(n):
        for j in range(i + 1, n):
            if (r_hat[i] - r_hat[j]) * (r_star[i] - r_star[j]) < 0:
                count += 1
    return count


def mle_two_player_bisection(ybar, L):
    """Solve the 1-D first-order condition psi(2a) = ybar by bisection."""
    lo, hi = -30.0, 30.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1.0 / (1.0 + np.exp(-2.0 * mid)) < ybar:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
