"""Monte Carlo reference for the thin-tail critical value at k=10, alpha=0.05.

Independent of the Rust code path: numpy draws from the Poisson-process
representation, densities by trapezoidal quadrature in u = log t.
"""
import sys

import numpy as np
from scipy.special import gammaln

K = 10
ALPHA = 0.05
DRAWS = 20000
GRID = 0.99 * np.arange(50) / 49
U = np.linspace(-30.0, 30.0, 1201)


def log_density(xis, v):
    """log f(v | xi) for every xi > 0 in xis."""
    t = np.exp(U)
    # (xi, u, i)
    z = xis[:, None, None] * v[None, None, :] * t[None, :, None]
    expo = -(1 + 1 / xis)[:, None] * np.log1p(z).sum(axis=2)
    log_f = (K - 1) * U[None, :] + expo
    top = log_f.max(axis=1, keepdims=True)
    h = U[1] - U[0]
    integral = h * np.exp(log_f - top).sum(axis=1)
    return gammaln(K) + top[:, 0] + np.log(integral)


def statistic(v):
    log_null = gammaln(K) + gammaln(K - 1) - (K - 1) * np.log(v.sum())
    logs = np.concatenate([[log_null], log_density(GRID[1:], v)])
    m = logs.max()
    return np.exp(m + np.log(np.exp(logs - m).mean()) - log_null)


def sample(rng):
    g = np.cumsum(rng.exponential(size=K))
    x = -np.log(g)
    return (x - x[-1]) / (x[0] - x[-1])


if __name__ == "__main__":
    rng = np.random.default_rng(int(sys.argv[1]) if len(sys.argv) > 1 else 2024)
    stats = np.sort([statistic(sample(rng)) for _ in range(DRAWS)])
    r = DRAWS - int(np.floor(ALPHA * (DRAWS + 1)))
    print("cv k=10 alpha=0.05", repr(stats[r - 1]), "draws", DRAWS)
