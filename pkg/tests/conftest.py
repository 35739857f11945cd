import itertools

import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def brute_force_box_qp(H, g, lower, upper):
    """Minimize 0.5 z'Hz + g'z on a box by enumerating every free/lower/upper pattern."""
    n = len(g)
    best, best_val = None, np.inf
    for pattern in itertools.product((0, -1, 1), repeat=n):
        pattern = np.array(pattern)
        z = np.zeros(n)
        z[pattern == -1] = lower[pattern == -1]
        z[pattern == 1] = upper[pattern == 1]
        if not np.all(np.isfinite(z[pattern != 0])):
            continue
        free = pattern == 0
        if free.any():
            fixed = ~free
            rhs = -(g[free] + H[np.ix_(free, fixed)] @ z[fixed])
            z[free] = np.linalg.solve(H[np.ix_(free, free)], rhs)
        if np.any(z < lower - 1e-12) or np.any(z > upper + 1e-12):
            continue
        val = 0.5 * z @ H @ z + g @ z
        if val < best_val:
            best, best_val = z, val
    return best


def random_spd(rng, n, cond=10.0):
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    return (Q * np.geomspace(1.0, cond, n)) @ Q.T
