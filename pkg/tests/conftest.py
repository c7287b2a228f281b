import itertools

import numpy as np
import pytest
from scipy.optimize import minimize

from dcglearn.encoding import encode
from dcglearn.learner import PreferencePair

ACCEPTANCE_LINES = []


def all_permutation_scores(grades, gains, discounts, k):
    """DCG of every permutation of the items, by brute force."""
    grades = np.asarray(grades)
    perms = np.array(list(itertools.permutations(range(grades.size))))
    return perms, np.asarray(gains, float)[grades[perms[:, :k]] - 1] @ np.asarray(discounts, float)[:k]


def slack_form_oracle(pairs, C, block_size, monotone, restarts=8, seed=0):
    """Best objective of the explicit-slack program over random SLSQP restarts."""
    deltas = np.stack([p.winner - p.loser for p in pairs]).astype(float)
    margins = np.array([p.margin for p in pairs])
    n, dim = deltas.shape

    def obj(z):
        w, xi = z[:dim], z[dim:]
        return w @ w + C * xi @ xi

    cons = [
        {"type": "ineq", "fun": lambda z: deltas @ z[:dim] - margins + z[dim:]},
        {"type": "ineq", "fun": lambda z: z[dim:]},
    ]
    if monotone:
        cons.append({"type": "ineq", "fun": lambda z: -np.diff(z[:dim].reshape(-1, block_size), axis=1).ravel()})
    rng = np.random.default_rng(seed)
    best = np.inf
    for _ in range(restarts):
        z0 = np.concatenate([rng.normal(size=dim), rng.uniform(0, 2, size=n)])
        res = minimize(obj, z0, constraints=cons, method="SLSQP", options={"ftol": 1e-14, "maxiter": 1000})
        if res.success:
            best = min(best, res.fun)
    return best


def random_pairs(rng, n, levels, k, margin=1.0):
    return [
        PreferencePair(encode(rng.integers(1, levels + 1, k), levels), encode(rng.integers(1, levels + 1, k), levels), margin)
        for _ in range(n)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
