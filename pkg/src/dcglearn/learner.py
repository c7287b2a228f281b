"""Learning a linear ranking utility from pairwise preferences.

The fitted problem is the rank-SVM style program

    min_w  w.w + C * sum_ij xi_ij ** 2
    s.t.   w.(s_i - s_j) >= margin_ij - xi_ij,   xi_ij >= 0,
           w[k, l] >= w[k, l + 1]   (optional, within every block)

With a squared slack penalty the optimal slack is
``max(0, margin - w.(s_i - s_j))``, so the slack variables are eliminated and
the remaining convex piecewise-quadratic objective is minimised by projected
gradient descent with a fixed ``1 / Lipschitz`` step, accelerated with
momentum that is discarded whenever it would raise the objective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .decomposition import top_singular_triplet
from .encoding import UtilityVector
from .errors import ConvergenceError, InvalidArgumentError


@dataclass(frozen=True, eq=False)
class PreferencePair:
    """Two encoded rankings, preferred one first."""

    winner: np.ndarray
    loser: np.ndarray
    margin: float = 1.0

    def __post_init__(self):
        if np.shape(self.winner) != np.shape(self.loser):
            raise InvalidArgumentError("winner and loser encodings differ in size")
        if not self.margin >= 0:
            raise InvalidArgumentError(f"margin must be non-negative, got {self.margin}")

    def swapped(self) -> "PreferencePair":
        return PreferencePair(self.loser, self.winner, self.margin)


@dataclass(frozen=True)
class FitConfig:
    C: float = 1.0
    monotone: bool = True
    tolerance: float = 1e-10
    max_iterations: int = 50_000
    seed: int = 0

    def __post_init__(self):
        if not self.C > 0:
            raise InvalidArgumentError("C must be positive")
        if not self.tolerance > 0:
            raise InvalidArgumentError("tolerance must be positive")
        if self.max_iterations < 1:
            raise InvalidArgumentError("max_iterations must be at least 1")


@dataclass(frozen=True, eq=False)
class FitResult:
    utility: UtilityVector
    objective: float
    iterations: int
    history: np.ndarray = field(repr=False)


def prefers_first(w, first, second) -> bool:
    """True iff ``w`` scores ``first`` strictly above ``second``."""
    weights = w.weights if isinstance(w, UtilityVector) else np.asarray(w, dtype=float)
    return float(weights @ np.asarray(first, float)) > float(weights @ np.asarray(second, float))


def label_pair(w_true, first, second) -> PreferencePair:
    """Preference pair judged by ``w_true``; exact ties go to ``second``."""
    if prefers_first(w_true, first, second):
        return PreferencePair(np.asarray(first), np.asarray(second))
    return PreferencePair(np.asarray(second), np.asarray(first))


_MINMAX_MAX_BLOCK = 32


def isotonic_project(block) -> np.ndarray:
    """Euclidean projection onto non-increasing vectors (pool adjacent violators)."""
    y = np.asarray(block, dtype=float)
    means: list[float] = []
    sizes: list[int] = []
    for value in y:
        means.append(float(value))
        sizes.append(1)
        while len(means) > 1 and means[-2] < means[-1]:
            total = sizes[-2] + sizes[-1]
            means[-2] = (means[-2] * sizes[-2] + means[-1] * sizes[-1]) / total
            sizes[-2] = total
            means.pop()
            sizes.pop()
    return np.repeat(means, sizes)


def project_blocks(weights, block_size: int) -> np.ndarray:
    """Project every block of a weight vector onto non-increasing vectors.

    Uses the closed form ``x_i = min_{j<=i} max_{k>=i} mean(y[j..k])`` on all
    blocks at once, which agrees with :func:`isotonic_project` block by block.
    """
    blocks = np.array(weights, dtype=float).reshape(-1, block_size)
    violating = np.flatnonzero(np.any(np.diff(blocks, axis=1) > 0, axis=1))
    if violating.size == 0:
        return blocks.ravel()
    if block_size > _MINMAX_MAX_BLOCK:
        for k in violating:
            blocks[k] = isotonic_project(blocks[k])
        return blocks.ravel()
    y = blocks[violating]
    n = block_size
    csum = np.concatenate([np.zeros((y.shape[0], 1)), np.cumsum(y, axis=1)], axis=1)
    j = np.arange(n)[:, None]
    k = np.arange(n)[None, :]
    valid = k >= j
    lengths = np.where(valid, k - j + 1, 1)
    means = (csum[:, None, 1:] - csum[:, :n, None]) / lengths
    means = np.where(valid, means, -np.inf)
    # suffix[:, j, i] = max over k >= i of mean(y[j..k])
    suffix = np.maximum.accumulate(means[:, :, ::-1], axis=2)[:, :, ::-1]
    suffix = np.where(valid, suffix, np.inf)
    blocks[violating] = suffix.min(axis=1)
    return blocks.ravel()


def monotonicity_violation(w: UtilityVector) -> float:
    """Largest increase between neighbouring entries of any block (0 if none)."""
    diffs = np.diff(w.blocks(), axis=1)
    return float(max(0.0, diffs.max())) if diffs.size else 0.0


def _stack(pairs: Sequence[PreferencePair]):
    if len(pairs) == 0:
        raise InvalidArgumentError("fit needs at least one preference pair")
    size = np.size(pairs[0].winner)
    if any(np.size(p.winner) != size for p in pairs):
        raise InvalidArgumentError("preference pairs have inconsistent dimensions")
    deltas = np.stack([np.asarray(p.winner, float) - np.asarray(p.loser, float) for p in pairs])
    margins = np.array([p.margin for p in pairs], dtype=float)
    return deltas, margins


def objective(weights, pairs: Sequence[PreferencePair], C: float) -> float:
    """``w.w + C * sum(max(0, margin - w.delta) ** 2)``."""
    w = weights.weights if isinstance(weights, UtilityVector) else np.asarray(weights, float)
    deltas, margins = _stack(pairs)
    slack = np.maximum(0.0, margins - deltas @ w)
    return float(w @ w + C * slack @ slack)


def solve(
    pairs: Sequence[PreferencePair], config: FitConfig = FitConfig(), block_size: int | None = None
) -> FitResult:
    """Fit a utility vector and report the objective trace.

    ``block_size`` is the number of entries per rank (``L`` for graded
    encodings, ``K`` for grade-free ones); it is required when
    ``config.monotone`` is set.
    """
    deltas, margins = _stack(pairs)
    dim = deltas.shape[1]
    if block_size is None:
        if config.monotone:
            raise InvalidArgumentError("monotone fitting needs the block size")
        block_size = dim
    if dim % block_size:
        raise InvalidArgumentError(f"dimension {dim} is not a multiple of block size {block_size}")

    C = config.C
    sigma, _, _ = top_singular_triplet(deltas, tol=1e-10, seed=config.seed, strict=False)
    # power iteration approaches sigma from below, hence the safety factor
    lipschitz = 2.0 + 2.0 * C * (1.01 * sigma) ** 2
    step = 1.0 / lipschitz

    def project(v):
        return project_blocks(v, block_size) if config.monotone else v

    def value(v):
        slack = np.maximum(0.0, margins - deltas @ v)
        return float(v @ v + C * slack @ slack)

    def gradient_step(v):
        slack = np.maximum(0.0, margins - deltas @ v)
        return project(v - step * (2.0 * v - 2.0 * C * (deltas.T @ slack)))

    w = np.zeros(dim)
    f = value(w)
    history = [f]
    # accelerated steps are kept only when they lower the objective
    y, t = w, 1.0
    for it in range(1, config.max_iterations + 1):
        z = gradient_step(y)
        fz = value(z)
        if fz <= f:
            decrease = f - fz
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = z + ((t - 1.0) / t_next) * (z - w)
            w, f, t = z, fz, t_next
        else:
            decrease = 0.0
            y, t = w, 1.0
        if decrease <= config.tolerance * f:
            # confirm with a plain projected-gradient step from the iterate
            z = gradient_step(w)
            fz = value(z)
            if fz <= f:
                decrease = f - fz
                w, f = z, fz
            y, t = w, 1.0
            if decrease <= config.tolerance * f:
                history.append(f)
                return FitResult(UtilityVector(w, block_size), f, it, np.asarray(history))
        history.append(f)
    raise ConvergenceError(
        f"no convergence within {config.max_iterations} iterations (objective {f:.6g})",
        objective=f,
        iterations=config.max_iterations,
    )


def fit(
    pairs: Sequence[PreferencePair], config: FitConfig = FitConfig(), block_size: int | None = None
) -> UtilityVector:
    """Utility vector minimising the squared-hinge preference objective."""
    return solve(pairs, config, block_size).utility
