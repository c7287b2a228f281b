"""Rank-one recovery of gains and discounts, and estimate quality measures."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .encoding import UtilityVector
from .errors import ConvergenceError, DegenerateInputError, InvalidArgumentError


def top_singular_triplet(
    matrix, tol: float = 1e-12, max_iterations: int = 100_000, seed: int = 0, strict: bool = True
):
    """Leading singular triple ``(sigma, u, v)`` of ``matrix`` by power iteration.

    Iterates ``v <- M^T M v`` (as two matrix products, never forming the
    Gram matrix) until the singular value estimate changes by less than
    ``tol`` relative. Returns ``sigma = 0`` and arbitrary unit vectors for a
    zero matrix. With ``strict=False`` an unconverged estimate is returned
    instead of raising.
    """
    m = np.asarray(matrix, dtype=float)
    rows, cols = m.shape
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(cols)
    v /= np.linalg.norm(v)
    sigma = 0.0
    for _ in range(max_iterations):
        u = m @ v
        norm_u = np.linalg.norm(u)
        if norm_u == 0.0:
            if not np.any(m):
                e = np.zeros(rows)
                e[0] = 1.0
                return 0.0, e, v
            # start vector orthogonal to the row space
            v = rng.standard_normal(cols)
            v /= np.linalg.norm(v)
            continue
        u /= norm_u
        v_next = m.T @ u
        sigma_next = np.linalg.norm(v_next)
        v = v_next / sigma_next
        if abs(sigma_next - sigma) <= tol * sigma_next:
            sigma = sigma_next
            break
        sigma = sigma_next
    else:
        if strict:
            raise ConvergenceError("power iteration did not converge", objective=sigma)
    u = m @ v
    return float(sigma), u / np.linalg.norm(u), v


def weight_matrix(w: UtilityVector) -> np.ndarray:
    """``block_size x n_positions`` matrix whose column ``k`` is block ``k`` of ``w``."""
    return w.blocks().T.copy()


def flatten_matrix(matrix) -> UtilityVector:
    m = np.asarray(matrix, dtype=float)
    return UtilityVector(m.T.ravel(), m.shape[0])


@dataclass(frozen=True, eq=False)
class RankOneFactors:
    """Best rank-one split ``W ~ outer(gains_est, discounts_est)``.

    ``gains_est`` follows the row order of the weight matrix (best grade
    first for graded layouts) and carries the singular value;
    ``discounts_est`` is a unit vector with a positive entry sum.
    """

    gains_est: np.ndarray
    discounts_est: np.ndarray
    sigma1: float
    residual_ratio: float

    def approximation(self) -> np.ndarray:
        return np.outer(self.gains_est, self.discounts_est)


def rank_one_factorize(matrix, tol: float = 1e-12) -> RankOneFactors:
    """Split a weight matrix into estimated gain and discount vectors."""
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2:
        raise InvalidArgumentError("expected a 2-d weight matrix")
    if not np.any(m):
        raise DegenerateInputError("cannot factorize a zero matrix")
    sigma1, u, v = top_singular_triplet(m, tol=tol)
    if v.sum() < 0:
        u, v = -u, -v
    residual = m - sigma1 * np.outer(u, v)
    # the estimate approaches sigma2 from below; an unconverged one is still usable
    sigma2 = (
        top_singular_triplet(residual, tol=1e-9, max_iterations=20_000, strict=False)[0]
        if np.any(residual)
        else 0.0
    )
    return RankOneFactors(sigma1 * u, v, sigma1, sigma2 / sigma1)


def _weights(w):
    return w.weights if isinstance(w, UtilityVector) else np.asarray(w, dtype=float)


def precision(w_hat, test_pairs: Sequence) -> float:
    """Share of test pairs whose winner ``w_hat`` scores strictly higher.

    Predicted ties count as errors.
    """
    if len(test_pairs) == 0:
        raise InvalidArgumentError("precision needs at least one test pair")
    deltas = np.stack([np.asarray(p.winner, float) - np.asarray(p.loser, float) for p in test_pairs])
    return precision_from_deltas(_weights(w_hat), deltas)


def precision_from_deltas(weights, deltas) -> float:
    """:func:`precision` on a pre-stacked ``winner - loser`` matrix."""
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape[0] == 0:
        raise InvalidArgumentError("precision needs at least one test pair")
    if deltas.shape[1] != np.size(weights):
        raise InvalidArgumentError("weight and encoding sizes differ")
    return float(np.mean(deltas @ weights > 0))


def t_transform(w: UtilityVector) -> UtilityVector:
    """Subtract the last (worst-grade) weight of each block from the whole block."""
    b = w.blocks()
    return UtilityVector((b - b[:, -1:]).ravel(), w.block_size)


def similarity(w: UtilityVector, w_hat: UtilityVector) -> float:
    """Cosine between the T-transforms of two utility vectors."""
    if w.weights.shape != w_hat.weights.shape or w.block_size != w_hat.block_size:
        raise InvalidArgumentError("utility vectors have different layouts")
    a = t_transform(w).weights
    b = t_transform(w_hat).weights
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInputError("a T-transformed vector is zero; similarity undefined")
    return float(np.clip(a @ b / (na * nb), -1.0, 1.0))


def hamming(first, second) -> int:
    """Number of ranks at which two rankings place different items."""
    a, b = np.asarray(first), np.asarray(second)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidArgumentError("rankings must have equal length")
    return int(np.count_nonzero(a != b))
