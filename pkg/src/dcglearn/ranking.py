"""DCG scoring, gain/discount parameter checks and the optimal ranking.

Grades are integers ``1..L`` where a larger value is a better grade. A gain
vector holds one gain per grade, ``gains[l - 1]`` being the gain of grade
``l``; it is *compatible* when it strictly increases with the grade.
Discount vectors are indexed by rank, position 1 first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DomainError, InvalidArgumentError, PreconditionError


@dataclass(frozen=True)
class GradeScale:
    """Ordinal grade set ``{1, ..., levels}``; larger means better."""

    levels: int

    def __post_init__(self):
        if int(self.levels) != self.levels or self.levels < 2:
            raise InvalidArgumentError(f"a grade scale needs at least 2 levels, got {self.levels}")

    def contains(self, grades) -> bool:
        g = np.asarray(grades)
        return bool(np.all((g >= 1) & (g <= self.levels)))


def as_grades(grades, levels: int | None = None) -> np.ndarray:
    """Validate a grade sequence and return it as an int array."""
    arr = np.asarray(grades)
    if arr.ndim != 1:
        raise InvalidArgumentError("grades must be a 1-d sequence")
    if arr.size and not np.all(np.equal(np.mod(arr, 1), 0)):
        raise InvalidArgumentError("grades must be integers")
    arr = arr.astype(np.int64)
    if arr.size and arr.min() < 1:
        raise InvalidArgumentError(f"grade {arr.min()} is below 1")
    if levels is not None and arr.size and arr.max() > levels:
        raise InvalidArgumentError(f"grade {arr.max()} exceeds the {levels}-level scale")
    return arr


def is_compatible(gains) -> bool:
    """True when gains strictly increase with grade. Ties are not compatible."""
    g = np.asarray(gains, dtype=float)
    return g.ndim == 1 and g.size >= 2 and bool(np.all(np.diff(g) > 0))


def is_valid_discount(discounts) -> bool:
    c = np.asarray(discounts, dtype=float)
    return c.ndim == 1 and c.size >= 1 and bool(np.all(c > 0) and np.all(np.diff(c) < 0))


def default_discounts(k: int, base: float = 2.0) -> np.ndarray:
    """``1 / log_base(i + 1)`` for ranks ``i = 1..k``.

    Changing the base rescales every discount by one constant, so the
    preference order DCG induces over rankings does not depend on it.
    """
    if k < 1:
        raise InvalidArgumentError("k must be positive")
    if base <= 0 or base == 1:
        raise DomainError(f"invalid logarithm base {base}")
    ranks = np.arange(1, k + 1, dtype=float)
    return math.log(base) / np.log(ranks + 1.0)


def dcg(grades, gains, discounts, k: int | None = None) -> float:
    """Discounted cumulated gain of the top ``k`` entries of a grade sequence.

    >>> dcg([2, 3], [0.5, 2.0, 3.0], [1.5, 0.5])
    4.5
    """
    g = np.asarray(gains, dtype=float)
    c = np.asarray(discounts, dtype=float)
    if g.ndim != 1 or c.ndim != 1:
        raise InvalidArgumentError("gains and discounts must be 1-d")
    seq = as_grades(grades, levels=g.size)
    if k is None:
        k = c.size
    if k < 1 or k > seq.size or k > c.size:
        raise InvalidArgumentError(
            f"cutoff {k} incompatible with {seq.size} grades and {c.size} discounts"
        )
    return float(np.dot(c[:k], g[seq[:k] - 1]))


def optimal_ranking(grades: Sequence[int], gains, discounts, k: int | None = None) -> tuple:
    """A DCG-maximising ranking of a labelled item set.

    ``grades[i]`` is the grade of item ``i``. The result is a permutation of
    item indices (0-based) sorted by grade, best first; equal grades keep
    their input order. Any such ranking attains the maximal DCG for every
    compatible gain vector and valid discount vector.
    """
    g = np.asarray(gains, dtype=float)
    if not is_compatible(g):
        raise PreconditionError("optimal_ranking requires a compatible gain vector")
    labels = as_grades(grades, levels=g.size)
    c = np.asarray(discounts, dtype=float)
    if k is not None and (k > labels.size or k > c.size):
        raise InvalidArgumentError("cutoff exceeds the item set or discount vector")
    order = np.argsort(-labels, kind="stable")
    return tuple(int(i) for i in order)


def apply_power_transform(gains, exponent: float) -> np.ndarray:
    """Map every gain ``t`` to ``t ** exponent``; order preserving for positive gains."""
    g = np.asarray(gains, dtype=float)
    if exponent <= 0:
        raise DomainError("the exponent must be positive")
    if np.any(g <= 0):
        raise DomainError("power transform requires strictly positive gains")
    return g**exponent


def ranked_grades(grades: Sequence[int], ranking: Sequence[int]) -> np.ndarray:
    """Grade sequence obtained by listing items in ``ranking`` order."""
    return np.asarray(grades, dtype=np.int64)[np.asarray(ranking, dtype=np.int64)]
