"""Exhaustive coherence checks between two DCG parameterisations.

Two rankers are coherent over an item set when no pair of rankings is
strictly preferred one way by the first and strictly the other way by the
second. Pairs on which either ranker ties are skipped.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import CapacityError, InvalidArgumentError, PreconditionError
from .ranking import apply_power_transform, as_grades, is_compatible, is_valid_discount

MAX_ENUMERATION_ITEMS = 10


@dataclass(frozen=True)
class CoherenceVerdict:
    """Outcome of :func:`check_coherence`.

    ``witness`` holds two 0-based rankings on which the rankers disagree and
    ``scores`` their DCGs as ``(a_first, a_second, b_first, b_second)``.
    ``ties_skipped`` counts the examined pairs left out because at least
    one ranker scored them equal.
    """

    coherent: bool
    witness: Optional[tuple] = None
    scores: Optional[tuple] = None
    n_sequences: int = 0
    ties_skipped: int = 0


def distinct_prefixes(grades: Sequence[int], k: int) -> Iterator[tuple]:
    """Yield one ranking per distinct top-``k`` grade sequence.

    Each yielded ranking is the lexicographically smallest permutation
    producing its prefix, and rankings come out in lexicographic order.
    """
    labels = [int(g) for g in grades]
    n = len(labels)
    used = [False] * n
    prefix: list[int] = []

    def walk(depth):
        if depth == k:
            rest = [i for i in range(n) if not used[i]]
            yield tuple(prefix + rest)
            return
        seen = set()
        for i in range(n):
            if used[i] or labels[i] in seen:
                continue
            seen.add(labels[i])
            used[i] = True
            prefix.append(i)
            yield from walk(depth + 1)
            prefix.pop()
            used[i] = False

    yield from walk(0)


def _scores(rankings, labels, gains, discounts, k):
    idx = np.asarray([r[:k] for r in rankings], dtype=np.int64)
    return gains[labels[idx] - 1] @ discounts[:k]


def check_coherence(grades, gains_a, gains_b, discounts, k: int) -> CoherenceVerdict:
    """Compare two compatible gain vectors on every pair of top-``k`` rankings.

    The first disagreeing pair, in lexicographic order of the representative
    rankings, is returned as the witness.
    """
    ga = np.asarray(gains_a, dtype=float)
    gb = np.asarray(gains_b, dtype=float)
    c = np.asarray(discounts, dtype=float)
    if ga.shape != gb.shape:
        raise InvalidArgumentError("gain vectors differ in length")
    if not (is_compatible(ga) and is_compatible(gb)):
        raise PreconditionError("both gain vectors must be compatible")
    if not is_valid_discount(c[:k]) or k > c.size:
        raise InvalidArgumentError("need k strictly decreasing positive discounts")
    labels = as_grades(grades, levels=ga.size)
    if labels.size > MAX_ENUMERATION_ITEMS:
        raise CapacityError(
            f"{labels.size} items exceed the enumeration limit of {MAX_ENUMERATION_ITEMS}"
        )
    if k < 1 or k > labels.size:
        raise InvalidArgumentError(f"cutoff {k} outside 1..{labels.size}")

    rankings = list(distinct_prefixes(labels, k))
    da = _scores(rankings, labels, ga, c, k)
    db = _scores(rankings, labels, gb, c, k)
    tol_a = 1e-12 * max(1.0, float(np.abs(da).max()))
    tol_b = 1e-12 * max(1.0, float(np.abs(db).max()))

    ties = 0
    for i in range(len(rankings) - 1):
        diff_a = da[i] - da[i + 1 :]
        diff_b = db[i] - db[i + 1 :]
        strict = (np.abs(diff_a) > tol_a) & (np.abs(diff_b) > tol_b)
        ties += int(strict.size - np.count_nonzero(strict))
        clash = np.flatnonzero(strict & (np.sign(diff_a) != np.sign(diff_b)))
        if clash.size:
            j = i + 1 + int(clash[0])
            return CoherenceVerdict(
                coherent=False,
                witness=(rankings[i], rankings[j]),
                scores=(float(da[i]), float(da[j]), float(db[i]), float(db[j])),
                n_sequences=len(rankings),
                ties_skipped=ties,
            )
    return CoherenceVerdict(coherent=True, n_sequences=len(rankings), ties_skipped=ties)


def _random_compatible(rng, levels):
    while True:
        g = np.sort(rng.uniform(0.01, 10.0, size=levels))
        if is_compatible(g):
            return g


def _random_discounts(rng, k):
    while True:
        c = np.sort(rng.uniform(0.01, 1.0, size=k))[::-1]
        if is_valid_discount(c):
            return c


def verify_binary_coherence(trials: int, n: int, k: int, seed: int) -> bool:
    """Search random two-grade instances for an incoherent pair of rankers.

    Returns True when none of the ``trials`` instances produces a witness.
    """
    if n > MAX_ENUMERATION_ITEMS:
        raise CapacityError(f"{n} items exceed the enumeration limit")
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        gains_a = _random_compatible(rng, 2)
        gains_b = _random_compatible(rng, 2)
        discounts = _random_discounts(rng, k)
        grades = rng.integers(1, 3, size=n)
        if not check_coherence(grades, gains_a, gains_b, discounts, k).coherent:
            return False
    return True


def exponent_grid(k_max: float, step: float = 0.25) -> np.ndarray:
    count = int(np.floor(k_max / step + 1e-9))
    return step * np.arange(1, count + 1)


def find_counterexample_exponent(
    grades, gains, discounts, k: int, k_max: float, exponents=None
) -> Optional[float]:
    """Smallest grid exponent ``e`` for which ``gains`` and ``gains ** e`` disagree.

    The default grid is ``0.25, 0.5, ..., k_max``. Returns None when every
    exponent on the grid yields a coherent pair.
    """
    grid = exponent_grid(k_max) if exponents is None else np.asarray(exponents, dtype=float)
    for e in grid:
        transformed = apply_power_transform(gains, float(e))
        if not check_coherence(grades, gains, transformed, discounts, k).coherent:
            return float(e)
    return None
