"""Binary one-hot-per-position representations of rankings.

Graded encoding: ``K`` blocks of ``L`` bits, one block per rank. Inside a
block the bits run from the best grade to the worst, so grade ``l`` sets bit
``L - l``. Grade-free encoding: ``K`` blocks of ``K`` bits, bit ``d`` of
block ``k`` set when document ``d`` sits at rank ``k``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError
from .ranking import as_grades


@dataclass(frozen=True, eq=False)
class UtilityVector:
    """Linear utility weights laid out in blocks of ``block_size`` per rank."""

    weights: np.ndarray
    block_size: int

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or self.block_size < 1 or w.size % self.block_size:
            raise InvalidArgumentError(
                f"{w.size} weights do not split into blocks of {self.block_size}"
            )
        object.__setattr__(self, "weights", w)

    @property
    def n_positions(self) -> int:
        return self.weights.size // self.block_size

    def blocks(self) -> np.ndarray:
        """Weights as an ``(n_positions, block_size)`` array."""
        return self.weights.reshape(self.n_positions, self.block_size)

    def __len__(self):
        return self.weights.size


def encode(grades, levels: int) -> np.ndarray:
    """Graded ``K * L`` bit vector of a top-``K`` grade sequence."""
    seq = as_grades(grades, levels=levels)
    bits = np.zeros((seq.size, levels), dtype=np.int8)
    bits[np.arange(seq.size), levels - seq] = 1
    return bits.ravel()


def decode(bits, levels: int) -> np.ndarray:
    """Inverse of :func:`encode`."""
    b = _one_hot_blocks(bits, levels)
    return levels - np.argmax(b, axis=1)


def encode_grade_free(permutation) -> np.ndarray:
    """Grade-free ``K * K`` bit vector of a permutation of documents ``0..K-1``."""
    perm = np.asarray(permutation)
    k = perm.size
    if perm.ndim != 1 or k == 0:
        raise InvalidArgumentError("a permutation must be a non-empty 1-d sequence")
    if not np.array_equal(np.sort(perm), np.arange(k)):
        raise InvalidArgumentError(f"{perm.tolist()} is not a permutation of 0..{k - 1}")
    bits = np.zeros((k, k), dtype=np.int8)
    bits[np.arange(k), perm.astype(np.int64)] = 1
    return bits.ravel()


def decode_grade_free(bits) -> np.ndarray:
    b = np.asarray(bits)
    k = int(round(np.sqrt(b.size)))
    if k * k != b.size:
        raise InvalidArgumentError("bit vector length is not a perfect square")
    return np.argmax(_one_hot_blocks(b, k), axis=1)


def _one_hot_blocks(bits, block_size):
    b = np.asarray(bits)
    if b.ndim != 1 or b.size % block_size:
        raise InvalidArgumentError("bit vector does not split into whole blocks")
    b = b.reshape(-1, block_size)
    if not np.all(b.sum(axis=1) == 1):
        raise InvalidArgumentError("every block must hold exactly one set bit")
    return b


def utility(w, encoding) -> float:
    """Linear utility ``w . s`` of an encoded ranking."""
    weights = w.weights if isinstance(w, UtilityVector) else np.asarray(w, dtype=float)
    s = np.asarray(encoding, dtype=float)
    if weights.shape != s.shape:
        raise InvalidArgumentError(f"weights of size {weights.size} vs encoding of size {s.size}")
    return float(weights @ s)


def case_one_weights(gains, discounts) -> UtilityVector:
    """Position-independent utility ``w[k, l] = discounts[k] * gains[l]``.

    With this vector, ``utility(w, encode(seq, L))`` equals the DCG of ``seq``.
    """
    g = np.asarray(gains, dtype=float)
    c = np.asarray(discounts, dtype=float)
    return UtilityVector(np.outer(c, g[::-1]).ravel(), g.size)
