"""Simulation engine: ground truth, pair sampling, noise, fitting and scoring.

Every task is keyed by ``(seed, n_train, pair_noise, grade_noise)`` and draws
from its own random streams, so rows do not depend on execution order and
runs with different training sizes share their leading training pairs.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .decomposition import hamming, precision_from_deltas, similarity
from .encoding import UtilityVector, encode, encode_grade_free
from .errors import ConvergenceError, InvalidArgumentError
from .learner import FitConfig, PreferencePair, fit, prefers_first

SETTINGS = ("data1", "data2")
PAIR_MODES = ("general", "optimalSameList", "optimalDifferentLists")
MODELS = ("base", "hammingMargin", "gradeFree")
DEFAULT_SWEEP = (20, 40, 60, 80, 100, 120, 140, 160, 180, 200)
# K*K weights need more pairs than the K*L graded model
GRADE_FREE_SWEEP = (25, 50, 100, 200, 400, 800)
STREAM_TRAIN, STREAM_VALIDATION, STREAM_TEST, STREAM_NOISE = range(4)


@dataclass(frozen=True)
class GroundTruthSpec:
    setting: str = "data1"
    positions: int = 10
    levels: int = 5
    log_base: float = math.e

    def __post_init__(self):
        if self.setting not in SETTINGS:
            raise InvalidArgumentError(f"unknown setting {self.setting!r}")
        if self.positions < 1 or self.levels < 1:
            raise InvalidArgumentError("positions and levels must be positive")
        if self.log_base <= 0 or self.log_base == 1:
            raise InvalidArgumentError(f"invalid log base {self.log_base}")


def grade_gains(setting: str, levels: int) -> np.ndarray:
    """Per-grade gains ``G_l`` for ``l = 1..levels``: ``l`` (data1) or ``2**l - 1`` (data2)."""
    grades = np.arange(1, levels + 1, dtype=float)
    if setting == "data1":
        return grades
    if setting == "data2":
        return 2.0**grades - 1.0
    raise InvalidArgumentError(f"unknown setting {setting!r}")


def truth_discounts(spec: GroundTruthSpec) -> np.ndarray:
    ranks = np.arange(1, spec.positions + 1, dtype=float)
    return math.log(spec.log_base) / np.log(ranks + 1.0)


def make_ground_truth(spec: GroundTruthSpec) -> UtilityVector:
    """Graded utility with ``w[k, l] = G_l / log(k + 1)``."""
    gains = grade_gains(spec.setting, spec.levels)
    c = truth_discounts(spec)
    return UtilityVector(np.outer(c, gains[::-1]).ravel(), spec.levels)


def grade_free_truth(truth: UtilityVector, doc_grades) -> UtilityVector:
    """Ground truth re-expressed over document identities for a fixed document set."""
    grades = np.asarray(doc_grades, dtype=np.int64)
    blocks = truth.blocks()
    if grades.size != truth.n_positions:
        raise InvalidArgumentError("grade-free truth needs exactly one document per rank")
    return UtilityVector(blocks[:, truth.block_size - grades].ravel(), grades.size)


@dataclass(frozen=True)
class ExperimentConfig:
    truth: GroundTruthSpec = GroundTruthSpec()
    base_list: tuple = (5, 5, 4, 4, 3, 3, 2, 2, 1, 1)
    n_train: Optional[tuple] = None
    n_test: int = 1000
    n_validation: int = 200
    pair_noise: tuple = (0,)
    grade_noise: tuple = (0,)
    pair_mode: str = "general"
    model: str = "base"
    seeds: tuple = tuple(range(10))
    c_grid: tuple = (0.01, 0.1, 1.0, 10.0, 100.0)
    c_default: float = 1.0
    select_c: str = "auto"
    workers: int = 1

    def __post_init__(self):
        if self.n_train is None:
            sweep = GRADE_FREE_SWEEP if self.model == "gradeFree" else DEFAULT_SWEEP
            object.__setattr__(self, "n_train", sweep)
        k, levels = self.truth.positions, self.truth.levels
        if len(self.base_list) < k:
            raise InvalidArgumentError(f"base list has {len(self.base_list)} items, need at least {k}")
        if any(not 1 <= g <= levels for g in self.base_list):
            raise InvalidArgumentError(f"base list grades must lie in 1..{levels}")
        if self.pair_mode not in PAIR_MODES:
            raise InvalidArgumentError(f"unknown pair mode {self.pair_mode!r}")
        if self.model not in MODELS:
            raise InvalidArgumentError(f"unknown model {self.model!r}")
        if self.model == "gradeFree" and (len(self.base_list) != k or self.pair_mode != "general"):
            raise InvalidArgumentError("gradeFree needs general pairs over exactly K documents")
        if not self.n_train or min(self.n_train) < 0:
            raise InvalidArgumentError("training sizes must be non-negative")
        if self.n_test < 1 or self.n_validation < 0:
            raise InvalidArgumentError("need a non-empty test set")
        if max(self.pair_noise) > min(self.n_train):
            raise InvalidArgumentError("cannot flip more pairs than the training set holds")
        if max(self.grade_noise) > 2 * k * min(self.n_train):
            raise InvalidArgumentError("cannot corrupt more grades than the training lists hold")
        if min(self.pair_noise) < 0 or min(self.grade_noise) < 0:
            raise InvalidArgumentError("noise counts must be non-negative")
        if not self.seeds:
            raise InvalidArgumentError("need at least one seed")
        if not self.c_grid or min(self.c_grid) <= 0 or self.c_default <= 0:
            raise InvalidArgumentError("C values must be positive")
        if self.select_c not in ("auto", "always", "never"):
            raise InvalidArgumentError(f"select_c must be auto, always or never, not {self.select_c!r}")
        if self.select_c != "never" and self.n_validation < 1 and len(self.c_grid) > 1:
            raise InvalidArgumentError("selecting C needs a validation set")
        if self.workers < 1:
            raise InvalidArgumentError("workers must be at least 1")


@dataclass(frozen=True, eq=False)
class RankedPair:
    """Two top-K lists, preferred one first, as grades and document ids."""

    winner: np.ndarray
    loser: np.ndarray
    winner_docs: np.ndarray
    loser_docs: np.ndarray

    def swapped(self) -> "RankedPair":
        return RankedPair(self.loser, self.winner, self.loser_docs, self.winner_docs)


@dataclass(frozen=True)
class ResultRow:
    seed: int
    n_train_pairs: int
    noise_pairs: int
    noise_grades: int
    model: str
    pair_mode: str
    chosen_c: float
    precision: float
    similarity: float


CSV_COLUMNS = (
    "seed",
    "n_train_pairs",
    "noise_pairs",
    "noise_grades",
    "model",
    "pair_mode",
    "chosen_c",
    "precision",
    "similarity",
)


@dataclass(frozen=True, eq=False)
class TaskOutcome:
    row: ResultRow
    utility: UtilityVector
    truth: UtilityVector = field(repr=False)


def _label(truth: UtilityVector, first, second, first_docs, second_docs) -> RankedPair:
    levels = truth.block_size
    if prefers_first(truth, encode(first, levels), encode(second, levels)):
        return RankedPair(first, second, first_docs, second_docs)
    return RankedPair(second, first, second_docs, first_docs)


def optimal_order(base_list) -> np.ndarray:
    return np.argsort(-np.asarray(base_list), kind="stable")


def sample_pairs(
    cfg: ExperimentConfig, n: int, rng: np.random.Generator, pair_mode: Optional[str] = None
) -> list[RankedPair]:
    """Draw ``n`` ranking pairs and label them with the ground truth."""
    mode = cfg.pair_mode if pair_mode is None else pair_mode
    truth = make_ground_truth(cfg.truth)
    base = np.asarray(cfg.base_list, dtype=np.int64)
    k, levels = cfg.truth.positions, cfg.truth.levels
    best = optimal_order(base)[:k]
    pairs = []
    for _ in range(n):
        if mode == "general":
            first = rng.permutation(base.size)[:k]
        else:
            first = best
        if mode == "optimalDifferentLists":
            second_grades = rng.integers(1, levels + 1, size=k)
            second = base.size + np.arange(k)
        else:
            second = rng.permutation(base.size)[:k]
            second_grades = base[second]
        pairs.append(_label(truth, base[first], second_grades, first, second))
    return pairs


def inject_pair_noise(pairs: Sequence, m: int, rng: np.random.Generator) -> list:
    """Swap winner and loser in ``m`` distinct, uniformly chosen pairs."""
    if not 0 <= m <= len(pairs):
        raise InvalidArgumentError(f"cannot flip {m} of {len(pairs)} pairs")
    out = list(pairs)
    for i in rng.choice(len(pairs), size=m, replace=False):
        out[i] = out[i].swapped()
    return out


def inject_grade_noise(pairs: Sequence[RankedPair], m: int, rng: np.random.Generator, levels: int) -> list:
    """Give ``m`` distinct document slots a different, uniformly drawn grade.

    Slots are the positions of both lists of every pair. Preference labels
    are left as they were.
    """
    k = len(pairs[0].winner) if pairs else 0
    total = 2 * k * len(pairs)
    if not 0 <= m <= total:
        raise InvalidArgumentError(f"cannot corrupt {m} of {total} grade slots")
    grades = np.array([np.concatenate([p.winner, p.loser]) for p in pairs], dtype=np.int64).reshape(-1)
    for slot in rng.choice(total, size=m, replace=False):
        shift = rng.integers(1, levels)
        grades[slot] = (grades[slot] - 1 + shift) % levels + 1
    grades = grades.reshape(len(pairs), 2, k) if pairs else grades
    return [
        RankedPair(grades[i, 0].copy(), grades[i, 1].copy(), p.winner_docs, p.loser_docs)
        for i, p in enumerate(pairs)
    ]


def to_preference_pairs(pairs: Sequence[RankedPair], model: str, levels: int) -> list[PreferencePair]:
    """Encode ranked pairs for the requested model."""
    out = []
    for p in pairs:
        if model == "gradeFree":
            out.append(PreferencePair(encode_grade_free(p.winner_docs), encode_grade_free(p.loser_docs)))
        else:
            margin = float(hamming(p.winner_docs, p.loser_docs)) if model == "hammingMargin" else 1.0
            out.append(PreferencePair(encode(p.winner, levels), encode(p.loser, levels), margin))
    return out


def _deltas(pairs: Sequence[PreferencePair]) -> np.ndarray:
    return np.stack([p.winner.astype(float) - p.loser.astype(float) for p in pairs])


def _fit_for(cfg: ExperimentConfig, train: list[PreferencePair], C: float, seed: int) -> UtilityVector:
    grade_free = cfg.model == "gradeFree"
    block = cfg.truth.positions if grade_free else cfg.truth.levels
    dim = block * cfg.truth.positions
    if not train:
        return UtilityVector(np.zeros(dim), block)
    return fit(train, FitConfig(C=C, monotone=not grade_free, seed=seed), block_size=block)


def run_task(cfg: ExperimentConfig, seed: int, n_train: int, pair_noise: int = 0, grade_noise: int = 0) -> TaskOutcome:
    """Generate data for one sweep point, fit the model and score it."""
    levels = cfg.truth.levels
    truth = make_ground_truth(cfg.truth)
    train = sample_pairs(cfg, n_train, np.random.default_rng([seed, STREAM_TRAIN]))
    validation = sample_pairs(cfg, cfg.n_validation, np.random.default_rng([seed, STREAM_VALIDATION]), "general")
    test = sample_pairs(cfg, cfg.n_test, np.random.default_rng([seed, STREAM_TEST]), "general")

    noise_rng = np.random.default_rng([seed, STREAM_NOISE, pair_noise, grade_noise])
    train = inject_pair_noise(train, pair_noise, noise_rng)
    if grade_noise:
        train = inject_grade_noise(train, grade_noise, noise_rng, levels)

    train_enc = to_preference_pairs(train, cfg.model, levels)
    test_deltas = _deltas(to_preference_pairs(test, cfg.model, levels))

    noisy = pair_noise > 0 or grade_noise > 0
    select = cfg.select_c == "always" or (cfg.select_c == "auto" and noisy)
    candidates = cfg.c_grid if select and len(cfg.c_grid) > 1 else (cfg.c_default,)
    try:
        if len(candidates) == 1:
            chosen_c, w_hat = candidates[0], _fit_for(cfg, train_enc, candidates[0], seed)
        else:
            val_deltas = _deltas(to_preference_pairs(validation, cfg.model, levels))
            best = None
            for C in candidates:
                w = _fit_for(cfg, train_enc, C, seed)
                score = precision_from_deltas(w.weights, val_deltas)
                if best is None or score > best[0]:
                    best = (score, C, w)
            _, chosen_c, w_hat = best
    except ConvergenceError as exc:
        raise ConvergenceError(
            f"seed={seed} n_train={n_train} noise_pairs={pair_noise} noise_grades={grade_noise}: {exc}",
            objective=exc.objective,
            iterations=exc.iterations,
        ) from exc

    if cfg.model == "gradeFree":
        truth = grade_free_truth(truth, cfg.base_list)
    try:
        sim = similarity(truth, w_hat)
    except ValueError:
        sim = float("nan")
    row = ResultRow(
        seed=seed,
        n_train_pairs=n_train,
        noise_pairs=pair_noise,
        noise_grades=grade_noise,
        model=cfg.model,
        pair_mode=cfg.pair_mode,
        chosen_c=float(chosen_c),
        precision=precision_from_deltas(w_hat.weights, test_deltas),
        similarity=sim,
    )
    return TaskOutcome(row, w_hat, truth)


def tasks(cfg: ExperimentConfig) -> list[tuple]:
    return [
        (seed, n, pn, gn)
        for seed in cfg.seeds
        for n in cfg.n_train
        for pn in cfg.pair_noise
        for gn in cfg.grade_noise
    ]


def _run_row(args):
    cfg, task = args
    return run_task(cfg, *task).row


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run every seed and sweep point; rows come back in task order."""
    jobs = [(cfg, t) for t in tasks(cfg)]
    if cfg.workers == 1:
        return [_run_row(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(_run_row, jobs))


def medians(rows: Sequence[ResultRow], key: str = "n_train_pairs", metric: str = "precision") -> dict:
    """Median of ``metric`` over seeds for each value of ``key``."""
    groups: dict = {}
    for r in rows:
        groups.setdefault(getattr(r, key), []).append(getattr(r, metric))
    return {k: float(np.nanmedian(v)) for k, v in sorted(groups.items())}


def with_overrides(cfg: ExperimentConfig, **changes) -> ExperimentConfig:
    truth_keys = {"setting", "positions", "levels", "log_base"}
    truth_changes = {k: changes.pop(k) for k in list(changes) if k in truth_keys}
    if truth_changes:
        changes["truth"] = replace(cfg.truth, **truth_changes)
    return replace(cfg, **changes)
