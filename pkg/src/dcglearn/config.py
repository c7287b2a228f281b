"""Flat ``key = value`` experiment configuration files.

Recognised keys (all optional)::

    setting       data1 | data2
    positions     K, number of ranked positions            (10)
    levels        L, number of grades                      (5)
    log_base      base of the ground-truth discount log    (e)
    base_list     comma-separated grades                   (5,5,4,4,3,3,2,2,1,1)
    n_train       training sizes, e.g. 20,40,200 or 20-200:20
    n_test        test pairs                               (1000)
    n_validation  validation pairs for choosing C          (200)
    pair_noise    flipped training pairs, list             (0)
    grade_noise   corrupted grade slots, list              (0)
    pair_mode     general | optimalSameList | optimalDifferentLists
    model         base | hammingMargin | gradeFree
    seeds         seed list, e.g. 0-9 or 1,5,7             (0-9)
    c_grid        candidate C values                       (0.01,0.1,1,10,100)
    c_default     C used when no selection happens         (1)
    select_c      auto | always | never                    (auto)
    workers       worker processes                         (1)

Integer lists accept ``a-b`` (inclusive) and ``a-b:step`` ranges. Lines
starting with ``#`` or ``;`` are comments.
"""

from __future__ import annotations

import configparser
import math
from typing import Mapping

from .simulation import ExperimentConfig, GroundTruthSpec

SECTION = "experiment"


class InvalidConfigError(ValueError):
    pass


def _int_list(text: str) -> tuple:
    values = []
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        if "-" in part[1:]:
            span, _, step = part.partition(":")
            lo, hi = span.split("-", 1)
            values.extend(range(int(lo), int(hi) + 1, int(step) if step else 1))
        else:
            values.append(int(part))
    if not values:
        raise ValueError("empty list")
    return tuple(values)


def _float_list(text: str) -> tuple:
    values = tuple(float(p) for p in text.replace(" ", "").split(",") if p)
    if not values:
        raise ValueError("empty list")
    return values


def _log_base(text: str) -> float:
    return math.e if text.strip().lower() in ("e", "natural") else float(text)


PARSERS = {
    "setting": str,
    "positions": int,
    "levels": int,
    "log_base": _log_base,
    "base_list": _int_list,
    "n_train": _int_list,
    "n_test": int,
    "n_validation": int,
    "pair_noise": _int_list,
    "grade_noise": _int_list,
    "pair_mode": str,
    "model": str,
    "seeds": _int_list,
    "c_grid": _float_list,
    "c_default": float,
    "select_c": str,
    "workers": int,
}
TRUTH_KEYS = ("setting", "positions", "levels", "log_base")


def read_config_text(text: str) -> dict:
    """Raw ``key -> string`` mapping from config file text."""
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(f"[{SECTION}]\n{text}")
    except configparser.Error as exc:
        raise InvalidConfigError(f"malformed config: {exc}") from exc
    return dict(parser[SECTION])


def parse_values(raw: Mapping[str, str]) -> dict:
    """Convert raw strings to typed values, rejecting unknown keys."""
    out = {}
    for key, text in raw.items():
        if key not in PARSERS:
            raise InvalidConfigError(f"unknown config key {key!r}")
        try:
            out[key] = PARSERS[key](text.strip())
        except ValueError as exc:
            raise InvalidConfigError(f"bad value for {key}: {text!r}") from exc
    return out


def build_config(values: Mapping) -> ExperimentConfig:
    """ExperimentConfig from typed values; validation errors become InvalidConfigError."""
    values = dict(values)
    truth_args = {k: values.pop(k) for k in TRUTH_KEYS if k in values}
    try:
        return ExperimentConfig(truth=GroundTruthSpec(**truth_args), **values)
    except (ValueError, TypeError) as exc:
        raise InvalidConfigError(str(exc)) from exc


def load_config(path, overrides: Mapping[str, str] | None = None) -> ExperimentConfig:
    """Read a config file (or none) and apply string-valued overrides on top."""
    raw = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                raw = read_config_text(fh.read())
        except OSError as exc:
            raise InvalidConfigError(f"cannot read config {path}: {exc}") from exc
    raw.update(overrides or {})
    return build_config(parse_values(raw))
