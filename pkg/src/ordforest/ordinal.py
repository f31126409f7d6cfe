"""Ordinal label space: the rank grid, threshold encoding, and decoding.

A label space is an evenly spaced grid of ``num_ranks`` values starting at
``first_rank`` with spacing ``interval``.  A label is represented for learning
as a vector of ``num_ranks - 1`` threshold bits, where bit ``k`` (0-based)
says whether the label exceeds the value of rank ``k`` (1-based rank ``k+1``
minus one step).  Valid targets are therefore non-increasing 0/1 vectors of
shape ``1...10...0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DataError, ShapeError

# Labels must sit on the rank grid within this fraction of one interval.
GRID_RTOL = 1e-9


@dataclass(frozen=True)
class OrdinalSpec:
    """Evenly spaced rank grid; rank index ``k`` (0-based) has value
    ``first_rank + k * interval``."""

    first_rank: float
    interval: float
    num_ranks: int

    def __post_init__(self) -> None:
        if not self.interval > 0:
            raise ConfigError(f"interval must be positive, got {self.interval!r}")
        if self.num_ranks < 2:
            raise ConfigError(f"num_ranks must be at least 2, got {self.num_ranks!r}")

    @property
    def num_thresholds(self) -> int:
        return self.num_ranks - 1

    @property
    def last_rank(self) -> float:
        return self.rank_value(self.num_ranks - 1)

    def rank_value(self, index: int) -> float:
        """Label value of the 0-based rank ``index``."""
        return self.first_rank + index * self.interval

    def rank_index(self, label: float) -> int:
        """Map a label to its 0-based rank index, rejecting off-grid values."""
        pos = (label - self.first_rank) / self.interval
        index = int(round(pos))
        if (
            index < 0
            or index >= self.num_ranks
            or abs(label - self.rank_value(index)) > GRID_RTOL * self.interval
        ):
            raise DataError(
                f"label {label!r} is not on the rank grid "
                f"[{self.first_rank}, {self.last_rank}] with interval {self.interval}"
            )
        return index


def encode_index(rank_index: int, spec: OrdinalSpec) -> np.ndarray:
    """Threshold bits for a 0-based rank index: the first ``rank_index``
    entries are 1, the rest 0."""
    if rank_index < 0 or rank_index >= spec.num_ranks:
        raise DataError(f"rank index {rank_index} outside [0, {spec.num_ranks})")
    target = np.zeros(spec.num_thresholds)
    target[:rank_index] = 1.0
    return target


def encode(label: float, spec: OrdinalSpec) -> np.ndarray:
    """Encode a grid label as its threshold-bit vector (length K-1)."""
    return encode_index(spec.rank_index(label), spec)


def decode_index(probs: np.ndarray) -> int:
    """Count of entries strictly greater than 0.5; ties at exactly 0.5 do
    not count, so an all-0.5 prediction decodes to rank index 0."""
    return int(np.count_nonzero(np.asarray(probs) > 0.5))


def decode(probs: np.ndarray, spec: OrdinalSpec) -> float:
    """Decode threshold probabilities to a label value on the grid."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (spec.num_thresholds,):
        raise ShapeError(
            f"expected {spec.num_thresholds} threshold probabilities, "
            f"got shape {probs.shape}"
        )
    return spec.rank_value(decode_index(probs))


def validate_target(target: np.ndarray) -> None:
    """Check that a target is a non-increasing 0/1 vector."""
    target = np.asarray(target)
    if not np.all((target == 0.0) | (target == 1.0)):
        raise DataError("target entries must be exactly 0 or 1")
    if np.any(np.diff(target) > 0):
        raise DataError("target bits must be non-increasing")
