"""Summary statistics for comparing event sequences without a likelihood.

The seven-statistic family ("abc7"): log event count, median/mean ratio of
inter-event gaps, Ripley's K at three window lengths (no border correction),
and the mean gap above the 90% quantile / below the median.  The
two-statistic family ("alt2"): log event count plus a KL divergence between
binned inter-event-gap histograms of a reference and a candidate sequence.

Sequences too small (or too regular) to yield stable statistics raise
``DegenerateSequenceError``; ABC samplers treat that as an automatic
rejection rather than a failure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hawkes import EventSequence

__all__ = [
    "DegenerateSequenceError",
    "SummaryVector",
    "Thresholds",
    "interevent_diffs",
    "median_mean_ratio",
    "tail_means",
    "ripley_k",
    "compute_summaries",
    "compute_summaries_alt",
    "accept_candidate",
    "SUMMARY_FAMILIES",
    "MIN_EVENTS",
]

SUMMARY_FAMILIES = {"abc7": 7, "alt2": 2}

# Candidates below this size cannot produce stable quantile statistics.
MIN_EVENTS = 10

DEFAULT_RIPLEY_WINDOWS = (1.0, 2.0, 4.0)

_KL_BINS = 20
_KL_SMOOTH = 1.0 / _KL_BINS  # one pseudo-observation spread over the bins


class DegenerateSequenceError(ValueError):
    """Sequence too small or too regular to summarize."""


@dataclass(eq=False)
class SummaryVector:
    values: np.ndarray
    set_id: str

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if self.set_id not in SUMMARY_FAMILIES:
            raise ValueError(f"unknown summary family {self.set_id!r}")
        if v.size != SUMMARY_FAMILIES[self.set_id]:
            raise ValueError(
                f"family {self.set_id!r} has {SUMMARY_FAMILIES[self.set_id]} "
                f"statistics, got {v.size}"
            )
        if not np.isfinite(v).all():
            raise DegenerateSequenceError("summary statistics must be finite")
        self.values = v


@dataclass(eq=False)
class Thresholds:
    """Per-statistic acceptance radii, aligned with a SummaryVector."""

    eps: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.eps, dtype=float).reshape(-1)
        if not (e > 0).all():
            raise ValueError("all thresholds must be > 0")
        self.eps = e


def interevent_diffs(y: EventSequence) -> np.ndarray:
    """Consecutive gaps t_{i+1} - t_i; requires at least two events."""
    if len(y) < 2:
        raise DegenerateSequenceError(
            f"need >= 2 events for inter-event gaps, got {len(y)}"
        )
    return np.diff(y.times)


def _quantile_sorted(s: np.ndarray, p: float) -> float:
    """Linear interpolation between order statistics at rank p*(n-1)+1.

    Same convention as numpy's default; takes an already-sorted array so the
    hot path sorts only once.
    """
    pos = p * (s.size - 1)
    lo = int(pos)
    frac = pos - lo
    if frac == 0.0 or lo + 1 == s.size:
        return float(s[lo])
    return float(s[lo] + frac * (s[lo + 1] - s[lo]))


def median_mean_ratio(diffs: np.ndarray) -> float:
    """Median of the gaps divided by their sample mean."""
    s = np.sort(np.asarray(diffs, dtype=float))
    return _quantile_sorted(s, 0.5) / float(s.mean())


def tail_means(diffs: np.ndarray) -> tuple[float, float]:
    """Mean gap strictly above the 90% quantile and strictly below the median.

    Raises when either selection is empty (e.g. all gaps equal): such a
    candidate carries no tail information and is rejected upstream.
    """
    s = np.sort(np.asarray(diffs, dtype=float))
    q90 = _quantile_sorted(s, 0.9)
    med = _quantile_sorted(s, 0.5)
    upper = s[np.searchsorted(s, q90, side="right") :]
    lower = s[: np.searchsorted(s, med, side="left")]
    if upper.size == 0 or lower.size == 0:
        raise DegenerateSequenceError("no gaps beyond the quantile cutoffs")
    return float(upper.mean()), float(lower.mean())


def ripley_k(y: EventSequence, w: float) -> float:
    """(2/N) times the number of ordered pairs within w of each other.

    Per-event neighbor count, no border correction, so sequences of different
    lengths are comparable.
    """
    if len(y) < 1:
        raise DegenerateSequenceError("Ripley's K needs at least one event")
    if w <= 0:
        raise ValueError(f"window length must be positive, got {w}")
    t = y.times
    # t sorted: pairs (i, j>i) with t_j - t_i <= w counted via binary search
    pairs = int((np.searchsorted(t, t + w, side="right") - np.arange(1, t.size + 1)).sum())
    return 2.0 * pairs / t.size


def compute_summaries(
    y: EventSequence, windows: tuple[float, ...] = DEFAULT_RIPLEY_WINDOWS
) -> SummaryVector:
    """The seven-statistic vector of a sequence (family "abc7")."""
    if len(y) < MIN_EVENTS:
        raise DegenerateSequenceError(
            f"need >= {MIN_EVENTS} events to summarize, got {len(y)}"
        )
    if len(windows) != 3:
        raise ValueError("exactly three Ripley windows expected")
    diffs = np.diff(y.times)
    s = np.sort(diffs)
    mean = float(s.mean())
    med = _quantile_sorted(s, 0.5)
    q90 = _quantile_sorted(s, 0.9)
    upper = s[np.searchsorted(s, q90, side="right") :]
    lower = s[: np.searchsorted(s, med, side="left")]
    if upper.size == 0 or lower.size == 0:
        raise DegenerateSequenceError("no gaps beyond the quantile cutoffs")
    values = [
        math.log(len(y)),
        med / mean,
        ripley_k(y, windows[0]),
        ripley_k(y, windows[1]),
        ripley_k(y, windows[2]),
        float(upper.mean()),
        float(lower.mean()),
    ]
    return SummaryVector(np.array(values), "abc7")


def _gap_histogram(diffs: np.ndarray, hi: float) -> np.ndarray:
    """Smoothed bin probabilities of the gaps on [0, hi]."""
    counts, _ = np.histogram(diffs, bins=_KL_BINS, range=(0.0, hi))
    return (counts + _KL_SMOOTH) / (counts.sum() + _KL_BINS * _KL_SMOOTH)


def compute_summaries_alt(y: EventSequence, reference: EventSequence) -> SummaryVector:
    """Two-statistic vector (family "alt2"): log count and histogram KL.

    The KL term compares the reference sequence's gap distribution against
    the candidate's, on a shared 20-bin grid spanning both; the reference
    sequence's own vector therefore has KL exactly 0.
    """
    d_y = interevent_diffs(y)
    d_ref = interevent_diffs(reference)
    hi = float(max(d_y.max(), d_ref.max()))
    p = _gap_histogram(d_ref, hi)
    q = _gap_histogram(d_y, hi)
    kl = float(np.sum(p * np.log(p / q)))
    return SummaryVector(np.array([math.log(len(y)), kl]), "alt2")


def accept_candidate(
    s_obs: SummaryVector, s_sim: SummaryVector, eps: Thresholds
) -> bool:
    """True iff every coordinate differs by strictly less than its threshold."""
    if s_obs.set_id != s_sim.set_id:
        raise ValueError(
            f"summary families differ: {s_obs.set_id!r} vs {s_sim.set_id!r}"
        )
    if eps.eps.size != s_obs.values.size:
        raise ValueError(
            f"{eps.eps.size} thresholds for {s_obs.values.size} statistics"
        )
    return bool(np.all(np.abs(s_sim.values - s_obs.values) < eps.eps))
