"""Distortion operators mapping true event sequences to observed ones.

Two families: missingness (a detection probability per event) and timestamp
perturbation.  Missingness covers total blackout intervals (``Gap``) and a
linearly varying detection rate (``LinearDetection``); perturbation covers
Gaussian jitter (``GaussianNoise``) and a constant recording delay
(``FixedDelay``).  ``NoDistortion`` is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hawkes import EventSequence, RandomStream

__all__ = [
    "NoDistortion",
    "Gap",
    "LinearDetection",
    "GaussianNoise",
    "FixedDelay",
    "Distortion",
    "distort",
    "detection_prob",
]


@dataclass(frozen=True)
class NoDistortion:
    """Identity: every event observed at its true time."""


@dataclass(frozen=True)
class Gap:
    """Zero detection inside [start, end], full detection outside."""

    start: float
    end: float

    def validate(self, horizon: float) -> None:
        if not 0 <= self.start < self.end <= horizon:
            raise ValueError(
                f"gap [{self.start}, {self.end}] not inside window [0, {horizon}]"
            )


@dataclass(frozen=True)
class LinearDetection:
    """Each event at time t kept with probability 1 - (a + b*t/T)."""

    a: float
    b: float

    def validate(self, horizon: float) -> None:
        # Linear in t, so checking the endpoints covers the whole window.
        for p in (1.0 - self.a, 1.0 - (self.a + self.b)):
            if not 0.0 <= p <= 1.0:
                raise ValueError(
                    f"detection probability leaves [0, 1] on the window "
                    f"(a={self.a}, b={self.b})"
                )


@dataclass(frozen=True)
class GaussianNoise:
    """Observed time is t + eps with eps ~ Normal(0, sigma^2)."""

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


@dataclass(frozen=True)
class FixedDelay:
    """Observed time is t + c for a known constant c."""

    c: float


Distortion = NoDistortion | Gap | LinearDetection | GaussianNoise | FixedDelay


def _detection_probs(times: np.ndarray, d: Distortion, horizon: float) -> np.ndarray:
    if isinstance(d, NoDistortion):
        return np.ones(times.size)
    if isinstance(d, Gap):
        d.validate(horizon)
        return np.where((times >= d.start) & (times <= d.end), 0.0, 1.0)
    if isinstance(d, LinearDetection):
        d.validate(horizon)
        return 1.0 - (d.a + d.b * times / horizon)
    raise ValueError(
        f"detection probability undefined for timestamp perturbation {type(d).__name__}"
    )


def detection_prob(t: float, d: Distortion, horizon: float) -> float:
    """Probability that an event at time t is observed, for missingness variants.

    Raises for noise/delay variants, where events move rather than vanish.
    """
    if not 0 <= t <= horizon:
        raise ValueError(f"t={t} outside window [0, {horizon}]")
    return float(_detection_probs(np.array([t]), d, horizon)[0])


def _strictify(times: np.ndarray, horizon: float) -> np.ndarray:
    """Break exact ties (probability zero, but floats collide) by nudging the
    later event up one ulp; drop anything nudged past the horizon."""
    for i in range(1, times.size):
        if times[i] <= times[i - 1]:
            times[i] = np.nextafter(times[i - 1], np.inf)
    return times[times <= horizon]


def distort(z: EventSequence, d: Distortion, rng: RandomStream) -> EventSequence:
    """Apply a distortion to a true sequence, yielding the observed sequence.

    Missingness variants delete events; perturbation variants move them,
    re-sort, and drop any that leave [0, horizon].
    """
    t = z.times
    horizon = z.horizon
    if isinstance(d, NoDistortion):
        return EventSequence(t.copy(), horizon)
    if isinstance(d, Gap):
        d.validate(horizon)
        keep = (t < d.start) | (t > d.end)
        return EventSequence(t[keep], horizon)
    if isinstance(d, LinearDetection):
        probs = _detection_probs(t, d, horizon)
        keep = rng.random(t.size) < probs
        return EventSequence(t[keep], horizon)
    if isinstance(d, GaussianNoise):
        moved = t + rng.normal(0.0, d.sigma, size=t.size)
        moved = np.sort(moved[(moved >= 0) & (moved <= horizon)])
        return EventSequence(_strictify(moved, horizon), horizon)
    if isinstance(d, FixedDelay):
        moved = t + d.c  # order preserved
        return EventSequence(moved[(moved >= 0) & (moved <= horizon)], horizon)
    raise TypeError(f"unknown distortion {type(d).__name__}")
