"""Core Hawkes process model.

A univariate self-exciting point process on a window [0, T] with constant
background rate ``mu`` and exponential excitation kernel ``k * beta *
exp(-beta * z)``.  ``k`` is the branching ratio (mean offspring per event);
``k < 1`` keeps the process subcritical so simulations terminate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RandomStream",
    "HawkesParams",
    "EventSequence",
    "intensity",
    "compensator",
    "log_likelihood",
    "simulate",
    "expected_count",
]

# Any deterministic numpy generator; callers own seeding (np.random.default_rng).
RandomStream = np.random.Generator


@dataclass(frozen=True)
class HawkesParams:
    """Parameter triple (mu, k, beta).

    mu : background event rate, > 0
    k : branching ratio, in [0, 1)
    beta : kernel decay rate, > 0
    """

    mu: float
    k: float
    beta: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0):
            raise ValueError(f"mu must be positive and finite, got {self.mu}")
        if not (math.isfinite(self.k) and 0 <= self.k < 1):
            raise ValueError(f"k must lie in [0, 1), got {self.k}")
        if not (math.isfinite(self.beta) and self.beta > 0):
            raise ValueError(f"beta must be positive and finite, got {self.beta}")

    def as_array(self) -> np.ndarray:
        return np.array([self.mu, self.k, self.beta])


@dataclass(eq=False)
class EventSequence:
    """Strictly increasing event times on an observation window [0, horizon].

    May be empty.  ``horizon == 0`` is allowed and forces emptiness (it arises
    from simulating on a zero-length window).
    """

    times: np.ndarray
    horizon: float

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).reshape(-1)
        if not math.isfinite(self.horizon) or self.horizon < 0:
            raise ValueError(f"horizon must be finite and >= 0, got {self.horizon}")
        if t.size:
            if not np.isfinite(t).all():
                raise ValueError("event times must be finite")
            if np.any(np.diff(t) <= 0):
                raise ValueError("event times must be strictly increasing")
            if t[0] < 0 or t[-1] > self.horizon:
                raise ValueError(
                    f"event times must lie in [0, {self.horizon}], "
                    f"got range [{t[0]}, {t[-1]}]"
                )
        self.times = t
        self.horizon = float(self.horizon)

    def __len__(self) -> int:
        return self.times.size


def intensity(t: float, history: EventSequence, theta: HawkesParams) -> float:
    """Conditional intensity at time t given the events strictly before t.

    Events at times >= t contribute nothing (left limit).
    """
    if not 0 <= t <= history.horizon:
        raise ValueError(f"t={t} outside observation window [0, {history.horizon}]")
    past = history.times[history.times < t]
    return theta.mu + theta.k * theta.beta * np.exp(-theta.beta * (t - past)).sum()


def compensator(seq: EventSequence, theta: HawkesParams) -> float:
    """Integral of the conditional intensity over [0, horizon], closed form.

    mu*T + k * sum_i (1 - exp(-beta * (T - t_i))).
    """
    tail = -np.expm1(-theta.beta * (seq.horizon - seq.times))
    return theta.mu * seq.horizon + theta.k * float(tail.sum())


def _excitations(times: np.ndarray, k: float, beta: float) -> np.ndarray:
    """Summed kernel contribution at each event time from all earlier events.

    Uses a log-domain cumulative sum so large beta*t never overflows:
    sum_{j<i} exp(-beta (t_i - t_j)) = exp(logsumexp(beta t_{<i}) - beta t_i).
    """
    n = times.size
    out = np.zeros(n)
    if n > 1 and k > 0:
        b = beta * times
        running = np.logaddexp.accumulate(b)
        out[1:] = k * beta * np.exp(running[:-1] - b[1:])
    return out


def log_likelihood(seq: EventSequence, theta: HawkesParams) -> float:
    """Exact log-likelihood: sum_i log lambda(t_i-) minus the compensator."""
    lam = theta.mu + _excitations(seq.times, theta.k, theta.beta)
    return float(np.log(lam).sum()) - compensator(seq, theta)


# Uniform draws are consumed from fixed-size batches (two per thinning
# candidate); batching only amortizes generator call overhead, the draw
# sequence is still fully determined by the stream state.
_CHUNK = 512


def simulate(theta: HawkesParams, horizon: float, rng: RandomStream) -> EventSequence:
    """Draw one realization on [0, horizon] by Ogata thinning.

    Candidates are proposed from the current right-limit intensity, which
    dominates the true intensity until the next candidate because the
    exponential kernel only decays between events.
    """
    if horizon < 0:
        raise ValueError(f"horizon must be >= 0, got {horizon}")
    mu, k, beta = theta.mu, theta.k, theta.beta
    jump = k * beta
    t = 0.0
    excite = 0.0  # kernel sum at current time, right limit
    times: list[float] = []
    buf = rng.random(_CHUNK).tolist()
    i = _CHUNK
    while True:
        if i == _CHUNK:
            buf = rng.random(_CHUNK).tolist()
            i = 0
        u_wait = buf[i]
        u_acc = buf[i + 1]
        i += 2
        if u_wait <= 0.0:  # -log(0): infinite waiting time
            break
        rate = mu + excite
        w = -math.log(u_wait) / rate
        t += w
        if t > horizon:
            break
        excite *= math.exp(-beta * w)
        if u_acc * rate <= mu + excite:
            times.append(t)
            excite += jump
    return EventSequence(np.asarray(times), horizon)


def expected_count(theta: HawkesParams, horizon: float) -> float:
    """Stationary approximation mu*T/(1-k) of the expected event count."""
    if theta.k >= 1:
        raise ValueError("expected count diverges for k >= 1")
    return theta.mu * horizon / (1.0 - theta.k)
