"""Posterior samplers: likelihood-free ABC-MCMC and exact-likelihood MH.

The ABC sampler never evaluates the Hawkes likelihood.  Each proposal is
scored by simulating a fresh sequence, pushing it through the distortion
operator, and comparing summary statistics of the result against those of
the observed data, coordinate-wise, with per-statistic thresholds.
Thresholds come from a pilot run: a batch of prior-predictive simulations
whose summary spread sets the scale, tuned so only a tiny fraction of prior
draws would be accepted.

The exact sampler is a plain random-walk Metropolis-Hastings targeting
prior times likelihood; it provides ground-truth posteriors on undistorted
data and the biased "naive" baseline when pointed at distorted data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .distortion import Distortion, Gap, LinearDetection, distort
from .hawkes import EventSequence, HawkesParams, RandomStream, log_likelihood, simulate
from .summaries import (
    SUMMARY_FAMILIES,
    DegenerateSequenceError,
    SummaryVector,
    Thresholds,
    accept_candidate,
    compute_summaries,
    compute_summaries_alt,
)

__all__ = [
    "CalibrationError",
    "UniformPrior",
    "ProposalKernel",
    "Chain",
    "PilotReport",
    "PosteriorSummary",
    "pilot_calibrate",
    "abc_mcmc",
    "exact_mh",
    "posterior_summary",
    "DEFAULT_SCALE_GRID",
]

PARAM_NAMES = ("mu", "k", "beta")

# Decreasing grid of threshold scales tried by the pilot calibration.
DEFAULT_SCALE_GRID = (2.0, 1.5, 1.0, 0.75, 0.5, 0.35, 0.25, 0.15, 0.1, 0.05)

DEFAULT_TARGET_BAND = (0.0001, 0.001)


class CalibrationError(RuntimeError):
    """Pilot run cannot produce usable thresholds."""


@dataclass(frozen=True)
class UniformPrior:
    """Independent uniform box prior over (mu, k, beta)."""

    mu: tuple[float, float] = (0.05, 0.85)
    k: tuple[float, float] = (0.0, 0.9)
    beta: tuple[float, float] = (0.1, 3.0)

    def __post_init__(self):
        for name, (lo, hi) in zip(PARAM_NAMES, self.bounds()):
            if not lo < hi:
                raise ValueError(f"{name} bounds must satisfy lo < hi, got ({lo}, {hi})")
        if self.mu[0] <= 0 or self.beta[0] <= 0:
            raise ValueError("mu and beta lower bounds must be positive")
        if self.k[0] < 0 or self.k[1] >= 1:
            raise ValueError(f"k bounds must lie within [0, 1), got {self.k}")

    def bounds(self) -> np.ndarray:
        return np.array([self.mu, self.k, self.beta])

    def volume(self) -> float:
        b = self.bounds()
        return float(np.prod(b[:, 1] - b[:, 0]))

    def contains(self, theta: np.ndarray) -> bool:
        b = self.bounds()
        return bool(np.all(theta >= b[:, 0]) and np.all(theta <= b[:, 1]))

    def log_density(self, theta: np.ndarray) -> float:
        """Constant -log(volume) inside the box, -inf outside."""
        if not self.contains(np.asarray(theta, dtype=float)):
            return -math.inf
        return -math.log(self.volume())

    def sample(self, rng: RandomStream) -> np.ndarray:
        b = self.bounds()
        return rng.uniform(b[:, 0], b[:, 1])


@dataclass(frozen=True)
class ProposalKernel:
    """Independent Gaussian random-walk steps; symmetric by construction."""

    sds: tuple[float, float, float] = (0.05, 0.05, 0.2)

    def __post_init__(self):
        if not all(s > 0 for s in self.sds):
            raise ValueError(f"proposal sds must be positive, got {self.sds}")

    def propose(self, theta: np.ndarray, rng: RandomStream) -> np.ndarray:
        return np.asarray(theta, dtype=float) + rng.normal(size=3) * np.asarray(self.sds)


@dataclass(eq=False)
class Chain:
    """Posterior samples theta^(1..J) with per-iteration acceptance flags."""

    thetas: np.ndarray  # (J, 3)
    accepted: np.ndarray  # (J,) bool
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.thetas = np.asarray(self.thetas, dtype=float).reshape(-1, 3)
        self.accepted = np.asarray(self.accepted, dtype=bool).reshape(-1)
        if self.accepted.size != self.thetas.shape[0]:
            raise ValueError("thetas and accepted flags must have equal length")

    def __len__(self) -> int:
        return self.thetas.shape[0]

    @property
    def iters(self) -> np.ndarray:
        return np.arange(1, len(self) + 1)


@dataclass(eq=False)
class PilotReport:
    """Outcome of threshold calibration from a prior-predictive pilot run."""

    sds: np.ndarray  # per-statistic spread over valid pilot draws
    scale: float  # chosen fraction c, thresholds = c * sds
    thresholds: Thresholds
    acceptance: float  # estimated acceptance fraction at the chosen scale
    in_band: bool  # False when no grid point landed inside the target band
    best_theta: np.ndarray  # pilot draw with the smallest scaled summary distance
    n_valid: int
    n_pilot: int
    summary_set: str
    summaries: np.ndarray  # (n_valid, P) pilot summary sample behind the estimates


@dataclass(eq=False)
class PosteriorSummary:
    mean: np.ndarray
    sd: np.ndarray
    acceptance_rate: float
    n_retained: int

    def as_dict(self) -> dict[str, tuple[float, float]]:
        return {
            name: (float(m), float(s))
            for name, m, s in zip(PARAM_NAMES, self.mean, self.sd)
        }


def _summarizer(summary_set: str, y_obs: EventSequence):
    """Observed summary vector plus the function scoring simulated candidates."""
    if summary_set == "abc7":
        return compute_summaries(y_obs), compute_summaries
    if summary_set == "alt2":
        return (
            compute_summaries_alt(y_obs, y_obs),
            lambda y: compute_summaries_alt(y, y_obs),
        )
    raise ValueError(f"unknown summary family {summary_set!r}")


def _validate_distortion(d: Distortion, horizon: float) -> None:
    if isinstance(d, (Gap, LinearDetection)):
        d.validate(horizon)


def _active_dims(fix_mu: float | None) -> np.ndarray:
    return np.array([1, 2]) if fix_mu is not None else np.array([0, 1, 2])


def _in_support(prior: UniformPrior, theta: np.ndarray, active: np.ndarray) -> bool:
    b = prior.bounds()[active]
    th = theta[active]
    return bool(np.all(th >= b[:, 0]) and np.all(th <= b[:, 1]))


def _initial_theta(
    prior: UniformPrior,
    rng: RandomStream,
    init: np.ndarray | None,
    fix_mu: float | None,
    active: np.ndarray,
) -> np.ndarray:
    if init is None:
        theta = prior.sample(rng)
    else:
        theta = np.array(init, dtype=float).reshape(3)
    if fix_mu is not None:
        theta[0] = fix_mu
    if not _in_support(prior, theta, active):
        raise ValueError(f"initial state {theta} outside prior support")
    return theta


def pilot_calibrate(
    y_obs: EventSequence,
    d: Distortion,
    prior: UniformPrior,
    n_pilot: int,
    target_band: tuple[float, float] = DEFAULT_TARGET_BAND,
    rng: RandomStream | None = None,
    *,
    summary_set: str = "abc7",
    fix_mu: float | None = None,
    scale_grid: tuple[float, ...] = DEFAULT_SCALE_GRID,
) -> PilotReport:
    """Choose per-statistic thresholds from a prior-predictive pilot run.

    Draws ``n_pilot`` parameter vectors from the prior, simulates and distorts
    a sequence for each, and measures the per-statistic standard deviation of
    the resulting summaries.  Returns the smallest scale ``c`` on the grid for
    which the fraction of pilot draws falling within ``c * sd`` of the
    observed summaries lies inside ``target_band``; when no grid point lands
    in the band, the closest one is returned with ``in_band=False``.

    Degenerate pilot draws (too few events) can never be accepted and are
    excluded from the spread estimate but kept in the acceptance denominator.
    """
    if rng is None:
        raise ValueError("an explicit random stream is required")
    if n_pilot < 1000:
        raise ValueError(f"pilot needs at least 1000 draws, got {n_pilot}")
    lo, hi = target_band
    if not 0 <= lo < hi:
        raise ValueError(f"invalid target band ({lo}, {hi})")
    s_obs, summarize = _summarizer(summary_set, y_obs)
    _validate_distortion(d, y_obs.horizon)

    rows = []
    thetas = []
    for _ in range(n_pilot):
        theta = prior.sample(rng)
        if fix_mu is not None:
            theta[0] = fix_mu
        z = simulate(HawkesParams(*theta), y_obs.horizon, rng)
        y_sim = distort(z, d, rng)
        try:
            rows.append(summarize(y_sim).values)
            thetas.append(theta)
        except DegenerateSequenceError:
            continue
    if len(rows) < 2:
        raise CalibrationError(
            f"only {len(rows)} of {n_pilot} pilot draws produced summaries"
        )
    summ = np.array(rows)
    sds = summ.std(axis=0, ddof=1)
    if np.any(sds == 0):
        raise CalibrationError("a summary statistic has zero variance in the pilot")

    scaled = np.abs(summ - s_obs.values) / sds  # (n_valid, P)
    worst = scaled.max(axis=1)
    best_theta = np.array(thetas[int(np.argmin(worst))])

    # Acceptance fraction at scale c counts rows with every coordinate
    # strictly below c; monotone non-decreasing in c by construction.
    accept_frac = {c: float(np.sum(worst < c)) / n_pilot for c in scale_grid}
    in_band = [c for c in scale_grid if lo <= accept_frac[c] <= hi]
    if in_band:
        chosen = min(in_band)
        flag = True
    else:
        def band_dist(c: float) -> float:
            a = accept_frac[c]
            return lo - a if a < lo else max(a - hi, 0.0)

        chosen = min(scale_grid, key=lambda c: (band_dist(c), c))
        flag = False
    return PilotReport(
        sds=sds,
        scale=chosen,
        thresholds=Thresholds(chosen * sds),
        acceptance=accept_frac[chosen],
        in_band=flag,
        best_theta=best_theta,
        n_valid=len(rows),
        n_pilot=n_pilot,
        summary_set=summary_set,
        summaries=summ,
    )


def abc_mcmc(
    y_obs: EventSequence,
    d: Distortion,
    prior: UniformPrior,
    kernel: ProposalKernel,
    eps: Thresholds,
    j: int,
    rng: RandomStream,
    *,
    summary_set: str = "abc7",
    init: np.ndarray | None = None,
    fix_mu: float | None = None,
) -> Chain:
    """Likelihood-free ABC-MCMC chain of length ``j``.

    Per iteration: propose with the random-walk kernel; proposals outside the
    prior support are rejected without simulating.  Otherwise simulate a
    sequence at the proposal, distort it with ``d``, and require every summary
    statistic to fall strictly within its threshold of the observed value;
    candidates that pass take a standard Metropolis step (ratio 1 for a
    uniform prior and symmetric kernel).  Degenerate simulations count as
    threshold failures.  Rejected iterations repeat the previous state.
    """
    if j < 1:
        raise ValueError(f"chain length must be >= 1, got {j}")
    s_obs, summarize = _summarizer(summary_set, y_obs)
    if eps.eps.size != SUMMARY_FAMILIES[summary_set]:
        raise ValueError(
            f"{eps.eps.size} thresholds for family {summary_set!r} "
            f"({SUMMARY_FAMILIES[summary_set]} statistics)"
        )
    _validate_distortion(d, y_obs.horizon)
    active = _active_dims(fix_mu)
    sds = np.asarray(kernel.sds)[active]
    theta = _initial_theta(prior, rng, init, fix_mu, active)
    horizon = y_obs.horizon

    thetas = np.empty((j, 3))
    accepted = np.zeros(j, dtype=bool)
    for it in range(j):
        cand = theta.copy()
        cand[active] += rng.normal(size=active.size) * sds
        if _in_support(prior, cand, active):
            z = simulate(HawkesParams(*cand), horizon, rng)
            y_sim = distort(z, d, rng)
            try:
                s_sim = summarize(y_sim)
            except DegenerateSequenceError:
                s_sim = None
            if s_sim is not None and accept_candidate(s_obs, s_sim, eps):
                # Uniform prior and symmetric kernel: the MH ratio reduces to
                # the prior ratio, which is 1 for two in-support states.
                log_ratio = prior.log_density(cand) - prior.log_density(theta)
                if log_ratio >= 0 or rng.random() < math.exp(log_ratio):
                    theta = cand
                    accepted[it] = True
        thetas[it] = theta
    return Chain(
        thetas,
        accepted,
        meta={
            "sampler": "abc",
            "prior": prior,
            "kernel": kernel,
            "eps": eps.eps.copy(),
            "summary_set": summary_set,
            "fix_mu": fix_mu,
            "distortion": d,
        },
    )


def exact_mh(
    y: EventSequence,
    prior: UniformPrior,
    kernel: ProposalKernel,
    j: int,
    rng: RandomStream,
    *,
    init: np.ndarray | None = None,
    fix_mu: float | None = None,
    loglik_fn=None,
) -> Chain:
    """Random-walk Metropolis-Hastings targeting prior times exact likelihood.

    ``loglik_fn`` overrides the Hawkes log-likelihood (mainly a test hook;
    a constant function turns the sampler into a prior sampler).
    """
    if j < 1:
        raise ValueError(f"chain length must be >= 1, got {j}")
    if loglik_fn is None:
        def loglik_fn(triple: np.ndarray) -> float:
            return log_likelihood(y, HawkesParams(*triple))

    active = _active_dims(fix_mu)
    sds = np.asarray(kernel.sds)[active]
    theta = _initial_theta(prior, rng, init, fix_mu, active)
    ll_cur = loglik_fn(theta)

    thetas = np.empty((j, 3))
    accepted = np.zeros(j, dtype=bool)
    for it in range(j):
        cand = theta.copy()
        cand[active] += rng.normal(size=active.size) * sds
        if _in_support(prior, cand, active):
            ll_cand = loglik_fn(cand)
            log_ratio = ll_cand - ll_cur  # uniform prior: density ratio is 1
            if log_ratio >= 0 or rng.random() < math.exp(log_ratio):
                theta = cand
                ll_cur = ll_cand
                accepted[it] = True
        thetas[it] = theta
    return Chain(
        thetas,
        accepted,
        meta={
            "sampler": "exact",
            "prior": prior,
            "kernel": kernel,
            "fix_mu": fix_mu,
        },
    )


def posterior_summary(
    chain: Chain, burn_in: int | None = None, thin: int = 1
) -> PosteriorSummary:
    """Mean and sample sd per parameter over the retained samples.

    Default burn-in discards the first 20% of the chain; no thinning.
    The acceptance rate is the accepted fraction among retained iterations.
    """
    if burn_in is None:
        burn_in = len(chain) // 5
    if not 0 <= burn_in < len(chain):
        raise ValueError(f"burn-in {burn_in} outside chain of length {len(chain)}")
    if thin < 1:
        raise ValueError(f"thin must be >= 1, got {thin}")
    kept = chain.thetas[burn_in::thin]
    flags = chain.accepted[burn_in::thin]
    if kept.shape[0] == 0:
        raise ValueError("no samples retained")
    mean = kept.mean(axis=0)
    sd = kept.std(axis=0, ddof=1) if kept.shape[0] > 1 else np.zeros(3)
    return PosteriorSummary(
        mean=mean,
        sd=sd,
        acceptance_rate=float(flags.mean()),
        n_retained=int(kept.shape[0]),
    )
