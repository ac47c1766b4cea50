"""Bayesian inference for Hawkes processes observed through distorted records.

Provides forward simulation and exact likelihoods for the exponential-kernel
Hawkes process, distortion operators (gaps, thinned detection, timestamp
noise, fixed delay), the summary statistics and threshold test used by the
likelihood-free ABC-MCMC sampler, and an exact-likelihood Metropolis-Hastings
baseline for undistorted data.
"""

from .hawkes import (
    EventSequence,
    HawkesParams,
    RandomStream,
    compensator,
    expected_count,
    intensity,
    log_likelihood,
    simulate,
)
from .distortion import (
    FixedDelay,
    GaussianNoise,
    Gap,
    LinearDetection,
    NoDistortion,
    detection_prob,
    distort,
)
from .summaries import (
    DegenerateSequenceError,
    SummaryVector,
    Thresholds,
    accept_candidate,
    compute_summaries,
    compute_summaries_alt,
    interevent_diffs,
    median_mean_ratio,
    ripley_k,
    tail_means,
)
from .inference import (
    CalibrationError,
    Chain,
    PilotReport,
    PosteriorSummary,
    ProposalKernel,
    UniformPrior,
    abc_mcmc,
    exact_mh,
    pilot_calibrate,
    posterior_summary,
)
from .fileio import (
    ParseError,
    read_chain,
    read_events,
    write_chain,
    write_events,
)

__version__ = "0.1.0"
