"""Inference when recorded timestamps carry Gaussian jitter.

Every event time is observed as t + eps with eps ~ Normal(0, sigma^2).
Jitter scrambles the fine-grained cluster structure: a likelihood fit to
the noisy record typically inflates the kernel decay rate drastically
(it explains accidental near-coincidences as ultra-fast excitation) while
the background rate and branching ratio drift.  The ABC sampler jitters
its own simulations the same way and stays near the posterior that the
clean record would have given.
"""

import argparse
import time

import numpy as np

from hawkesabc import (
    GaussianNoise,
    HawkesParams,
    ProposalKernel,
    UniformPrior,
    abc_mcmc,
    distort,
    exact_mh,
    pilot_calibrate,
    posterior_summary,
    simulate,
)


def row(label, mean, sd):
    cells = "  ".join(f"{m:5.2f} ({s:.2f})" for m, s in zip(mean, sd))
    print(f"{label:<8} {cells}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mu", type=float, default=0.55)
    ap.add_argument("--k", type=float, default=0.5)
    ap.add_argument("--beta", type=float, default=2.0)
    ap.add_argument("--sigma", type=float, default=0.5)
    ap.add_argument("--horizon", type=float, default=200.0)
    ap.add_argument("--iterations", type=int, default=150_000)
    ap.add_argument("--pilot-size", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=5)
    args = ap.parse_args()

    theta = HawkesParams(args.mu, args.k, args.beta)
    rng = np.random.default_rng(args.seed)
    truth = simulate(theta, args.horizon, rng)
    noise = GaussianNoise(args.sigma)
    observed = distort(truth, noise, rng)
    print(f"{len(truth)} true events, {len(observed)} after jitter "
          f"(sigma={args.sigma:g})")

    prior = UniformPrior()
    kernel = ProposalKernel()
    j = args.iterations

    t0 = time.perf_counter()
    ideal = exact_mh(truth, prior, kernel, j, np.random.default_rng(args.seed + 1))
    naive = exact_mh(observed, prior, kernel, j, np.random.default_rng(args.seed + 2))
    print(f"two exact chains: {time.perf_counter() - t0:.1f}s")

    t0 = time.perf_counter()
    pilot = pilot_calibrate(
        observed, noise, prior, args.pilot_size, (0.00005, 0.0005),
        np.random.default_rng(args.seed + 3),
    )
    abc = abc_mcmc(
        observed, noise, prior, kernel, pilot.thresholds, j,
        np.random.default_rng(args.seed + 4), init=pilot.best_theta,
    )
    print(f"pilot + abc chain: {time.perf_counter() - t0:.1f}s")

    print("\nposterior mean (sd)   mu          k           beta")
    row("truth", theta.as_array(), np.zeros(3))
    for label, chain in (("ideal", ideal), ("naive", naive), ("abc", abc)):
        s = posterior_summary(chain)
        row(label, s.mean, s.sd)
    print("\n(ideal = exact sampler on the jitter-free record)")


if __name__ == "__main__":
    main()
