import numpy as np
from hawkesabc import (
    EventSequence, Gap, HawkesParams, UniformPrior, distort,
    pilot_calibrate, simulate, compute_summaries,
)

PRIOR = UniformPrior()
theta = HawkesParams(0.55, 0.65, 0.91)
rng = np.random.default_rng(9004)
full = simulate(theta, 130.0, rng)
ref = EventSequence(full.times[:150], full.times[149])
gap = Gap(ref.times[59], ref.times[89])
observed = distort(ref, gap, rng)
s_obs = compute_summaries(observed).values

for n_pilot in (5000, 20000):
    for seed in (23, 51, 99):
        rep = pilot_calibrate(observed, gap, PRIOR, n_pilot,
                              rng=np.random.default_rng(seed))
        scaled = np.abs(rep.summaries - s_obs) / rep.sds
        worst = scaled.max(axis=1)
        curve = {c: int(np.sum(worst < c)) for c in (0.05, 0.1, 0.15, 0.25, 0.35, 0.5)}
        print(f"n={n_pilot} seed={seed}: chosen c={rep.scale} acc={rep.acceptance:.2e} "
              f"in_band={rep.in_band} counts={curve}")
