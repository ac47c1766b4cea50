"""Command-line front end and experiment orchestration.

Subcommands: ``simulate``, ``distort``, ``summarize``, ``calibrate``,
``abc``, ``mh-exact``, ``report``.  Runs are configured by flat
``key=value`` config files plus overriding flags; every run report echoes
its effective configuration in a ``[config]`` section that can be fed back
as a config file to reproduce the run bit-for-bit.

Randomness derives from one root seed: the pilot run uses sub-stream 0 and
chain ``i`` uses sub-stream ``i``, so runs with ``--chains > 1`` are
reproducible chain by chain.  When no seed is given anywhere, the
``HAWKESABC_SEED`` environment variable supplies the default.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .distortion import (
    Distortion,
    FixedDelay,
    GaussianNoise,
    Gap,
    LinearDetection,
    NoDistortion,
    distort,
)
from .fileio import ParseError, read_chain, read_events, write_chain, write_events
from .hawkes import EventSequence, HawkesParams, simulate
from .inference import (
    PARAM_NAMES,
    CalibrationError,
    PilotReport,
    PosteriorSummary,
    ProposalKernel,
    UniformPrior,
    abc_mcmc,
    exact_mh,
    pilot_calibrate,
    posterior_summary,
)
from .summaries import (
    DEFAULT_RIPLEY_WINDOWS,
    SUMMARY_FAMILIES,
    Thresholds,
    compute_summaries,
    compute_summaries_alt,
)

__all__ = ["main", "ExperimentConfig", "parse_config", "parse_distortion"]

ENV_SEED = "HAWKESABC_SEED"


# ---------------------------------------------------------------------------
# distortion spec strings

def parse_distortion(spec: str) -> Distortion:
    """Parse ``none | gap:<s>,<e> | linear:<a>,<b> | noise:<sigma> | delay:<c>``."""
    name, _, rest = spec.strip().partition(":")
    try:
        if name == "none":
            return NoDistortion()
        if name == "gap":
            s, e = (float(x) for x in rest.split(","))
            return Gap(s, e)
        if name == "linear":
            a, b = (float(x) for x in rest.split(","))
            return LinearDetection(a, b)
        if name == "noise":
            return GaussianNoise(float(rest))
        if name == "delay":
            return FixedDelay(float(rest))
    except (ValueError, TypeError) as exc:
        raise ValueError(f"bad distortion spec {spec!r}: {exc}") from None
    raise ValueError(f"unknown distortion {name!r} in {spec!r}")


def distortion_spec(d: Distortion) -> str:
    if isinstance(d, NoDistortion):
        return "none"
    if isinstance(d, Gap):
        return f"gap:{d.start:.17g},{d.end:.17g}"
    if isinstance(d, LinearDetection):
        return f"linear:{d.a:.17g},{d.b:.17g}"
    if isinstance(d, GaussianNoise):
        return f"noise:{d.sigma:.17g}"
    if isinstance(d, FixedDelay):
        return f"delay:{d.c:.17g}"
    raise TypeError(f"unknown distortion {type(d).__name__}")


# ---------------------------------------------------------------------------
# experiment configuration

def _floats(value: str, n: int | None = None) -> tuple[float, ...]:
    parts = tuple(float(x) for x in value.split(","))
    if n is not None and len(parts) != n:
        raise ValueError(f"expected {n} comma-separated numbers, got {len(parts)}")
    return parts


@dataclass
class ExperimentConfig:
    """Everything a sampling run needs, expressible as flat key=value lines."""

    horizon: float | None = None
    mu_prior: tuple[float, float] = (0.05, 0.85)
    k_prior: tuple[float, float] = (0.0, 0.9)
    beta_prior: tuple[float, float] = (0.1, 3.0)
    proposal_sd: tuple[float, float, float] = (0.05, 0.05, 0.2)
    distortion: str = "none"
    summary_set: str = "abc7"
    eps: tuple[float, ...] | None = None
    eps_scale: float | None = None
    pilot_size: int = 5000
    target_band: tuple[float, float] = (0.0001, 0.001)
    iterations: int = 10000
    burn_in: int | None = None
    thin: int = 1
    chains: int = 1
    seed: int | None = None
    fix_mu: float | None = None
    init: tuple[float, float, float] | None = None
    truncate: float | None = None
    events: str | None = None
    chain_out: str | None = None
    report_out: str | None = None

    def prior(self) -> UniformPrior:
        return UniformPrior(self.mu_prior, self.k_prior, self.beta_prior)

    def kernel(self) -> ProposalKernel:
        return ProposalKernel(self.proposal_sd)

    def distortion_obj(self) -> Distortion:
        return parse_distortion(self.distortion)

    def to_lines(self) -> list[str]:
        """Canonical key=value echo; feeding these back reproduces the run."""
        out = []
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            out.append(f"{f.name}={_format_value(value)}")
        return out


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ",".join(f"{v:.17g}" for v in value)
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


_CONFIG_PARSERS = {
    "horizon": float,
    "mu_prior": lambda v: _floats(v, 2),
    "k_prior": lambda v: _floats(v, 2),
    "beta_prior": lambda v: _floats(v, 2),
    "proposal_sd": lambda v: _floats(v, 3),
    "distortion": str,
    "summary_set": str,
    "eps": _floats,
    "eps_scale": float,
    "pilot_size": int,
    "target_band": lambda v: _floats(v, 2),
    "iterations": int,
    "burn_in": int,
    "thin": int,
    "chains": int,
    "seed": int,
    "fix_mu": float,
    "init": lambda v: _floats(v, 3),
    "truncate": float,
    "events": str,
    "chain_out": str,
    "report_out": str,
}


def parse_config(path) -> dict:
    """Read a flat key=value config file into typed values.

    If the file contains a ``[config]`` section (as run reports do), only
    that section is read, so a report file is itself a valid config.
    """
    lines = Path(path).read_text().splitlines()
    offset = 0
    if any(ln.strip() == "[config]" for ln in lines):
        start = next(i for i, ln in enumerate(lines) if ln.strip() == "[config]")
        body = []
        for ln in lines[start + 1 :]:
            if ln.strip().startswith("["):
                break
            body.append(ln)
        lines = body
        offset = start + 1
    values = {}
    for i, raw in enumerate(lines):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or key not in _CONFIG_PARSERS:
            raise ParseError(path, offset + i + 1, f"unknown config line {line!r}")
        try:
            values[key] = _CONFIG_PARSERS[key](value.strip())
        except ValueError as exc:
            raise ParseError(path, offset + i + 1, f"bad value for {key}: {exc}")
    return values


def _load_config(args, flag_keys: dict[str, str]) -> ExperimentConfig:
    """defaults < config file < command-line flags < (env seed as fallback)."""
    cfg = ExperimentConfig()
    if getattr(args, "config", None):
        cfg = replace(cfg, **parse_config(args.config))
    overrides = {}
    for attr, key in flag_keys.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    if "eps" in overrides:
        overrides["eps"] = _floats(overrides["eps"])
    if "target_band" in overrides:
        overrides["target_band"] = _floats(overrides["target_band"], 2)
    cfg = replace(cfg, **overrides)
    if cfg.seed is None:
        env = os.environ.get(ENV_SEED)
        cfg = replace(cfg, seed=int(env) if env else 0)
    return cfg


# ---------------------------------------------------------------------------
# report emission

def _fmt6(x: float) -> str:
    return f"{x:.6g}"


def _posterior_lines(summary: PosteriorSummary) -> list[str]:
    out = ["[posterior]"]
    for name, (mean, sd) in summary.as_dict().items():
        out.append(f"{name}_mean={_fmt6(mean)}")
        out.append(f"{name}_sd={_fmt6(sd)}")
    out.append(f"acceptance_rate={_fmt6(summary.acceptance_rate)}")
    out.append(f"n_retained={summary.n_retained}")
    return out


def _pilot_lines(pilot: PilotReport) -> list[str]:
    return [
        "[pilot]",
        f"scale={pilot.scale:.17g}",
        f"acceptance={pilot.acceptance:.17g}",
        f"in_band={int(pilot.in_band)}",
        f"n_valid={pilot.n_valid}",
        f"n_pilot={pilot.n_pilot}",
        "summary_sd=" + ",".join(f"{s:.17g}" for s in pilot.sds),
        "best_theta=" + ",".join(f"{t:.17g}" for t in pilot.best_theta),
    ]


def _write_report(
    path,
    *,
    summary: PosteriorSummary,
    eps: np.ndarray | None,
    pilot: PilotReport | None,
    cfg: ExperimentConfig,
    duration: float,
    chain_index: int,
) -> None:
    lines = ["# hawkesabc run report", f"duration_seconds={duration:.3f}"]
    lines += _posterior_lines(summary)
    if chain_index > 1:
        lines.append(f"chain_index={chain_index}")
    if eps is not None:
        lines.append("[thresholds]")
        lines.append("eps=" + ",".join(f"{e:.17g}" for e in eps))
    if pilot is not None:
        lines += _pilot_lines(pilot)
    lines.append("[config]")
    lines += cfg.to_lines()
    Path(path).write_text("\n".join(lines) + "\n")


def _print_posterior(summary: PosteriorSummary) -> None:
    for name, (mean, sd) in summary.as_dict().items():
        print(f"{name:<5}{_fmt6(mean)} ({_fmt6(sd)})")
    print(f"acceptance_rate {_fmt6(summary.acceptance_rate)}")
    print(f"n_retained {summary.n_retained}")


def _suffixed(path: str, index: int) -> str:
    if index == 1:
        return path
    p = Path(path)
    return str(p.with_name(f"{p.stem}.{index}{p.suffix}"))


def _sub_rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((seed, stream)))


# ---------------------------------------------------------------------------
# subcommands

def _cmd_simulate(args) -> int:
    theta = HawkesParams(args.mu, args.k, args.beta)
    seed = args.seed if args.seed is not None else int(os.environ.get(ENV_SEED, "0"))
    seq = simulate(theta, args.horizon, np.random.default_rng(seed))
    write_events(seq, args.out)
    print(f"wrote {len(seq)} events to {args.out}")
    return 0


def _distortion_from_flags(args) -> Distortion:
    chosen = [
        d
        for d in (
            Gap(*args.gap) if args.gap else None,
            LinearDetection(*args.linear) if args.linear else None,
            GaussianNoise(args.noise) if args.noise is not None else None,
            FixedDelay(args.delay) if args.delay is not None else None,
            NoDistortion() if args.none else None,
        )
        if d is not None
    ]
    if len(chosen) != 1:
        raise ValueError("pass exactly one of --gap/--linear/--noise/--delay/--none")
    return chosen[0]


def _cmd_distort(args) -> int:
    seq = read_events(args.input, args.horizon)
    d = _distortion_from_flags(args)
    seed = args.seed if args.seed is not None else int(os.environ.get(ENV_SEED, "0"))
    out = distort(seq, d, np.random.default_rng(seed))
    write_events(out, args.out)
    print(f"kept {len(out)} of {len(seq)} events -> {args.out}")
    return 0


def summary_labels(set_id: str, windows=DEFAULT_RIPLEY_WINDOWS) -> list[str]:
    if set_id == "abc7":
        return [
            "log_count",
            "median_mean_ratio",
            *[f"ripley_k_w{w:g}" for w in windows],
            "upper_tail_mean",
            "lower_tail_mean",
        ]
    if set_id == "alt2":
        return ["log_count", "gap_hist_kl"]
    raise ValueError(f"unknown summary family {set_id!r}")


def _cmd_summarize(args) -> int:
    seq = read_events(args.input, args.horizon)
    windows = tuple(args.windows) if args.windows else DEFAULT_RIPLEY_WINDOWS
    if args.set == "abc7":
        vec = compute_summaries(seq, windows)
    else:
        if not args.reference:
            raise ValueError("summary family alt2 needs --reference")
        ref = read_events(args.reference, args.horizon)
        vec = compute_summaries_alt(seq, ref)
    for label, value in zip(summary_labels(args.set, windows), vec.values):
        print(f"{label}={value:.17g}")
    return 0


_RUN_FLAG_KEYS = {
    "input": "events",
    "horizon": "horizon",
    "seed": "seed",
    "iterations": "iterations",
    "burn_in": "burn_in",
    "thin": "thin",
    "chains": "chains",
    "chain_out": "chain_out",
    "report_out": "report_out",
    "fix_mu": "fix_mu",
    "distortion": "distortion",
    "summary_set": "summary_set",
    "eps": "eps",
    "eps_scale": "eps_scale",
    "pilot_size": "pilot_size",
    "target_band": "target_band",
    "truncate": "truncate",
}


def _read_run_input(cfg: ExperimentConfig) -> EventSequence:
    if not cfg.events:
        raise ValueError("no input events: pass --input or set events= in the config")
    return read_events(cfg.events, cfg.horizon)


def _cmd_calibrate(args) -> int:
    cfg = _load_config(args, _RUN_FLAG_KEYS)
    seq = _read_run_input(cfg)
    rep = pilot_calibrate(
        seq,
        cfg.distortion_obj(),
        cfg.prior(),
        cfg.pilot_size,
        cfg.target_band,
        _sub_rng(cfg.seed, 0),
        summary_set=cfg.summary_set,
        fix_mu=cfg.fix_mu,
    )
    print("\n".join(_pilot_lines(rep)[1:]))
    print("eps=" + ",".join(f"{e:.17g}" for e in rep.thresholds.eps))
    return 0


def _resolve_thresholds(
    cfg: ExperimentConfig, seq: EventSequence
) -> tuple[Thresholds, PilotReport | None]:
    n_stats = SUMMARY_FAMILIES[cfg.summary_set]
    if cfg.eps is not None:
        return Thresholds(np.asarray(cfg.eps)), None
    if cfg.eps_scale is not None and math.isinf(cfg.eps_scale):
        return Thresholds(np.full(n_stats, np.inf)), None
    pilot = pilot_calibrate(
        seq,
        cfg.distortion_obj(),
        cfg.prior(),
        cfg.pilot_size,
        cfg.target_band,
        _sub_rng(cfg.seed, 0),
        summary_set=cfg.summary_set,
        fix_mu=cfg.fix_mu,
    )
    if cfg.eps_scale is not None:
        return Thresholds(cfg.eps_scale * pilot.sds), pilot
    return pilot.thresholds, pilot


def _cmd_abc(args) -> int:
    cfg = _load_config(args, _RUN_FLAG_KEYS)
    seq = _read_run_input(cfg)
    cfg = replace(cfg, horizon=seq.horizon)  # echo the effective horizon
    if not cfg.chain_out:
        raise ValueError("abc needs --chain-out (or chain_out= in the config)")
    t0 = time.perf_counter()
    eps, pilot = _resolve_thresholds(cfg, seq)
    d = cfg.distortion_obj()
    init = np.asarray(cfg.init) if cfg.init else (
        pilot.best_theta if pilot is not None else None
    )
    for index in range(1, cfg.chains + 1):
        chain = abc_mcmc(
            seq,
            d,
            cfg.prior(),
            cfg.kernel(),
            eps,
            cfg.iterations,
            _sub_rng(cfg.seed, index),
            summary_set=cfg.summary_set,
            init=init,
            fix_mu=cfg.fix_mu,
        )
        write_chain(chain, _suffixed(cfg.chain_out, index))
        summary = posterior_summary(chain, cfg.burn_in, cfg.thin)
        if cfg.report_out:
            _write_report(
                _suffixed(cfg.report_out, index),
                summary=summary,
                eps=eps.eps,
                pilot=pilot,
                cfg=cfg,
                duration=time.perf_counter() - t0,
                chain_index=index,
            )
        if cfg.chains > 1:
            print(f"--- chain {index}")
        _print_posterior(summary)
    return 0


def _cmd_mh_exact(args) -> int:
    cfg = _load_config(args, _RUN_FLAG_KEYS)
    seq = _read_run_input(cfg)
    cfg = replace(cfg, horizon=seq.horizon)  # the as-read horizon; truncation re-applies
    if cfg.truncate is not None:
        seq = EventSequence(seq.times[seq.times < cfg.truncate], cfg.truncate)
    if not cfg.chain_out:
        raise ValueError("mh-exact needs --chain-out (or chain_out= in the config)")
    t0 = time.perf_counter()
    init = np.asarray(cfg.init) if cfg.init else None
    for index in range(1, cfg.chains + 1):
        chain = exact_mh(
            seq,
            cfg.prior(),
            cfg.kernel(),
            cfg.iterations,
            _sub_rng(cfg.seed, index),
            init=init,
            fix_mu=cfg.fix_mu,
        )
        write_chain(chain, _suffixed(cfg.chain_out, index))
        summary = posterior_summary(chain, cfg.burn_in, cfg.thin)
        if cfg.report_out:
            _write_report(
                _suffixed(cfg.report_out, index),
                summary=summary,
                eps=None,
                pilot=None,
                cfg=cfg,
                duration=time.perf_counter() - t0,
                chain_index=index,
            )
        if cfg.chains > 1:
            print(f"--- chain {index}")
        _print_posterior(summary)
    return 0


def _cmd_report(args) -> int:
    chain = read_chain(args.chain)
    burn_in = args.burn_in if args.burn_in is not None else len(chain) // 5
    thin = args.thin if args.thin is not None else 1
    summary = posterior_summary(chain, burn_in, thin)
    header = "".ljust(6) + "".join(name.ljust(22) for name in PARAM_NAMES)
    row = "mean".ljust(6) + "".join(
        f"{_fmt6(m)} ({_fmt6(s)})".ljust(22) for m, s in zip(summary.mean, summary.sd)
    )
    print(header.rstrip())
    print(row.rstrip())
    print(f"acceptance_rate {_fmt6(summary.acceptance_rate)}")
    print(f"n_retained {summary.n_retained}")
    if args.density_out:
        kept = chain.thetas[burn_in::thin]
        with open(args.density_out, "w") as fh:
            fh.write("param,bin_center,density\n")
            for i, name in enumerate(PARAM_NAMES):
                density, edges = np.histogram(kept[:, i], bins=args.bins, density=True)
                centers = 0.5 * (edges[:-1] + edges[1:])
                for c, dens in zip(centers, density):
                    fh.write(f"{name},{c:.17g},{dens:.17g}\n")
        print(f"density rows -> {args.density_out}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hawkesabc",
        description="Hawkes process inference under missing or noisy event records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw one Hawkes realization to an event file")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--k", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("distort", help="apply a distortion to an event file")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--horizon", type=float)
    p.add_argument("--gap", type=float, nargs=2, metavar=("START", "END"))
    p.add_argument("--linear", type=float, nargs=2, metavar=("A", "B"))
    p.add_argument("--noise", type=float, metavar="SIGMA")
    p.add_argument("--delay", type=float, metavar="C")
    p.add_argument("--none", action="store_true", help="identity (copy)")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_distort)

    p = sub.add_parser("summarize", help="print summary statistics of an event file")
    p.add_argument("--input", "-i", required=True)
    p.add_argument("--horizon", type=float)
    p.add_argument("--set", choices=list(SUMMARY_FAMILIES), default="abc7")
    p.add_argument("--reference", help="reference event file (alt2 family)")
    p.add_argument("--windows", type=float, nargs=3, metavar=("W1", "W2", "W3"))
    p.set_defaults(func=_cmd_summarize)

    def add_run_flags(p, with_abc: bool):
        p.add_argument("--input", "-i", help="observed event file")
        p.add_argument("--config", "-c", help="key=value config file")
        p.add_argument("--horizon", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--iterations", "-j", type=int)
        p.add_argument("--burn-in", type=int, dest="burn_in")
        p.add_argument("--thin", type=int)
        p.add_argument("--chains", type=int)
        p.add_argument("--chain-out", dest="chain_out")
        p.add_argument("--report-out", dest="report_out")
        p.add_argument("--fix-mu", type=float, dest="fix_mu")
        if with_abc:
            p.add_argument(
                "--distortion",
                help="none | gap:<s>,<e> | linear:<a>,<b> | noise:<sigma> | delay:<c>",
            )
            p.add_argument("--summary-set", choices=list(SUMMARY_FAMILIES), dest="summary_set")
            p.add_argument("--eps", help="explicit thresholds, comma separated")
            p.add_argument("--eps-scale", type=float, dest="eps_scale",
                           help="thresholds = scale * pilot sds ('inf' disables the test)")
            p.add_argument("--pilot-size", type=int, dest="pilot_size")
            p.add_argument("--target-band", dest="target_band", help="lo,hi acceptance band")

    p = sub.add_parser("calibrate", help="pilot-run threshold calibration")
    add_run_flags(p, with_abc=True)
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("abc", help="likelihood-free ABC-MCMC posterior sampling")
    add_run_flags(p, with_abc=True)
    p.set_defaults(func=_cmd_abc)

    p = sub.add_parser("mh-exact", help="exact-likelihood MH (undistorted baseline)")
    add_run_flags(p, with_abc=False)
    p.add_argument("--truncate", type=float,
                   help="keep only events before this time and shrink the horizon")
    p.set_defaults(func=_cmd_mh_exact)

    p = sub.add_parser("report", help="posterior table and density CSV from a chain")
    p.add_argument("--chain", required=True)
    p.add_argument("--burn-in", type=int, dest="burn_in")
    p.add_argument("--thin", type=int)
    p.add_argument("--density-out", dest="density_out")
    p.add_argument("--bins", type=int, default=40)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, CalibrationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
