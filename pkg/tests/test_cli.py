import math

import numpy as np
import pytest

from hawkesabc import compute_summaries, posterior_summary, read_chain, read_events
from hawkesabc.cli import ENV_SEED, main, parse_distortion
from hawkesabc.distortion import FixedDelay, GaussianNoise, Gap, LinearDetection, NoDistortion


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def events(tmp_path):
    path = tmp_path / "events.txt"
    assert run("simulate", "--mu", 0.5, "--k", 0.4, "--beta", 1.0,
               "--horizon", 120, "--seed", 42, "--out", path) == 0
    return path


class TestParseDistortion:
    def test_variants(self):
        assert parse_distortion("none") == NoDistortion()
        assert parse_distortion("gap:1.5,2.5") == Gap(1.5, 2.5)
        assert parse_distortion("linear:0.35,-0.25") == LinearDetection(0.35, -0.25)
        assert parse_distortion("noise:0.5") == GaussianNoise(0.5)
        assert parse_distortion("delay:1") == FixedDelay(1.0)

    def test_bad_specs(self):
        for spec in ("gap:1.5", "wibble:1", "noise:", "linear:a,b"):
            with pytest.raises(ValueError):
                parse_distortion(spec)


class TestSimulate:
    def test_deterministic(self, tmp_path):
        a, b, c = (tmp_path / n for n in ("a.txt", "b.txt", "c.txt"))
        for path in (a, b):
            run("simulate", "--mu", 0.3, "--k", 0.5, "--beta", 1.0,
                "--horizon", 200, "--seed", 1, "--out", path)
        run("simulate", "--mu", 0.3, "--k", 0.5, "--beta", 1.0,
            "--horizon", 200, "--seed", 2, "--out", c)
        assert a.read_bytes() == b.read_bytes()
        assert a.read_bytes() != c.read_bytes()

    def test_env_seed_fallback(self, tmp_path, monkeypatch):
        a = tmp_path / "a.txt"
        b = tmp_path / "b.txt"
        monkeypatch.setenv(ENV_SEED, "77")
        run("simulate", "--mu", 0.3, "--k", 0.5, "--beta", 1.0,
            "--horizon", 100, "--out", a)
        monkeypatch.delenv(ENV_SEED)
        run("simulate", "--mu", 0.3, "--k", 0.5, "--beta", 1.0,
            "--horizon", 100, "--seed", 77, "--out", b)
        assert a.read_bytes() == b.read_bytes()


class TestDistort:
    def test_gap(self, tmp_path):
        src = tmp_path / "in.txt"
        src.write_text("1.0\n2.0\n3.0\n")
        out = tmp_path / "out.txt"
        assert run("distort", "-i", src, "--horizon", 4, "--gap", 1.5, 2.5,
                   "--out", out) == 0
        assert np.array_equal(read_events(out).times, [1.0, 3.0])

    def test_exactly_one_variant_required(self, tmp_path, capsys):
        src = tmp_path / "in.txt"
        src.write_text("# horizon=4\n1.0\n")
        out = tmp_path / "out.txt"
        assert run("distort", "-i", src, "--out", out) == 1
        assert "exactly one" in capsys.readouterr().err

    def test_deterministic(self, events, tmp_path):
        a, b = tmp_path / "a.txt", tmp_path / "b.txt"
        for out in (a, b):
            run("distort", "-i", events, "--linear", 0.35, -0.25,
                "--seed", 5, "--out", out)
        assert a.read_bytes() == b.read_bytes()


class TestSummarize:
    def test_matches_library(self, events, capsys):
        assert run("summarize", "-i", events) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        got = {k: float(v) for k, v in (ln.split("=") for ln in lines)}
        expected = compute_summaries(read_events(events)).values
        assert got["log_count"] == pytest.approx(expected[0], rel=1e-15)
        assert got["ripley_k_w4"] == pytest.approx(expected[4], rel=1e-15)

    def test_alt2_needs_reference(self, events, capsys):
        assert run("summarize", "-i", events, "--set", "alt2") == 1
        assert "reference" in capsys.readouterr().err

    def test_alt2_self_reference(self, events, capsys):
        assert run("summarize", "-i", events, "--set", "alt2",
                   "--reference", events) == 0
        lines = capsys.readouterr().out.strip().splitlines()
        got = dict(ln.split("=") for ln in lines)
        assert float(got["gap_hist_kl"]) == 0.0


class TestAbcCommand:
    def test_end_to_end_and_echo_reproduces(self, events, tmp_path):
        chain_path = tmp_path / "chain.csv"
        report_path = tmp_path / "report.txt"
        args = ("abc", "-i", events, "--pilot-size", 1000,
                "--target-band", "0.001,0.05", "--iterations", 400,
                "--seed", 9, "--chain-out", chain_path,
                "--report-out", report_path)
        assert run(*args) == 0
        original = chain_path.read_bytes()
        # the report's [config] section is itself a valid config file
        assert run("abc", "--config", report_path) == 0
        assert chain_path.read_bytes() == original

    def test_eps_scale_inf_accepts_in_support(self, events, tmp_path):
        chain_path = tmp_path / "chain.csv"
        assert run("abc", "-i", events, "--eps-scale", "inf",
                   "--iterations", 400, "--seed", 3,
                   "--chain-out", chain_path) == 0
        chain = read_chain(chain_path)
        assert posterior_summary(chain, burn_in=0).acceptance_rate > 0.5

    def test_explicit_eps(self, events, tmp_path):
        chain_path = tmp_path / "chain.csv"
        assert run("abc", "-i", events, "--eps", "1,1,9,9,9,9,1",
                   "--iterations", 200, "--seed", 3,
                   "--chain-out", chain_path) == 0
        assert len(read_chain(chain_path)) == 200

    def test_multiple_chains_subseeded(self, events, tmp_path):
        chain_path = tmp_path / "chain.csv"
        assert run("abc", "-i", events, "--eps", "1,1,9,9,9,9,1",
                   "--iterations", 100, "--seed", 3, "--chains", 2,
                   "--chain-out", chain_path) == 0
        second = tmp_path / "chain.2.csv"
        assert second.exists()
        # chain 1 of a multi-chain run equals the single-chain run
        single = tmp_path / "single.csv"
        run("abc", "-i", events, "--eps", "1,1,9,9,9,9,1",
            "--iterations", 100, "--seed", 3, "--chain-out", single)
        assert single.read_bytes() == chain_path.read_bytes()
        assert second.read_bytes() != chain_path.read_bytes()

    def test_unknown_config_key(self, events, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("wibble=1\n")
        assert run("abc", "-i", events, "--config", cfg,
                   "--chain-out", tmp_path / "c.csv") == 1
        assert "unknown config" in capsys.readouterr().err

    def test_missing_input(self, tmp_path, capsys):
        assert run("abc", "--chain-out", tmp_path / "c.csv") == 1
        assert "no input events" in capsys.readouterr().err


class TestMhExactCommand:
    def test_run_and_truncate(self, events, tmp_path):
        chain_path = tmp_path / "chain.csv"
        report_path = tmp_path / "report.txt"
        assert run("mh-exact", "-i", events, "--iterations", 2000, "--seed", 4,
                   "--chain-out", chain_path, "--report-out", report_path) == 0
        assert len(read_chain(chain_path)) == 2000
        assert "[posterior]" in report_path.read_text()

        truncated = tmp_path / "trunc.csv"
        assert run("mh-exact", "-i", events, "--iterations", 500, "--seed", 4,
                   "--truncate", 60.0, "--chain-out", truncated) == 0
        assert len(read_chain(truncated)) == 500

    def test_echo_reproduces(self, events, tmp_path):
        chain_path = tmp_path / "chain.csv"
        report_path = tmp_path / "report.txt"
        run("mh-exact", "-i", events, "--iterations", 500, "--seed", 4,
            "--truncate", 60.0, "--chain-out", chain_path,
            "--report-out", report_path)
        original = chain_path.read_bytes()
        assert run("mh-exact", "--config", report_path) == 0
        assert chain_path.read_bytes() == original


class TestReportCommand:
    def test_table_and_density(self, events, tmp_path, capsys):
        chain_path = tmp_path / "chain.csv"
        run("mh-exact", "-i", events, "--iterations", 3000, "--seed", 4,
            "--chain-out", chain_path)
        density = tmp_path / "density.csv"
        assert run("report", "--chain", chain_path, "--burn-in", 600,
                   "--density-out", density) == 0
        out = capsys.readouterr().out
        assert "mu" in out and "beta" in out and "acceptance_rate" in out

        rows = density.read_text().splitlines()
        assert rows[0] == "param,bin_center,density"
        data = {}
        for row in rows[1:]:
            name, center, dens = row.split(",")
            data.setdefault(name, []).append((float(center), float(dens)))
        for name, pts in data.items():
            centers = np.array([c for c, _ in pts])
            dens = np.array([d for _, d in pts])
            width = centers[1] - centers[0]
            assert abs(dens.sum() * width - 1.0) < 1e-9, name

    def test_report_matches_in_memory_summary(self, events, tmp_path, capsys):
        chain_path = tmp_path / "chain.csv"
        run("mh-exact", "-i", events, "--iterations", 1000, "--seed", 4,
            "--chain-out", chain_path)
        assert run("report", "--chain", chain_path, "--burn-in", 200) == 0
        printed = capsys.readouterr().out
        s = posterior_summary(read_chain(chain_path), burn_in=200)
        assert f"{s.mean[0]:.6g}" in printed
        assert f"{s.sd[2]:.6g}" in printed


class TestCalibrateCommand:
    def test_structured_output(self, events, capsys):
        assert run("calibrate", "-i", events, "--pilot-size", 1000,
                   "--target-band", "0.001,0.05", "--seed", 6) == 0
        out = capsys.readouterr().out
        got = dict(ln.split("=") for ln in out.strip().splitlines())
        assert {"scale", "acceptance", "in_band", "eps", "summary_sd"} <= got.keys()
        assert len(got["eps"].split(",")) == 7


class TestErrors:
    def test_unknown_flag_exits_nonzero(self):
        with pytest.raises(SystemExit) as exc:
            run("simulate", "--wibble", 1)
        assert exc.value.code != 0

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            run("explode")
