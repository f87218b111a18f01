"""Command line surface: outputs, reproducibility and exit codes."""

import json

import pytest

from kaoneraser.cli import main


def run(*argv):
    return main(list(argv))


class TestAnalytic:
    def test_writes_curve_files(self, tmp_path):
        assert run("analytic", "--out", str(tmp_path)) == 0
        single = (tmp_path / "single_kaon.csv").read_text().splitlines()
        joint = (tmp_path / "joint.csv").read_text().splitlines()
        assert single[0].startswith("# config:")
        assert single[1] == "tau,p_k0,p_k0bar,p_ks,p_kl,visibility"
        assert single[2] == "0,1,0,0.5,0.5,1"
        assert joint[1] == "delta_tau,p_like,p_unlike,p_s_ks,p_s_kl,visibility"
        # p_like vanishes at delta_tau = 0
        zero_row = [l for l in joint[2:] if l.startswith("0,") or l.startswith("-0,")]
        assert zero_row and zero_row[0].split(",")[1] == "0"

    def test_regeneration_is_byte_identical(self, tmp_path):
        a = tmp_path / "a"
        b = tmp_path / "b"
        for out in (a, b):
            assert run("analytic", "--out", str(out)) == 0
        assert (a / "single_kaon.csv").read_bytes() == (b / "single_kaon.csv").read_bytes()
        assert (a / "joint.csv").read_bytes() == (b / "joint.csv").read_bytes()

    def test_constants_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"constants": {"delta_m": 0.0},
                                   "out": str(tmp_path)}))
        assert run("analytic", "--config", str(cfg)) == 0
        rows = (tmp_path / "single_kaon.csv").read_text().splitlines()[2:]
        # no mass difference, no oscillation: p_k0 stays above 1/2
        assert all(float(r.split(",")[1]) >= 0.5 for r in rows)


class TestSimulate:
    def test_event_file_and_summary(self, tmp_path):
        assert run("simulate", "--kind", "D", "--pairs", "1000", "--seed", "3",
                   "--out", str(tmp_path)) == 0
        lines = (tmp_path / "events_D.csv").read_text().splitlines()
        assert len(lines) == 1001  # header + one record per pair
        assert "discarded" not in (tmp_path / "events_D.csv").read_text()
        summary = json.loads((tmp_path / "summary_D.json").read_text())
        assert summary["counts"]["records"] == 1000
        assert summary["counts"]["classified"] + summary["counts"]["discarded"] == 1000
        assert summary["seed"] == 3
        assert summary["rng_scheme"]
        assert summary["estimates"]

    def test_b_summary_reports_half_split(self, tmp_path):
        assert run("simulate", "--kind", "B", "--pairs", "20000",
                   "--out", str(tmp_path)) == 0
        summary = json.loads((tmp_path / "summary_B.json").read_text())
        assert abs(summary["pre_detector_fraction"] - 0.5) < 0.02

    def test_missing_kind_is_validation_error(self, tmp_path, capsys):
        assert run("simulate", "--pairs", "10", "--out", str(tmp_path)) == 1
        assert "kind" in capsys.readouterr().err

    def test_bad_kind_flag(self, tmp_path):
        with pytest.raises(SystemExit) as exc:
            run("simulate", "--kind", "Z", "--out", str(tmp_path))
        assert exc.value.code == 1

    def test_bad_config_key(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text('{"bogus": 1}')
        assert run("simulate", "--kind", "D", "--config", str(cfg)) == 1

    def test_invalid_pairs(self, tmp_path):
        assert run("simulate", "--kind", "D", "--pairs", "0",
                   "--out", str(tmp_path)) == 1


class TestVerify:
    def test_default_constants_pass(self, capsys):
        assert run("verify") == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert out.count("PASS") >= 8

    def test_inconsistent_branching_warns_but_passes(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"constants": {"br_sl_L": 0.9}}))
        assert run("verify", "--config", str(cfg)) == 0
        out = capsys.readouterr().out
        assert "WARN" in out and "FAIL" not in out


class TestFit:
    def test_fit_from_simulated_events(self, tmp_path):
        assert run("simulate", "--kind", "A1", "--pairs", "200000", "--seed",
                   "5", "--out", str(tmp_path)) == 0
        assert run("fit", str(tmp_path / "events_A1.csv"),
                   "--out", str(tmp_path)) == 0
        lines = (tmp_path / "visibility.csv").read_text().splitlines()
        assert lines[1] == "delta_tau_bin,v_hat,stderr,excluded_flag"
        assert len(lines) > 3

    def test_malformed_file_names_line(self, tmp_path, capsys):
        p = tmp_path / "events.csv"
        p.write_text("wrong header\n")
        assert run("fit", str(p)) == 1
        assert "line 1" in capsys.readouterr().err

    def test_missing_file(self, tmp_path):
        assert run("fit", str(tmp_path / "nope.csv")) == 1
