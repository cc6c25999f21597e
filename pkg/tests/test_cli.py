import json
import os

import numpy as np
import pytest

from frontlab.cli import main


def lines(path):
    return path.read_text().splitlines()


class TestSimulateCommand:
    def test_checkpoint_table(self, tmp_path):
        out = tmp_path / "run.csv"
        code = main(["simulate", "--ic", "geometric:mean=1",
                     "--mode", "frictionless", "--horizon", "200",
                     "--seed", "7", "--window", "1500", "--out", str(out)])
        assert code == 0
        rows = lines(out)
        assert rows[0].startswith("# schema=frontlab-1")
        assert rows[1] == "t,r,N,F,M,G"
        data = np.array([r.split(",") for r in rows[2:]], dtype=float)
        r_col, n_col = data[:, 1], data[:, 2]
        assert np.all(np.diff(r_col) >= 0)          # monotone front
        assert np.array_equal(r_col, n_col)          # flux identity surfaced

    def test_hitting_and_events(self, tmp_path):
        out = tmp_path / "run.csv"
        hit = tmp_path / "hit.csv"
        ev = tmp_path / "ev.jsonl"
        code = main(["simulate", "--ic", "poisson:mean=0.9", "--horizon", "50",
                     "--seed", "3", "--window", "600", "--out", str(out),
                     "--hit-out", str(hit), "--events", str(ev)])
        assert code == 0
        assert lines(hit)[1] == "level,time"
        first = json.loads(lines(ev)[1])
        assert set(first) == {"t", "type", "pid", "from", "to", "k", "r", "N"}

    def test_refuses_overwrite_without_force(self, tmp_path):
        out = tmp_path / "run.csv"
        args = ["simulate", "--ic", "geometric:mean=1", "--horizon", "20",
                "--seed", "1", "--window", "300", "--out", str(out)]
        assert main(args) == 0
        assert main(args) == 2
        assert main(args + ["--force"]) == 0

    def test_usage_error_exit_code(self, capsys):
        assert main(["simulate", "--horizon", "10"]) == 1
        assert main(["no-such-command"]) == 1


class TestEnsembleCommand:
    def test_table_and_summary(self, tmp_path):
        out = tmp_path / "ens.csv"
        summ = tmp_path / "ens.json"
        code = main(["ensemble", "--ic", "geometric:mean=1", "--horizon", "100",
                     "--runs", "5", "--window", "700", "--master-seed", "9",
                     "--checkpoints", "25,50,100", "--out", str(out),
                     "--summary", str(summ)])
        assert code == 0
        header = lines(out)[1].split(",")
        assert header[:5] == ["run", "resizes", "exploded", "explosion_time",
                              "final_front"]
        meta = json.loads(summ.read_text())
        assert meta["schema"] == "frontlab-1"
        assert meta["config"]["master_seed"] == 9

    def test_byte_identical_rerun(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            main(["ensemble", "--ic", "geometric:mean=1", "--horizon", "100",
                  "--runs", "4", "--window", "700", "--master-seed", "11",
                  "--checkpoints", "50,100", "--out", str(path)])
        assert a.read_bytes() == b.read_bytes()


class TestLimitSampleCommand:
    def test_deterministic_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for path in (a, b):
            code = main(["limit-sample", "--sigma", "1.4142", "--n", "200",
                         "--horizon", "1", "--seed", "3", "--out", str(path)])
            assert code == 0
        assert a.read_bytes() == b.read_bytes()
        assert len(lines(a)) == 202  # schema + header + samples


class TestStefanCommand:
    def test_prints_kappa_and_writes_profile(self, tmp_path, capsys):
        out = tmp_path / "profile.csv"
        code = main(["stefan", "--rho", "0.5", "--out", str(out)])
        assert code == 0
        assert "0.612" in capsys.readouterr().out
        assert lines(out)[1] == "t,xi,u"

    def test_kappa_table(self, tmp_path):
        out = tmp_path / "kappa.csv"
        code = main(["stefan", "--kappa-table", "0.1,0.5,0.9", "--out", str(out)])
        assert code == 0
        rows = [r.split(",") for r in lines(out)[2:]]
        ks = [float(r[1]) for r in rows]
        assert ks[0] < ks[1] < ks[2]

    def test_supercritical_rejected(self, capsys):
        assert main(["stefan", "--rho", "1.2"]) == 2


class TestRegimeCheckCommand:
    def test_membership_report(self, tmp_path, capsys):
        code = main(["regime-check", "--eps", "0.05", "--a", "0.1",
                     "--gamma", "0.5", "--gamma-prime", "0.8",
                     "--point", "60,20,0.2"])
        assert code == 0
        rep = json.loads(capsys.readouterr().out)
        assert rep["in_sigma"] is True
        assert rep["in_sigma_tilde"] is True

    def test_rejection_names_predicate(self, capsys):
        main(["regime-check", "--eps", "0.05", "--a", "0.1", "--gamma", "0.5",
              "--gamma-prime", "0.8", "--point", "2,20,0.2"])
        rep = json.loads(capsys.readouterr().out)
        assert rep["in_sigma"] is False
        assert any("super-diffusive" in f for f in rep["failures"])


class TestExperimentCommand:
    def test_phase_from_toml(self, tmp_path):
        cfg = tmp_path / "phase.toml"
        cfg.write_text(
            'kind = "phase"\nruns = 6\nhorizon = 3000.0\nwindow = 20000\n'
            'family = "geometric"\nmean = 1.2\nkeep_explosions = true\n'
            'master_seed = 3\n')
        code = main(["experiment", "--config", str(cfg),
                     "--out-dir", str(tmp_path)])
        assert code == 0
        payload = json.loads((tmp_path / "phase.json").read_text())
        assert payload["result"]["phase"] == "supercritical"

    def test_ansatz_from_toml(self, tmp_path):
        cfg = tmp_path / "ansatz.toml"
        cfg.write_text(
            'kind = "ansatz"\nruns = 6\nhorizon = 80.0\nwindow = 400\n'
            'family = "geometric"\nmean = 1.0\nprobe_t = 40.0\n'
            'probe_x = 60\nmaster_seed = 4\n')
        code = main(["experiment", "--config", str(cfg),
                     "--out-dir", str(tmp_path)])
        assert code == 0
        payload = json.loads((tmp_path / "ansatz.json").read_text())
        assert "noise_mean" in payload["result"]

    def test_boundary_layer_from_toml(self, tmp_path):
        cfg = tmp_path / "exp.toml"
        cfg.write_text(
            'kind = "boundary-layer"\n'
            'eps = 0.05\na = 0.1\ngamma = 0.5\ngamma_prime = 0.8\n'
            't0 = 60.0\nx0 = 20\nv = 0.2\nruns = 10\nmaster_seed = 4\n')
        code = main(["experiment", "--config", str(cfg),
                     "--out-dir", str(tmp_path)])
        assert code == 0
        payload = json.loads((tmp_path / "boundary-layer.json").read_text())
        assert payload["result"]["n_runs"] == 10
        assert payload["config"]["kind"] == "boundary-layer"
