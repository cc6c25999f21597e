"""frontplot tests: every figure kind renders from real frontlab outputs
produced through the frontlab command line, and re-rendering is
byte-identical."""

import json
import shutil
import subprocess
import sys

import pytest

from frontplot.cli import main as plot_main
from frontplot.io import SchemaError, read_table


def frontlab(*args):
    """Invoke the producer CLI (the only coupling is its file formats)."""
    exe = shutil.which("frontlab")
    if exe:
        proc = subprocess.run([exe, *args], capture_output=True, text=True)
    else:
        proc = subprocess.run([sys.executable, "-m", "frontlab", *args],
                              capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    return proc


@pytest.fixture(scope="session")
def outputs(tmp_path_factory):
    d = tmp_path_factory.mktemp("frontlab-out")
    frontlab("simulate", "--ic", "geometric:mean=1", "--horizon", "120",
             "--seed", "7", "--window", "900", "--out", str(d / "run.csv"),
             "--hit-out", str(d / "hit.csv"), "--events", str(d / "ev.jsonl"))
    frontlab("ensemble", "--ic", "geometric:mean=1", "--horizon", "1000",
             "--runs", "30", "--window", "1200", "--master-seed", "5",
             "--checkpoints", "10,100,1000", "--out", str(d / "ens.csv"),
             "--summary", str(d / "ens.json"))
    frontlab("limit-sample", "--sigma", "1.4142", "--n", "300",
             "--horizon", "1", "--seed", "3", "--out", str(d / "lim.csv"))
    frontlab("stefan", "--rho", "0.5", "--times", "0.5,1",
             "--out", str(d / "profile.csv"))
    return d


RENDERS = [
    ("trajectory", ["hit.csv"], []),
    ("exponent", ["ens.csv"], []),
    ("cdf-overlay", ["ens.csv", "lim.csv"], ["--horizon", "1000"]),
    ("stefan-profile", ["profile.csv"], []),
    ("stefan-compare", ["run.csv"], ["--kappa", "0.612"]),
    ("schematic", ["ev.jsonl"], ["--max-events", "250"]),
]


class TestRender:
    @pytest.mark.parametrize("kind,inputs,extra", RENDERS)
    def test_kind_renders_and_is_deterministic(self, outputs, tmp_path,
                                               kind, inputs, extra):
        paths = [str(outputs / f) for f in inputs]
        a = tmp_path / "a.png"
        b = tmp_path / "b.png"
        for out in (a, b):
            code = plot_main(["render", "--kind", kind, "--in", *paths,
                              "--out", str(out), *extra])
            assert code == 0
        assert a.stat().st_size > 2000
        assert a.read_bytes() == b.read_bytes()

    def test_schema_mismatch_fails_loudly(self, outputs, tmp_path):
        bad = tmp_path / "bad.csv"
        text = (outputs / "hit.csv").read_text().replace("frontlab-1", "frontlab-0")
        bad.write_text(text)
        code = plot_main(["render", "--kind", "trajectory", "--in", str(bad),
                          "--out", str(tmp_path / "x.png")])
        assert code == 2

    def test_missing_column_fails(self, outputs, tmp_path):
        with pytest.raises(SchemaError):
            read_table(outputs / "hit.csv", required=("no_such_column",))
        code = plot_main(["render", "--kind", "cdf-overlay",
                          "--in", str(outputs / "hit.csv"),
                          str(outputs / "lim.csv"),
                          "--horizon", "10",
                          "--out", str(tmp_path / "x.png")])
        assert code == 2

    def test_usage_error(self):
        assert plot_main(["render", "--kind", "nope", "--in", "x",
                          "--out", "y.png"]) == 1

    def test_inputs_not_mutated(self, outputs, tmp_path):
        before = (outputs / "ens.csv").read_bytes()
        plot_main(["render", "--kind", "exponent",
                   "--in", str(outputs / "ens.csv"),
                   "--out", str(tmp_path / "e.png")])
        assert (outputs / "ens.csv").read_bytes() == before

    def test_summary_schema_check(self, outputs):
        from frontplot.io import read_summary
        meta = read_summary(outputs / "ens.json")
        assert meta["config"]["n_runs"] == 30
