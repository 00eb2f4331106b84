import csv
import json
import math
import subprocess
import sys

import pytest

from adamslab import cli
from adamslab.errors import ConfigError

PI = math.pi


def run(tmp_path, experiment, *args, config=None, name="out"):
    argv = [experiment, "--out", str(tmp_path / name), *args]
    if config is not None:
        p = tmp_path / f"{name}.cfg"
        p.write_text(config)
        argv += ["--config", str(p)]
    return cli.main(argv)


def test_constants_row(tmp_path):
    assert run(tmp_path, "constants") == 0
    rows = list(csv.reader((tmp_path / "out" / "constants.csv").open()))
    assert rows[0] == ["index", "lower", "upper", "method"]
    idx, lo, hi, method = rows[1]
    assert idx == "2" and method == "interval"
    assert float(lo) == pytest.approx(4.2217e-3, abs=1e-7)
    assert float(hi) == pytest.approx(4.4476e-3, abs=1e-7)
    meta = json.loads((tmp_path / "out" / "metadata.json").read_text())
    assert meta["defaults"]["k_max"] == 6 and meta["config"]["nodes"] == 1024
    assert meta["files"] == ["summary.json", "constants.csv"]


def test_bubble_summary(tmp_path):
    assert run(tmp_path, "bubble") == 0
    s = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert s["mass"] == pytest.approx(1.0, abs=1e-6)
    assert s["residual_sup"] <= 1e-4


def test_sweep_deterministic(tmp_path):
    cfg = f"alpha_list = {32 * PI**2 - 300.0}, {32 * PI**2 - 50.0}\nnodes = 256\n"
    assert run(tmp_path, "sweep", config=cfg, name="a") == 0
    assert run(tmp_path, "sweep", config=cfg, name="b") == 0
    for f in ("summary.json", "sweep.csv", "gv_curve.csv"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    s = json.loads((tmp_path / "a" / "summary.json").read_text())
    assert [r["classification"] for r in s["rows"]] == ["vanishing-dominated", "attained"]


def test_empty_alpha_list_writes_nothing(tmp_path, capsys):
    assert run(tmp_path, "sweep", config="alpha_list =\n") == 2
    assert not (tmp_path / "out").exists()
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError" and "alpha_list" in err["message"]


@pytest.mark.parametrize("text, fragment", [
    ("nodes 12\n", "expected key = value"),
    ("nodes = 64\nnodes = 128\n", "duplicate"),
    ("bogus = 1\n", "unknown keys"),
    ("nodes = many\n", "cannot parse"),
    ("nodes = 4\n", "at least 16"),
    ("rmax = -1\n", "positive"),
])
def test_config_errors(tmp_path, capsys, text, fragment):
    assert run(tmp_path, "constants", config=text) == 2
    assert fragment in json.loads(capsys.readouterr().err)["message"]
    assert not (tmp_path / "out").exists()


def test_flags_override_config(tmp_path):
    assert run(tmp_path, "ground-state", "--nodes", "256", config="nodes = 512\ndimension = 2\n") == 0
    s = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert s["nodes"] == 256 and s["dimension"] == 2


def test_resolve_defaults_and_types():
    cfg = cli.resolve("nonexistence", {"t_max": "0.3"})
    assert cfg["t_max"] == 0.3 and cfg["reading"] == "proof" and cfg["M"] is None
    with pytest.raises(ConfigError):
        cli.resolve("nonexistence", {"t_max": "0.4"})
    with pytest.raises(ConfigError):
        cli.resolve("nonexistence", {"reading": "other"})
    with pytest.raises(ConfigError):
        cli.resolve("unknown", {})


def test_comments_and_blank_lines(tmp_path):
    p = tmp_path / "c.cfg"
    p.write_text("# header\n\nk_max = 3   # trailing\n")
    assert list(cli.read_config(p)) == ["k_max"]
    assert cli.resolve("constants", cli.read_config(p))["k_max"] == 3


def test_nonexistence_run(tmp_path):
    assert run(tmp_path, "nonexistence", config="M = 137.63\nt_points = 37\n") == 0
    s = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert s["certified"] and s["max_truncation"] <= 1e-10
    rows = list(csv.reader((tmp_path / "out" / "F_curve.csv").open()))
    assert rows[0] == ["t", "F", "truncation"] and len(rows) == 38


def test_module_entry_point(tmp_path):
    out = subprocess.run([sys.executable, "-m", "adamslab", "constants", "--out", str(tmp_path / "m")],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert (tmp_path / "m" / "summary.json").exists()
