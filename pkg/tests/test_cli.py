import io
import json
import math
from contextlib import redirect_stdout

import pytest

from photonscope.cli import main


def _run(argv):
    buf = io.StringIO()
    with redirect_stdout(buf):
        rc = main(argv)
    return rc, buf.getvalue()


def test_fisher_lossless_two_photons():
    rc, out = _run(["fisher", "--n", "2", "--lossless", "--phi", "0.7"])
    assert rc == 0
    assert "fisher = 0.5" in out


def test_fisher_thermal_degenerate_flags_match_lossless():
    rc, out = _run(["fisher", "--n", "2", "--p", "0", "--epsilon", "1",
                    "--phi", "0.3"])
    assert rc == 0
    assert "fisher = 0.5" in out


def test_fisher_loss_prints_breakdown():
    rc, out = _run(["fisher", "--n", "3", "--p", "0.5", "--phi", "0.35"])
    assert rc == 0
    assert "breakdown" in out
    assert "D=1" in out and "D=3" in out


def test_fisher_regression_fixture(tmp_path):
    out_file = tmp_path / "f.json"
    rc, _ = _run(["fisher", "--n", "3", "--p", "0.5", "--epsilon", "0.01",
                  "--phi", "0.35", "--format", "json",
                  "--output", str(out_file)])
    assert rc == 0
    payload = json.loads(out_file.read_text())
    assert payload["metadata"]["fisher"] == pytest.approx(
        0.0016194567203197507, rel=1e-10)


def test_validation_exit_codes():
    rc, _ = _run(["fisher", "--n", "2", "--p", "1.5", "--phi", "0.3"])
    assert rc == 2
    rc, _ = _run(["fisher", "--n", "2", "--p", "0.3", "--alpha", "2.0",
                  "--phi", "0.3"])
    assert rc == 2
    rc, _ = _run(["fisher", "--n", "2", "--phi", "0.3"])
    assert rc == 2


def test_resource_limit_exit_code():
    rc, _ = _run(["fisher", "--n", "40", "--p", "0.5", "--phi", "0.3"])
    assert rc == 4


def test_curve_lossless_phi_outputs(tmp_path):
    out_file = tmp_path / "lossless.csv"
    rc, _ = _run(["curve", "--kind", "lossless-phi", "--n-list", "2,3",
                  "--phi-points", "41", "--output", str(out_file)])
    assert rc == 0
    lines = out_file.read_text().splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    assert any("command = curve" in ln for ln in meta)
    header = next(ln for ln in lines if not ln.startswith("#"))
    assert header == "phi_over_pi,fisher_n2,fisher_n3"
    data = [ln for ln in lines if not ln.startswith("#")][1:]
    assert len(data) == 41
    assert (tmp_path / "lossless.png").exists()


def test_curve_json_mirrors_csv(tmp_path):
    csv_file = tmp_path / "c.csv"
    json_file = tmp_path / "c.json"
    args = ["curve", "--kind", "loss-phi", "--n", "2", "--p-list", "0,0.5",
            "--phi-points", "11", "--no-plot"]
    assert _run(args + ["--output", str(csv_file)])[0] == 0
    assert _run(args + ["--output", str(json_file), "--format", "json"])[0] == 0
    payload = json.loads(json_file.read_text())
    data = [ln.split(",") for ln in csv_file.read_text().splitlines()
            if not ln.startswith("#")]
    assert data[0] == payload["columns"]
    for csv_row, json_row in zip(data[1:], payload["rows"]):
        for text, value in zip(csv_row, json_row):
            assert float(text) == pytest.approx(value, rel=1e-11)


def test_curve_epsilon_linear_for_two_photons(tmp_path):
    out_file = tmp_path / "eps.json"
    rc, _ = _run(["curve", "--kind", "epsilon", "--n", "2", "--phi", "0.5",
                  "--p", "0", "--format", "json", "--no-plot",
                  "--output", str(out_file)])
    assert rc == 0
    rows = json.loads(out_file.read_text())["rows"]
    for eps, fisher in rows:
        assert fisher == pytest.approx(eps / 2.0, abs=1e-12)


def test_table_fixed_loss_sanity(tmp_path):
    out_file = tmp_path / "table.json"
    rc, out = _run(["table", "--n-list", "2,3", "--epsilon", "1",
                    "--p-override", "0", "--format", "json", "--no-plot",
                    "--output", str(out_file)])
    assert rc == 0
    rows = json.loads(out_file.read_text())["rows"]
    k = 2.0 * math.pi / 628e-9
    for n, dtheta, alpha, _, fisher, _, boundary in rows:
        # loss pinned: fisher is baseline-independent, optimum on the edge
        assert boundary
        assert fisher == pytest.approx(1.0 - 1.0 / n, rel=1e-3)
        expected = 2.0626480624709636e11 / (k * alpha * 1e4 * math.sqrt(fisher))
        assert dtheta == pytest.approx(expected, rel=1e-9)


def test_config_file_defaults(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 2, "lossless": True, "phi": 0.7}))
    rc, out = _run(["--config", str(cfg), "fisher"])
    assert rc == 0
    assert "fisher = 0.5" in out


def test_config_file_rejects_unknown_field(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"does_not_exist": 1}))
    rc, _ = _run(["--config", str(cfg), "fisher", "--n", "2", "--lossless",
                  "--phi", "0.7"])
    assert rc == 2


def test_validate_subcommand_passes():
    rc, out = _run(["validate", "--max-n", "2", "--trials", "1"])
    assert rc == 0
    assert "all checks passed" in out
