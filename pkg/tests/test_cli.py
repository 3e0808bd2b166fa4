import json

import numpy as np
import pytest

from lsl import cli
from lsl.models import clifford_pair
from lsl.report import parse_report


def run(capsys, *argv):
    code = cli.run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_ambient_to_stdout(capsys):
    code, out, _ = run(capsys, "verify", "ambient", "--n", "1", "--samples", "10")
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] and rep["config"]["n"] == 1


def test_gate_failure_exit_code(capsys):
    code, out, err = run(capsys, "verify", "model", "--name", "psi", "--variant", "sin-sin",
                         "--resolution", "8", "--check", "legendrian")
    assert code == 1
    assert "gate failed" in err
    assert json.loads(out)["passed"] is False


def test_flagged_model_is_reported_not_failed(capsys):
    code, out, _ = run(capsys, "verify", "model", "--name", "upsilon", "--resolution", "8")
    assert code == 0
    statuses = {c["status"] for c in json.loads(out)["checks"]}
    assert statuses == {"reported"}


@pytest.mark.parametrize("argv", [
    ["verify", "model", "--name", "sphere"],
    ["verify", "model", "--name", "torus", "--resolution", "4"],
    ["verify", "ambient", "--n", "3"],
    ["family", "integrate", "--lambda1", "1"],
    ["family", "integrate", "--lambda1", "0", "--lambda2", "1", "--C", "1", "--alpha", "-1"],
    ["flow", "--dt", "-1"],
    ["bogus"],
    [],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert "error" in err


def test_help_exits_zero(capsys):
    assert cli.run(["--help"]) == 0


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# torus check\nname = torus\nresolution = 8\ncheck = legendrian\n")
    code, out, _ = run(capsys, "verify", "model", "--config", str(cfg))
    assert code == 0
    rep = json.loads(out)
    assert rep["config"]["resolution"] == 8
    code, out, _ = run(capsys, "verify", "model", "--config", str(cfg), "--resolution", "10")
    assert json.loads(out)["config"]["resolution"] == 10


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "verify", "ambient", "--config", str(cfg))
    assert code == 2 and "colour" in err


def test_output_dir_and_determinism(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUTPUT_ENV, str(tmp_path))
    argv = ["family", "integrate", "--random", "2", "--s-range", "0,1", "--resolution", "8",
            "--format", "csv"]
    assert cli.run(argv) == 0
    path = tmp_path / "family-integrate.csv"
    first = path.read_bytes()
    assert cli.run(argv) == 0
    assert path.read_bytes() == first
    rep = parse_report(first, "csv")
    assert rep.passed and rep.config["random"] == 2


def test_timing_flag_adds_wall_time(capsys):
    _, out, _ = run(capsys, "verify", "ambient", "--n", "1", "--samples", "2", "--timing")
    assert "wall_time" in json.loads(out)


def test_family_trajectory_csv(tmp_path, capsys):
    traj = tmp_path / "traj.csv"
    code, out, _ = run(capsys, "family", "integrate", "--lambda1", "0.7", "--lambda2", "0.9",
                       "--C", "1.2", "--alpha", "-1", "--alpha2", "2", "--phi1", "0.3",
                       "--s-range", "0,1", "--resolution", "8", "--csv", str(traj))
    assert code == 0
    assert traj.read_text().startswith("s,u,phi1")


def test_lift_of_model_and_grid(tmp_path, capsys):
    code, out, _ = run(capsys, "lift", "--input", "clifford", "--resolution", "16")
    assert code == 0
    rows = {c["name"]: c["value"] for c in json.loads(out)["checks"]}
    assert rows["holonomy_0"] == pytest.approx(-4 * np.pi, abs=1e-9)

    F, _ = clifford_pair()
    u = F.grid((65, 65))
    vals = F(u)[..., :4]
    lines = ["u,v,x1,y1,x2,y2"]
    for uu, vv in zip(u.reshape(-1, 2), vals.reshape(-1, 4)):
        lines.append(",".join(f"{x:.17g}" for x in (*uu, *vv)))
    grid = tmp_path / "grid.csv"
    grid.write_text("\n".join(lines) + "\n")
    heights = tmp_path / "z.csv"
    code, out, _ = run(capsys, "lift", "--input", str(grid), "--csv", str(heights))
    assert code == 0
    z = np.loadtxt(heights, delimiter=",", skiprows=1)
    # chord rule on inscribed polygons: area deficit 2 * (4 pi - 128 sin(pi / 32)) ~ 0.04
    assert np.max(np.abs(z[:, 2] + 2 * (z[:, 0] + z[:, 1]))) < 0.05


def test_lift_rejects_malformed_grid(tmp_path, capsys):
    grid = tmp_path / "g.csv"
    grid.write_text("a,b,c\n1,2,3\n")
    code, _, _ = run(capsys, "lift", "--input", str(grid))
    assert code == 2


def test_flow_writes_trace(tmp_path, capsys):
    trace = tmp_path / "trace.json"
    code, out, _ = run(capsys, "flow", "--model", "helix", "--steps", "3", "--points", "40",
                       "--trace", str(trace))
    assert code == 0
    t = json.loads(trace.read_text())
    assert t["steps"] == 3 and len(t["scores"]) == 1
