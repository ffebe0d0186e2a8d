"""Command-line interface: JSON/CSV formats, exit codes, round trips."""

import json
import math

import pytest
from click.testing import CliRunner

from trigcell.cli import cli
from trigcell.potential import TrigPotential, save_potential


@pytest.fixture
def runner():
    return CliRunner()


def write_potential(tmp_path, name, dim, mean, modes):
    V = TrigPotential.build(dim, mean, modes)
    path = tmp_path / name
    save_potential(V, str(path))
    return str(path)


def test_eval_command(runner, tmp_path):
    path = write_potential(tmp_path, "v.json", 2, 0.25, [((1, 0), 0.5)])
    result = runner.invoke(cli, ["eval", "--potential", path, "--x", "0.0,0.3"])
    assert result.exit_code == 0
    data = json.loads(result.output.splitlines()[0])
    assert data["value"] == pytest.approx(1.25)


def test_eval_dimension_mismatch(runner, tmp_path):
    path = write_potential(tmp_path, "v.json", 2, 0.0, [((1, 0), 0.5)])
    result = runner.invoke(cli, ["eval", "--potential", path, "--x", "0.1"])
    assert result.exit_code != 0


def test_expand_command(runner, tmp_path):
    path = write_potential(tmp_path, "v.json", 2, 0.1,
                           [((1, 0), 0.5), ((0, 1), 0.4)])
    q = f"1.0,{0.5 * (math.sqrt(5) - 1)}"
    result = runner.invoke(cli, ["expand", "--potential", path, "--Q", q,
                                 "--order", "4"])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert len(data["a"]) == 5
    assert data["a"][1] == pytest.approx(0.1)
    assert data["min_denominator"] > 0


def test_expand_resonant_exit_code(runner, tmp_path):
    path = write_potential(tmp_path, "v.json", 2, 0.0,
                           [((1, 0), 0.5), ((1, 1), 0.5)])
    result = runner.invoke(cli, ["expand", "--potential", path, "--Q", "1,2"])
    assert result.exit_code == 2


def test_hbar_command_csv(runner, tmp_path):
    path = write_potential(tmp_path, "v.json", 1, 0.0, [((1,), 0.5)])
    out = tmp_path / "h.csv"
    result = runner.invoke(cli, ["hbar", "--potential", path,
                                 "--p-grid", "0:2:1", "--grid", "48",
                                 "--output", str(out)])
    assert result.exit_code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "p1,hbar,error_estimate"
    assert len(lines) == 4
    vals = [float(line.split(",")[1]) for line in lines[1:]]
    assert vals[0] == pytest.approx(1.0, abs=5e-2)
    assert vals == sorted(vals)


def test_decide_command_exit_codes(runner, tmp_path):
    a = write_potential(tmp_path, "a.json", 2, 0.0, [((1, 0), 0.5)])
    b = write_potential(tmp_path, "b.json", 2, 0.0, [((2, 0), 0.5)])
    result = runner.invoke(cli, ["decide", "--a", a, "--b", b])
    assert result.exit_code == 0
    data = json.loads(result.output)
    assert data["tag"] == "TransformEquivalent"

    c = write_potential(tmp_path, "c.json", 2, 0.0, [((1, 0), 0.7)])
    result = runner.invoke(cli, ["decide", "--a", a, "--b", c])
    assert result.exit_code == 1
    assert json.loads(result.output)["witness"] == "amplitude-mismatch"

    d = write_potential(tmp_path, "d.json", 2, 0.0,
                        [((1, 0), .5), ((0, 1), .5), ((1, 1), .5), ((2, 1), .5)])
    result = runner.invoke(cli, ["decide", "--a", a, "--b", d])
    assert result.exit_code == 2


def test_mfunc_command(runner, tmp_path):
    out = tmp_path / "m.csv"
    result = runner.invoke(cli, ["mfunc", "--r", "1,1,1", "--alpha", "1,1",
                                 "--range", "0:0.2:0.1", "--output", str(out)])
    assert result.exit_code == 0
    lines = out.read_text().strip().splitlines()
    assert lines[0].startswith("# l = ")
    assert float(lines[0].split("=")[1]) == pytest.approx(math.pi)
    assert lines[1] == "t,M"
    first = lines[2].split(",")
    assert float(first[1]) == pytest.approx(3.0, abs=1e-8)


def test_verify_command_consistent(runner, tmp_path):
    a = write_potential(tmp_path, "a.json", 2, 0.0,
                        [((1, 0), 0.5), ((0, 1), 0.5)])
    b = write_potential(tmp_path, "b.json", 2, 0.0,
                        [((1, 0), 0.5j), ((0, 2), 0.5)])
    result = runner.invoke(cli, ["verify", "--a", a, "--b", b,
                                 "--grid", "48", "--p-grid", "-2:2:2"])
    assert result.exit_code == 0, result.output
    report = json.loads(result.output)
    assert report["verdict"]["tag"] == "EffectivelyEqual"
    assert report["consistent"] is True
    assert report["hbar"]["max_gap"] <= 5e-2
