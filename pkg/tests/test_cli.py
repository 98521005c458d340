import json
import subprocess
import sys

import pytest

from qsensornet import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_sweep_n_det_header(capsys):
    code, out, _ = run(
        capsys, "sweep", "--scenario", "n-det-unambiguous", "--n", "2",
        "--theta-start", "0.01", "--theta-end", "1.5707963", "--steps", "157",
    )
    assert code == 0
    lines = out.split("\n")
    assert lines[0] == "theta,pf_closed,pf_numeric"
    assert len(lines) == 159 and lines[-1] == ""


def test_sweep_cluster_columns(capsys):
    code, out, _ = run(capsys, "sweep", "--scenario", "cluster-unambiguous", "--theta-start", "0.1", "--steps", "4")
    assert code == 0
    assert out.splitlines()[0] == "theta,pf_collective,pf_individual"


def test_sweep_steps_one_is_config_error(capsys):
    code, _, err = run(capsys, "sweep", "--scenario", "single-fire-two-det", "--steps", "1")
    assert code == 2
    assert "steps" in err


def test_sweep_reversed_range(capsys):
    code, _, _ = run(capsys, "sweep", "--scenario", "single-fire-two-det", "--theta-start", "1", "--theta-end", "0.5")
    assert code == 2


def test_sweep_unknown_scenario(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["sweep", "--scenario", "nope"])
    assert exc.value.code == 2


def test_sweep_degenerate_endpoint(capsys):
    code, _, err = run(capsys, "sweep", "--scenario", "cluster-unambiguous", "--steps", "3")
    assert code == 3
    assert "DegenerateTheta" in err


def test_sweep_bad_cluster_constants(capsys):
    code, _, err = run(
        capsys, "sweep", "--scenario", "cluster-unambiguous", "--theta-start", "0.2", "--steps", "2", "--c1", "0.9", "--c2", "1"
    )
    assert code == 3
    assert "NotPositive" in err


def test_sweep_byte_stable(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path, jobs in ((a, "1"), (b, "4")):
        assert cli.main(["sweep", "--scenario", "grouped-multifire-product", "--steps", "9", "--jobs", jobs, "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()
    header = a.read_text().splitlines()[0]
    assert header == "theta,ps_product,ps_m_matrix,ps_entangled"


def test_sweep_json_roundtrip(tmp_path):
    csv_path, json_path = tmp_path / "s.csv", tmp_path / "s.json"
    args = ["sweep", "--scenario", "two-det-min-err", "--p0", "0.25", "--steps", "5"]
    assert cli.main(args + ["-o", str(csv_path)]) == 0
    assert cli.main(args + ["--format", "json", "-o", str(json_path)]) == 0
    data = json.loads(json_path.read_text())
    assert data["params"] == {"p0": 0.25}
    rows = [line.split(",") for line in csv_path.read_text().splitlines()[1:]]
    for i, name in enumerate(data["columns"][1:], start=1):
        stored = [float(r[i]) for r in rows]
        assert [float(format(v, ".15g")) for v in data["curves"][name]] == stored


def test_crossover_default(capsys):
    code, out, _ = run(capsys, "crossover", "--lo", "0.5", "--hi", "0.9")
    assert code == 0
    theta = float(out.splitlines()[0].split("=")[1])
    assert 0.65 <= theta <= 0.75


def test_crossover_no_sign_change(capsys):
    code, _, _ = run(capsys, "crossover", "--lo", "0.05", "--hi", "0.2")
    assert code == 4


def test_crossover_malformed(capsys):
    code, _, _ = run(capsys, "crossover", "--lo", "0.9", "--hi", "0.5")
    assert code == 2


def test_verify_loose_tolerance_passes(capsys):
    code, out, _ = run(capsys, "verify", "--tol", "0.1")
    assert code == 0
    assert "FAIL" not in out


def test_verify_impossible_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--tol", "1e-15")
    assert code == 1
    assert "FAIL" in out


def test_verify_default(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0, out


def test_fixtures_check(capsys):
    code, out, _ = run(capsys, "fixtures", "--check")
    assert code == 0
    assert "0 mismatches" in out


def test_fixture_env_override(tmp_path, monkeypatch, capsys):
    path = tmp_path / "alt.csv"
    path.write_text("scenario,theta,name,value\ngrouped-multifire-product,0.5,ps,0.1\n")
    monkeypatch.setenv("QSENSORNET_FIXTURE_PATH", str(path))
    code, out, _ = run(capsys, "fixtures", "--check")
    assert code == 1
    assert "1 mismatches" in out


def test_overlap_command(capsys):
    code, out, _ = run(capsys, "overlap", "--theta", "0.7")
    assert code == 0
    assert out.splitlines()[1].startswith("0.7,True,True")


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qsensornet.cli", "crossover", "--lo", "0.05", "--hi", "0.2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 4
