"""Command-line interface: outputs, exit codes, atomic file writes."""

import json
import os

import pytest

from biasedbb84.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_rate_stdout(capsys):
    code, out, err = run(
        capsys, "rate", "--channel", "amplitude_damping:0.2",
        "--q", "0.5", "--direction", "direct",
    )
    assert code == 0 and err == ""
    payload = json.loads(out)
    assert abs(payload["rate"] - 0.5019550008653874) < 1e-8


def test_rate_deterministic(capsys):
    argv = ("rate", "--channel", "amplitude_damping:0.3", "--q", "0.4",
            "--direction", "reverse")
    _, out1, _ = run(capsys, *argv)
    _, out2, _ = run(capsys, *argv)
    assert out1 == out2


def test_validate_channel_file(capsys, tmp_path):
    good = tmp_path / "good.json"
    good.write_text('{"amplitude_damping": {"p": 0.3}}')
    code, out, _ = run(capsys, "validate", "--channel", str(good))
    assert code == 0 and json.loads(out)["valid"] is True

    bad = tmp_path / "bad.json"
    bad.write_text('{"R": [[1.2,0,0],[0,1.2,0],[0,0,1.2]], "t": [0,0,0]}')
    code, out, _ = run(capsys, "validate", "--channel", str(bad))
    assert code == 0 and json.loads(out)["valid"] is False


def test_optimize_output(capsys):
    code, out, _ = run(capsys, "optimize", "--p", "0.3", "--direction", "reverse")
    assert code == 0
    payload = json.loads(out)
    assert payload["rate"] >= payload["rate_conventional"] - 1e-12
    assert 0.5 < payload["q_hat"] < 1.0


def test_sweep_writes_file(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, out, _ = run(
        capsys, "sweep", "--p-min", "0", "--p-max", "0.4", "--steps", "3",
        "--out", str(out_path),
    )
    assert code == 0 and out == ""
    lines = out_path.read_text().strip().split("\n")
    assert len(lines) == 4
    assert lines[0].split(",")[0] == "p"


def test_sweep_failure_leaves_no_partial_file(capsys, tmp_path):
    out_path = tmp_path / "sweep.csv"
    code, out, err = run(
        capsys, "sweep", "--p-min", "0.5", "--p-max", "1.5", "--steps", "4",
        "--out", str(out_path),
    )
    assert code == 1
    assert err.startswith("error: ")
    assert not out_path.exists()
    assert not any(name.startswith(".tmp-") for name in os.listdir(tmp_path))


def test_missing_channel_file_is_reported(capsys, tmp_path):
    code, out, err = run(
        capsys, "rate", "--channel", str(tmp_path / "absent.json"),
        "--q", "0.5", "--direction", "direct",
    )
    assert code == 1
    assert err.startswith("error: FileNotFoundError:")


def test_infeasible_channel_is_reported(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"R": [[1.2,0,0],[0,1.2,0],[0,0,1.2]], "t": [0,0,0]}')
    code, out, err = run(
        capsys, "rate", "--channel", str(bad), "--q", "0.5",
        "--direction", "direct",
    )
    assert code == 1
    assert err.startswith("error: Infeasible:")


def test_bad_flag_exits_2(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["rate", "--nope"])
    assert excinfo.value.code == 2


def test_simulate_and_estimate_round_trip(capsys, tmp_path):
    counts_path = tmp_path / "counts.json"
    code, out, _ = run(
        capsys, "simulate", "--channel", "amplitude_damping:0.3",
        "--q", "0.5", "--shots", "20000", "--seed", "4",
        "--out", str(counts_path),
    )
    assert code == 0
    payload = json.loads(counts_path.read_text())
    assert "end_to_end" in payload
    assert set(payload["end_to_end"]) == {"direct", "reverse"}

    code, out, _ = run(capsys, "estimate", "--counts", str(counts_path))
    assert code == 0
    estimate = json.loads(out)
    assert abs(estimate["omega"]["R_zz"] - 0.7) < 0.05


def test_simulate_exact_mode(capsys):
    code, out, _ = run(
        capsys, "simulate", "--channel", "amplitude_damping:0.2",
        "--q", "0.5", "--shots", "10000", "--seed", "1", "--exact",
    )
    assert code == 0
    payload = json.loads(out)
    reverse = payload["end_to_end"]["reverse"]
    assert abs(reverse["report"]["rate"] - 0.5310044064107188) < 1e-6
