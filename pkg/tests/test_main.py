import json
import math

import pandas as pd
import pytest

from main import main


def _run(argv, capsys):
    """(exit code, parsed stdout document or None, stderr)."""
    try:
        code = main(argv)
    except SystemExit as exit_:
        code = exit_.code
    captured = capsys.readouterr()
    document = json.loads(captured.out) if captured.out.strip() else None
    return code, document, captured.err


def test_equilibria_command(capsys):
    code, document, _ = _run(["equilibria", "--alpha", "1", "--h", "-0.5", "--epsilon", "0"], capsys)
    assert code == 0
    assert document["schema"] == 1 and document["seed"] == 0
    first = document["equilibria"][0]
    assert (first["r"], first["u"], first["kind"]) == (pytest.approx(1.0), pytest.approx(1.0), "Centre")
    assert len(document["collision_fixed_points"]) == 2


def test_equilibria_empty_from_alpha_two(capsys):
    code, document, _ = _run(["equilibria", "--alpha", "2.5", "--h", "-1", "--epsilon", "0"], capsys)
    assert code == 0
    assert document["equilibria"] == []


def test_positive_energy_is_rejected(capsys):
    code, document, err = _run(["equilibria", "--alpha", "1", "--h", "0.5"], capsys)
    assert code == 2
    assert document is None
    assert err.startswith("error:") and "h must be negative" in err
    assert len(err.strip().splitlines()) == 1


def test_usage_errors_exit_two(capsys):
    code, _, err = _run(["classify", "--alpha", "1", "--h", "-1", "--flavor", "weird"], capsys)
    assert code == 2
    assert err.startswith("error:")


def test_classify_command(capsys):
    code, document, _ = _run(["classify", "--alpha", "2", "--h", "-1", "--epsilon", "0", "--c", "1"], capsys)
    assert code == 0
    assert document["tag"] == "CollisionEjection"
    assert document["turning_radii"] == pytest.approx([math.sqrt(0.5)])


def test_classify_with_oracle(capsys):
    argv = ["classify", "--alpha", "2", "--h", "-1", "--epsilon", "0.1", "--flavor", "plain", "--c", "1", "--oracle"]
    code, document, _ = _run(argv, capsys)
    assert code == 0
    assert document["tag"] == document["oracle"]["tag"] == "Periodic"
    assert document["agree"] is True


def test_classify_reflects_negative_c(capsys):
    code, document, _ = _run(["classify", "--alpha", "1", "--h", "-0.5", "--c", "-0.5"], capsys)
    assert code == 0
    assert document["c"] == 0.5 and document["reflected"] is True


def test_classify_rejects_inadmissible_c(capsys):
    argv = ["classify", "--alpha", "3", "--h", "-1", "--epsilon", "0.1", "--flavor", "amended", "--c", "999"]
    code, _, err = _run(argv, capsys)
    assert code == 2
    assert "c exceeds admissible bound" in err


def test_invalid_softening_exits_two(capsys):
    code, _, err = _run(["classify", "--alpha", "1", "--h", "-1", "--epsilon", "2", "--c", "0.1"], capsys)
    assert code == 2
    assert "epsilon" in err


def test_portrait_command(tmp_path, capsys):
    argv = ["portrait", "--alpha", "2", "--h", "-1", "--epsilon", "0.1", "--c-grid", "0.2:1.2:6", "--out", str(tmp_path)]
    code, document, _ = _run(argv, capsys)
    assert code == 0
    assert len(document["files"]) == 9
    for i in range(6):
        curve = pd.read_csv(tmp_path / f"u_c_{i:02d}.csv")
        assert curve["u"].nunique() == 1


def test_portrait_requires_grid(tmp_path, capsys):
    code, _, err = _run(["portrait", "--alpha", "2", "--h", "-1", "--out", str(tmp_path)], capsys)
    assert code == 2
    assert "c_grid" in err


@pytest.mark.parametrize("argv,verdict", [
    (["--alpha", "1", "--epsilon", "0.05", "--h", "-1"], "Equivalent"),
    (["--alpha", "2", "--epsilon", "0.1", "--h", "-1"], "NotEquivalent"),
    (["--alpha", "3", "--epsilon", "0.1", "--h", "-1", "--flavor-b", "amended"], "Equivalent"),
])
def test_equivalence_command(argv, verdict, capsys):
    code, document, _ = _run(["equivalence", "--samples", "16", "--assert-paper"] + argv, capsys)
    assert code == 0
    assert document["verdict"] == verdict
    assert document["schema"] == 1


def test_equivalence_output_is_reproducible(capsys):
    argv = ["equivalence", "--alpha", "1.5", "--epsilon", "0.05", "--h", "-1", "--samples", "8", "--seed", "11"]
    main(argv)
    first = capsys.readouterr().out
    main(argv)
    assert capsys.readouterr().out == first
    assert json.loads(first)["seed"] == 11


def test_simulate_from_equilibrium(tmp_path, capsys):
    argv = ["simulate", "--alpha", "1", "--h", "-0.5", "--epsilon", "0", "--from", "equilibrium", "--tau", "50",
            "--out", str(tmp_path)]
    code, document, _ = _run(argv, capsys)
    assert code == 0
    frame = pd.read_csv(tmp_path / "trajectory.csv")
    assert list(frame.columns) == ["tau", "r", "v", "u", "energy_residual"]
    assert (frame["r"] - 1.0).abs().max() < 1e-8
    assert (frame["u"] - 1.0).abs().max() < 1e-8
    assert document["samples"] == len(frame)


def test_simulate_from_turning_point_closes(tmp_path, capsys):
    argv = ["simulate", "--alpha", "1", "--h", "-0.5", "--epsilon", "0", "--c", "0.5", "--from", "turning",
            "--tau", "200", "--out", str(tmp_path)]
    code, document, _ = _run(argv, capsys)
    assert code == 0
    assert "PeriodClosure" in {event["kind"] for event in document["events"]}
    sidecar = json.loads((tmp_path / "trajectory_events.json").read_text())
    assert sidecar == document["events"]


def test_simulate_off_surface_start(tmp_path, capsys):
    base = ["simulate", "--alpha", "1", "--h", "-0.5", "--r0", "1", "--v0", "0", "--u0", "2", "--tau", "1",
            "--out", str(tmp_path)]
    code, _, err = _run(base, capsys)
    assert code == 2
    assert "off the energy surface" in err
    code, document, _ = _run(base + ["--project"], capsys)
    assert code == 0
    assert document["start"]["u"] == pytest.approx(1.0)


def test_config_file_with_flag_override(tmp_path, capsys):
    config = tmp_path / "run.env"
    config.write_text("ALPHA=2\nH=-1\nEPSILON=0\nC=3\n")
    code, document, _ = _run(["classify", "--config", str(config), "--c", "1"], capsys)
    assert code == 0
    assert document["alpha"] == 2.0
    assert document["tag"] == "CollisionEjection"


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    config = tmp_path / "run.env"
    config.write_text("ALPHA=2\nMASS=3\n")
    code, _, err = _run(["classify", "--config", str(config), "--h", "-1"], capsys)
    assert code == 2
    assert "unknown key" in err


@pytest.mark.parametrize("flag", ["--assert-paper", "--assert-known"])
def test_assert_flag_and_alias(flag, capsys):
    argv = ["equivalence", "--alpha", "2", "--epsilon", "0.1", "--h", "-1", "--samples", "8", flag]
    code, document, _ = _run(argv, capsys)
    assert code == 0
    assert document["verdict"] == "NotEquivalent"


def test_assert_alias_in_config_file(tmp_path, capsys):
    config = tmp_path / "run.env"
    config.write_text("ALPHA=1\nH=-1\nEPSILON=0.05\nSAMPLES=8\nASSERT_KNOWN=true\n")
    code, document, _ = _run(["equivalence", "--config", str(config)], capsys)
    assert code == 0
    assert document["verdict"] == "Equivalent"
