"""CLI dispatch, exit codes, JSON contracts, simulation harness."""

from __future__ import annotations

import json

import pytest

from lrrc.cli_sim import SimConfig, run_cli, sim_config_from_dict, simulate
from lrrc.mfhs import ModelError, params_new


def invoke(capsys, *argv):
    code = run_cli(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_params_subcommand(capsys):
    code, out, _ = invoke(capsys, "params", "6", "4", "3", "1")
    assert code == 0
    doc = json.loads(out)
    assert doc["M"] == 7
    assert doc["families"] == [[1, 2], [3, 4], [5, 6]]


def test_params_rejects_bad_shape(capsys):
    code, _, err = invoke(capsys, "params", "7", "4", "3", "1")
    assert code == 2
    assert "error" in err


def test_enumerate_h_streams_members(capsys):
    code, out, err = invoke(capsys, "enumerate-h", "6", "3", "2", "1")
    assert code == 0
    lines = [json.loads(line) for line in out.splitlines() if line]
    assert len(lines) == 159
    assert {"h", "witness_perm"} <= set(lines[0])
    assert "159" in err


def test_construct_writes_state(tmp_path, capsys):
    out_path = tmp_path / "state.json"
    code, out, _ = invoke(
        capsys, "construct", "6", "3", "2", "1",
        "--seed", "3", "--out", str(out_path),
    )
    assert code == 0
    summary = json.loads(out)
    assert summary["q"] == 7639
    assert summary["bound"] == 7633
    assert summary["attempts"] == 1
    doc = json.loads(out_path.read_text())
    assert doc["q"] == 7639
    assert len(doc["Q"]) == 6


def test_verify_pass_and_fail(tmp_path, capsys):
    out_path = tmp_path / "state.json"
    invoke(capsys, "construct", "6", "3", "2", "1", "--seed", "3",
           "--out", str(out_path))
    code, out, _ = invoke(capsys, "verify", "--state", str(out_path))
    assert code == 0
    assert json.loads(out) == {"invariant": True, "reconstruction": True}

    doc = json.loads(out_path.read_text())
    doc["Q"][1] = doc["Q"][0]  # duplicated storage breaks the invariant
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc))
    code, out, _ = invoke(capsys, "verify", "--state", str(broken))
    assert code == 1
    assert json.loads(out)["invariant"] is False


def test_repair_subcommand(tmp_path, capsys):
    state_path = tmp_path / "state.json"
    invoke(capsys, "construct", "6", "3", "2", "1", "--seed", "3",
           "--out", str(state_path))
    repaired_path = tmp_path / "repaired.json"
    code, out, _ = invoke(
        capsys, "repair", "--state", str(state_path), "--failed", "2",
        "--helpers", "4,5", "--seed", "9", "--out", str(repaired_path),
    )
    assert code == 0
    assert json.loads(out)["helpers"] == [4, 5]
    code, _, _ = invoke(capsys, "verify", "--state", str(repaired_path))
    assert code == 0


def test_repair_rejects_family_helper(tmp_path, capsys):
    state_path = tmp_path / "state.json"
    invoke(capsys, "construct", "6", "3", "2", "1", "--seed", "3",
           "--out", str(state_path))
    code, _, err = invoke(
        capsys, "repair", "--state", str(state_path), "--failed", "2",
        "--helpers", "1,4", "--seed", "9",
    )
    assert code == 2
    assert "error" in err


def test_connect_subcommand_pinned(capsys):
    code, out, _ = invoke(
        capsys, "connect", "6", "4", "3", "1",
        "--h", "3,2,2,0,0,0", "--failed", "1", "--helpers", "3,4,5",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["h_prime"] == [0, 2, 3, 1, 1, 0]
    assert doc["incremented"] == [4, 5, 3]
    assert [s["perm"] for s in doc["trace"]] == [
        [1, 3, 2, 4, 5, 6],
        [3, 2, 1, 4, 5, 6],
        [3, 2, 4, 5, 1, 6],
        [3, 2, 4, 5, 6, 1],
    ]


def test_connect_rejects_inadmissible_h(capsys):
    code, _, err = invoke(
        capsys, "connect", "6", "4", "3", "1",
        "--h", "3,3,3,3,3,3", "--failed", "1", "--helpers", "3,4,5",
    )
    assert code == 2
    assert "error" in err


def test_exact6321_verify(capsys):
    code, out, _ = invoke(capsys, "exact6321", "--q", "7", "--verify")
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert len(doc["exact_repairs"]) == 30


def test_exact6321_small_field_usage_error(capsys):
    code, _, err = invoke(capsys, "exact6321", "--q", "5", "--verify")
    assert code == 2
    assert "error" in err


def test_exact6321_emit(tmp_path, capsys):
    path = tmp_path / "exact.json"
    code, out, _ = invoke(capsys, "exact6321", "--q", "7", "--emit", str(path))
    assert code == 0
    doc = json.loads(path.read_text())
    assert len(doc["repair_rules"]) == 30


def test_simulate_round_trip(tmp_path, capsys):
    code, out, _ = invoke(
        capsys, "simulate", "--n", "6", "--k", "3", "--d", "2", "--r", "1",
        "--seed", "5", "--rounds", "4", "--no-timing",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["passed"] is True
    assert doc["aggregate"]["events_total"] == 4
    assert "wall_time_s" not in doc["aggregate"]


def test_simulate_config_file(tmp_path, capsys):
    cfg = {
        "params": {"n": 6, "k": 3, "d": 2, "r": 1},
        "seed": 11,
        "rounds": 3,
        "failure_policy": "uniform-random",
        "helper_policy": "uniform-random",
    }
    cfg_path = tmp_path / "sim.json"
    cfg_path.write_text(json.dumps(cfg))
    report_path = tmp_path / "report.json"
    code, out, _ = invoke(
        capsys, "simulate", "--config", str(cfg_path), "--out", str(report_path),
    )
    assert code == 0
    assert json.loads(out)["passed"] is True
    report = json.loads(report_path.read_text())
    assert report["aggregate"]["events_total"] == 3


def test_simulate_unknown_policy_is_usage_error(tmp_path, capsys):
    cfg = {
        "params": {"n": 6, "k": 3, "d": 2, "r": 1},
        "failure_policy": "always-node-one",
    }
    cfg_path = tmp_path / "sim.json"
    cfg_path.write_text(json.dumps(cfg))
    code, _, err = invoke(capsys, "simulate", "--config", str(cfg_path))
    assert code == 2
    assert "error" in err


def test_simulate_determinism_programmatic():
    cfg = SimConfig(params=params_new(6, 3, 2, 1), seed=19, rounds=6,
                    failure_policy="uniform-random")
    a, b = simulate(cfg), simulate(cfg)
    assert a.canonical_json() == b.canonical_json()
    shifted = SimConfig(params=params_new(6, 3, 2, 1), seed=20, rounds=6,
                        failure_policy="uniform-random")
    assert simulate(shifted).canonical_json() != a.canonical_json()


def test_simulate_adversarial_exhaustive():
    cfg = SimConfig(params=params_new(6, 3, 2, 1), seed=2, rounds=1,
                    failure_policy="adversarial-sweep",
                    helper_policy="exhaustive-per-failure")
    report = simulate(cfg)
    assert report.passed
    assert report.aggregate["events_total"] == 6
    # each failure tries all three helper pairs
    assert report.aggregate["total_attempts"] >= 18


def test_sim_config_validation():
    with pytest.raises(ModelError):
        sim_config_from_dict({
            "params": {"n": 6, "k": 3, "d": 2, "r": 1},
            "helper_policy": "first-two",
        })
    with pytest.raises(ModelError):
        sim_config_from_dict({
            "params": {"n": 6, "k": 3, "d": 2, "r": 1},
            "rounds": -1,
        })


def test_seed_env_fallback(tmp_path, capsys, monkeypatch):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    monkeypatch.setenv("LRRC_SEED", "21")
    invoke(capsys, "construct", "6", "3", "2", "1", "--out", str(a))
    monkeypatch.delenv("LRRC_SEED")
    invoke(capsys, "construct", "6", "3", "2", "1", "--seed", "21", "--out", str(b))
    assert a.read_text() == b.read_text()


def test_usage_error_exit_code(capsys):
    assert invoke(capsys, "no-such-command")[0] == 2
    assert invoke(capsys, "params", "6", "4")[0] == 2


def test_version_flag(capsys):
    code, out, _ = invoke(capsys, "--version")
    assert code == 0
    assert "lrrc" in out


def test_missing_state_file_is_usage_error(tmp_path, capsys):
    code, _, err = invoke(capsys, "verify", "--state", str(tmp_path / "nope.json"))
    assert code == 2
    assert "error" in err
