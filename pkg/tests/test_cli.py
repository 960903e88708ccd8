"""Command-line interface: exit codes, output formats, environment overrides."""

from __future__ import annotations

import json

import pytest

from netclear.cli import main
from netclear.scenarios import load_scenario_document


@pytest.fixture()
def basic_doc(tmp_path):
    path = tmp_path / "basic.json"
    path.write_text(json.dumps(load_scenario_document("basic")))
    return str(path)


@pytest.fixture()
def inject_doc(tmp_path):
    path = tmp_path / "inject.json"
    path.write_text(json.dumps(load_scenario_document("inject")))
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestValidate:
    def test_ok(self, capsys, basic_doc):
        code, out, _ = run(capsys, "validate", basic_doc)
        assert code == 0
        assert "ok: 3 banks, 3 contracts" in out

    def test_invalid_document(self, capsys, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"banks": [{"id": "u", "external_assets": -1}]}')
        code, out, err = run(capsys, "validate", str(path))
        assert code == 2
        assert "external_assets" in out + err

    def test_unparsable_json(self, capsys, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{nope")
        code, out, _ = run(capsys, "validate", str(path))
        assert code == 2
        assert "invalid JSON" in out

    def test_missing_file(self, capsys):
        code, out, _ = run(capsys, "validate", "/does/not/exist.json")
        assert code == 2
        assert "cannot read" in out


class TestSolve:
    def test_text_output(self, capsys, basic_doc):
        code, out, _ = run(capsys, "solve", basic_doc)
        assert code == 0
        assert "unique" in out
        assert "u=0.5" in out

    def test_json_output(self, capsys, inject_doc):
        code, out, _ = run(capsys, "solve", inject_doc, "--format", "json", "--all")
        assert code == 0
        payload = json.loads(out)
        assert payload["solutions"]["count"] == 2
        assert payload["solutions"]["flag"] == "multiple"
        assert len(payload["solutions"]["solutions"]) == 2
        assert {b["id"] for b in payload["banks"]} == {"u", "v", "w", "t", "s1", "s2"}

    def test_default_shows_first_solution_only(self, capsys, inject_doc):
        code, out, _ = run(capsys, "solve", inject_doc, "--format", "json")
        payload = json.loads(out)
        assert len(payload["solutions"]["solutions"]) == 1
        assert payload["solutions"]["count"] == 2

    def test_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr(
            "sys.stdin", io.StringIO(json.dumps(load_scenario_document("basic")))
        )
        code, out, _ = run(capsys, "solve", "-")
        assert code == 0 and "unique" in out

    def test_tolerance_env_override(self, capsys, basic_doc, monkeypatch):
        monkeypatch.setenv("NETCLEAR_TOLERANCE", "not-a-number")
        code, _, err = run(capsys, "solve", basic_doc)
        assert code == 1
        assert "NETCLEAR_TOLERANCE" in err
        monkeypatch.setenv("NETCLEAR_TOLERANCE", "1e-6")
        code, out, _ = run(capsys, "solve", basic_doc)
        assert code == 0

    def test_capability_exit_code(self, capsys, tmp_path):
        banks = [{"id": f"b{i}", "external_assets": 0} for i in range(20)]
        banks.append({"id": "sink", "external_assets": 0})
        contracts = [
            {"debtor": f"b{i}", "creditor": "sink", "notional": 1} for i in range(20)
        ]
        path = tmp_path / "wide.json"
        path.write_text(json.dumps({"banks": banks, "contracts": contracts}))
        code, _, err = run(capsys, "solve", str(path))
        assert code == 3
        assert "enumeration" in err


class TestAssess:
    def test_remove_debt(self, capsys, tmp_path):
        path = tmp_path / "doc.json"
        path.write_text(json.dumps(load_scenario_document("remove_debt")))
        code, out, _ = run(
            capsys, "assess", str(path), "--bank", "v", "--remove-debt", "u->v"
        )
        assert code == 0
        assert "acting bank: v" in out
        assert "delta min net: 1.5" in out

    def test_requires_exactly_one_action(self, capsys, basic_doc):
        code, _, err = run(capsys, "assess", basic_doc, "--bank", "v")
        assert code == 1
        assert "exactly one" in err
        code, _, err = run(
            capsys, "assess", basic_doc, "--bank", "v",
            "--inject", "--donate-to", "u", "--amount", "1",
        )
        assert code == 1

    def test_bad_action_reference(self, capsys, basic_doc):
        code, _, err = run(
            capsys, "assess", basic_doc, "--bank", "v", "--remove-debt", "v->u"
        )
        assert code == 2

    def test_inject_needs_amount(self, capsys, basic_doc):
        code, _, err = run(capsys, "assess", basic_doc, "--bank", "v", "--inject")
        assert code == 1
        assert "--amount" in err

    def test_set_priority(self, capsys, tmp_path):
        path = tmp_path / "doc.json"
        path.write_text(json.dumps(load_scenario_document("reprioritize_0.5")))
        code, out, _ = run(
            capsys, "assess", str(path), "--bank", "v",
            "--set-priority", "v->u=1", "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["action"]["type"] == "reprioritize"


class TestScanGamma:
    def test_finds_interior_peak(self, capsys, tmp_path):
        path = tmp_path / "doc.json"
        path.write_text(json.dumps(load_scenario_document("partial_removal_0.5")))
        code, out, _ = run(
            capsys, "scan-gamma", str(path), "--contract", "u->v", "--bank", "v",
            "--format", "json",
        )
        assert code == 0
        payload = json.loads(out)
        assert payload["gamma_star"] == pytest.approx(0.5, abs=1 / 64)


class TestGame:
    def test_matrix_nash_dominant_text(self, capsys):
        code, out, _ = run(capsys, "game", "prisoners")
        assert code == 0
        assert "(2.667, 2.667)" in out
        assert "nash equilibrium: defect/defect payoffs (2.667, 2.667)" in out
        assert "dominant for v1: defect" in out

    def test_sections_can_be_selected(self, capsys):
        code, out, _ = run(capsys, "game", "stag_hunt", "--nash")
        assert code == 0
        assert "cooperate/cooperate" in out and "matrix" not in out.lower()

    def test_json_matrix(self, capsys):
        code, out, _ = run(capsys, "game", "volunteer", "--k", "3", "--format", "json")
        assert code == 0
        payload = json.loads(out)
        assert len(payload["players"]) == 3
        assert len(payload["nash"]) == 3

    def test_bad_scenario_and_params(self, capsys):
        code, _, _ = run(capsys, "game", "nope")
        assert code == 1  # argparse choices reject it
        code, _, err = run(capsys, "game", "prisoners", "--k", "3")
        assert code == 2
        assert "unknown parameter" in err
        code, _, err = run(capsys, "game", "volunteer", "--k", "x")
        assert code == 1
        code, _, err = run(capsys, "game", "dollar_auction")
        assert code == 2
        assert "matrix" in err


class TestAuction:
    def test_trace_and_summary(self, capsys):
        code, out, _ = run(capsys, "auction", "--epsilon", "0.01", "--rounds", "10")
        assert code == 0
        assert "round 1: u_prime donates 0.01 to v" in out
        assert "round 2: v_prime donates 0.02 to u" in out
        assert "spent u_prime=0.09 v_prime=0.1" in out
        assert "position:" in out

    def test_json(self, capsys):
        code, out, _ = run(
            capsys, "auction", "--epsilon", "0.01", "--rounds", "10", "--format", "json"
        )
        payload = json.loads(out)
        assert payload["halted"] is False
        assert payload["spent"]["u_prime"] == pytest.approx(0.09)
        assert payload["spent"]["v_prime"] == pytest.approx(0.10)
        assert payload["outcome"]["case"] == "v_defaults"

    def test_epsilon_validation(self, capsys):
        code, _, err = run(capsys, "auction", "--epsilon", "0")
        assert code == 2


class TestUsage:
    def test_no_command(self, capsys):
        assert run(capsys, )[0] == 1

    def test_unknown_command(self, capsys):
        assert run(capsys, "frobnicate")[0] == 1

    def test_help_exits_zero(self, capsys):
        assert run(capsys, "--help")[0] == 0
        assert run(capsys, "solve", "--help")[0] == 0
