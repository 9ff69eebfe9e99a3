import json

import pytest

from mbca import emit_machine
from mbca.cli import main
from conftest import a1_machine, a_all_machine, a_none_machine


@pytest.fixture(scope="module")
def machine_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("machines")
    paths = {}
    for machine in (a1_machine(), a_all_machine(), a_none_machine()):
        path = root / f"{machine.name}.mbca"
        path.write_text(emit_machine(machine))
        paths[machine.name] = str(path)
    bad = root / "bad.mbca"
    bad.write_text("mbca bad\nalphabet a\nstates q\ninitial q\ntrans q a Z q 0\n")
    paths["bad"] = str(bad)
    return paths


def test_classify_a1(machine_files, capsys):
    assert main(["classify", "--machine", machine_files["A1"]]) == 0
    assert capsys.readouterr().out.strip() == "D_1^2"


def test_member_examples(machine_files, capsys):
    assert main(["member", "--machine", machine_files["A1"], "--word", "a a a b b ; c"]) == 0
    assert capsys.readouterr().out.strip() == "true"
    assert main(["member", "--machine", machine_files["A1"], "--word", "a a b b b ; c"]) == 0
    assert capsys.readouterr().out.strip() == "false"


def test_compare_dual(machine_files, capsys):
    assert main(["compare", "--machine", machine_files["A_ALL"], "--other", machine_files["A_NONE"]]) == 0
    assert capsys.readouterr().out.strip() == "dual"


def test_validate_exit_codes(machine_files, capsys):
    assert main(["validate", "--machine", machine_files["A1"]]) == 0
    capsys.readouterr()
    assert main(["validate", "--machine", machine_files["bad"]]) == 1
    out = capsys.readouterr().out
    assert "BlindnessViolation" in out


def test_usage_error_exit_code(machine_files):
    with pytest.raises(SystemExit) as err:
        main(["member", "--machine", machine_files["A1"]])  # missing --word
    assert err.value.code == 2


def test_simulate(machine_files, capsys):
    assert main(["simulate", "--machine", machine_files["A1"], "--word", "a a b b b ; c"]) == 0
    out = capsys.readouterr().out
    assert "blocked" in out and "4" in out


def test_structured_output_is_stable(machine_files, capsys):
    assert main(["--format", "structured", "classify", "--machine", machine_files["A1"]]) == 0
    first = capsys.readouterr().out
    payload = json.loads(first)
    assert payload["name"] == "D_1^2"
    rerendered = json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=True) + "\n"
    assert rerendered == first


def test_canonical_output_parses(machine_files, capsys, tmp_path):
    assert main(["canonical", "--class", "D_1^2"]) == 0
    text = capsys.readouterr().out
    path = tmp_path / "canon.mbca"
    path.write_text(text)
    assert main(["classify", "--machine", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "D_1^2"


def test_game_tournament(machine_files, capsys):
    assert main(["game", "--machine", machine_files["A1"], "--other", machine_files["A1"]]) == 0
    out = capsys.readouterr().out
    assert "no losses" in out


def test_loops_chains_superchains_invariants(machine_files, capsys):
    for cmd in ("loops", "chains", "superchains", "invariants"):
        assert main([cmd, "--machine", machine_files["A1"]]) == 0
        assert capsys.readouterr().out.strip()


def test_game_with_strategy_files(machine_files, capsys, tmp_path):
    from mbca.arena import emit_strategy, table_player1, constant_word
    from mbca import parse_word

    opponent = tmp_path / "p1.strat"
    opponent.write_text(emit_strategy(table_player1({"start": "a", "skip": "a", "a": "a"})))
    defender = tmp_path / "p2.strat"
    defender.write_text(emit_strategy(constant_word(parse_word("; a"), ["a"], name="mirror")))
    rc = main([
        "game", "--machine", machine_files["A_ALL"], "--other", machine_files["A_ALL"],
        "--strategy", str(defender), "--opponent", str(opponent),
    ])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "player2wins"


def test_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "0 failed" in out
