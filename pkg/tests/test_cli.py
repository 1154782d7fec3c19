import json

import pytest

from vecauto.cli import main
from vecauto.fileformat import load_machine, write_machine
from vecauto.machines import validate


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    records = [json.loads(line) for line in out.splitlines() if line.strip()]
    return code, records


@pytest.fixture
def powr_path(tmp_path, capsys):
    path = tmp_path / "powr.mach"
    assert main(["build", "pow_r", "-o", str(path)]) == 0
    capsys.readouterr()
    return path


class TestValidateCommand:
    def test_built_machine_is_valid(self, capsys, powr_path):
        code, records = run_cli(capsys, "validate", str(powr_path))
        assert code == 0
        assert records[0]["verdict"] == "Valid"

    def test_wrong_shape_matrix(self, capsys, tmp_path, powr_path):
        text = powr_path.read_text().replace('"dimension": 2', '"dimension": 3')
        bad = tmp_path / "bad.mach"
        bad.write_text(text)
        code, records = run_cli(capsys, "validate", str(bad))
        assert code == 2
        assert records[0]["verdict"] == "Invalid"
        assert any("dim" in d for d in records[0]["diagnostics"])

    def test_unknown_kind(self, capsys, tmp_path, powr_path):
        bad = tmp_path / "bad.mach"
        bad.write_text(powr_path.read_text().replace('"HVA"', '"XFA"'))
        code, records = run_cli(capsys, "validate", str(bad))
        assert code == 2
        assert records[0]["verdict"] == "ParseError"

    def test_missing_file(self, capsys):
        code, records = run_cli(capsys, "validate", "no_such.mach")
        assert code == 2


class TestRunCommand:
    def test_accept_with_trace(self, capsys, powr_path):
        code, records = run_cli(capsys, "run", str(powr_path), "aab", "--trace")
        assert code == 0
        record = records[0]
        assert record["verdict"] == "Accept"
        last = record["trace"][-1]
        assert last["state"] == "q3"
        assert last["register"] == ["1", "1"]

    def test_reject_exit_code(self, capsys, powr_path):
        code, records = run_cli(capsys, "run", str(powr_path), "ab")
        assert code == 1
        assert records[0]["verdict"] == "Reject"

    def test_foreign_symbol_is_usage_error(self, capsys, powr_path):
        code, records = run_cli(capsys, "run", str(powr_path), "abc")
        assert code == 2
        assert records[0]["verdict"] == "UsageError"

    def test_eq_accepts_ab(self, capsys, tmp_path):
        path = tmp_path / "eq.mach"
        main(["build", "eq", "-o", str(path)])
        capsys.readouterr()
        code, records = run_cli(capsys, "run", str(path), "ab")
        assert code == 0

    def test_leq_rejects_a(self, capsys, tmp_path):
        path = tmp_path / "leq.mach"
        main(["build", "leq", "-o", str(path)])
        capsys.readouterr()
        code, records = run_cli(capsys, "run", str(path), "a")
        assert code == 1


class TestTransformCommand:
    def test_remove_endmarker_writes_equivalent_file(self, capsys, tmp_path, powr_path):
        out_path = tmp_path / "powr_nm.mach"
        code, records = run_cli(
            capsys, "transform", "remove-endmarker", str(powr_path), str(out_path)
        )
        assert code == 0
        assert records[0]["pass"] == "remove_endmarker"
        out = load_machine(out_path)
        assert validate(out) == []
        assert not out.endmarker
        code, records = run_cli(
            capsys, "verify", str(out_path), "--against", str(powr_path), "--maxlen", "7"
        )
        assert code == 0

    def test_eliminate_states_via_cli(self, capsys, tmp_path):
        from test_transforms import two_state_double_a_dva

        dva_path = tmp_path / "dva.mach"
        dva_path.write_text(write_machine(two_state_double_a_dva()))
        out_path = tmp_path / "flat.mach"
        code, records = run_cli(
            capsys, "transform", "eliminate-states", str(dva_path), str(out_path)
        )
        assert code == 0
        out = load_machine(out_path)
        assert len(out.states) == 1
        assert out.dimension == 3

    def test_counters_pipeline_via_cli(self, capsys, tmp_path):
        from machine_gen import blind_counter_ab

        cm_path = tmp_path / "cm.mach"
        cm_path.write_text(write_machine(blind_counter_ab()))
        out_path = tmp_path / "hva3.mach"
        code, records = run_cli(
            capsys, "transform", "counters-to-integer-hva3", str(cm_path), str(out_path)
        )
        assert code == 0
        assert load_machine(out_path).dimension == 3

    def test_unsupported_pass_is_usage_error(self, capsys, tmp_path, powr_path):
        code, records = run_cli(
            capsys, "transform", "eliminate-states", str(powr_path),
            str(tmp_path / "x.mach"),
        )
        assert code == 2
        assert "vector automata" in records[0]["detail"]


class TestBuildAndSeparate:
    def test_build_to_stdout(self, capsys):
        code = main(["build", "mod", "6"])
        out = capsys.readouterr().out
        assert code == 0
        assert json.loads(out)["dimension"] == 6

    def test_separate_verifies_the_machine(self, capsys, tmp_path):
        out_path = tmp_path / "sep.mach"
        code, records = run_cli(
            capsys, "separate", "12", "21", "--model", "dbva", "-o", str(out_path)
        )
        assert code == 0
        assert records[0]["verdict"] == "Separated"
        assert records[0]["failures"] == []
        assert validate(load_machine(out_path)) == []

    def test_separate_homing_model(self, capsys, tmp_path):
        code, records = run_cli(
            capsys, "separate", "121", "211", "112", "--model", "dbhva",
            "-o", str(tmp_path / "sep.mach"),
        )
        assert code == 0


class TestVerifyAndCheck:
    def test_verify_against_reference(self, capsys, tmp_path):
        path = tmp_path / "abstar.mach"
        main(["build", "ab_star", "-o", str(path)])
        capsys.readouterr()
        code, records = run_cli(
            capsys, "verify", str(path), "--against", "ab_star", "--maxlen", "8"
        )
        assert code == 0
        assert records[0]["verdict"] == "Equal"

    def test_verify_counterexample_exit_one(self, capsys, tmp_path):
        m2 = tmp_path / "m2.mach"
        m3 = tmp_path / "m3.mach"
        main(["build", "mod", "2", "-o", str(m2)])
        main(["build", "mod", "3", "-o", str(m3)])
        capsys.readouterr()
        code, records = run_cli(
            capsys, "verify", str(m2), "--against", str(m3), "--maxlen", "6"
        )
        assert code == 1
        assert records[0]["counterexample"] == "aa"

    def test_check_star_closure(self, capsys, tmp_path):
        path = tmp_path / "eq.mach"
        main(["build", "eq", "-o", str(path)])
        capsys.readouterr()
        code, records = run_cli(capsys, "check", "star-closure", str(path), "--maxlen", "7")
        assert code == 0
        assert records[0]["verdict"] == "Ok"

    def test_check_commutative_matrices_not_applicable(self, capsys, tmp_path):
        path = tmp_path / "abk.mach"
        main(["build", "ab_k_star", "2", "-o", str(path)])
        capsys.readouterr()
        code, records = run_cli(
            capsys, "check", "commutative-matrices", str(path), "--maxlen", "6"
        )
        assert code == 0
        assert records[0]["verdict"] == "NotApplicable"


class TestEnumerateCommand:
    def test_ab_star_up_to_six(self, capsys, tmp_path):
        path = tmp_path / "abstar.mach"
        main(["build", "ab_star", "-o", str(path)])
        capsys.readouterr()
        code, records = run_cli(capsys, "enumerate", str(path), "--maxlen", "6")
        assert code == 0
        words = [r["accepted"] for r in records]
        assert words == ["", "ab", "aabb", "abab", "aaabbb", "aabbab", "abaabb", "ababab"]


class TestBudgetAndKinds:
    def test_env_var_budget_override(self, capsys, tmp_path, monkeypatch):
        path = tmp_path / "leq.mach"
        main(["build", "leq", "-o", str(path)])
        capsys.readouterr()
        monkeypatch.setenv("VECAUTO_MAX_CONFIGS", "1")
        code, records = run_cli(capsys, "run", str(path), "ab")
        assert code == 3
        assert records[0]["verdict"] == "BudgetExceeded"

    def test_budget_flag(self, capsys, tmp_path):
        path = tmp_path / "leq.mach"
        main(["build", "leq", "-o", str(path)])
        capsys.readouterr()
        code, records = run_cli(capsys, "run", str(path), "ab", "--budget", "1")
        assert code == 3

    def test_gfa_run_reports_value(self, capsys, tmp_path):
        from test_machines import one_state_gfa

        path = tmp_path / "gfa.mach"
        path.write_text(write_machine(one_state_gfa()))
        code, records = run_cli(capsys, "run", str(path), "aaa")
        assert code == 0
        assert records[0]["value"] == "8"

    def test_every_catalog_machine_builds_and_validates(self, capsys, tmp_path):
        cases = [
            ("pow_r", None), ("ab_star", None), ("mod", 3), ("mod_rot", 4),
            ("ab_k_star", 2), ("eq", None), ("leq", None), ("dyck", None),
            ("evenab", None), ("l_epsilon", None), ("unary_point", 1),
        ]
        for name, param in cases:
            path = tmp_path / f"{name}.mach"
            argv = ["build", name] + ([str(param)] if param is not None else [])
            assert main(argv + ["-o", str(path)]) == 0
            capsys.readouterr()
            code, records = run_cli(capsys, "validate", str(path))
            assert code == 0, (name, records)


class TestDiophantineCommand:
    def test_solve(self, capsys, tmp_path):
        sys_path = tmp_path / "eq.sys"
        sys_path.write_text('{"alphabet": ["a", "b"], "coefficients": [[1, -1]]}')
        code, records = run_cli(capsys, "diophantine", "solve", str(sys_path), "--bound", "2")
        assert code == 0
        assert [r["solution"] for r in records] == [[0, 0], [1, 1], [2, 2]]

    def test_to_famw_and_back(self, capsys, tmp_path):
        sys_path = tmp_path / "eq.sys"
        sys_path.write_text('{"alphabet": ["a", "b"], "coefficients": [[1, -1]]}')
        mach_path = tmp_path / "eq.mach"
        assert main(["diophantine", "to-famw", str(sys_path), "-o", str(mach_path)]) == 0
        capsys.readouterr()
        code, records = run_cli(
            capsys, "verify", str(mach_path), "--against", "eq", "--maxlen", "8"
        )
        assert code == 0
        sys_out = tmp_path / "back.sys"
        assert main(["diophantine", "from-famw", str(mach_path), "-o", str(sys_out)]) == 0
        assert json.loads(sys_out.read_text())["coefficients"] == [[1, -1]]
