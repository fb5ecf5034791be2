"""CLI subcommands, exit codes, and JSON shapes."""

import json

import pytest

from walkembed.cli import main

MU_516_JSON = '{"atoms": {"0": "5/16", "-2": "11/32", "2": "11/32"}}'
MU_29_JSON = '{"atoms": {"-3": "2/9", "0": "4/9", "2": "1/3"}}'
MU_UNIFORM3_JSON = '{"atoms": {"-2": "1/3", "0": "1/3", "2": "1/3"}}'
MU_BERNOULLI_JSON = '{"atoms": {"-1": "1/2", "1": "1/2"}}'


@pytest.fixture
def mu_516(tmp_path):
    p = tmp_path / "mu.json"
    p.write_text(MU_516_JSON)
    return str(p)


def run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out.strip()
    return code, (json.loads(out) if out else None)


class TestClassify:
    def test_weight_member(self, capsys):
        code, out = run(capsys, ["classify", "--weight", "1/6"])
        assert code == 0
        assert out == {"member": True, "halfWeight": "1"}

    def test_weight_non_member(self, capsys):
        code, out = run(capsys, ["classify", "--weight", "11/20"])
        assert code == 0
        assert out == {"member": False, "halfWeight": "3/2"}

    def test_triple(self, capsys):
        code, out = run(capsys, ["classify", "--triple", "1/4,1/2,1/4"])
        assert code == 0
        assert out["member"] is False

    def test_triple_malformed(self, capsys):
        assert main(["classify", "--triple", "1/4,1/2"]) == 2

    def test_measure_chain(self, capsys, mu_516):
        code, out = run(capsys, ["classify", "--measure", mu_516])
        assert code == 0
        assert out["azemaYor"] is False
        assert out["chaconWalsh"] == "nonMemberUpToDepth"
        assert out["uiMatrix"] == "member"
        assert out["minimal"] is True

    def test_bad_rational(self, capsys):
        assert main(["classify", "--weight", "not-a-number"]) == 2


class TestEmbed:
    def test_ay_member(self, capsys, tmp_path):
        p = tmp_path / "b.json"
        p.write_text(MU_BERNOULLI_JSON)
        code, out = run(capsys, ["embed", "ay", str(p)])
        assert code == 0
        assert out["kind"] == "maxThreshold"

    def test_ay_non_member_undecided(self, capsys, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(MU_29_JSON)
        code, out = run(capsys, ["embed", "ay", str(p)])
        assert code == 3
        assert out["member"] is False
        assert out["witnessValue"] == "6/7"

    def test_chw_witness(self, capsys, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(MU_29_JSON)
        code, out = run(capsys, ["embed", "chw", str(p)])
        assert code == 0
        assert out["kind"] == "exitComposition"
        assert len(out["payload"]) == 2

    def test_chw_non_member(self, capsys, mu_516):
        code, out = run(capsys, ["embed", "chw", mu_516])
        assert code == 3
        assert out["member"] is False

    def test_ui_matrix(self, capsys, mu_516):
        code, out = run(capsys, ["embed", "ui-matrix", mu_516])
        assert code == 0
        assert out["kind"] == "pathCountMatrix"
        assert out["payload"]["N"] == 1

    def test_minimal_stdin(self, capsys, monkeypatch):
        import io

        monkeypatch.setattr("sys.stdin", io.StringIO(MU_516_JSON))
        code, out = run(capsys, ["embed", "minimal", "-"])
        assert code == 0
        assert out["kind"] == "minimalTheorem1"

    def test_hall(self, capsys, tmp_path):
        p = tmp_path / "u.json"
        p.write_text(MU_UNIFORM3_JSON)
        code, out = run(capsys, ["embed", "hall", str(p)])
        assert code == 0
        assert out["kind"] == "randomizedRule"
        assert {(e["u"], e["v"], e["w"]) for e in out["payload"]} == {
            (-2, 0, "1/3"), (-2, 2, "2/3")}

    def test_missing_file(self, capsys):
        assert main(["embed", "ay", "/nonexistent/mu.json"]) == 2


class TestVerifyAndLaws:
    def _matrix_file(self, tmp_path, capsys, mu_path):
        code, out = run(capsys, ["embed", "ui-matrix", mu_path])
        assert code == 0
        m = tmp_path / "matrix.json"
        m.write_text(json.dumps(out["payload"]))
        return str(m)

    def test_verify_valid(self, capsys, tmp_path, mu_516):
        m = self._matrix_file(tmp_path, capsys, mu_516)
        code, out = run(capsys, ["verify", m, mu_516])
        assert code == 0
        assert out["status"] == "valid"

    def test_verify_violation(self, capsys, tmp_path, mu_516):
        m = tmp_path / "bad.json"
        m.write_text(json.dumps({"N": 1, "rows": [
            {"site": 0, "head": [0, 2], "tail": "zero"}]}))
        code, out = run(capsys, ["verify", str(m), mu_516])
        assert code == 2
        assert out["status"] == "violation"

    def test_exact_law_of_embedded_rule(self, capsys, tmp_path, mu_516):
        code, out = run(capsys, ["embed", "ui-matrix", mu_516])
        r = tmp_path / "rule.json"
        r.write_text(json.dumps(out))
        code, out = run(capsys, ["exact-law", str(r)])
        assert code == 0
        assert out["residual"] == "0"
        assert out["law"] == {"-2": "11/32", "0": "5/16", "2": "11/32"}

    def test_exact_law_hall_rule(self, capsys, tmp_path):
        p = tmp_path / "u.json"
        p.write_text(MU_UNIFORM3_JSON)
        code, out = run(capsys, ["embed", "hall", str(p)])
        r = tmp_path / "rule.json"
        r.write_text(json.dumps(out))
        code, out = run(capsys, ["exact-law", str(r)])
        assert code == 0
        assert out["law"] == {"-2": "1/3", "0": "1/3", "2": "1/3"}


class TestSimulate:
    def test_simulate_pair_rule(self, capsys, tmp_path):
        r = tmp_path / "rule.json"
        r.write_text('{"kind": "randomizedPair", "payload": {"u": -2, "v": 2}}')
        code, out = run(capsys, ["simulate", str(r), "--trials", "1000",
                                 "--seed", "7", "--max-steps", "4096",
                                 "--backend", "numpy"])
        assert code == 0
        assert out["trials"] == 1000
        assert out["truncated"] == 0
        assert set(out["counts"]) == {"-2", "2"}

    def test_seed_env_default(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("WALKEMBED_SEED", "123")
        r = tmp_path / "rule.json"
        r.write_text('{"kind": "randomizedPair", "payload": {"u": -1, "v": 1}}')
        code, out = run(capsys, ["simulate", str(r), "--trials", "10",
                                 "--max-steps", "64", "--backend", "numpy"])
        assert code == 0
        assert out["seed"] == 123


class TestSetAndPotential:
    def test_set_cover(self, capsys):
        code, out = run(capsys, ["set", "--depth", "1"])
        assert code == 0
        assert out["measure"] == "1/2"
        assert out["intervals"] == [["0", "1/2"], ["1", "1"]]

    def test_set_point_member(self, capsys):
        code, out = run(capsys, ["set", "--point", "1/6"])
        assert code == 0
        assert out["verdict"] == "member"

    def test_set_point_non_member(self, capsys):
        code, out = run(capsys, ["set", "--point", "3/4"])
        assert code == 0
        assert out["verdict"] == "nonMember"

    def test_potential_table(self, capsys, tmp_path):
        p = tmp_path / "m.json"
        p.write_text(MU_29_JSON)
        code, out = run(capsys, ["potential", str(p)])
        assert code == 0
        assert out["values"]["0"] == "-4/3"
        assert out["barycenter"]["0"] == "6/7"
