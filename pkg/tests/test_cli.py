import json
import subprocess
import sys
from importlib import resources

import pytest

from twistkit.checks import SCHEMA, CheckReport
from twistkit.cli import main

MODELS = resources.files("twistkit") / "models"


def model(name):
    return str(MODELS / f"{name}.model")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestCheck:
    def test_all_pass(self, capsys):
        code, out, _ = run(capsys, "check", model("hkt_instanton_t4xt4"))
        assert code == 0 and "0 failed, 0 errors" in out

    def test_expected_failure_exits_one(self, capsys):
        # halfline_t3 lists is_instanton(H), which is false for its F
        code, out, _ = run(capsys, "check", model("halfline_t3"))
        assert code == 1 and "FAIL  is_instanton(H)" in out

    def test_only(self, capsys):
        code, out, _ = run(capsys, "check", model("halfline_t3"), "--only", "validate_twist_data,hkt_twist_condition",
                           "--format", "machine")
        lines = [json.loads(l) for l in out.splitlines()]
        assert code == 0
        assert [l["check"] for l in lines[1:-1]] == ["validate_twist_data", "hkt_twist_condition(g, H)"]
        assert lines[2]["witnesses"]["J-term"] == "2/x0*b1^b2^b3"

    def test_machine_schema(self, capsys):
        _, out, _ = run(capsys, "check", model("hc_not_hkt_surrogate"), "--format", "machine", "--seed", "7")
        lines = out.splitlines()
        header = json.loads(lines[0])
        assert header == {"schema": SCHEMA, "file": model("hc_not_hkt_surrogate"),
                          "model": "hc_not_hkt_surrogate", "seed": 7}
        reports = [CheckReport.from_json(l) for l in lines[1:-1]]
        assert [r.to_json() for r in reports] == lines[1:-1]
        assert json.loads(lines[-1])["summary"]["fail"] == 2

    def test_jobs_do_not_change_output(self, capsys):
        _, one, _ = run(capsys, "check", model("hkt_instanton_t4xt4"), "--format", "machine")
        _, four, _ = run(capsys, "check", model("hkt_instanton_t4xt4"), "--format", "machine", "--jobs", "4")
        assert one == four

    def test_parse_error(self, capsys, tmp_path):
        f = tmp_path / "bad.model"
        f.write_text("[MODEL]\ncoframe = e1, e2\nde1 = e1^e9\n")
        code, out, err = run(capsys, "check", str(f))
        assert code == 2 and out == ""
        assert "line 3, column 10" in err and "e9" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "check", str(tmp_path / "none.model"))
        assert code == 2 and "cannot read" in err

    def test_error_verdict_does_not_stop_others(self, capsys, tmp_path):
        f = tmp_path / "m.model"
        f.write_text("[MODEL]\ncoframe = e1, e2\n[CHECKS]\nnijenhuis(I)\nvalidate_model\n")
        code, out, _ = run(capsys, "check", str(f), "--format", "machine")
        verdicts = [json.loads(l)["verdict"] for l in out.splitlines()[1:-1]]
        assert code == 1 and verdicts == ["error", "pass"]

    def test_bad_seed(self, capsys):
        with pytest.raises(SystemExit):
            main(["check", model("halfline_t3"), "--seed", "-1"])


class TestExample:
    def test_emit_model_matches_shipped_file(self, capsys):
        code, out, _ = run(capsys, "example", "skt_non_instanton(1,-1)", "--emit-model")
        assert code == 0
        assert out == (MODELS / "skt_non_instanton_p1_m1.model").read_text(encoding="utf-8")

    def test_describe(self, capsys):
        code, out, _ = run(capsys, "example", "halfline_t3")
        assert code == 0 and "expect fail: is_instanton(H)" in out

    def test_unknown(self, capsys):
        code, _, err = run(capsys, "example", "nope")
        assert code == 2 and "flat_torus(n)" in err


class TestValidate:
    def test_ok(self, capsys):
        assert run(capsys, "validate", model("su2_su2"))[0] == 0

    def test_d_squared_failure(self, capsys, tmp_path):
        f = tmp_path / "m.model"
        f.write_text("[MODEL]\ncoframe = e1, e2, e3, e4\nde1 = e3^e4\nde4 = e1^e2\n")
        code, out, _ = run(capsys, "validate", str(f))
        assert code == 1 and "FAIL" in out


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "twistkit.cli", "check", model("flat_torus_4"), "--format", "machine"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0, proc.stderr
    assert json.loads(proc.stdout.splitlines()[0])["schema"] == SCHEMA
