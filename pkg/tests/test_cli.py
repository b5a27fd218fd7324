import json
import shutil
import subprocess

import pytest

from paratwistor import report as rp
from paratwistor.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--json")
    return code, json.loads(out)


def check(doc, name):
    found = [c for c in doc["checks"] if c["name"] == name]
    assert found, f"no check named {name!r}"
    return found[0]


class TestVerifyBase:
    def test_einstein_constant(self, capsys):
        code, doc = run_json(capsys, "verify-base", "--n", "2", "--sc", "16")
        assert code == 0 and doc["passed"]
        assert check(doc, "Einstein rho = (Sc/4n) g")["value"] == {"lambda": "2"}
        assert doc["schema"] == 1 and doc["suite"] == "verify-base"
        assert doc["conventions"]["ricci_sign"] == -1
        assert doc["conventions"]["ansatz_signs"] == [-1, -1, -1, -1]

    def test_scope_rejected(self, capsys):
        code, out, err = run(capsys, "verify-base", "--n", "1", "--sc", "16")
        assert code == 2
        assert "4n > 4" in err and out == ""

    def test_flat_note(self, capsys):
        code, doc = run_json(capsys, "verify-base", "--n", "2", "--sc", "0")
        assert code == 0
        assert check(doc, "flat model")["status"] == "informational"

    def test_rational_flag(self, capsys):
        code, doc = run_json(capsys, "verify-base", "--n", "3", "--sc", "-24/5")
        assert code == 0 and doc["parameters"]["Sc"] == "-24/5"
        code, doc = run_json(capsys, "verify-bundle", "--kind", "reflector", "--n", "2", "--t", "-1/2", "--sc", "-16/3")
        assert code == 0 and doc["parameters"]["t"] == "-1/2"

    def test_every_check_has_anchor(self, capsys):
        _, doc = run_json(capsys, "verify-base", "--n", "2", "--sc", "16")
        assert all(c["anchor"] for c in doc["checks"])
        assert {c["status"] for c in doc["checks"]} <= {"pass", "fail", "informational"}


class TestVerifyBundle:
    def test_shared_root(self, capsys):
        code, doc = run_json(capsys, "verify-bundle", "--kind", "twistor", "--n", "2", "--t", "1", "--sc", "16", "--structure", "1")
        assert code == 0
        assert check(doc, "Einstein")["value"]["verdict"] == "yes"
        assert check(doc, "*-Einstein (I1)")["value"]["verdict"] == "yes"
        assert check(doc, "AH1 (I1)")["value"]["verdict"] == "yes"

    def test_reflector_flat(self, capsys):
        code, doc = run_json(capsys, "verify-bundle", "--kind", "reflector", "--n", "2", "--t", "1", "--sc", "0", "--structure", "2")
        assert code == 0
        assert check(doc, "APH1 (P2)")["value"]["verdict"] == "yes"
        assert check(doc, "Einstein")["value"]["verdict"] == "no"

    def test_ah1_witness(self, capsys):
        code, doc = run_json(capsys, "verify-bundle", "--kind", "twistor", "--n", "2", "--t", "1", "--sc", "7", "--structure", "2")
        assert code == 0
        ah1 = check(doc, "AH1 (I2)")["value"]
        assert ah1["verdict"] == "no" and len(ah1["witness"]) == 4
        assert check(doc, "AH2 (I2)")["value"]["verdict"] == "yes"
        assert check(doc, "AH3 (I2)")["value"]["verdict"] == "yes"
        assert check(doc, "general twistor-curvature formula vs explicit blocks")["status"] == "informational"

    def test_t_zero(self, capsys):
        code, _, err = run(capsys, "verify-bundle", "--kind", "twistor", "--n", "2", "--t", "0", "--sc", "16")
        assert code == 2 and "t must be nonzero" in err

    def test_reflector_frame_transpose_rejected(self, capsys):
        code, _, err = run(capsys, "verify-bundle", "--kind", "reflector", "--n", "2", "--sc", "16", "--adjoint-mode", "frame-transpose")
        assert code == 2 and "metric-adjoint" in err

    def test_text_summary(self, capsys):
        code, out, _ = run(capsys, "verify-bundle", "--kind", "twistor", "--n", "2", "--sc", "16")
        assert code == 0
        assert out.startswith("verify-bundle ") and out.rstrip().endswith("=> PASS")


class TestSolve:
    def exact(self, doc, name):
        return [v["exact"] for v in check(doc, name)["value"]]

    def test_twistor(self, capsys):
        code, doc = run_json(capsys, "solve", "--kind", "twistor", "--n", "2", "--t", "1")
        assert code == 0
        assert self.exact(doc, "Einstein Sc") == ["16/3", "16"]
        assert self.exact(doc, "*-Einstein Sc (I1)") == ["-8", "16"]
        assert self.exact(doc, "*-Einstein Sc (I2)") == ["40-8*sqrt(21)", "40+8*sqrt(21)"]
        assert self.exact(doc, "AH1 Sc (I1)") == ["0", "16"]

    def test_reflector(self, capsys):
        code, doc = run_json(capsys, "solve", "--kind", "reflector", "--n", "3", "--t", "2")
        assert code == 0
        assert self.exact(doc, "Einstein Sc") == ["-10", "-5/2"]

    def test_decimals(self, capsys):
        _, doc = run_json(capsys, "solve", "--kind", "twistor", "--n", "2")
        roots = check(doc, "*-Einstein Sc (I2)")["value"]
        assert roots[0]["decimal"] == pytest.approx(40 - 8 * 21**0.5)

    def test_variation(self, capsys):
        code, doc = run_json(capsys, "solve", "--variation", "--n", "2")
        assert code == 0
        equal = check(doc, "canonical variation Einstein t (paper)")
        assert [v["exact"] for v in equal["value"]["values"]] == ["1", "9/4"]
        alt = check(doc, "canonical variation Einstein t (metric-weighted)")
        assert alt["status"] == "informational"
        assert [v["exact"] for v in alt["value"]["values"]] == ["1"]
        assert "double root" in alt["value"]["note"]

    def test_metric_weighted_convention(self, capsys):
        code, doc = run_json(capsys, "solve", "--variation", "--n", "3", "--convention", "metric-weighted")
        assert code == 0
        main_check = check(doc, "canonical variation Einstein t (metric-weighted)")
        assert main_check["status"] == "pass"
        assert [v["exact"] for v in main_check["value"]["values"]] == ["1/3", "1"]

    def test_kind_required(self, capsys):
        code, _, err = run(capsys, "solve", "--n", "2")
        assert code == 2 and "--kind" in err


class TestVerifyMixed:
    @pytest.mark.parametrize("which, sign, lam", [("sphere", "negative", "6"), ("hyperbolic", "positive", "-6")])
    def test_sign_and_constant(self, capsys, which, sign, lam):
        code, doc = run_json(capsys, "verify-mixed", "--n", "1", "--which", which)
        assert code == 0
        assert check(doc, "structure sign")["value"]["sign"] == sign
        assert check(doc, "Einstein constant (4n+2) eps")["value"]["lambda"] == lam

    def test_json_n2(self, capsys):
        code, doc = run_json(capsys, "verify-mixed", "--n", "2", "--which", "sphere")
        assert code == 0 and doc["passed"]
        assert check(doc, "exponential labels")["status"] == "informational"


class TestIO:
    def test_out_file(self, capsys, tmp_path):
        target = tmp_path / "report.json"
        code, out, _ = run(capsys, "verify-base", "--n", "2", "--sc", "16", "--json", "--out", str(target))
        assert code == 0 and out == ""
        assert json.loads(target.read_text())["passed"] is True

    def test_bad_rational(self, capsys):
        code, _, err = run(capsys, "verify-base", "--n", "2", "--sc", "x/2")
        assert code == 2 and "rational" in err

    def test_missing_subcommand(self, capsys):
        assert run(capsys)[0] == 2

    def test_float_mode(self, capsys, monkeypatch):
        monkeypatch.setenv("PQK_MODE", "float")
        code, doc = run_json(capsys, "verify-base", "--n", "2", "--sc", "16")
        assert code == 0
        assert doc["conventions"]["scalar_mode"] == "float"

    def test_invalid_mode(self, capsys, monkeypatch):
        monkeypatch.setenv("PQK_MODE", "double")
        code, _, err = run(capsys, "verify-base", "--n", "2", "--sc", "16")
        assert code == 2 and "PQK_MODE" in err

    def test_failure_exit_code(self, capsys, monkeypatch):
        def failing(n, Sc):
            report = rp.VerificationReport("verify-base", {"n": n})
            report.add("forced", "fail", None, "plumbing")
            return report

        monkeypatch.setattr(rp, "cmd_verify_base", failing)
        code, out, _ = run(capsys, "verify-base", "--n", "2", "--sc", "16")
        assert code == 1 and "FAIL" in out

    @pytest.mark.skipif(shutil.which("paratwistor") is None, reason="console script not installed")
    def test_console_script(self):
        proc = subprocess.run(
            ["paratwistor", "verify-base", "--n", "3", "--sc", "60", "--json"], capture_output=True, text=True, check=False
        )
        assert proc.returncode == 0
        assert check(json.loads(proc.stdout), "Einstein rho = (Sc/4n) g")["value"] == {"lambda": "5"}
