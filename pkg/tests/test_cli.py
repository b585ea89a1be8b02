import json
import subprocess
import sys

import pytest

from vbkit.cli import SCHEMA, main
from vbkit.corpus import files, path

BROKEN = """chart pt { }
algebroid so3_broken over pt {
  frame { e1 e2 e3 }
  bracket {
    [e1, e2]: { e2: 1 }
    [e2, e3]: { e1: 1 }
  }
}
check axioms(so3_broken) expect {expect}
"""


def _run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


@pytest.fixture
def broken(tmp_path):
    def make(expect):
        p = tmp_path / f"broken_{expect}.vb"
        p.write_text(BROKEN.replace("{expect}", expect))
        return str(p)
    return make


@pytest.mark.parametrize("name", [p.name for p in files()])
def test_each_corpus_file_meets_every_expectation(capsys, name):
    code, out = _run(capsys, "check", str(path(name)))
    assert code == 0, out.out


def test_broken_jacobi_expected_to_fail_is_exit_zero(capsys, broken):
    code, out = _run(capsys, "check", broken("fail"))
    assert code == 0
    assert "1/1 expectations met" in out.out


def test_broken_jacobi_expected_to_pass_is_exit_one_with_the_triple(capsys, broken):
    code, out = _run(capsys, "check", broken("pass"))
    assert code == 1
    assert "MISMATCH" in out.out
    assert "Jacobi (e1, e2, e3)" in out.out


def test_parse_error_is_exit_two(capsys, tmp_path):
    p = tmp_path / "bad.vb"
    p.write_text("chart R { x $ }\n")
    code, out = _run(capsys, "check", str(p))
    assert code == 2
    assert f"{p}:1:13: lexical error" in out.out


def test_missing_input_is_exit_two(capsys):
    code, out = _run(capsys, "check")
    assert code == 2


def test_json_report_is_deterministic_and_parallel_safe(capsys):
    _, a = _run(capsys, "check", "--corpus", "--emit", "json", "--seed", "7")
    _, b = _run(capsys, "check", "--corpus", "--emit", "json", "--seed", "7")
    _, c = _run(capsys, "check", "--corpus", "--emit", "json", "--seed", "7", "--jobs", "3")
    assert a.out == b.out == c.out
    rep = json.loads(a.out)
    assert rep["schema"] == SCHEMA
    assert rep["summary"]["exit_code"] == 0
    assert rep["summary"]["met"] == rep["summary"]["checks"] > 100
    assert all(f["file"].startswith("corpus/") for f in rep["files"])
    assert "seconds" not in a.out


def test_timing_is_opt_in(capsys):
    _, out = _run(capsys, "check", str(path("so3.vb")), "--emit", "json", "--timing")
    checks = json.loads(out.out)["files"][0]["checks"]
    assert all("seconds" in c for c in checks)


def test_json_mismatch_lists_violations(capsys, broken):
    code, out = _run(capsys, "check", broken("pass"), "--emit", "json")
    rep = json.loads(out.out)
    (chk,) = rep["files"][0]["checks"]
    assert code == 1 and chk["verdict"] == "fail" and not chk["met"]
    assert any(v["where"].startswith("Jacobi (e1, e2, e3)") for v in chk["violations"])


def test_build_prints_parseable_declarations(capsys, tmp_path):
    code, out = _run(capsys, "build", "tangent_algebroid", "so3", str(path("so3.vb")), "-o", "Tso3")
    assert code == 0
    assert "algebroid Tso3 over Tso3_base {" in out.out
    p = tmp_path / "built.vb"
    p.write_text(out.out + "check axioms(Tso3) expect pass\n")
    code, _ = _run(capsys, "check", str(p))
    assert code == 0


def test_build_json_and_errors(capsys):
    code, out = _run(capsys, "build", "algebroid_to_poisson", "so3", str(path("so3.vb")), "--emit", "json")
    assert code == 0
    rep = json.loads(out.out)
    assert rep["kind"] == "poisson" and "poisson" in rep["dsl"]
    code, out = _run(capsys, "build", "nosuch", "so3", str(path("so3.vb")))
    assert code == 2 and "unknown constructor" in out.err
    code, out = _run(capsys, "build", "tangent_algebroid", "missing", str(path("so3.vb")))
    assert code == 2 and "undeclared" in out.err


def test_checks_listing(capsys):
    code, out = _run(capsys, "checks")
    assert code == 0
    assert "axioms(any)" in out.out and "let X = tangent_algebroid(algebroid)" in out.out


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "vbkit.cli", "check", str(path("so3.vb"))],
                       capture_output=True, text=True)
    assert r.returncode == 0
    assert "total: 19/19 expectations met, exit 0" in r.stdout
