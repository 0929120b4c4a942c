import io
import json
import subprocess
import sys

import pytest

from verbalg.cli import EXIT_BUDGET, EXIT_OK, EXIT_USAGE, run_command
from verbalg.report import strip_timing

from cli_corpus import CORPUS, f


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code, rep = run_command(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_json_is_deterministic(name, tmp_path):
    texts = []
    for k in range(2):
        path = tmp_path / f"{k}.json"
        code, _, err = run(CORPUS[name] + ["--json", str(path)])
        assert code == EXIT_OK, err
        texts.append(path.read_text())
    assert strip_timing(texts[0]) == strip_timing(texts[1])
    data = json.loads(texts[0])
    assert list(data) == ["schema", "command", "inputs", "verdict", "bounds", "result", "timing"]
    assert data["schema"] == 1


def test_jobs_do_not_change_results():
    one = json.loads(run(CORPUS["search-words"] + ["--json", "-"])[1])
    two = json.loads(run(CORPUS["search-words-jobs"] + ["--json", "-"])[1])
    assert one["result"] == two["result"] and one["verdict"] == two["verdict"]


def test_json_to_stdout_is_pure():
    code, out, _ = run(CORPUS["homs"] + ["--json", "-"])
    assert code == EXIT_OK
    assert json.loads(out)["verdict"] == "3 HOMOMORPHISMS"


def test_inputs_hashed_by_content(tmp_path):
    copy = tmp_path / "copy.alg"
    copy.write_text(open(f("act_z2.alg")).read())
    a = json.loads(run(["derive", "--variety", "act", "--model", f("act_z2.alg"),
                        "--words", f("act_opposite.words"), "--json", "-"])[1])
    b = json.loads(run(["derive", "--variety", "act", "--model", str(copy),
                        "--words", f("act_opposite.words"), "--json", "-"])[1])
    assert a["inputs"] == b["inputs"]


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["homs", "--variety", "act", "missing.alg", "also-missing.alg"],
    ["validate", "--variety", f("act_system.eq")],
    ["closure", "--variety", "act", "--model", f("act_z2.alg"), "--system", f("act_system.eq"), "--query", "x1 = y1"],
    ["search-words", "--variety", f("semigroup.var")],
    ["search-words", "--variety", "act", "--max-word-size", "0"],
    ["counterexample", "--variety", "act"],
])
def test_usage_errors_exit_1(argv):
    code, _, err = run(argv)
    assert code == EXIT_USAGE
    assert err


def test_parse_error_reports_position(tmp_path):
    bad = tmp_path / "bad.var"
    bad.write_text("sorts 1\nop mul : 1 1 -> 1\nidentity [x:1] mull(x,x) = x\n")
    code, _, err = run(["validate", "--variety", str(bad)])
    assert code == EXIT_USAGE
    assert "3:16" in err and "bad.var" in err


def test_budget_exit_2():
    code, out, _ = run(CORPUS["homs"] + ["--budget", "2", "--json", "-"])
    assert code == EXIT_BUDGET
    data = json.loads(out)
    assert data["verdict"] == "BUDGET_EXCEEDED" and data["result"]["budget"] == 2


def test_false_verdict_is_exit_0():
    code, _, _ = run(CORPUS["closure"])
    assert code == EXIT_OK


def test_console_entry_point(tmp_path):
    path = tmp_path / "out.json"
    proc = subprocess.run([sys.executable, "-m", "verbalg", *CORPUS["geom-eq"], "--json", str(path)],
                          capture_output=True, text=True)
    assert proc.returncode == EXIT_OK, proc.stderr
    data = json.loads(path.read_text())
    assert data["verdict"] == "NOT_EQUIVALENT"
    assert not (tmp_path / "out.json.tmp").exists()
