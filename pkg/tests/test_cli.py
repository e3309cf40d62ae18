import csv
import io
import json
import subprocess
import sys

import pytest

import oracles as ref
from lcsflags.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def report(*argv):
    code, out, err = call(*argv)
    assert code == 0, err
    doc = json.loads(out)
    assert doc["schema"] == 1
    return doc


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, text in {"w": "1001011\n", "s": "1" + "0" * 200 + "10" * 255 + "\n",
                       "t": "10" * 256 + "\n", "ones": "1" * 16 + "\n",
                       "alt": "10" * 16 + "\n", "pair": "10" * 8 + "\n" + "10" * 8 + "\n",
                       "bad": "1021\n"}.items():
        p = tmp_path / f"{name}.txt"
        p.write_text(text)
        paths[name] = p
    paths["dir"] = tmp_path
    return paths


def test_flags_report(files):
    doc = report("flags", files["w"], "--epsilon", "1/1000000")
    entry = doc["report"]["strings"][0]
    assert entry["b"] == [1, 1, 0, 0]
    assert entry["counts"]["2"]["green"] == 1
    assert doc["config"]["params"]["epsilon"] == "1/1000000"
    assert "workers" not in doc["config"]


def test_lcs_and_csv(files):
    doc = report("lcs", files["w"], files["alt"])
    assert doc["report"]["length"] == ref.lcs("1001011", "10" * 16)
    code, out, _ = call("lcs", files["w"], files["alt"], "--fast", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows == [{"length": str(ref.lcs("1001011", "10" * 16))}]


def test_match_then_verify(files):
    out = files["dir"] / "m.json"
    code, _, err = call("match", "blue-yellow", files["s"], files["t"], "--epsilon", "1/10",
                        "--b-cap", "16", "--out", out)
    assert code == 0, err
    doc = json.loads(out.read_text())
    assert doc["report"]["size"] == 136 and doc["report"]["valid"]
    doc = report("verify-matching", files["s"], files["t"], out)
    assert doc["report"] == {"size": 136, "valid": True}
    # the same matching does not fit the strings swapped
    code, _, err = call("verify-matching", files["t"], files["s"], out)
    assert code == 2 and "does not validate" in err


def test_stitch_strategy(files):
    doc = report("match", "stitch-green", files["ones"], files["ones"], "--epsilon", "1/10",
                 "--ell", "2", "--m", "2")
    assert doc["report"]["size"] == 16
    assert doc["report"]["strategy_result"]["kind"] == "green"


def test_usage_errors(files):
    assert call("flags", files["bad"])[0] == 2
    assert call("flags", files["dir"] / "missing.txt")[0] == 2
    assert call("match", "green", files["w"], files["w"])[0] == 2
    three = files["dir"] / "three.txt"
    three.write_text("10101\n")
    assert call("classify", three)[0] == 2
    assert call("classify", files["s"], "--epsilon", "3/5")[0] == 2
    assert call("bogus")[0] == 2
    code, _, err = call("pipeline", files["ones"], files["alt"], "--epsilon", "1/10")
    assert code == 2 and "statistics disagree" in err
    assert call("match", "blue-yellow", files["t"], files["t"], "--delta", "999")[0] == 2


def test_help_exits_zero():
    assert call("--help")[0] == 0


def test_table_collide_pipeline(files):
    doc = report("table", files["alt"], "--epsilon", "1/10")
    assert doc["report"]["strings"][0]["table"]["L"] == 16
    doc = report("collide", files["pair"], "--epsilon", "1/10")
    assert doc["report"]["pair"] == [0, 1]
    doc = report("pipeline", files["alt"], files["alt"], "--epsilon", "1/10")
    assert doc["report"]["case"] == "identical" and doc["report"]["valid"]


def test_codes_and_measurements(files):
    doc = report("codes", "bukh-ma", "--k", "4", "--measure", "--with-span")
    assert doc["report"]["concatenation_length"] == 64
    assert len(doc["report"]["pairs"]) == 6
    doc = report("codes", "random", "--length", "8", "--size", "3", "--seed", "1")
    assert doc["report"]["strings"] == ["11001101", "01011101", "10101110"]
    q = files["dir"] / "q.txt"
    q.write_text("0011\n0022\n")
    doc = report("codes", "qary", "--input", q, "--q", "3")
    assert doc["report"]["pair"] == [0, 1] and doc["report"]["strings"] == ["00"]
    assert call("codes", "bukh-ma")[0] == 2


def test_span_and_cs(files):
    doc = report("span", files["w"], files["w"], "--span-floor", "1")
    assert doc["report"]["ratio"] == [2, 1]
    doc = report("cs-estimate", "--n", "1", "--trials", "10", "--seed", "3")
    assert len(doc["report"]["values"]) == 10


def test_outputs_are_deterministic_across_workers(files):
    many = files["dir"] / "many.txt"
    many.write_text("".join(("10" * k + "1" * (16 - k)) + "\n" for k in range(8)))
    a = call("classify", many, "--epsilon", "1/10", "--workers", "1")
    b = call("classify", many, "--epsilon", "1/10", "--workers", "4")
    assert a[0] == b[0] == 0 and a[1] == b[1]
    assert call("table", many, "--epsilon", "1/10")[1] == call("table", many, "--epsilon", "1/10")[1]


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "lcsflags", "lcs", str(files["w"]),
                           str(files["w"]), "--fast"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["report"]["length"] == 7
