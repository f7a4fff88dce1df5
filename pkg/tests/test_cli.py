import json
import subprocess
import sys

import pytest

from overcomm.cli import main, parse_variety
from overcomm.errors import ValidationError
from overcomm.partitions import down_set, make_partition
from overcomm.rewrite import derivable, parse_system
from overcomm.varieties import dump_presentation, greedy_report, s_variety


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


def structured(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--format", "structured")
    assert code == 0
    return json.loads(out)


def test_partition(capsys):
    code, out, _ = run(capsys, "partition", "2,1")
    assert code == 0 and "s 1" in out.splitlines()
    assert structured(capsys, "partition", "1,1,1")["s"] == 0
    data = structured(capsys, "partition", "2,1", "--extend", "2")
    assert data["extend"] == {"2": "(2,1,1,1)"}


@pytest.mark.parametrize("argv", [["partition", "0,1"], ["partition", "x"],
                                  ["order", "preceq", "2,1"], ["verify", "no-such-suite"],
                                  ["variety", "reduces", "W(2,1)"], ["nothing"],
                                  ["partition", "2,1", "--bound", "1"]])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_order(capsys):
    assert run(capsys, "order", "preceq", "2,1", "2,2")[1] == "true\n"
    assert run(capsys, "order", "unlhd", "3,1", "2,2")[1] == "false\n"
    lines = run(capsys, "order", "downset", "2,1")[1].splitlines()
    assert lines == [str(p) for p in sorted(down_set(make_partition([2, 1])),
                                            key=lambda p: p.components, reverse=True)]
    assert structured(capsys, "order", "minimize", "2,1", "2,2", "3,1")["result"] == ["(2,1)"]


def test_transversal(capsys):
    assert run(capsys, "transversal", "2,1", "--style", "compact")[1] == "aab\naba\nbaa\n"
    assert structured(capsys, "transversal", "2,1,1")["size"] == 12


def test_derive(capsys, tmp_path):
    sysfile = tmp_path / "sigma.txt"
    sysfile.write_text("aab = aba\naba = baa\n", encoding="utf-8")
    code, out, _ = run(capsys, "derive", "aab", "baa", "--system", str(sysfile))
    assert code == 0 and out == "DERIVABLE length 2\n"
    code, out, _ = run(capsys, "derive", "aabc", "aacb", "--system", str(sysfile))
    assert code == 0 and out == "NOT-DERIVABLE\n"
    code, _, err = run(capsys, "derive", "ab", "aab")
    assert code == 1 and "balanced" in err
    assert run(capsys, "derive", "ab", "ba", "--system", str(tmp_path / "missing"))[0] == 1


def test_derive_trace_matches_library(capsys):
    data = structured(capsys, "derive", "aab", "baa", "--identity", "aab = aba",
                      "--identity", "aba = baa", "--trace")
    system = parse_system("aab = aba\naba = baa\n")
    trace = derivable((1, 1, 2), (2, 1, 1), system)
    assert data["length"] == len(trace) == 2
    assert [r["target"] for r in data["trace"]] == ["x1 x2 x1", "x2 x1 x1"]
    text = run(capsys, "derive", "aab", "baa", "--identity", "aab = aba",
               "--identity", "aba = baa", "--trace")[1].splitlines()
    assert [json.loads(line) for line in text[1:]] == data["trace"]


def test_classes(capsys):
    data = structured(capsys, "classes", "2,1,1", "--variety", "W(2,1)", "--style", "compact")
    assert sorted(map(len, data["classes"])) == [6, 6]
    assert run(capsys, "classes", "2,1")[1].count("\n") == 3


def test_variety_actions(capsys):
    data = structured(capsys, "variety", "greedy", "S(2,1)", "--bound", "5")
    assert data["greedy_up_to_bound"] is True
    lib = greedy_report(s_variety(make_partition([2, 1])), 5)
    assert [v["collapses"] for v in data["verdicts"]] == [v.collapses for v in lib.verdicts]
    data = structured(capsys, "variety", "greedy", "W(2,1)", "--bound", "4")
    assert data["greedy_up_to_bound"] is False and "(2,1,1)" in data["witnesses"]
    assert run(capsys, "variety", "collapses", "S(2,1)", "--at", "2,1,1")[1] == "true\n"
    assert run(capsys, "variety", "reduces", "SEM", "--at", "2,1")[1] == "false\n"
    data = structured(capsys, "variety", "decompose", "S(2,1)", "--bound", "5")
    assert data["gamma_prime"] == ["(2,1)"] and data["reconstruction_ok"] is True


@pytest.mark.slow
def test_variety_decompose_pair(capsys):
    data = structured(capsys, "variety", "decompose", "S(2,2) & S(3,1)", "--bound", "8")
    assert data["gamma_prime"] == ["(3,1)", "(2,2)"]


def test_variety_build_roundtrip(capsys, tmp_path):
    code, out, _ = run(capsys, "variety", "build", "S(2,1)")
    assert code == 0 and out == dump_presentation(s_variety(make_partition([2, 1])))
    path = tmp_path / "s21.txt"
    path.write_text(out, encoding="utf-8")
    assert run(capsys, "variety", "collapses", "--system", str(path), "--at", "2,1,1")[1] == "true\n"
    assert run(capsys, "variety", "build", "S(2,1)", "--system", str(path))[0] == 2


def test_variety_bad_expression(capsys):
    code, _, err = run(capsys, "variety", "greedy", "Q(2)")
    assert code == 1 and "cannot parse" in err
    assert run(capsys, "variety", "greedy", "S(1,1)^1")[0] == 1


def test_parse_variety_terms():
    p = parse_variety("S(2,2)^1 & X(4,2;3,1) & SEM", 5)
    assert make_partition([3, 1]) in p.declared_collapses
    assert make_partition([2, 2, 1]) in p.declared_collapses
    assert make_partition([2, 2, 1, 1]) not in p.declared_collapses
    with pytest.raises(ValidationError):
        parse_variety("W(2,1) &", 5)


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "prop-optimum")
    assert code == 0
    assert "PASS W(2,1) does not derive x1x1x2x3 = x1x1x3x2" in out
    assert out.splitlines()[-1].startswith("prop-optimum: pass")


@pytest.mark.parametrize("argv", [
    ["order", "downset", "3,2,1"],
    ["variety", "greedy", "S(2,1) & W(1,1,1)", "--bound", "5"],
    ["derive", "aabc", "bcaa", "--identity", "ab = ba", "--trace"],
])
def test_structured_output_is_byte_stable(argv):
    cmd = [sys.executable, "-m", "overcomm.cli", *argv, "--format", "structured"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second and json.loads(first)
