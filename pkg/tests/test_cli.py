import json

import pytest

from stsemi.cli import (
    EXIT_FAIL, EXIT_INPUT, EXIT_OK, InputError, analysis_report, format_semigroup, main,
    read_semigroup_text,
)
from stsemi.constructors import example_semigroup
from stsemi.pperm import parse
from stsemi.semigroup import Semigroup, conjugate


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_bound(capsys):
    code, out, _ = run(capsys, "bound", "--n", "8")
    assert code == EXIT_OK and out.strip() == "p=4 bound=13"


def test_bound_rejects_small(capsys):
    code, _, err = run(capsys, "bound", "--n", "1")
    assert code == EXIT_INPUT and "error" in err


def test_build_then_analyze(tmp_path, capsys):
    f = tmp_path / "ex1.sg"
    assert run(capsys, "build", "--type", "1", "--n", "8", "--p", "2", "--out", str(f))[0] == 0
    code, out, _ = run(capsys, "analyze", str(f), "--expect-size", "15", "--expect-semitransitive")
    assert code == EXIT_OK
    assert "two_idempotents          pass" in out
    code, _, _ = run(capsys, "analyze", str(f), "--expect-size", "14")
    assert code == EXIT_FAIL


def test_build_stdout_pipe(monkeypatch, capsys):
    import io
    code, out, _ = run(capsys, "build", "--type", "1", "--n", "8", "--p", "2")
    assert code == 0
    monkeypatch.setattr("sys.stdin", io.StringIO(out))
    code, _, _ = run(capsys, "analyze", "--expect-size", "15", "--expect-semitransitive")
    assert code == EXIT_OK


@pytest.mark.parametrize("argv,size", [
    (["--type", "2", "--n", "8", "--p", "2"], 15),
    (["--type", "3", "--n", "6", "--p", "2"], 11),
    (["--type", "4", "--n", "10", "--p", "2", "--l", "2", "--group", "(3,5,4,6)"], 19),
    (["--type", "5", "--n", "9", "--p", "3", "--l", "2"], 16),
    (["--type", "ref", "--n", "4", "--l", "2"], 5),
    (["--type", "1", "--n", "8", "--p", "2", "--partition", "1,5|2,6|3,7|4,8"], 15),
    (["--type", "1", "--n", "8", "--p", "4", "--group", "(1,2)(3,4)"], None),
])
def test_build_variants(tmp_path, capsys, argv, size):
    f = tmp_path / "s.sg"
    code, _, err = run(capsys, "build", *argv, "--out", str(f))
    if size is None:
        assert code == EXIT_INPUT  # (1,2)(3,4) is not transitive
        return
    assert code == EXIT_OK, err
    n, elements = read_semigroup_text(f.read_text())
    assert len(elements) == size


def test_build_group_file(tmp_path, capsys):
    g = tmp_path / "klein.txt"
    g.write_text("(1,2)(3,4)\n(1,3)(2,4)\n")
    f = tmp_path / "s.sg"
    code, _, err = run(capsys, "build", "--type", "1", "--n", "8", "--p", "4",
                       "--group-file", str(g), "--out", str(f))
    assert code == EXIT_OK, err
    assert len(read_semigroup_text(f.read_text())[1]) == 13


def test_round_trip(tmp_path):
    S = example_semigroup(2)
    text = format_semigroup(S, comment="example 2")
    n, elements = read_semigroup_text(text)
    assert n == 10 and Semigroup(elements) == S


@pytest.mark.parametrize("text,msg", [
    ("(1,2]\n", "header"),
    ("n=2\n(1,2]\n(1,2](3]\n", "out of range"),
    ("n=2\n(1,2]\n(1,2]\n", "duplicate"),
    ("n=x\n", "bad degree"),
    ("n=2\n# only a comment\n", "no elements"),
])
def test_file_errors(text, msg):
    with pytest.raises(InputError, match=msg):
        read_semigroup_text(text)


def test_analyze_parse_error_exit(tmp_path, capsys):
    f = tmp_path / "bad.sg"
    f.write_text("n=8\n(1,6](2,7](3](4](7](8]\n")
    code, _, err = run(capsys, "analyze", str(f))
    assert code == EXIT_INPUT and "repeated" in err


def test_analyze_json_stable(tmp_path, capsys):
    f = tmp_path / "s.sg"
    f.write_text(format_semigroup(example_semigroup(3)))
    _, out1, _ = run(capsys, "analyze", str(f), "--json")
    _, out2, _ = run(capsys, "analyze", str(f), "--json")
    assert out1 == out2
    data = json.loads(out1)
    assert data["size"] == 15 and data["nilpotent_count"] == 6
    assert data["blocks"] == [[1, 2], [3, 4], [5, 6], [7, 8]]
    assert {a["status"] for a in data["audits"].values()} == {"pass"}


def test_analysis_report_on_non_closed_set():
    S = example_semigroup(1)
    elems = [a for a in S if a != parse("(1,3](2,4]", 8)]
    rep = analysis_report(elems)
    assert rep["is_closed"] is False and rep["size"] == 14
    assert rep["audits"]["two_idempotents"]["status"] == "vacuous"


@pytest.mark.parametrize("k", [1, 2, 3])
def test_verify_example(capsys, k):
    code, out, _ = run(capsys, "verify-example", str(k))
    assert code == EXIT_OK
    assert "confined to documented typos" in out


def test_search(capsys):
    code, out, _ = run(capsys, "search", "--n", "2")
    assert code == EXIT_OK
    assert out.startswith("n=2 minimum=4 bound=4 classes=1")


def test_search_classify(capsys):
    code, out, _ = run(capsys, "search", "--n", "3", "--prune", "none", "--classify")
    assert code == EXIT_OK
    assert "classes=5" in out and "unclassified" not in out


def test_search_unsupported(capsys):
    code, _, err = run(capsys, "search", "--n", "5")
    assert code == EXIT_INPUT and "unsupported" in err


def test_similar(tmp_path, capsys):
    S = example_semigroup(1)
    sigma = parse("(1,8)(2,3,5)(4)(6)(7)", 8)
    a, b, c = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    a.write_text(format_semigroup(S))
    b.write_text(format_semigroup(conjugate(S, sigma)))
    c.write_text(format_semigroup(example_semigroup(3)))
    code, out, _ = run(capsys, "similar", str(a), str(b))
    assert code == EXIT_OK and out.startswith("similar via")
    found = parse(out.split("via", 1)[1].strip(), 8)
    assert conjugate(S, found) == conjugate(S, sigma)
    code, out, _ = run(capsys, "similar", str(a), str(c))
    assert out.strip() == "not similar"


def test_similar_rejects_non_closed(tmp_path, capsys):
    a = tmp_path / "a"
    a.write_text("n=2\n(1,2]\n")
    code, _, err = run(capsys, "similar", str(a), str(a))
    assert code == EXIT_INPUT and "not closed" in err


def test_unknown_subcommand(capsys):
    assert run(capsys, "frobnicate")[0] == EXIT_INPUT
