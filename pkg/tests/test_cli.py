import json
import subprocess
import sys

import pytest

from conftest import DATA
from hoq.cli import EXIT_INPUT, EXIT_LIMIT, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, "--json", *argv)
    assert out.count("\n") == 1
    return code, json.loads(out)


def test_eval_tc_example(capsys):
    code, out, _ = run(capsys, "eval", DATA / "tc_example.hoq", DATA / "graph.json")
    assert code == EXIT_OK and out.strip() == "true"


def test_eval_false_is_success(capsys):
    code, out, _ = run(capsys, "eval", "forall x:i. forall y:i. E(x, y)", DATA / "graph.json")
    assert code == EXIT_OK and out.strip() == "false"


def test_eval_stats(capsys):
    code, out, _ = run(capsys, "eval", "--stats", DATA / "tc_example.hoq", DATA / "graph.json")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "true"
    assert any(line.startswith("quantifier_expansions:") for line in out.splitlines())


def test_human_and_json_agree(capsys):
    _, out, _ = run(capsys, "eval", DATA / "tc_example.hoq", DATA / "graph.json")
    _, doc = run_json(capsys, "eval", DATA / "tc_example.hoq", DATA / "graph.json")
    assert doc["value"] is (out.strip() == "true")


def test_count(capsys):
    code, out, _ = run(capsys, "count", "--type", "((i))", "--n", "2")
    assert code == EXIT_OK
    assert out.split() == ["N=16", "B=4", "C=4", "T=16"]
    _, doc = run_json(capsys, "count", "--type", "(i,i)", "--n", "2")
    assert (doc["report"]["N"], doc["report"]["B"]) == (16, 4)


def test_count_rejects_mixed_type(capsys):
    code, _, err = run(capsys, "count", "--type", "((i),i)", "--n", "2")
    assert code == EXIT_USAGE and "mixed" in err


def test_check(capsys):
    code, doc = run_json(capsys, "check", "exists X:(i). forall x:i. X(x) | P(x)", "--vocab",
                         DATA / "p_vocab.json")
    assert code == EXIT_OK
    assert doc["report"]["r"] == 2 and doc["report"]["monadic"]


def test_normalize_merge_example(capsys):
    code, out, _ = run(capsys, "normalize", DATA / "merge_pnf.hoq", "--form", "pnf", "--vocab",
                       DATA / "pnf_vocab.json")
    assert code == EXIT_OK
    assert out.splitlines()[0] == "(exists Z:(i). (forall X:(i). (exists Y:(i). ((X(c) | Y(c)) & Z(c)))))"
    code, out, _ = run(capsys, "normalize", DATA / "merge_pnf.hoq", "--form", "pnf-best", "--vocab",
                       DATA / "pnf_vocab.json")
    assert out.splitlines()[0].startswith("(forall X:(i). (exists Y:(i). (exists Z:(i).")


@pytest.mark.parametrize("form", ["snf", "anf", "dnf", "full"])
def test_normalize_forms(capsys, form):
    code, doc = run_json(capsys, "normalize", "forall x:i. exists X:(i). X(x) & P(x)", "--form", form,
                         "--vocab", DATA / "p_vocab.json")
    assert code == EXIT_OK and doc["form"] == form
    assert set(doc["report"]) >= {"pnf", "snf", "anf", "dnf", "operator_nf"}


def test_encode_decode_round_trip(capsys):
    code, out, _ = run(capsys, "encode", DATA / "graph.json", "--symbol", "E")
    bits = out.strip()
    assert code == EXIT_OK and len(bits) == 9 and bits.count("1") == 3
    code, doc = run_json(capsys, "decode", "--type", "(i,i)", "--n", "3", "--bits", bits)
    assert code == EXIT_OK
    assert sorted(map(tuple, doc["value"])) == [(0, 1), (1, 2), (2, 0)]


def test_decode_bad_length(capsys):
    code, _, err = run(capsys, "decode", "--type", "(i)", "--n", "2", "--bits", "101")
    assert code == EXIT_USAGE and "2 bits" in err


def test_encode_unknown_symbol(capsys):
    code, _, _ = run(capsys, "encode", DATA / "graph.json", "--symbol", "Q")
    assert code == EXIT_USAGE


def test_reduce_verify(capsys, tmp_path):
    target = tmp_path / "target.json"
    code, _, err = run(capsys, "reduce", "exists X:(i). X(x0) | true", DATA / "ordered.json")
    assert code == EXIT_INPUT and "x0" in err
    code, doc = run_json(capsys, "reduce", "exists X:(i). forall x:i. (X(x) <-> P(x))",
                         DATA / "ordered.json", "--verify", "--output", target)
    assert code == EXIT_OK and doc["verified"] is True
    assert doc["a"] == 1 and doc["target_size"] == 4
    written = json.loads(target.read_text())
    assert written["universe"] == 4


def test_reduce_needs_order(capsys):
    code, _, _ = run(capsys, "reduce", "exists x:i. E(x, x)", DATA / "graph.json")
    assert code == EXIT_INPUT


def test_reduce_limit(capsys):
    code, _, err = run(capsys, "--max-target-universe", "3", "reduce", "exists x:i. P(x)", DATA / "ordered.json")
    assert code == EXIT_LIMIT and "limit" in err


def test_equiv(capsys):
    vocab = DATA / "p_vocab.json"
    code, out, _ = run(capsys, "equiv", "exists x:i. P(x)", "!(forall x:i. !P(x))", "--vocab", vocab, "--max-n", 3)
    assert code == EXIT_OK and out.strip() == "equivalent"
    code, doc = run_json(capsys, "equiv", "exists x:i. P(x)", "forall x:i. P(x)", "--vocab", vocab)
    assert code == EXIT_OK and doc["equivalent"] is False
    cx = doc["counterexample"]
    assert cx["structure"]["universe"] == 2 and cx["structure"]["interpretation"]["P"] == [[0]]
    assert (cx["left"], cx["right"]) == (True, False)


def test_equiv_limit(capsys):
    code, _, _ = run(capsys, "--max-enum", "5", "equiv", "exists x:i. P(x)", "!(forall x:i. !P(x))",
                     "--vocab", DATA / "p_vocab.json", "--max-n", "3")
    assert code == EXIT_LIMIT


@pytest.mark.parametrize("argv", [
    ["gen", "plus", "--arity", "1", "--order", "2"],
    ["gen", "lt", "--arity", "2", "--order", "2"],
    ["gen", "eq", "--order", "3"],
    ["gen", "bit", "--order", "2"],
    ["gen", "card", "--op", ">=", "--k", "2", "--type", "(i)"],
    ["gen", "max"],
])
def test_gen(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == EXIT_OK
    assert out.splitlines()[1].startswith("free: ")


def test_gen_unknown(capsys):
    code, _, _ = run(capsys, "gen", "times")
    assert code == EXIT_USAGE


def test_usage_errors(capsys):
    assert run(capsys)[0] == EXIT_USAGE
    assert run(capsys, "frobnicate")[0] == EXIT_USAGE
    assert run(capsys, "--jobs", "0", "count", "--type", "(i)", "--n", "2")[0] == EXIT_USAGE
    assert run(capsys, "--max-enum", "0", "count", "--type", "(i)", "--n", "2")[0] == EXIT_USAGE
    assert run(capsys, "eval", "true", DATA / "missing.json")[0] == EXIT_USAGE


def test_parse_and_type_errors(capsys):
    code, _, err = run(capsys, "eval", "exists x:i. (E(x)", DATA / "graph.json")
    assert code == EXIT_INPUT and err.startswith("hoq: error:")
    code, _, _ = run(capsys, "eval", "exists x:i. E(x)", DATA / "graph.json")
    assert code == EXIT_INPUT
    code, _, _ = run(capsys, "count", "--type", "(i", "--n", "2")
    assert code == EXIT_INPUT


def test_env_limits(capsys, monkeypatch):
    monkeypatch.setenv("HOQ_MAX_ENUM", "5")
    argv = ["equiv", "exists x:i. P(x)", "!(forall x:i. !P(x))", "--vocab", DATA / "p_vocab.json", "--max-n", "3"]
    assert run(capsys, *argv)[0] == EXIT_LIMIT
    assert run(capsys, "--max-enum", "1000", *argv)[0] == EXIT_OK


def test_jobs_do_not_change_output(capsys):
    argv = ["normalize", DATA / "merge_pnf.hoq", "--vocab", DATA / "pnf_vocab.json"]
    one = run(capsys, "--json", "--jobs", "1", *argv)[1]
    four = run(capsys, "--json", "--jobs", "4", *argv)[1]
    assert one == four


def test_json_output_is_byte_identical():
    argv = [sys.executable, "-m", "hoq.cli", "--json", "normalize", str(DATA / "merge_pnf.hoq"),
            "--vocab", str(DATA / "pnf_vocab.json"), "--form", "full"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and json.loads(first)["command"] == "normalize"


def test_console_script_exit_code():
    proc = subprocess.run([sys.executable, "-m", "hoq.cli", "eval", "false", str(DATA / "graph.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "false"
