"""Command line behavior: exit codes, formats, determinism, file IO."""

import json

import pytest
from jsonschema import validate

from clonelab import cli
from clonelab.report import load_schema

SCHEMA = load_schema()


def run(capsysbinary, *argv):
    code = cli.main(list(argv))
    captured = capsysbinary.readouterr()
    return code, captured.out, captured.err


def run_json(capsysbinary, *argv):
    code, out, err = run(capsysbinary, *argv)
    doc = json.loads(out)
    validate(doc, SCHEMA)
    assert doc["exit_code"] == code
    return code, doc


def test_info_json(capsysbinary):
    code, doc = run_json(capsysbinary, "info", "builtin:z2-plus")
    assert code == 0
    fields = {row["field"]: row["value"] for row in doc["results"]}
    assert fields["name"] == "z2-plus"
    assert fields["size"] == 2


def test_bare_builtin_name_resolves(capsysbinary):
    code, doc = run_json(capsysbinary, "info", "z3-plus")
    assert code == 0


def test_algebra_from_file(tmp_path, capsysbinary):
    path = tmp_path / "tiny.alg"
    path.write_text("algebra tiny\nsize 2\nop or 2\n 0 1\n 1 1\n")
    code, doc = run_json(capsysbinary, "seq", str(path), "--max-arity", "2")
    assert code == 0
    assert doc["results"][0]["algebra"] == "tiny"
    assert doc["results"][1]["fs"] == 3  # x, y, x or y


def test_missing_algebra_is_input_error(capsysbinary):
    code, out, err = run(capsysbinary, "info", "no-such-thing")
    assert code == 2
    assert out == b""
    assert b"error:" in err


def test_argparse_errors_exit_2(capsysbinary):
    with pytest.raises(SystemExit) as exc:
        cli.main(["seq"])  # missing algebra
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        cli.main(["nonsense-verb"])


def test_seq_csv_format(capsysbinary):
    code, out, err = run(capsysbinary, "seq", "builtin:z2-plus", "--max-arity", "4", "--format", "csv")
    assert code == 0
    lines = out.decode().splitlines()
    assert lines[0] == "n,fs,ht,len"
    assert lines[1] == "1,2,1,3"
    assert lines[4] == "4,16,2,7"


def test_seq_budget_exhaustion_exit_3(capsysbinary):
    code, doc = run_json(capsysbinary, "seq", "builtin:bool-andnot", "--max-arity", "3", "--budget", "30")
    assert code == 3
    assert doc["status"] == "inconclusive"
    incomplete = [r for r in doc["results"] if not r["complete"]]
    assert incomplete and incomplete[0]["budget"] == 30


def test_explosive_guard(capsysbinary):
    code, out, err = run(capsysbinary, "seq", "builtin:a4-group", "--max-arity", "1")
    assert code == 2
    assert b"--i-know-this-explodes" in err
    code, doc = run_json(
        capsysbinary, "seq", "builtin:a4-group", "--max-arity", "1", "--i-know-this-explodes"
    )
    assert code == 0
    assert doc["results"][0]["fs"] == 6


def test_clone_show_entries(capsysbinary):
    code, doc = run_json(
        capsysbinary, "clone", "builtin:z2-plus", "--arity", "2",
        "--show-entries", "--min-lengths",
    )
    assert code == 0
    row = doc["results"][0]
    assert row["count"] == 4
    assert row["complete"] is True
    entries = row["entries"]
    assert [e["table"] for e in entries] == ["0 0 0 0", "0 1 0 1", "0 1 1 0", "0 0 1 1"]
    parity = entries[2]
    assert parity["term"] == "(plus x1 x2)"
    assert parity["min_length"] == 3


def test_bounds_rows_shape(capsysbinary):
    code, doc = run_json(capsysbinary, "bounds", "builtin:z2-plus", "--max-arity", "3")
    assert code == 0
    row = doc["results"][2]
    assert row["algebra"] == "z2-plus"
    assert row["n"] == 3
    assert {"fs", "ht", "len", "bounds"} <= set(row)
    names = [b["name"] for b in row["bounds"]]
    assert names[0] == "fs < (n+r+1)^len"
    assert all(b["pass"] for b in row["bounds"])


def test_bounds_csv_flattens_checks(capsysbinary):
    code, out, _ = run(capsysbinary, "bounds", "builtin:z2-plus", "--max-arity", "2", "--format", "csv")
    lines = out.decode().splitlines()
    assert lines[0] == "n,name,lhs,rhs,pass"
    assert len(lines) == 1 + 2 * 4


def test_sigma_no_algebra(capsysbinary):
    code, doc = run_json(capsysbinary, "sigma", "--n", "6", "--op", "f")
    assert code == 0
    row = doc["results"][0]
    assert row["height"] == 3
    assert row["length"] == 11
    assert row["term"].startswith("(f (f")


def test_primal_synth_target_forms(capsysbinary):
    code, doc = run_json(
        capsysbinary, "primal-synth", "builtin:bool-post", "--target-table", "0 1 1 0"
    )
    assert code == 0
    cert = doc["results"][0]["certificate"]
    assert cert == {"height": 5, "bound": 5, "n": 2, "m": 2, "s": 1}

    code, doc = run_json(
        capsysbinary, "primal-synth", "builtin:bool-post", "--target-op", "and"
    )
    assert code == 0

    code, doc = run_json(
        capsysbinary, "primal-synth", "builtin:bool-post", "--target-term", "(or x1 (not x2))"
    )
    assert code == 0

    code, out, err = run(
        capsysbinary, "primal-synth", "builtin:bool-post",
        "--target-table", "0 1", "--target-op", "and",
    )
    assert code == 2


def test_primal_synth_requires_designations(capsysbinary):
    code, out, err = run(capsysbinary, "primal-synth", "builtin:z2-plus", "--target-table", "0 1 1 0")
    assert code == 2
    assert b"error:" in err


def test_malcev_exit_codes(capsysbinary):
    code, doc = run_json(capsysbinary, "malcev", "builtin:z2-plus")
    assert code == 0
    assert doc["results"][0]["height"] == 2

    code, doc = run_json(capsysbinary, "malcev", "builtin:semilattice2")
    assert code == 1
    assert doc["status"] == "fail"
    assert doc["results"][0]["status"] == "none"

    code, doc = run_json(capsysbinary, "malcev", "builtin:bool-andnot", "--budget", "10")
    assert code == 3
    assert doc["results"][0]["status"] == "inconclusive"


def test_spn_exit_codes(capsysbinary):
    code, doc = run_json(capsysbinary, "spn", "builtin:z2-plus", "--degree", "1")
    assert code == 0
    assert doc["results"][0]["holds"] is True

    code, doc = run_json(capsysbinary, "spn", "builtin:bool-post", "--degree", "1")
    assert code == 1
    witness = doc["results"][0]["witness"]
    assert witness["table"] == [0, 0, 0, 1]
    assert witness["a"] == [0, 0] and witness["b"] == [1, 1]

    code, doc = run_json(capsysbinary, "spn", "builtin:z2-plus-maj", "--degree", "2", "--budget", "5")
    assert code == 3
    assert doc["results"][0]["holds"] is None


def test_cube_verb(capsysbinary):
    code, doc = run_json(capsysbinary, "cube", "builtin:z3-plus", "--n", "3")
    assert code == 0
    row = doc["results"][0]
    assert row["arity"] == 7
    assert row["height"] <= row["height_bound"]


def test_rewrite_chain_and_term_flags(capsysbinary):
    code, doc = run_json(
        capsysbinary, "rewrite", "builtin:z2-plus", "--chain", "8", "--verify", "exhaustive"
    )
    assert code == 0
    row = doc["results"][0]
    assert row["input_height"] == 7
    assert row["verified"] == "exhaustive"

    code, doc = run_json(
        capsysbinary, "rewrite", "builtin:z2-plus",
        "--term", "(plus (plus x1 x2) (plus x3 x4))", "--verify", "exhaustive",
    )
    assert code == 0

    code, out, err = run(capsysbinary, "rewrite", "builtin:z2-plus")
    assert code == 2
    code, out, err = run(
        capsysbinary, "rewrite", "builtin:z2-plus", "--chain", "4", "--term", "x1"
    )
    assert code == 2


def test_rewrite_budget_exit_3(capsysbinary):
    code, out, err = run(
        capsysbinary, "rewrite", "builtin:z2-plus", "--chain", "16",
        "--verify", "exhaustive", "--budget", "1024",
    )
    assert code == 3
    assert b"error:" in err


def test_decompose_verb(capsysbinary):
    code, doc = run_json(
        capsysbinary, "decompose", "builtin:z2-plus",
        "--term", "(plus (plus x1 x2) (plus x3 x4))", "--degree", "1",
    )
    assert code == 0
    assert doc["results"][0]["arity"] == 4

    code, out, err = run(
        capsysbinary, "decompose", "builtin:z2-plus", "--table", "1 1 1 0", "--degree", "1"
    )
    assert code == 2  # nand is not a term operation of z2-plus


def test_chain_verb(capsysbinary):
    code, doc = run_json(capsysbinary, "chain", "builtin:z2-plus", "--k", "2")
    assert code == 0
    row = doc["results"][0]
    assert row["arity"] == 5
    assert row["essential_arity"] == 5


def test_equiv_exit_codes_and_csv(capsysbinary):
    code, doc = run_json(
        capsysbinary, "equiv", "builtin:z2-plus", "builtin:z2-plus-maj", "--max-arity", "4"
    )
    assert code == 0
    row = doc["results"][0]
    assert row["status"] == "equivalent"
    assert row["ht_a"] == [1, 1, 2, 2]

    code, out, err = run(
        capsysbinary, "equiv", "builtin:z2-plus", "builtin:z2-plus-maj",
        "--max-arity", "4", "--format", "csv",
    )
    lines = out.decode().splitlines()
    assert lines[0] == "n,ht_a,ht_b"
    assert len(lines) == 5

    code, doc = run_json(
        capsysbinary, "equiv", "builtin:z2-plus", "builtin:z2-ternary-only", "--max-arity", "2"
    )
    assert code == 1
    assert doc["status"] == "fail"
    by_n = {d["n"]: d for d in doc["results"][0]["disagreements"]}
    assert "0 1 1 0" in by_n[2]["only_in_a"]

    code, out, err = run(capsysbinary, "equiv", "builtin:z2-plus", "builtin:z3-plus")
    assert code == 2


def test_demo_verb(capsysbinary):
    code, doc = run_json(capsysbinary, "demo", "commutator", "--n", "4", "--samples", "100")
    assert code == 0
    row = doc["results"][0]
    assert row["len_expanded"] == 57
    assert row["agree"] is True


def test_out_writes_file_and_silences_stdout(tmp_path, capsysbinary):
    target = tmp_path / "report.json"
    code, out, err = run(
        capsysbinary, "seq", "builtin:z2-plus", "--max-arity", "2", "--out", str(target)
    )
    assert code == 0
    assert out == b""
    doc = json.loads(target.read_bytes())
    validate(doc, SCHEMA)


def test_byte_determinism_json_and_csv(capsysbinary):
    pairs = []
    for _ in range(2):
        _, out, _ = run(capsysbinary, "seq", "builtin:z2-plus-maj", "--max-arity", "4")
        pairs.append(out)
    assert pairs[0] == pairs[1]
    pairs = []
    for _ in range(2):
        _, out, _ = run(
            capsysbinary, "rewrite", "builtin:z3-plus", "--chain", "10",
            "--verify", "sample:100", "--seed", "3", "--format", "csv",
        )
        pairs.append(out)
    assert pairs[0] == pairs[1]


def test_timings_flag_populates_wall_ms(capsysbinary):
    code, doc = run_json(capsysbinary, "info", "builtin:z2-plus")
    assert doc["wall_ms"] is None
    code, out, err = run(capsysbinary, "info", "builtin:z2-plus", "--timings")
    doc = json.loads(out)
    assert isinstance(doc["wall_ms"], float)
    assert doc["wall_ms"] >= 0


def test_version_matches_package(capsysbinary):
    import clonelab

    _, doc = run_json(capsysbinary, "info", "builtin:z2-plus")
    assert doc["version"] == clonelab.__version__


def test_text_format_header(capsysbinary):
    code, out, err = run(capsysbinary, "malcev", "builtin:z2-plus", "--format", "text")
    assert code == 0
    assert out.decode().startswith("clonelab ")
    assert "status: found" in out.decode()
