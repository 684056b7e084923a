"""Command line front end.

Every subcommand builds a Report and emits it as json, csv, or text.
Exit codes: 0 success or informational, 1 a checked mathematical
property failed (with witness in the report), 2 bad input, 3 budget
exhausted or otherwise inconclusive.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import corpus
from .algebra import FiniteAlgebra, OperationSymbol, OpTable, parse_algebra
from .clone import (
    DEFAULT_BUDGET,
    assign_min_lengths,
    clone_equality,
    close_by_height,
    complexity_sequences,
    verify_general_bounds,
)
from .errors import (
    BudgetExceededError,
    ClonelabError,
    InputError,
    MathInvariantError,
    MismatchError,
)
from .malcev import (
    build_cube_term,
    check_supernilpotent,
    commutator_growth_demo,
    decompose_generators,
    essential_arity,
    find_malcev_term,
    malcev_chain,
    require_malcev,
    rewrite_log_height,
)
from .primal import build_sigma, primality_probe, synthesize_term, validate_basis
from .report import CSV_COLUMNS, Report, emit
from .terms import (
    App,
    Var,
    induced_table,
    max_var_index,
    parse_term,
    print_term,
    term_metrics,
)

# Builtin tables whose clones are far too large to enumerate by accident.
_EXPLOSIVE = ("a4-group", "a4-commutator")


def _load_algebra(spec: str) -> FiniteAlgebra:
    if spec.startswith("builtin:"):
        return corpus.load_builtin(spec[len("builtin:") :])
    path = Path(spec)
    if path.is_file():
        return parse_algebra(path.read_text(encoding="utf-8"))
    if spec in corpus.builtin_names():
        return corpus.load_builtin(spec)
    raise InputError(
        f"no such algebra: {spec!r} is neither a readable file nor a builtin "
        f"(builtins: {', '.join(corpus.builtin_names())})"
    )


def _guard_explosive(args: argparse.Namespace, *algebras: FiniteAlgebra) -> None:
    for algebra in algebras:
        if algebra.name in _EXPLOSIVE and not args.i_know_this_explodes:
            raise InputError(
                f"clone enumeration over {algebra.name!r} blows up immediately; "
                "rerun with --i-know-this-explodes to attempt it under the budget"
            )


def _parse_table(text: str, m: int) -> OpTable:
    try:
        values = tuple(int(tok) for tok in text.split())
    except ValueError as exc:
        raise InputError(f"table must be whitespace separated integers: {text!r}") from exc
    if not values:
        raise InputError("empty table")
    if any(v < 0 or v >= m for v in values):
        raise InputError(f"table values must lie in 0..{m - 1}")
    arity = 0
    total = 1
    while total < len(values):
        arity += 1
        total *= m
    if total != len(values):
        raise InputError(
            f"table length {len(values)} is not a power of the universe size {m}"
        )
    return OpTable(m=m, arity=arity, values=values)


def _resolve_target(args: argparse.Namespace, algebra: FiniteAlgebra) -> OpTable:
    """Pick the target table from --target-table / --target-term / --target-op."""
    given = [
        name
        for name, value in (
            ("--target-table", args.target_table),
            ("--target-term", args.target_term),
            ("--target-op", args.target_op),
        )
        if value is not None
    ]
    if len(given) != 1:
        raise InputError("give exactly one of --target-table, --target-term, --target-op")
    if args.target_table is not None:
        return _parse_table(args.target_table, algebra.m)
    if args.target_term is not None:
        term = parse_term(args.target_term, algebra)
        n = max(1, max_var_index(term))
        return induced_table(algebra, term, n)
    symbol, table = algebra.operation(args.target_op)
    if table.arity == 0:
        raise InputError(f"target operation {symbol.name!r} is nullary; give it as a table")
    return table


def _witness_dict(witness) -> dict | None:
    if witness is None:
        return None
    return {
        "table": list(witness.table),
        "a": list(witness.a),
        "b": list(witness.b),
        "lhs": witness.lhs,
        "rhs": witness.rhs,
    }


# ---------------------------------------------------------------- handlers


def _cmd_info(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    rows = [
        {"field": "name", "value": algebra.name},
        {"field": "size", "value": algebra.m},
        {"field": "symbol_count", "value": algebra.symbol_count},
        {"field": "max_op_arity", "value": algebra.max_arity},
    ]
    for symbol, _table in algebra.operations:
        rows.append({"field": f"op {symbol.name}", "value": f"arity {symbol.arity}"})
    for role in sorted(algebra.designations):
        rows.append({"field": f"designate {role}", "value": algebra.designations[role]})
    return Report(command="info", config={"algebra": args.algebra}, results=rows)


def _cmd_clone(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    if args.arity < 1:
        raise InputError("--arity must be at least 1")
    clone = close_by_height(algebra, args.arity, args.budget)
    if clone.complete and args.min_lengths:
        assign_min_lengths(algebra, clone)
    layers: dict[str, int] = {}
    for entry in clone.entries.values():
        key = str(entry.layer)
        layers[key] = layers.get(key, 0) + 1
    row = {
        "arity": args.arity,
        "complete": clone.complete,
        "count": len(clone.entries),
        "sweeps": clone.sweeps,
        "budget": clone.budget,
        "layer_sizes": layers,
    }
    if args.show_entries:
        shown = []
        for key in sorted(clone.entries):
            entry = clone.entries[key]
            item = {
                "table": " ".join(str(v) for v in key),
                "layer": entry.layer,
                "term": print_term(entry.min_height_term),
            }
            if entry.min_length is not None:
                item["min_length"] = entry.min_length
                item["min_length_term"] = print_term(entry.min_length_term)
            shown.append(item)
        row["entries"] = shown
    config = {
        "algebra": args.algebra,
        "arity": args.arity,
        "budget": args.budget,
        "min_lengths": args.min_lengths,
    }
    report = Report(command="clone", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["clone"]}]
    if not clone.complete:
        report.status = "inconclusive"
        report.exit_code = 3
    return report


def _cmd_seq(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    rows = complexity_sequences(algebra, args.max_arity, args.budget)
    results = []
    incomplete = False
    for row in rows:
        if row.complete:
            results.append(
                {
                    "algebra": algebra.name,
                    "n": row.n,
                    "complete": True,
                    "fs": row.fs,
                    "ht": row.ht,
                    "len": row.len,
                }
            )
        else:
            incomplete = True
            results.append(
                {
                    "algebra": algebra.name,
                    "n": row.n,
                    "complete": False,
                    "entries_found": row.entries_found,
                    "budget": row.budget,
                }
            )
    config = {"algebra": args.algebra, "max_arity": args.max_arity, "budget": args.budget}
    report = Report(command="seq", config=config, results=results)
    report.csv_rows = [
        {"n": r["n"], "fs": r["fs"], "ht": r["ht"], "len": r["len"]}
        for r in results
        if r["complete"]
    ]
    if incomplete:
        report.status = "inconclusive"
        report.exit_code = 3
    return report


def _cmd_bounds(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    bounds = verify_general_bounds(algebra, args.max_arity, args.budget)
    results = []
    csv_rows = []
    for rec in bounds.records:
        checks = [
            {"name": c.name, "lhs": c.lhs, "rhs": c.rhs, "pass": c.passed}
            for c in rec.checks
        ]
        results.append(
            {
                "algebra": algebra.name,
                "n": rec.n,
                "fs": rec.fs,
                "ht": rec.ht,
                "len": rec.len,
                "bounds": checks,
            }
        )
        for c in rec.checks:
            csv_rows.append(
                {"n": rec.n, "name": c.name, "lhs": c.lhs, "rhs": c.rhs, "pass": c.passed}
            )
    config = {
        "algebra": args.algebra,
        "max_arity": args.max_arity,
        "budget": args.budget,
        "symbol_count": bounds.symbol_count,
        "max_op_arity": bounds.max_arity_of_ops,
        "notes": list(bounds.notes),
    }
    report = Report(command="bounds", config=config, results=results)
    report.csv_rows = csv_rows
    if not bounds.all_passed:
        # complexity_sequences already asserts these; belt and braces.
        report.status = "fail"
        report.exit_code = 1
    elif bounds.incomplete:
        report.status = "inconclusive"
        report.exit_code = 3
    return report


def _cmd_sigma(args: argparse.Namespace) -> Report:
    if args.n < 1:
        raise InputError("--n must be at least 1")
    symbol = OperationSymbol(args.op, 2)
    term = build_sigma(symbol, args.n)
    length, height = term_metrics(term)
    expected = (args.n - 1).bit_length()
    if height != expected:
        raise MathInvariantError(
            f"balanced fold of {args.n} leaves has height {height}, expected {expected}"
        )
    row = {
        "n": args.n,
        "height": height,
        "length": length,
        "expected_height": expected,
        "term": print_term(term),
    }
    config = {"n": args.n, "op": args.op}
    report = Report(command="sigma", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["sigma"]}]
    return report


def _cmd_primal_synth(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    basis = validate_basis(algebra, budget=args.budget)
    target = _resolve_target(args, algebra)
    if target.m != algebra.m:
        raise InputError("target table universe does not match the algebra")
    result = synthesize_term(basis, target)
    certificate = {
        "height": result.height,
        "bound": result.height_bound,
        "n": result.arity,
        "m": result.m,
        "s": result.s,
    }
    row = {"term": print_term(result.term), "certificate": certificate}
    config = {
        "algebra": args.algebra,
        "target_table": args.target_table,
        "target_term": args.target_term,
        "target_op": args.target_op,
        "budget": args.budget,
    }
    report = Report(command="primal-synth", config=config, results=[row])
    report.csv_rows = [
        {
            "n": result.arity,
            "m": result.m,
            "s": result.s,
            "height": result.height,
            "bound": result.height_bound,
        }
    ]
    return report


def _cmd_primality(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    rows = primality_probe(algebra, args.max_arity, args.budget)
    results = []
    incomplete = False
    for row in rows:
        item = {"algebra": algebra.name, "n": row.n, "complete": row.complete}
        if row.complete:
            item.update(
                {
                    "fs": row.fs,
                    "full_count": row.full_count,
                    "primal": row.primal,
                    "len": row.len,
                    "counting_rhs": row.counting_rhs,
                    "len_lower_bound": row.len_lower_bound,
                    "implied_c1": row.implied_c1,
                }
            )
        else:
            incomplete = True
            item.update({"entries_found": row.entries_found, "budget": row.budget})
        results.append(item)
    config = {"algebra": args.algebra, "max_arity": args.max_arity, "budget": args.budget}
    report = Report(command="primality", config=config, results=results)
    report.csv_rows = [
        {k: r[k] for k in CSV_COLUMNS["primality"]} for r in results if r["complete"]
    ]
    if incomplete:
        report.status = "inconclusive"
        report.exit_code = 3
    return report


def _cmd_malcev(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    result = find_malcev_term(algebra, args.budget)
    cert = result.certificate
    row = {
        "status": result.status,
        "term": print_term(cert.term) if cert else None,
        "height": cert.height if cert else None,
        "clone_size": result.clone_size,
        "clone_complete": result.clone_complete,
        "budget": result.budget,
    }
    config = {"algebra": args.algebra, "budget": args.budget}
    report = Report(command="malcev", config=config, results=[row])
    report.csv_rows = [
        {
            "status": row["status"],
            "height": row["height"],
            "term": row["term"],
            "clone_size": row["clone_size"],
            "clone_complete": row["clone_complete"],
        }
    ]
    if result.status == "none":
        report.status = "fail"
        report.exit_code = 1
    elif result.status == "inconclusive":
        report.status = "inconclusive"
        report.exit_code = 3
    return report


def _cmd_cube(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    if args.n < 2:
        raise InputError("--n must be at least 2")
    q = require_malcev(algebra, args.budget)
    cube = build_cube_term(algebra, q, args.n)
    level2 = cube if args.n == 2 else build_cube_term(algebra, q, 2)
    bound = (args.n - 1) * level2.height
    row = {
        "n": args.n,
        "arity": cube.arity,
        "height": cube.height,
        "height_bound": bound,
        "malcev_height": q.height,
        "term": print_term(cube.term),
    }
    config = {"algebra": args.algebra, "n": args.n, "budget": args.budget}
    report = Report(command="cube", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["cube"]}]
    return report


def _cmd_spn(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    if args.degree < 1:
        raise InputError("--degree must be at least 1")
    verdict = check_supernilpotent(algebra, args.degree, args.budget)
    row = {
        "degree": verdict.degree,
        "holds": verdict.holds,
        "ops_enumerated": verdict.ops_enumerated,
        "instances_checked": verdict.instances_checked,
        "complete": verdict.complete,
        "witness": _witness_dict(verdict.witness),
    }
    config = {"algebra": args.algebra, "degree": args.degree, "budget": args.budget}
    report = Report(command="spn", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["spn"]}]
    if verdict.holds is None:
        report.status = "inconclusive"
        report.exit_code = 3
    elif not verdict.holds:
        report.status = "fail"
        report.exit_code = 1
    return report


def _left_chain(algebra: FiniteAlgebra, op_name: str | None, n: int):
    if n < 1:
        raise InputError("--chain needs at least one variable")
    if op_name is None:
        symbol = next((s for s, _ in algebra.operations if s.arity == 2), None)
        if symbol is None:
            raise InputError("algebra has no binary operation to chain; give --op")
    else:
        symbol, _table = algebra.operation(op_name)
        if symbol.arity != 2:
            raise InputError(f"--op {op_name!r} must be binary, has arity {symbol.arity}")
    term = Var(1)
    for i in range(2, n + 1):
        term = App(symbol, (term, Var(i)))
    return term


def _cmd_rewrite(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    if (args.term is None) == (args.chain is None):
        raise InputError("give exactly one of --term or --chain")
    if args.term is not None:
        input_term = parse_term(args.term, algebra)
    else:
        input_term = _left_chain(algebra, args.op, args.chain)
    q = require_malcev(algebra, args.budget)
    cube = build_cube_term(algebra, q, args.k)
    result = rewrite_log_height(
        algebra,
        cube,
        input_term,
        base_arity=args.base_arity,
        epsilon=args.epsilon,
        verify=args.verify,
        budget=args.budget,
        seed=args.seed,
    )
    cert = result.certificate
    row = {
        "n": cert.n,
        "k": cert.k,
        "epsilon": cert.epsilon,
        "c": cert.c,
        "base_arity": cert.base_arity,
        "cube_height": cert.cube_height,
        "base_worst_height": cert.base_worst_height,
        "input_height": cert.input_height,
        "output_height": cert.output_height,
        "bound": cert.bound,
        "nodes_expanded": cert.nodes_expanded,
        "memo_hits": cert.memo_hits,
        "verified": cert.verified,
        "term": print_term(result.term),
    }
    config = {
        "algebra": args.algebra,
        "term": args.term,
        "chain": args.chain,
        "op": args.op,
        "k": args.k,
        "base_arity": args.base_arity,
        "epsilon": args.epsilon,
        "verify": args.verify,
        "budget": args.budget,
        "seed": args.seed,
    }
    report = Report(command="rewrite", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["rewrite"]}]
    return report


def _cmd_decompose(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    if args.degree < 1:
        raise InputError("--degree must be at least 1")
    given = [v for v in (args.table, args.term, args.op) if v is not None]
    if len(given) != 1:
        raise InputError("give exactly one of --table, --term, --op")
    if args.table is not None:
        target = _parse_table(args.table, algebra.m)
    elif args.term is not None:
        term = parse_term(args.term, algebra)
        n = max(1, max_var_index(term))
        target = induced_table(algebra, term, n)
    else:
        _symbol, target = algebra.operation(args.op)
        if target.arity == 0:
            raise InputError("cannot decompose a nullary operation")
    q = require_malcev(algebra, args.budget)
    out = decompose_generators(algebra, q, args.degree, target, budget=args.budget)
    length, height = term_metrics(out)
    row = {
        "arity": target.arity,
        "degree": args.degree,
        "output_length": length,
        "output_height": height,
        "term": print_term(out),
    }
    config = {
        "algebra": args.algebra,
        "table": args.table,
        "term": args.term,
        "op": args.op,
        "degree": args.degree,
        "budget": args.budget,
    }
    report = Report(command="decompose", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["decompose"]}]
    return report


def _cmd_chain(args: argparse.Namespace) -> Report:
    algebra = _load_algebra(args.algebra)
    _guard_explosive(args, algebra)
    if args.k < 1:
        raise InputError("--k must be at least 1")
    q = require_malcev(algebra, args.budget)
    term = malcev_chain(q, args.k)
    arity = 2 * args.k + 1
    length, height = term_metrics(term)
    ess: int | None = None
    if algebra.m**arity <= args.budget:
        table = induced_table(algebra, term, arity)
        ess = essential_arity(table)
    row = {
        "k": args.k,
        "arity": arity,
        "length": length,
        "height": height,
        "essential_arity": ess,
        "malcev_height": q.height,
        "term": print_term(term),
    }
    config = {"algebra": args.algebra, "k": args.k, "budget": args.budget}
    report = Report(command="chain", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["chain"]}]
    if ess is None:
        report.status = "inconclusive"
        report.exit_code = 3
    return report


def _cmd_equiv(args: argparse.Namespace) -> Report:
    alg_a = _load_algebra(args.algebra_a)
    alg_b = _load_algebra(args.algebra_b)
    _guard_explosive(args, alg_a, alg_b)
    rep = clone_equality(alg_a, alg_b, args.max_arity, args.budget)
    witness = None
    if rep.witness is not None:
        witness = {
            "n": rep.witness.n,
            "side": rep.witness.side,
            "table": " ".join(str(v) for v in rep.witness.table),
            "term": rep.witness.term,
        }
    summary = {
        "status": rep.status,
        "algebra_a": rep.algebra_a,
        "algebra_b": rep.algebra_b,
        "max_arity": rep.max_arity,
        "first_disagreement": rep.first_disagreement,
        "witness": witness,
        "disagreements": [
            {
                "n": d.n,
                "only_in_a": [" ".join(str(v) for v in t) for t in d.only_in_a],
                "only_in_b": [" ".join(str(v) for v in t) for t in d.only_in_b],
            }
            for d in rep.disagreements
        ],
        "incomplete": rep.incomplete,
        "ht_a": rep.ht_a,
        "ht_b": rep.ht_b,
        "ht_ratio_min": rep.ht_ratio_min,
        "ht_ratio_max": rep.ht_ratio_max,
        "length_relation_d": rep.length_relation_d,
        "length_relation": rep.length_relation_rows,
    }
    config = {
        "algebra_a": args.algebra_a,
        "algebra_b": args.algebra_b,
        "max_arity": args.max_arity,
        "budget": args.budget,
    }
    report = Report(command="equiv", config=config, results=[summary])
    if rep.status == "equivalent" and rep.ht_a and rep.ht_b:
        report.csv_rows = [
            {"n": i + 1, "ht_a": rep.ht_a[i], "ht_b": rep.ht_b[i]}
            for i in range(len(rep.ht_a))
        ]
    else:
        report.csv_rows = []
    if rep.status == "not-equivalent":
        report.status = "fail"
        report.exit_code = 1
    elif rep.status == "inconclusive":
        report.status = "inconclusive"
        report.exit_code = 3
    return report


def _cmd_demo(args: argparse.Namespace) -> Report:
    if args.what != "commutator":
        raise InputError(f"unknown demo {args.what!r}")
    if args.n < 1:
        raise InputError("--n must be at least 1")
    group = corpus.load_builtin("a4-group")
    commutator = corpus.load_builtin("a4-commutator")
    rec = commutator_growth_demo(
        args.n, group, commutator, samples=args.samples, seed=args.seed
    )
    row = {
        "n": rec.n,
        "len_commutator_signature": rec.len_commutator_signature,
        "len_expanded": rec.len_expanded,
        "height_commutator": rec.height_commutator,
        "height_expanded": rec.height_expanded,
        "exceeds_power": rec.exceeds_power,
        "samples": rec.samples,
        "agree": rec.agree,
    }
    config = {"what": args.what, "n": args.n, "samples": args.samples, "seed": args.seed}
    report = Report(command="demo", config=config, results=[row])
    report.csv_rows = [{k: row[k] for k in CSV_COLUMNS["demo"]}]
    return report


_HANDLERS = {
    "info": _cmd_info,
    "clone": _cmd_clone,
    "seq": _cmd_seq,
    "bounds": _cmd_bounds,
    "sigma": _cmd_sigma,
    "primal-synth": _cmd_primal_synth,
    "primality": _cmd_primality,
    "malcev": _cmd_malcev,
    "cube": _cmd_cube,
    "spn": _cmd_spn,
    "rewrite": _cmd_rewrite,
    "decompose": _cmd_decompose,
    "chain": _cmd_chain,
    "equiv": _cmd_equiv,
    "demo": _cmd_demo,
}


# ---------------------------------------------------------------- parser


def _add_common(sp: argparse.ArgumentParser, *, algebra: bool = True) -> None:
    if algebra:
        sp.add_argument("algebra", help="path to an algebra file or builtin:<name>")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="max stored tables per closure")
    sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
    sp.add_argument("--out", help="write the report here instead of stdout")
    sp.add_argument("--timings", action="store_true", help="include wall clock time in the report")
    sp.add_argument("--seed", type=int, default=0, help="seed for any sampling")
    sp.add_argument(
        "--i-know-this-explodes",
        action="store_true",
        dest="i_know_this_explodes",
        help="allow clone enumeration on the 12-element group builtins",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clonelab",
        description="Measure and manipulate clones of finite algebras.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("info", help="describe an algebra")
    _add_common(sp)

    sp = sub.add_parser("clone", help="enumerate term operations of one arity")
    _add_common(sp)
    sp.add_argument("--arity", type=int, required=True)
    sp.add_argument("--show-entries", action="store_true", dest="show_entries")
    sp.add_argument("--min-lengths", action="store_true", dest="min_lengths")

    sp = sub.add_parser("seq", help="complexity sequences fs, ht, len up to an arity")
    _add_common(sp)
    sp.add_argument("--max-arity", type=int, default=3, dest="max_arity")

    sp = sub.add_parser("bounds", help="check the general inequalities exactly")
    _add_common(sp)
    sp.add_argument("--max-arity", type=int, default=3, dest="max_arity")

    sp = sub.add_parser("sigma", help="balanced fold of a binary symbol over n leaves")
    _add_common(sp, algebra=False)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--op", default="t", help="name of the binary symbol")

    sp = sub.add_parser("primal-synth", help="synthesize a term for a target table")
    _add_common(sp)
    sp.add_argument("--target-table", dest="target_table")
    sp.add_argument("--target-term", dest="target_term")
    sp.add_argument("--target-op", dest="target_op")

    sp = sub.add_parser("primality", help="probe which arities are fully expressive")
    _add_common(sp)
    sp.add_argument("--max-arity", type=int, default=2, dest="max_arity")

    sp = sub.add_parser("malcev", help="search for a minimal height Mal'cev term")
    _add_common(sp)

    sp = sub.add_parser("cube", help="iterate a Mal'cev term into a cube term")
    _add_common(sp)
    sp.add_argument("--n", type=int, required=True)

    sp = sub.add_parser("spn", help="check the higher commutator identity up to a degree")
    _add_common(sp)
    sp.add_argument("--degree", type=int, required=True)

    sp = sub.add_parser("rewrite", help="rebalance a term to logarithmic height")
    _add_common(sp)
    sp.add_argument("--term", help="input term as an s-expression")
    sp.add_argument("--chain", type=int, help="use a left chain over n variables instead")
    sp.add_argument("--op", help="binary operation for --chain (default: first binary op)")
    sp.add_argument("--k", type=int, default=2)
    sp.add_argument("--base-arity", type=int, dest="base_arity")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--verify", default="none", help="none, exhaustive, or sample:N")

    sp = sub.add_parser("decompose", help="write a table as a cube term over lower arity pieces")
    _add_common(sp)
    sp.add_argument("--table", help="target as whitespace separated values")
    sp.add_argument("--term", help="target as an s-expression over the algebra")
    sp.add_argument("--op", help="target as a named operation")
    sp.add_argument("--degree", type=int, required=True)

    sp = sub.add_parser("chain", help="nest a Mal'cev term into a wide low collapse example")
    _add_common(sp)
    sp.add_argument("--k", type=int, required=True)

    sp = sub.add_parser("equiv", help="compare the clones of two algebras")
    sp.add_argument("algebra_a", help="path or builtin:<name>")
    sp.add_argument("algebra_b", help="path or builtin:<name>")
    sp.add_argument("--max-arity", type=int, default=2, dest="max_arity")
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
    sp.add_argument("--out")
    sp.add_argument("--timings", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument(
        "--i-know-this-explodes", action="store_true", dest="i_know_this_explodes"
    )

    sp = sub.add_parser("demo", help="worked demonstrations")
    sp.add_argument("what", choices=["commutator"])
    sp.add_argument("--n", type=int, default=5)
    sp.add_argument("--samples", type=int, default=1000)
    sp.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    sp.add_argument("--format", choices=["json", "csv", "text"], default="json")
    sp.add_argument("--out")
    sp.add_argument("--timings", action="store_true")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument(
        "--i-know-this-explodes", action="store_true", dest="i_know_this_explodes"
    )

    return parser


def _exit_code_for(exc: ClonelabError) -> int:
    if isinstance(exc, InputError):
        return 2
    if isinstance(exc, BudgetExceededError):
        return 3
    if isinstance(exc, (MismatchError, MathInvariantError)):
        return 1
    return 1


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        report = _HANDLERS[args.command](args)
    except ClonelabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code_for(exc)
    if args.timings:
        report.wall_ms = round((time.perf_counter() - start) * 1000.0, 3)
    payload = emit(report, args.format)
    if args.out:
        Path(args.out).write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.buffer.flush()
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
