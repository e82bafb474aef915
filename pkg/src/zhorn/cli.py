"""Command-line front end: ``zhorn SUBCOMMAND ...``.

Exit codes: 0 SAT / positive answer, 10 UNSAT / negative, 20 UNKNOWN or
bounds exhausted, 30 NOT-HORN (``solve``), 1 usage error, 2 input error.
Arguments naming an input accept a file path, ``-`` for stdin, or the text
itself.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any

from . import __version__
from .classify import (
    Bounds,
    GadgetError,
    PPFormula,
    classify,
    coset_test,
    gadget_one_in_three,
    quotient,
    sum_to_parameter_family,
)
from .core import core_reduce, endomorphism_sample
from .formula import LinearEquation, ParseError, evaluate, format_formula, parse_atom_list, parse_formula, standardize
from .horn import Status, horn_solve, is_horn, solve_csp_instance
from .language import ConstraintLanguage, InputError, format_instance, format_language, instantiate, parse_input
from .lattice import IntMatrix, hermite_normal_form
from .oracle import BoxTooLarge, box_csp, box_sat
from .presburger import ExpansionCapExceeded, formula_sat, implies, reduce_formula

EXIT_OK, EXIT_NEGATIVE, EXIT_UNKNOWN, EXIT_NOT_HORN = 0, 10, 20, 30
EXIT_USAGE, EXIT_INPUT = 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


class Report:
    """Ordered ``key: value`` fields plus human-readable lines."""

    def __init__(self, code: int = EXIT_OK):
        self.code = code
        self.fields: dict[str, Any] = {}
        self.lines: list[str] = []

    def set(self, key: str, value: Any) -> None:
        self.fields[key] = value

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps({"exit_code": self.code, **self.fields}, indent=2) + "\n"
        if fmt == "structured":
            out = []
            for key, value in self.fields.items():
                if isinstance(value, (list, tuple)):
                    out += [f"{key}: {_plain(v)}" for v in value] or [f"{key}:"]
                elif isinstance(value, dict):
                    out += [f"{key}: {k} = {_plain(v)}" for k, v in value.items()]
                else:
                    out.append(f"{key}: {_plain(value)}")
            return "\n".join(out) + "\n"
        return "\n".join(self.lines) + "\n"


def _plain(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (list, tuple)):
        return " ".join(_plain(v) for v in value)
    return str(value)


def _read(arg: str) -> str:
    if arg == "-":
        return sys.stdin.read()
    if os.path.isfile(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    return arg


def _bounds(args) -> Bounds:
    return Bounds(core_bound=args.bound)


def _witness_lines(rep: Report, assignment: dict[str, int]) -> None:
    rep.set("witness", {v: assignment[v] for v in assignment})
    for v, x in assignment.items():
        rep.say(f"{v} = {x}")


# ---------------------------------------------------------------- commands


def cmd_solve(args) -> Report:
    parsed = parse_input(_read(args.input))
    if parsed.formula is not None:
        phi = parsed.formula
        if not is_horn(phi):
            res = None
        else:
            res = horn_solve(phi)
        check = phi
    else:
        res = solve_csp_instance(parsed.language, parsed.constraints)
        res = None if res.status is Status.NOT_HORN else res
        check = instantiate(parsed.language, parsed.constraints)
    rep = Report()
    if res is None:
        rep.code = EXIT_NOT_HORN
        rep.set("status", "NOT-HORN")
        rep.say("NOT-HORN: some clause is not Horn after standardization")
        return rep
    rep.set("status", res.status.value)
    rep.say(res.status.value)
    if res.status is Status.SAT:
        if not evaluate(check, res.assignment):
            raise AssertionError("internal error: witness failed re-verification")
        _witness_lines(rep, res.assignment)
    else:
        rep.code = EXIT_NEGATIVE
    rep.set("units", [str(u) for u in res.units])
    rep.set("deleted_literals", res.deleted)
    return rep


def cmd_sat(args) -> Report:
    parsed = parse_input(_read(args.input))
    phi = parsed.formula if parsed.formula is not None else instantiate(parsed.language, parsed.constraints)
    rep = Report()
    try:
        point = formula_sat(phi)
    except ExpansionCapExceeded as e:
        rep.code = EXIT_UNKNOWN
        rep.set("status", "UNKNOWN")
        rep.set("reason", str(e))
        rep.say(f"UNKNOWN: {e}")
        return rep
    if point is None:
        rep.code = EXIT_NEGATIVE
        rep.set("status", "UNSAT")
        rep.say("UNSAT")
        return rep
    if not evaluate(phi, point):
        raise AssertionError("internal error: witness failed re-verification")
    rep.set("status", "SAT")
    rep.say("SAT")
    _witness_lines(rep, point)
    return rep


def cmd_implies(args) -> Report:
    premises = parse_atom_list(_read(args.premises))
    conclusions = parse_atom_list(_read(args.conclusion))
    if len(conclusions) != 1:
        raise InputError("expected exactly one conclusion equation")
    conclusion = conclusions[0]
    if not all(isinstance(a, LinearEquation) for a in (*premises, conclusion)):
        raise InputError("implies takes linear equations only")
    rep = Report()
    answer = implies(premises, conclusion)
    rep.code = EXIT_OK if answer else EXIT_NEGATIVE
    rep.set("implies", answer)
    rep.say("true" if answer else "false")
    return rep


def _parse_matrix(text: str) -> IntMatrix:
    rows = []
    for chunk in text.replace("\n", ";").split(";"):
        chunk = chunk.replace(",", " ").strip()
        if chunk:
            try:
                rows.append([int(x) for x in chunk.split()])
            except ValueError:
                raise InputError(f"not an integer row: {chunk!r}") from None
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise InputError("matrix rows have different lengths")
    return IntMatrix.from_rows(rows)


def cmd_hnf(args) -> Report:
    M = _parse_matrix(_read(args.matrix))
    H, U = hermite_normal_form(M)
    rep = Report()
    rep.set("H", [list(r) for r in H.entries])
    rep.set("U", [list(r) for r in U.entries])
    rep.say("H =")
    rep.say(str(H))
    rep.say("U =")
    rep.say(str(U))
    return rep


def cmd_normalize(args) -> Report:
    phi = standardize(parse_formula(_read(args.formula)))
    if args.reduce:
        phi = reduce_formula(phi)
    rep = Report()
    rep.set("formula", format_formula(phi))
    rep.set("horn", is_horn(phi))
    rep.say(format_formula(phi))
    return rep


def _language(arg: str) -> ConstraintLanguage:
    parsed = parse_input(_read(arg))
    if parsed.formula is not None:
        raise InputError("expected a constraint language (relation NAME/ARITY := ...)")
    return parsed.language


def cmd_core(args) -> Report:
    lang = _language(args.language)
    res = core_reduce(lang, args.bound)
    sample = endomorphism_sample(res.language, min(args.bound, args.sample))
    rep = Report()
    rep.set("kind", res.kind)
    rep.set("steps", res.steps)
    rep.set("factor", res.factor)
    rep.set("bound", res.bound)
    rep.set("endomorphisms", sample.members)
    rep.set("endomorphism_pattern", sample.pattern)
    rep.set("relations", [f"{r.name}/{r.arity} := {format_formula(r.formula)}" for r in res.language.relations])
    rep.say(res.kind)
    if not res.one_element:
        rep.say(f"divided by {res.steps or 'nothing'}; no further reducing scaling with |lam| <= {res.bound}")
        rep.say(format_language(res.language))
    rep.say(f"endomorphisms in [-{sample.bound}, {sample.bound}]: {', '.join(map(str, sample.members))}")
    rep.say(f"pattern: {sample.pattern}")
    return rep


def cmd_classify(args) -> Report:
    lang = _language(args.language)
    v = classify(lang, _bounds(args), jobs=args.jobs)
    rep = Report(EXIT_UNKNOWN if v.kind == "UNKNOWN" else EXIT_OK)
    rep.set("verdict", v.kind)
    rep.set("justification", v.justification)
    rep.set("core", v.core.kind)
    rep.set("core_steps", v.core.steps)
    rep.say(f"verdict: {v.kind}")
    rep.say(f"justification: {v.justification}")
    rep.say(f"core: {v.core.kind}" + (f" after dividing by {v.core.steps}" if v.core.steps else ""))
    per = {}
    for name, o in v.outcomes.items():
        desc = o.kind
        if o.reason:
            desc += f" ({o.reason})"
        if o.horn:
            desc += f": {format_formula(o.formula)}"
        elif o.certificate:
            desc += f": {o.certificate}"
        per[name] = desc
        rep.say(f"  {name}: {desc}")
    rep.set("relation", per)
    if v.kind == "TRIVIAL-P":
        rep.set("certificate", "all-zero assignment")
        rep.say("certificate: the all-zero assignment satisfies every instance")
    elif v.horn_language is not None:
        rep.set("certificate", [f"{r.name}/{r.arity} := {format_formula(r.formula)}" for r in v.horn_language.relations])
        rep.say("Horn definitions (solver-ready):")
        rep.say(format_language(v.horn_language))
    return rep


def cmd_quotient(args) -> Report:
    lang = _language(args.language)
    Q = quotient(lang, args.modulus)
    rep = Report()
    rep.set("modulus", Q.modulus)
    rep.say(f"quotient modulo {Q.modulus}")
    tests = {}
    for name in sorted(Q.relations):
        tuples = sorted(Q.relations[name])
        rep.set(f"relation {name}", [",".join(map(str, t)) for t in tuples])
        test = coset_test(Q.relations[name], Q.modulus) if tuples else None
        tests[name] = str(test) if test else "EMPTY"
        rep.say(f"{name}: {{" + ", ".join("(" + ",".join(map(str, t)) + ")" for t in tuples) + "}")
        rep.say(f"  coset test: {tests[name]}")
    rep.set("coset_test", tests)
    if any(t.startswith("FAIL") for t in tests.values()):
        rep.code = EXIT_NEGATIVE
    return rep


def _parse_clauses(text: str) -> list[tuple[str, str, str]]:
    out = []
    for chunk in text.replace("\n", ";").split(";"):
        names = [v.strip() for v in chunk.replace("(", " ").replace(")", " ").replace(",", " ").split()]
        if not names:
            continue
        if len(names) != 3:
            raise InputError(f"1-in-3 clause needs three variables: {chunk.strip()!r}")
        out.append(tuple(names))
    return out


def cmd_gadget(args) -> Report:
    lang = _language(args.language)
    if args.relation not in lang.names:
        raise InputError(f"unknown relation {args.relation!r}")
    if args.family == "sum":
        theta = sum_to_parameter_family(args.relation)
    else:
        theta = PPFormula(("x", "y"), ((args.relation, ("x", "y")),))
    clauses = _parse_clauses(_read(args.clauses)) if args.clauses else []
    try:
        g = gadget_one_in_three(lang, theta, clauses, window=args.window)
    except GadgetError as e:
        raise InputError(str(e)) from None
    rep = Report()
    text = format_instance(lang, g.constraints)
    rep.set("base_slice", g.base_slice)
    rep.set("issues", g.issues)
    rep.set("instance", text.splitlines())
    for issue in g.issues:
        rep.say(f"# warning: {issue}")
    rep.say(f"# base slice {g.base_slice}; true means value {g.m2 - g.m1} * {g.lam}")
    rep.lines.append(text.rstrip("\n"))
    return rep


def cmd_oracle(args) -> Report:
    parsed = parse_input(_read(args.input))
    rep = Report()
    try:
        if parsed.formula is not None:
            point = box_sat(parsed.formula, args.box)
        else:
            point = box_csp(parsed.language, parsed.constraints, args.box)
    except BoxTooLarge as e:
        raise InputError(str(e)) from None
    if point is None:
        rep.code = EXIT_UNKNOWN
        rep.set("status", "NONE-IN-BOX")
        rep.say(f"no solution in [-{args.box}, {args.box}] (not a proof of UNSAT)")
        return rep
    rep.set("status", "FOUND")
    rep.say("FOUND")
    _witness_lines(rep, point)
    return rep


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="zhorn", description="Exact CSP tools over (Z; +) with parameters.")
    p.add_argument("--version", action="version", version=f"zhorn {__version__}")
    p.add_argument("--format", choices=("human", "structured", "json"), default="human")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, func, help_text):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("--format", choices=("human", "structured", "json"), default=argparse.SUPPRESS)
        s.set_defaults(func=func)
        return s

    s = add("solve", cmd_solve, "solve a Horn CSP instance or a raw Horn formula")
    s.add_argument("input")
    s = add("sat", cmd_sat, "decide satisfiability of any standard formula")
    s.add_argument("input")
    s = add("implies", cmd_implies, "decide whether linear equations imply another")
    s.add_argument("premises", help='e.g. "x+y=2; x-y=0"')
    s.add_argument("conclusion", help='e.g. "x=1"')
    s = add("hnf", cmd_hnf, "Hermite normal form of an integer matrix")
    s.add_argument("matrix", help='rows separated by ";" or newlines, e.g. "2 4; 1 3"')
    s = add("normalize", cmd_normalize, "standard normalized form of a formula")
    s.add_argument("formula")
    s.add_argument("--reduce", action="store_true", help="also delete redundant clauses and literals")
    s = add("core", cmd_core, "reduce a constraint language to its core")
    s.add_argument("language")
    s.add_argument("--bound", type=int, default=64, help="endomorphism search bound (default 64)")
    s.add_argument("--sample", type=int, default=9, help="window for the reported endomorphism sample")
    s = add("classify", cmd_classify, "P / NP-complete verdict for a constraint language")
    s.add_argument("language")
    s.add_argument("--bound", type=int, default=64, help="endomorphism search bound (default 64)")
    s.add_argument("--jobs", type=int, default=1, help="parallel Horn searches")
    s = add("quotient", cmd_quotient, "quotient structure modulo d with coset tests")
    s.add_argument("language")
    s.add_argument("--modulus", type=int, required=True)
    s = add("gadget", cmd_gadget, "1-in-3-SAT reduction instance from a binary relation")
    s.add_argument("language")
    s.add_argument("--relation", required=True)
    s.add_argument("--clauses", default="", help='1-in-3 clauses, e.g. "p,q,r; p,p,q"')
    s.add_argument("--family", choices=("sum", "direct"), default="sum")
    s.add_argument("--window", type=int, default=20)
    s = add("oracle", cmd_oracle, "brute-force search in a box (debugging)")
    s.add_argument("input")
    s.add_argument("--box", type=int, default=5)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"zhorn: error: {e}", file=sys.stderr)
        return EXIT_USAGE
    try:
        rep = args.func(args)
    except (InputError, ParseError, ValueError, OSError) as e:
        print(f"zhorn: input error: {e}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(rep.render(args.format))
    return rep.code


if __name__ == "__main__":
    sys.exit(main())
