"""Command-line front door.

Subcommands: eval, update, check-proof, search, validate, taut. Output is
JSON unless --human asks for prose. Exit codes are a contract shared by
every subcommand: 0 affirmative, 1 negative (false / failed / countermodel
/ violations), 2 malformed input. Nothing else is ever returned.
"""

from __future__ import annotations

import argparse
import json
import sys

from .explore import find_countermodel, report_to_json, signature_for
from .model import (
    ConstantSpec,
    SubsetModel,
    cs_from_json,
    model_from_json,
    model_to_json,
    validate_model,
)
from .parse import SourceError, parse_formula, print_formula, print_term
from .proof import check_proof, match_axiom, proof_from_json, taut_check
from .semantics import EvalContext, cs_violations, evidence_effective, holds
from .syntax import Up, constants_in, eval_closure


class InputError(Exception):
    """Anything wrong with what the user handed us: exit 2."""


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InputError("cannot read %s: %s" % (path, e.strerror or e)) from e
    except json.JSONDecodeError as e:
        raise InputError("%s is not valid JSON: %s" % (path, e)) from e


def _model_arg(path: str, validate: bool = True):
    obj = _read_json(path)
    try:
        return model_from_json(obj, validate=validate)
    except ValueError as e:
        raise InputError("%s: %s" % (path, e)) from e


def _formula_arg(text: str):
    try:
        return parse_formula(text)
    except SourceError as e:
        raise InputError("formula does not parse: %s" % e) from e


def _cs_arg(spec: str):
    if spec == "full":
        return ConstantSpec("full")
    if spec == "empty":
        return ConstantSpec("empty")
    obj = _read_json(spec)
    try:
        return cs_from_json(obj)
    except ValueError as e:
        raise InputError("%s: %s" % (spec, e)) from e


def _emit(args, payload, human: str):
    if args.human:
        print(human)
    else:
        print(json.dumps(payload, indent=2) if isinstance(payload, dict) else
              json.dumps(payload))


def cmd_eval(args) -> int:
    m = _model_arg(args.model)
    f = _formula_arg(args.formula)
    if args.world not in m.worlds:
        raise InputError("world %r is not in the model" % args.world)
    value = holds(EvalContext(m), args.world, f)
    _emit(args, value, "%s at %s" % ("true" if value else "false", args.world))
    return 0 if value else 1


def cmd_update(args) -> int:
    m = _model_arg(args.model)
    c = _formula_arg(args.formula)
    pushed = EvalContext(m).push(c)
    evidence = dict(m.evidence)
    for w in m.worlds:
        if w in m.normal:
            evidence[(w, Up(c))] = evidence_effective(pushed, w, Up(c))
    updated = SubsetModel(m.worlds, m.normal, m.v0, m.v1, evidence, m.evidence_default)
    try:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(model_to_json(updated), fh, indent=2)
            fh.write("\n")
    except OSError as e:
        raise InputError("cannot write %s: %s" % (args.out, e.strerror or e)) from e
    _emit(args, {"written": args.out}, "wrote %s" % args.out)
    return 0


def cmd_check_proof(args) -> int:
    obj = _read_json(args.proof)
    try:
        p = proof_from_json(obj)
    except ValueError as e:
        raise InputError("%s: %s" % (args.proof, e)) from e
    cs = _cs_arg(args.cs)
    fail = check_proof(p, cs)
    if fail is None:
        _emit(args, {"ok": True}, "ok")
        return 0
    _emit(args, {"ok": False, "step": fail.index, "reason": fail.reason},
          "step %d: %s" % (fail.index, fail.reason))
    return 1


def cmd_search(args) -> int:
    f = _formula_arg(args.formula)
    if args.max_worlds < 1:
        raise InputError("--max-worlds must be at least 1")
    nonnormal = args.max_nonnormal
    if nonnormal is None:
        nonnormal = max(args.max_worlds - 1, 0)
    sig = signature_for(f, max_worlds=args.max_worlds, max_nonnormal=nonnormal)
    cs = _cs_arg(args.cs)
    if cs.mode == "explicit":
        universe = list(cs.pairs)
    elif cs.mode == "empty":
        universe = []
    else:
        # the slice of the full CS that can bear on this formula: its own
        # constants paired with the axiom instances its evaluation touches
        universe = [
            (c, g)
            for c in sorted(constants_in(f), key=print_term)
            for g in sorted(eval_closure(f), key=print_formula)
            if match_axiom(g)
        ]
    report = find_countermodel(f, sig, universe)
    payload = report_to_json(report)
    if report.outcome == "countermodel":
        _emit(args, payload,
              "countermodel at world %s (scanned %d models):\n%s"
              % (report.world, report.models_scanned,
                 json.dumps(model_to_json(report.model), indent=2)))
        return 1
    payload["note"] = ("exhausted within bounds; this logic has no known "
                       "completeness theorem, so validity is not implied")
    _emit(args, payload,
          "no countermodel within bounds (scanned %d models); "
          "exhaustion does not certify validity" % report.models_scanned)
    return 0


def cmd_validate(args) -> int:
    m = _model_arg(args.model, validate=False)
    problems = list(validate_model(m))
    cs_problems = []
    if not problems and args.cs is not None:
        cs = _cs_arg(args.cs)
        if cs.mode == "explicit":
            ctx = EvalContext(m)
            for w, c, a in cs_violations(ctx, cs.pairs):
                cs_problems.append({
                    "world": w,
                    "constant": print_term(c),
                    "formula": print_formula(a),
                })
    if not problems and not cs_problems:
        _emit(args, {"ok": True}, "ok")
        return 0
    payload = {"ok": False, "violations": problems + cs_problems}
    lines = problems + [
        "evidence for %(constant)s at %(world)s exceeds the truth set of %(formula)s" % v
        for v in cs_problems
    ]
    _emit(args, payload, "\n".join(lines))
    return 1


def cmd_taut(args) -> int:
    f = _formula_arg(args.formula)
    value = taut_check(f)
    _emit(args, value, "tautology" if value else "not a tautology")
    return 0 if value else 1


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="jus",
        description="Evaluate, update, prove, and refute over subset models.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--human", action="store_true",
                       help="prose output instead of JSON")

    p = sub.add_parser("eval", help="truth value of a formula at a world")
    p.add_argument("model")
    p.add_argument("world")
    p.add_argument("formula")
    common(p)
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("update", help="write the model updated by an announcement")
    p.add_argument("model")
    p.add_argument("formula")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(fn=cmd_update)

    p = sub.add_parser("check-proof", help="check a proof file against a constant specification")
    p.add_argument("proof")
    p.add_argument("cs", help='"full", "empty", or a CS file')
    common(p)
    p.set_defaults(fn=cmd_check_proof)

    p = sub.add_parser("search", help="bounded countermodel search")
    p.add_argument("formula")
    p.add_argument("--max-worlds", type=int, default=2)
    p.add_argument("--max-nonnormal", type=int, default=None)
    p.add_argument("--cs", default="full", help='"full", "empty", or a CS file')
    common(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("validate", help="check a model file, optionally against a CS")
    p.add_argument("model")
    p.add_argument("--cs", default=None)
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("taut", help="propositional tautology check")
    p.add_argument("formula")
    common(p)
    p.set_defaults(fn=cmd_taut)

    return top


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 2
    try:
        return args.fn(args)
    except InputError as e:
        print(str(e), file=sys.stderr)
        return 2


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
