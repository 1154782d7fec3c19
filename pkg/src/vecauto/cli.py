"""Command-line front end.

Every command prints line-delimited JSON records so test harnesses can
assert on the output without scraping prose. Exit codes: 0 for
ok/accept/equal, 1 for reject/not-equal (with the counterexample in the
record), 2 for usage or parse errors, 3 for an exhausted search budget.

The default search budget can be overridden with the environment
variables VECAUTO_MAX_CONFIGS and VECAUTO_EPS_PER_PATH.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import builders, diophantine, fileformat, langlab, transforms
from .errors import UndecidedError, VecautoError
from .exact import format_rational
from .machines import (
    BUDGET_EXCEEDED,
    COUNTER_MACHINE,
    DETERMINISTIC,
    GFA,
    MachineSpec,
    SearchBudget,
    accepts,
    gfa_value,
    run_deterministic,
    run_nondeterministic,
    validate,
)

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

_PASSES = {}


def _remove_endmarker_cmd(spec, args):
    # the pass itself insists on nondeterministic input; on the command
    # line the harmless mode relaxation is applied automatically
    relaxed = transforms.as_nondeterministic(spec)
    out, report = transforms.remove_endmarker(relaxed)
    if relaxed is not spec:
        report.parameters["relaxed_mode"] = True
    return out, report


def _register_passes():
    _PASSES.update(
        {
            "remove-endmarker": _remove_endmarker_cmd,
            "rationals-to-integers": lambda spec, args: transforms.rationals_to_integers(spec),
            "eliminate-states": lambda spec, args: transforms.eliminate_states(spec),
            "counters-to-hva1": lambda spec, args: transforms.counters_to_hva1(spec),
            "counters-to-integer-hva3": lambda spec, args: transforms.counters_to_integer_hva3(spec),
            "attach-endmarker": lambda spec, args: transforms.attach_trivial_endmarker(spec),
            "scale-initial-vector": lambda spec, args: transforms.scale_initial_vector(spec, args.scale),
            "intersect": lambda spec, args: transforms.intersect_blind_hva(
                spec, fileformat.load_machine(args.with_machine)
            ),
        }
    )


_register_passes()


def _emit(record: dict) -> None:
    print(json.dumps(record))


def _budget_from(args) -> SearchBudget:
    max_configs = args.budget
    if max_configs is None:
        max_configs = os.environ.get("VECAUTO_MAX_CONFIGS")
        max_configs = int(max_configs) if max_configs else None
    eps = args.eps_per_path
    if eps is None:
        eps = os.environ.get("VECAUTO_EPS_PER_PATH")
        eps = int(eps) if eps else None
    budget = SearchBudget()
    if max_configs is not None:
        budget = SearchBudget(eps_per_path=eps, max_configurations=max_configs)
    elif eps is not None:
        budget = SearchBudget(eps_per_path=eps)
    return budget


def _load_valid(path) -> MachineSpec:
    spec = fileformat.load_machine(path)
    diags = validate(spec)
    if diags:
        raise VecautoError("; ".join(diags))
    return spec


def _write_or_print(text: str, path) -> None:
    if path:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def cmd_validate(args) -> int:
    try:
        spec = fileformat.load_machine(args.machine)
    except VecautoError as exc:
        _emit({"verdict": "ParseError", "detail": str(exc)})
        return EXIT_USAGE
    diags = validate(spec)
    if diags:
        _emit({"verdict": "Invalid", "diagnostics": diags, "machine": spec.summary()})
        return EXIT_USAGE
    _emit({"verdict": "Valid", "machine": spec.summary()})
    return EXIT_OK


def _register_record(spec, register):
    if spec.kind == COUNTER_MACHINE:
        return [str(c) for c in register]
    return [format_rational(e) for e in register]


def cmd_run(args) -> int:
    spec = _load_valid(args.machine)
    word = args.input
    foreign = [ch for ch in word if ch not in spec.alphabet]
    if foreign:
        raise VecautoError(f"input symbols {foreign} not in alphabet {list(spec.alphabet)}")
    record = {"verdict": None, "machine": spec.summary(), "input": word}
    if spec.kind == GFA:
        value = gfa_value(spec, word)
        record["value"] = format_rational(value)
        record["verdict"] = "Accept" if value == spec.gfa_cutpoint else "Reject"
    elif spec.mode == DETERMINISTIC:
        result = run_deterministic(spec, word)
        record["verdict"] = result.verdict
        if args.trace:
            record["trace"] = [
                {
                    "state": c.state,
                    "register": _register_record(spec, c.register),
                    "position": c.position,
                }
                for c in result.trace
            ]
    else:
        result = run_nondeterministic(spec, word, _budget_from(args))
        record["verdict"] = result.verdict
        if args.trace and result.accepting_path is not None:
            record["accepting_path"] = list(result.accepting_path)
    _emit(record)
    if record["verdict"] == BUDGET_EXCEEDED:
        return EXIT_BUDGET
    return EXIT_OK if record["verdict"] == "Accept" else EXIT_NO


def cmd_transform(args) -> int:
    if args.pass_name == "dfa-to-stateless":
        with open(args.input_path, encoding="utf-8") as handle:
            dfa = fileformat.parse_dfa(handle.read())
        out, report = transforms.dfa_to_stateless_dbhva(dfa)
    else:
        spec = _load_valid(args.input_path)
        out, report = _PASSES[args.pass_name](spec, args)
    fileformat.save_machine(out, args.output_path)
    _emit(report.to_record())
    return EXIT_OK


def cmd_build(args) -> int:
    spec = builders.example(args.name, args.param)
    _write_or_print(fileformat.write_machine(spec), args.output)
    return EXIT_OK


def cmd_separate(args) -> int:
    build = builders.binary_distinguisher if args.model == "dbva" else builders.hva_distinguisher
    spec = build(args.x, args.base)
    _write_or_print(fileformat.write_machine(spec), args.output)
    failures = []
    if not accepts(spec, args.x):
        failures.append(args.x)
    for other in [""] + [y for y in args.others if y != args.x]:
        if accepts(spec, other):
            failures.append(other)
    _emit(
        {
            "verdict": "Separated" if not failures else "Failed",
            "accepts": args.x,
            "rejects": [y for y in args.others if y != args.x],
            "failures": failures,
        }
    )
    return EXIT_OK if not failures else EXIT_NO


def cmd_verify(args) -> int:
    spec = _load_valid(args.machine)
    budget = _budget_from(args)
    if os.path.exists(args.against):
        other = _load_valid(args.against)
        verdict = langlab.equivalent_up_to(spec, other, args.maxlen, budget)
        against = {"machine": other.summary()}
    else:
        name, _, param = args.against.partition(":")
        ref = langlab.reference_language(name, param or None)
        verdict = langlab.matches_reference(spec, ref, args.maxlen, budget)
        against = {"reference": ref.name}
    _emit(
        {
            "verdict": "Equal" if verdict.equal else "NotEqual",
            "counterexample": verdict.counterexample,
            "bound": verdict.bound,
            "machine": spec.summary(),
            "against": against,
        }
    )
    return EXIT_OK if verdict.equal else EXIT_NO


def cmd_check(args) -> int:
    spec = _load_valid(args.machine)
    budget = _budget_from(args)
    if args.property == "star-closure":
        result = langlab.check_star_closure(spec, args.maxlen)
    elif args.property == "suffix":
        result = langlab.check_suffix_property(spec, args.maxlen)
    elif args.property == "gcd":
        result = langlab.check_gcd_property(spec, args.maxlen)
    elif args.property == "commutative-matrices":
        result = langlab.check_commutative_matrices(spec, args.maxlen, budget)
    else:  # commutative
        result = diophantine.check_commutative(
            lambda w: accepts(spec, w, budget), spec.alphabet, args.maxlen
        )
    if result is langlab.NOT_APPLICABLE:
        _emit({"verdict": "NotApplicable", "machine": spec.summary()})
        return EXIT_OK
    if result is None:
        _emit({"verdict": "Ok", "machine": spec.summary(), "bound": args.maxlen})
        return EXIT_OK
    _emit({"verdict": "Counterexample", "witness": list(result), "machine": spec.summary()})
    return EXIT_NO


def cmd_enumerate(args) -> int:
    spec = _load_valid(args.machine)
    for word in langlab.enumerate_accepted(spec, args.maxlen, _budget_from(args)):
        _emit({"accepted": word})
    return EXIT_OK


def cmd_diophantine(args) -> int:
    if args.subcommand == "to-famw":
        with open(args.path, encoding="utf-8") as handle:
            system = fileformat.parse_system(handle.read())
        _write_or_print(fileformat.write_machine(diophantine.famw_from_system(system)), args.output)
        return EXIT_OK
    if args.subcommand == "from-famw":
        system = diophantine.system_from_famw(_load_valid(args.path))
        _write_or_print(fileformat.write_system(system), args.output)
        return EXIT_OK
    with open(args.path, encoding="utf-8") as handle:
        system = fileformat.parse_system(handle.read())
    for counts in sorted(diophantine.solutions_up_to(system, args.bound)):
        _emit({"solution": list(counts)})
    return EXIT_OK


def _add_budget_flags(parser) -> None:
    parser.add_argument("--budget", type=int, default=None,
                        help="cap on explored configurations per search")
    parser.add_argument("--eps-per-path", type=int, default=None,
                        help="cap on eps-moves along any one path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vecauto",
        description="Exact-arithmetic workbench for vector and homing vector automata",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a machine file against the model invariants")
    p.add_argument("machine")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a machine on an input string")
    p.add_argument("machine")
    p.add_argument("input")
    p.add_argument("--trace", action="store_true")
    _add_budget_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("transform", help="apply a transformation pass")
    p.add_argument("pass_name", choices=sorted(_PASSES) + ["dfa-to-stateless"])
    p.add_argument("input_path")
    p.add_argument("output_path")
    p.add_argument("--scale", default="1", help="factor for scale-initial-vector")
    p.add_argument("--with", dest="with_machine", help="second machine for intersect")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("build", help="emit an example machine from the catalog")
    p.add_argument("name", choices=builders.EXAMPLE_NAMES)
    p.add_argument("param", nargs="?", type=int, default=None)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("separate", help="build a machine accepting x and rejecting the rest")
    p.add_argument("x")
    p.add_argument("others", nargs="*")
    p.add_argument("--model", choices=("dbva", "dbhva"), default="dbva")
    p.add_argument("--base", type=int, default=3)
    p.add_argument("-o", "--output", default=None)
    p.set_defaults(func=cmd_separate)

    p = sub.add_parser("verify", help="bounded equivalence against a reference or machine")
    p.add_argument("machine")
    p.add_argument("--against", required=True,
                   help="machine file, reference name, or reference name:param")
    p.add_argument("--maxlen", type=int, required=True)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("check", help="run a structural property check")
    p.add_argument("property", choices=(
        "star-closure", "suffix", "gcd", "commutative-matrices", "commutative"))
    p.add_argument("machine")
    p.add_argument("--maxlen", type=int, required=True)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("enumerate", help="list accepted strings up to a length bound")
    p.add_argument("machine")
    p.add_argument("--maxlen", type=int, required=True)
    _add_budget_flags(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("diophantine", help="linear homogeneous system commands")
    dio = p.add_subparsers(dest="subcommand", required=True)
    q = dio.add_parser("to-famw", help="system file -> stateless FAM machine file")
    q.add_argument("path")
    q.add_argument("-o", "--output", default=None)
    q = dio.add_parser("from-famw", help="stateless FAM machine file -> system file")
    q.add_argument("path")
    q.add_argument("-o", "--output", default=None)
    q = dio.add_parser("solve", help="enumerate nonnegative solutions up to a bound")
    q.add_argument("path")
    q.add_argument("--bound", type=int, required=True)
    p.set_defaults(func=cmd_diophantine)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UndecidedError as exc:
        _emit({"verdict": "BudgetExceeded", "detail": str(exc)})
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        _emit({"verdict": "UsageError", "detail": str(exc)})
        return EXIT_USAGE
    except VecautoError as exc:
        _emit({"verdict": "UsageError", "detail": str(exc)})
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
