"""Command-line interface.

Exit status: 0 for success or an affirmative verdict, 1 for a negative
verdict (the witness is printed), 2 for usage, I/O and validation errors.
Any input path may be given as ``demo:NAME`` to use a built-in scenario.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence, TextIO

from . import fileformat
from .analysis import AnalysisReport, ChshPatternError, analyze, chsh
from .demos import DEMOS, UnknownDemo, build_demo, default_chsh_contexts
from .determinize import AugmentedScenario, analyze_augmented, determinize, marginalize
from .factorize import FactorizedModel, NotFactorizable, analyze_factorized, factorize_independent
from .rational import approx, render
from .scenario import Scenario, ScenarioError, validate

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _tuple(outcomes) -> str:
    return "(" + ",".join(outcomes) + ")"


def render_report(report: AnalysisReport, name: str) -> str:
    lines = [f"scenario: {name}"]
    if report.deterministic is not None:
        lines.append(f"deterministic: {_yes(report.deterministic)}")
        if (w := report.determinism_witness) is not None:
            lines.append(
                f"  not 0/1: context {w.context}, {w.lam} {_tuple(w.outcomes)}: P = {render(w.p)}  (~{approx(w.p)})"
            )
    if report.ch_factorizable is not None:
        lines.append(f"CH-factorizable: {_yes(report.ch_factorizable)}")
        if (w := report.ch_witness) is not None:
            lines.append(
                f"witness {w.lam} {_tuple(w.outcomes)}: {render(w.lhs)} ≠ {render(w.rhs)}"
                f"  [context {w.context}; joint ~{approx(w.lhs)} vs product ~{approx(w.rhs)}]"
            )
    return "\n".join(lines) + "\n"


def _load(path: str):
    try:
        return fileformat.read(path)
    except UnknownDemo as e:
        raise CliError(str(e)) from None
    except FileNotFoundError:
        raise CliError(f"{path}: no such file") from None
    except OSError as e:
        raise CliError(f"{path}: {e.strerror}") from None
    except fileformat.FormatError as e:
        raise CliError(f"{path}: {e}") from None


def _base(model) -> Scenario:
    if isinstance(model, AugmentedScenario):
        return marginalize(model)
    if isinstance(model, FactorizedModel):
        return model.base
    return model


def _write(model, out: str | None, stdout: TextIO) -> None:
    if out is None or out == "-":
        stdout.write(fileformat.dumps(model))
        return
    try:
        fileformat.write(model, out)
    except OSError as e:
        raise CliError(f"{out}: {e.strerror}") from None


def cmd_validate(args, stdout) -> int:
    model = _load(args.input)
    report = validate(_base(model) if not isinstance(model, Scenario) else model)
    if args.format == "machine":
        doc = {"valid": report.ok, "violations": [{"path": v.path, "message": v.message} for v in report.violations]}
        stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        stdout.write(("valid" if report.ok else str(report)) + "\n")
    if not report.ok:
        raise CliError(f"{args.input}: {len(report)} violation(s)")
    return EXIT_OK


def cmd_check(args, stdout) -> int:
    model = _load(args.input)
    det, fac = args.determinism, args.factorability
    if not det and not fac:
        det = fac = True
    if isinstance(model, AugmentedScenario):
        report = analyze_augmented(model, det, fac)
        name = model.base.name
    elif isinstance(model, FactorizedModel):
        report = analyze_factorized(model, det, fac)
        name = model.base.name
    else:
        report = analyze(model, det, fac)
        name = model.name
    if args.format == "machine":
        stdout.write(fileformat.dump_report(report, name))
    else:
        stdout.write(render_report(report, name))
    return EXIT_OK if report.affirmative else EXIT_NEGATIVE


def cmd_determinize(args, stdout) -> int:
    scenario = _base(_load(args.input))
    try:
        aug = determinize(scenario, args.context)
    except KeyError as e:
        raise CliError(str(e.args[0])) from None
    _write(aug, args.output, stdout)
    return EXIT_OK


def cmd_factorize(args, stdout) -> int:
    scenario = _base(_load(args.input))
    try:
        fm = factorize_independent(scenario)
    except NotFactorizable as e:
        w = e.witness
        if args.format == "machine":
            doc = fileformat.report_doc(AnalysisReport(ch_factorizable=False, ch_witness=w), scenario.name)
            stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
        else:
            stdout.write(
                f"not factorizable: context {w.context}, witness {w.lam} {_tuple(w.outcomes)}: "
                f"{render(w.lhs)} ≠ {render(w.rhs)}\n"
            )
        return EXIT_NEGATIVE
    _write(fm, args.output, stdout)
    return EXIT_OK


def cmd_chsh(args, stdout) -> int:
    scenario = _base(_load(args.input))
    if args.contexts:
        contexts = [c.strip() for c in args.contexts.split(",")]
    else:
        default = default_chsh_contexts(args.input[len(fileformat.DEMO_PREFIX):]) if args.input.startswith(fileformat.DEMO_PREFIX) else None
        contexts = list(default) if default else [c.id for c in scenario.contexts[:4]]
    try:
        s = chsh(scenario, contexts)
    except (ChshPatternError, ValueError) as e:
        raise CliError(str(e)) from None
    if args.format == "machine":
        doc = {"scenario": scenario.name, "contexts": contexts, "S": render(s), "S_approx": approx(s, 7)}
        stdout.write(json.dumps(doc, indent=2, ensure_ascii=False) + "\n")
    else:
        stdout.write(f"S = {render(s)}\nS ~ {approx(s, 7)} (approximate)\n")
    return EXIT_OK


def cmd_demo(args, stdout) -> int:
    try:
        scenario = build_demo(args.name)
    except UnknownDemo as e:
        raise CliError(str(e)) from None
    _write(scenario, args.output, stdout)
    return EXIT_OK


def cmd_list_demos(args, stdout) -> int:
    if args.format == "machine":
        stdout.write(json.dumps({k: d for k, (_, d) in DEMOS.items()}, indent=2) + "\n")
    else:
        width = max(map(len, DEMOS))
        for name, (_, desc) in DEMOS.items():
            stdout.write(f"{name:<{width}}  {desc}\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "machine"), default=argparse.SUPPRESS,
                        help="output format (default: text)")

    parser = argparse.ArgumentParser(
        prog="hvfactor",
        description="Exact analysis of finite hidden-variable models.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], help="check a scenario file")
    p.add_argument("input")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check", parents=[common], help="determinism and CH factorability")
    p.add_argument("input", help="file or demo:NAME")
    p.add_argument("--determinism", action="store_true")
    p.add_argument("--factorability", action="store_true")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("determinize", parents=[common], help="add a determinizing noise variable")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.add_argument("--context", help="determinize only this context")
    p.set_defaults(func=cmd_determinize)

    p = sub.add_parser("factorize", parents=[common], help="build independent per-party noise")
    p.add_argument("input")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("chsh", parents=[common], help="exact CHSH value")
    p.add_argument("input")
    p.add_argument("--contexts", help="C11,C12,C21,C22")
    p.set_defaults(func=cmd_chsh)

    p = sub.add_parser("demo", parents=[common], help="write a built-in scenario")
    p.add_argument("name")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("list-demos", parents=[common], help="list built-in scenarios")
    p.set_defaults(func=cmd_list_demos)
    return parser


def run(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_OK
    if not hasattr(args, "format"):
        args.format = "text"
    try:
        return args.func(args, stdout)
    except CliError as e:
        stderr.write(f"error: {e}\n")
    except ScenarioError as e:
        stderr.write(f"error: {args.input}: {e}\n")
    return EXIT_ERROR


def main() -> None:
    sys.exit(run())
