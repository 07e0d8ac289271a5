"""Command line: verify a chart spec, compute a genus, re-render a saved report.

Exit codes: 0 all checks passed, 1 some check failed, 2 bad input (the chart spec,
the genus data or the arguments), reported before any check runs.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from .charts import BUILTIN_TEXT, parse_chart_spec
from .checks import SUITES, SuiteOptions, emit_report, parse_machine, run_suite
from .errors import WorkbenchError
from .genus import EXAMPLES, example_input, genus_trace, monomial_table, parse_genus_input

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _spec_text(arg: str) -> str:
    """A file path, or the name of a built-in spec (p1, p2)."""
    if Path(arg).is_file() or arg == "-":
        return _read(arg)
    if arg in BUILTIN_TEXT:
        return BUILTIN_TEXT[arg]
    raise FileNotFoundError(f"no spec file {arg!r} (built-ins: {', '.join(sorted(BUILTIN_TEXT))})")


def _suites(text: str) -> list[str]:
    names = [s.strip() for s in text.split(",") if s.strip()]
    if names == ["all"]:
        return list(SUITES)
    bad = [s for s in names if s not in SUITES]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"suites are a comma list from {', '.join(SUITES)}")
    return names


def _lambdas(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",")]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad lambda list {text!r}") from None


def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def render_genus(result, order: int) -> str:
    lines = [f"T(y, q) through q^{order}, u = y^(1/2)", "  q   u   coefficient"]
    for b, a, c in monomial_table(result.series):
        lines.append(f"  {b:<3} {a:<3} {_format_coeff(c)}")
    state = "PASS" if result.agree else "FAIL"
    lines.append(f"fixed-point sum vs theta sum: {state}")
    return "\n".join(lines) + "\n"


def cmd_verify(args) -> int:
    system = parse_chart_spec(_spec_text(args.spec))
    opts = SuiteOptions(samples=args.samples, bound=args.bound, degree=args.degree,
                        timing=args.timing, corrupt_c=args.corrupt_c)
    report = run_suite(system, args.suite, args.seed, opts)
    if args.out:
        Path(args.out).write_text(emit_report(report, "machine"))
    sys.stdout.write(emit_report(report, args.format))
    return EXIT_FAIL if report.failed else EXIT_OK


def cmd_genus(args) -> int:
    if args.input:
        data = parse_genus_input(_read(args.input), args.qmax)
    else:
        data = example_input(args.example, args.lambdas or [], args.qmax)
    result = genus_trace(data, check=False)
    sys.stdout.write(render_genus(result, args.qmax))
    return EXIT_OK if result.agree else EXIT_FAIL


def cmd_report(args) -> int:
    report = parse_machine(_read(args.input))
    sys.stdout.write(emit_report(report, args.format))
    return EXIT_FAIL if report.failed else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="chiralgerbe", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run check suites on a chart spec")
    v.add_argument("--spec", required=True, help="spec file, '-' for stdin, or p1 / p2")
    v.add_argument("--suite", type=_suites, default=list(SUITES),
                   help="comma list of " + ", ".join(SUITES) + " (default: all)")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--samples", type=int, default=200, help="samples per sampled check (200)")
    v.add_argument("--bound", type=int, default=3, help="coefficient bound of the pool (3)")
    v.add_argument("--degree", type=int, default=2, help="monomial degree bound of the pool (2)")
    v.add_argument("--format", choices=("text", "machine"), default="text")
    v.add_argument("--out", help="also write the machine report to this file")
    v.add_argument("--timing", action="store_true",
                   help="record wall time per check (reports are then not reproducible)")
    v.add_argument("--corrupt-c", action="store_true",
                   help="negative control: perturb the c-bracket before the axiom suite")
    v.set_defaults(func=cmd_verify)

    g = sub.add_parser("genus", help="equivariant genus at isolated fixed points")
    src = g.add_mutually_exclusive_group(required=True)
    src.add_argument("--example", choices=sorted(EXAMPLES))
    src.add_argument("--input", help="fixed-point data file")
    g.add_argument("--lambda", dest="lambdas", type=_lambdas,
                   help="torus weights for --example, e.g. 2 or 2,3")
    g.add_argument("--qmax", type=int, default=4)
    g.set_defaults(func=cmd_genus)

    r = sub.add_parser("report", help="re-render a saved machine report")
    r.add_argument("--input", default="-", help="machine report file (default: stdin)")
    r.add_argument("--format", choices=("text", "machine"), default="text")
    r.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (WorkbenchError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
