"""Command line interface.

Exit codes: 0 on success, 1 for input or validation errors, 2 when a numerical
precondition fails (non-maximal state, optimizer without a converged restart).
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import detect, ghz, optimize
from .errors import BranchResolutionFailure, EntanglementError, NotMaximal
from .named import NAMED_STATES, named_state
from .statespace import dumps_state, load_state, random_state

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class CLIError(Exception):
    def __init__(self, message: str, code: int = EXIT_INPUT):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for numerical failures here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _dims(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _write(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _format_report(report: detect.EntanglementReport, detail: bool) -> str:
    lines = []
    if detail:
        width = max(len(str(r.bipartition)) for r in report.per_bipartition)
        lines.append(f"{'bipartition':<{width}}  {'M[' + report.functional + ']':>14}  factorizable")
        for r in report.per_bipartition:
            verdict = "yes" if r.factorizable else "no"
            lines.append(f"{str(r.bipartition):<{width}}  {r.m_value:>14.6f}  {verdict}")
    blocks = " ".join("{" + ",".join(map(str, b)) + "}" for b in report.blocks)
    lines.append(f"class: {report.separability_class}")
    lines.append(f"blocks: {blocks}")
    return "\n".join(lines) + "\n"


def cmd_analyze(args, detail: bool = True) -> int:
    state = load_state(args.file)
    try:
        f = detect.minor_function(args.f)
    except ValueError as exc:
        raise CLIError(str(exc)) from None
    report = detect.classify(state, eps=args.eps, f=f)
    if args.json:
        data = report.to_dict()
        if not detail:
            del data["bipartitions"]
        _write(json.dumps(data, indent=2) + "\n", None)
    else:
        _write(_format_report(report, detail), None)
    return EXIT_OK


def cmd_classify(args) -> int:
    return cmd_analyze(args, detail=False)


def cmd_named(args) -> int:
    try:
        state = named_state(args.name)
    except KeyError as exc:
        raise CLIError(exc.args[0]) from None
    _write(dumps_state(state), args.out)
    return EXIT_OK


def cmd_random(args) -> int:
    _write(dumps_state(random_state(args.dims, args.seed)), args.out)
    return EXIT_OK


def cmd_maximize(args) -> int:
    config = optimize.OptimizerConfig(
        restarts=args.restarts,
        max_iters=args.max_iters,
        seed=args.seed,
        bipartition_set=args.bipartitions,
        workers=args.workers,
    )
    result = optimize.maximize_min_m(args.dims, config)
    _write(result.to_json(), args.out)
    if args.out not in (None, "-"):
        print(f"best min M = {result.best_min_m:.6f} (restart {result.restart_index})")
        for bp, m in zip(result.bipartitions, result.per_bipartition_m):
            print(f"  {str(bp):<16} {m:.6f}")
    if result.restarts_converged == 0:
        print("error: no restart converged", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def cmd_canonicalize(args) -> int:
    state = load_state(args.file)
    circuit, trace = ghz.ghz_canonicalize(state, eps=args.eps)
    _write(json.dumps(circuit.to_list()) + "\n", args.out)
    stream = sys.stdout if args.out not in (None, "-") else sys.stderr
    print(f"branch: {trace.branch}", file=stream)
    print(f"GHZ fidelity: {trace.fidelity:.12f}", file=stream)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="multient",
        description="Minor-based entanglement analysis of multipartite pure states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_ in (
        ("analyze", cmd_analyze, "per-bipartition M values and separability class"),
        ("classify", cmd_classify, "separability class only"),
    ):
        p = sub.add_parser(name, help=help_)
        p.add_argument("file", help="state file (JSON)")
        p.add_argument("--eps", type=float, default=detect.DEFAULT_EPS)
        p.add_argument("--f", default="abs2", help="minor function: abs2, abs or abs_p:<p>")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)

    p = sub.add_parser("named", help="write one of the reference states")
    p.add_argument("name", help=", ".join(NAMED_STATES))
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_named)

    p = sub.add_parser("random", help="write a Haar-random state")
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_random)

    p = sub.add_parser("maximize", help="maximize the smallest M numerically")
    p.add_argument("--dims", type=_dims, required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iters", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bipartitions", choices=["all", "single_part_only"], default="all")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_maximize)

    p = sub.add_parser("canonicalize", help="local unitary circuit taking a maximal 3-qubit state to GHZ")
    p.add_argument("file")
    p.add_argument("--eps", type=float, default=ghz.DEFAULT_EPS)
    p.add_argument("--out", "-o")
    p.set_defaults(func=cmd_canonicalize)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except (NotMaximal, BranchResolutionFailure) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (EntanglementError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
