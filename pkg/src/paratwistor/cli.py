"""Command-line driver.

Exit status: 0 when every check passes, 1 when a verification check fails,
2 for usage and precondition errors.  ``PQK_MODE=exact|float`` selects the
scalar type (exact by default).
"""

from __future__ import annotations

import argparse
import os
import re
import sys
from fractions import Fraction

from . import report as rp
from . import tensor_core

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r} (use p/q or a decimal)") from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    return v


_NEGATIVE_RATIONAL = re.compile(r"^-\d+(/\d+|\.\d*)?$")


def _attach_negative_values(argv: list[str]) -> list[str]:
    """Rewrite ``--sc -24/5`` as ``--sc=-24/5``; argparse only accepts plain negative numbers."""
    out = []
    i = 0
    while i < len(argv):
        arg = argv[i]
        if arg in ("--sc", "--t") and i + 1 < len(argv) and _NEGATIVE_RATIONAL.match(argv[i + 1]):
            out.append(f"{arg}={argv[i + 1]}")
            i += 2
            continue
        out.append(arg)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="paratwistor",
        description="Exact pointwise curvature checks for bundles over paraquaternionic Kaehler space forms.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit the JSON report")
    common.add_argument("--out", metavar="FILE", help="write the output to FILE instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-base", parents=[common], help="space-form identities and Einstein check")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--sc", type=_rational, required=True, help="scalar curvature, p/q accepted")

    p = sub.add_parser("verify-bundle", parents=[common], help="twistor or reflector space at one point")
    p.add_argument("--kind", choices=("twistor", "reflector"), required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--t", type=_rational, default=Fraction(1))
    p.add_argument("--sc", type=_rational, required=True)
    p.add_argument("--structure", type=int, choices=(1, 2), default=1)
    p.add_argument("--adjoint-mode", choices=("frame-transpose", "metric-adjoint"))

    p = sub.add_parser("solve", parents=[common], help="critical scalar curvatures and t-values")
    p.add_argument("--kind", choices=("twistor", "reflector"))
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--t", type=_rational, default=Fraction(1))
    p.add_argument("--variation", action="store_true", help="only the canonical-variation t-values")
    p.add_argument("--convention", choices=rp.EINSTEIN_CONVENTIONS, default="paper")

    p = sub.add_parser("verify-mixed", parents=[common], help="so(2,1) data and mixed 3-structures")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--which", choices=("sphere", "hyperbolic"), default="sphere")
    p.add_argument("--convention", choices=rp.EINSTEIN_CONVENTIONS, default="paper")

    p = sub.add_parser("full-suite", parents=[common], help="every command over the standard grid")
    p.add_argument("--quiet", action="store_true", help="no progress lines on stderr")
    return parser


def _run(args, parser):
    if args.command == "verify-base":
        return rp.cmd_verify_base(args.n, args.sc)
    if args.command == "verify-bundle":
        return rp.cmd_verify_bundle(args.kind, args.n, args.t, args.sc, (args.structure,), args.adjoint_mode)
    if args.command == "solve":
        if args.variation:
            return rp.cmd_solve_variation(args.n, args.convention)
        if args.kind is None:
            parser.error("solve needs --kind unless --variation is given")
        return rp.cmd_solve(args.kind, args.n, args.t, args.convention)
    if args.command == "verify-mixed":
        return rp.cmd_verify_mixed(args.n, args.which, args.convention)
    if args.command == "full-suite":
        progress = None if args.quiet else (lambda msg: print(msg, file=sys.stderr, flush=True))
        return rp.full_suite(progress)
    raise AssertionError(args.command)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(_attach_negative_values(sys.argv[1:] if argv is None else list(argv)))
    except SystemExit as exc:
        return int(exc.code or 0)
    mode = os.environ.get("PQK_MODE", "exact")
    if mode not in ("exact", "float"):
        print(f"paratwistor: PQK_MODE must be 'exact' or 'float', got {mode!r}", file=sys.stderr)
        return EXIT_USAGE
    with tensor_core.use_mode(mode):
        try:
            result = _run(args, parser)
        except SystemExit as exc:
            return int(exc.code or 0)
        except (ValueError, TypeError) as exc:
            print(f"paratwistor: error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        text = result.to_json() if args.json else result.summary()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return EXIT_OK if result.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
