"""Command line front end.

    chsh-decoherence max-violation --grid 0 1 11
    chsh-decoherence volume 0.05 0.1 0.2 --samples 1000000 --set L
    chsh-decoherence trajectory bath.json --t-max 10 --steps 200 --emit max_violation
    chsh-decoherence selftest

Tables go to stdout (or ``--out``) as CSV or JSON. Data output never
contains timestamps, so identical invocations give byte-identical files; the
run manifest (parameters, seed, version, timestamp) is written next to
``--out`` as ``<out>.manifest.json`` or to ``--manifest``.

Exit codes: 0 success, 1 invalid input, 2 invariant failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .decoherence import SpinBathSpec, effective_factor, trajectory
from .errors import InvalidInputError, InvariantError
from .geometry import analytic_bound_fraction, estimate_volume
from .optimizer import maximize_violation
from .quantum_state import as_factor, horodecki_max_violation, make_rho
from .selftest import run_selftest

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT = 0, 1, 2


def parse_complex(text: str) -> complex:
    """Parse ``"0.3+0.4i"``, ``"-0.5i"``, ``"0.7"``; a trailing ``j`` is also accepted."""
    cleaned = text.strip()
    if cleaned.endswith("i"):
        cleaned = cleaned[:-1] + "j"
    try:
        value = complex(cleaned)
    except ValueError:
        raise InvalidInputError(f"cannot parse {text!r} as a complex number (expected e.g. 0.3+0.4i)") from None
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InvalidInputError(f"{text!r} is not a finite number")
    return value


def parse_factor(text: str) -> complex:
    return _check_factor(parse_complex(text), text)


def _check_factor(r: complex, label: str) -> complex:
    if abs(r) > 1.0 + 1e-12:
        raise InvalidInputError(f"decoherence factor {label} has modulus {abs(r):.17g} > 1")
    return as_factor(r)


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    return format(float(x), ".17g")


def render(rows: list[dict], fmt_name: str) -> str:
    if fmt_name == "json":
        return json.dumps(rows, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    if rows:
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(rows[0].keys())
        for row in rows:
            writer.writerow(fmt(v) for v in row.values())
    return buf.getvalue()


def _r_values(args) -> list[complex]:
    values = [parse_factor(v) for v in [*args.r, *args.r_opt]]
    if args.grid is not None:
        start, stop, count = args.grid
        n = int(count)
        if n < 1 or n != count:
            raise InvalidInputError("--grid COUNT must be a positive integer")
        values.extend(_check_factor(complex(v), fmt(v)) for v in np.linspace(start, stop, n))
    if not values:
        raise InvalidInputError("no r values given (pass values or --grid START STOP COUNT)")
    return values


def cmd_max_violation(args) -> list[dict]:
    rows = []
    for r in _r_values(args):
        rho = make_rho(r)
        horodecki = horodecki_max_violation(rho) if args.method in ("horodecki", "both") else None
        optimized = None
        if args.method in ("optimize", "both"):
            optimized = maximize_violation(rho, restarts=args.restarts, seed=args.seed).best_value
        diff = abs(horodecki - optimized) if args.method == "both" else None
        if diff is not None and diff >= 1e-6:
            raise InvariantError(f"optimizer and Horodecki value disagree by {diff:.3g} at r = {r}")
        rows.append({"r_re": r.real, "r_im": r.imag, "horodecki": horodecki, "optimized": optimized, "abs_diff": diff})
    return rows


def _volume_row(r: complex, args) -> dict:
    est = estimate_volume(r, args.samples, args.seed, args.set, workers=args.workers)
    bound = analytic_bound_fraction(r)
    return {
        "r_re": r.real,
        "r_im": r.imag,
        "set": args.set,
        "samples": est.sample_count,
        "seed": est.seed,
        "fraction": est.violating_fraction,
        "ci95": est.ci95_halfwidth,
        "bound_fraction": bound,
        "within_bound": est.violating_fraction <= bound + 3 * est.ci95_halfwidth,
    }


def cmd_volume(args) -> list[dict]:
    return [_volume_row(r, args) for r in _r_values(args)]


def cmd_trajectory(args) -> list[dict]:
    if args.steps < 1:
        raise InvalidInputError("--steps must be at least 1")
    if not (math.isfinite(args.t_max) and args.t_max >= 0):
        raise InvalidInputError("--t-max must be finite and nonnegative")
    baths = [SpinBathSpec.from_json(path) for path in args.bath]
    if len(baths) > 2:
        raise InvalidInputError("at most two bath files (one per particle)")
    times = np.linspace(0.0, args.t_max, args.steps + 1)
    factors = [trajectory(bath, times).factors for bath in baths]
    rows = []
    for i, t in enumerate(times):
        if len(factors) == 2:
            # first file: environment of particle 1, second: particle 2
            r = effective_factor(factors[0][i], factors[1][i])
        else:
            r = as_factor(factors[0][i])
        row = {"t": t, "r_re": r.real, "r_im": r.imag, "r_abs": abs(r)}
        if args.emit == "max_violation":
            row["max_violation"] = horodecki_max_violation(make_rho(r))
        elif args.emit == "volume":
            vol = _volume_row(r, args)
            row.update({k: vol[k] for k in ("fraction", "ci95", "bound_fraction")})
        rows.append(row)
    return rows


def cmd_selftest(args) -> tuple[list[dict], bool]:
    results = run_selftest(samples=args.samples, seed=args.seed)
    rows = [{"check": c.name, "status": "PASS" if c.passed else "FAIL", "detail": c.detail} for c in results]
    return rows, all(c.passed for c in results)


def _seed(text: str) -> int:
    try:
        value = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_seed, default=42)
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", type=Path, help="output file (default stdout)")
    common.add_argument("--manifest", type=Path, help="manifest path (default <out>.manifest.json)")

    parser = _Parser(prog="chsh-decoherence", description="CHSH violation under decoherence")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def r_args(p):
        p.add_argument("r", nargs="*", help='decoherence factors, e.g. 0.5 or "0.3+0.4i"')
        p.add_argument("--r", dest="r_opt", action="append", default=[], metavar="R",
                       help="extra factor; use --r=-0.5i for values starting with '-'")
        p.add_argument("--grid", nargs=3, type=float, metavar=("START", "STOP", "COUNT"), help="real r grid")

    p = sub.add_parser("max-violation", parents=[common], help="maximal CHSH value vs r")
    r_args(p)
    p.add_argument("--method", choices=("horodecki", "optimize", "both"), default="both")
    p.add_argument("--restarts", type=_positive_int, default=20)
    p.set_defaults(handler=cmd_max_violation)

    p = sub.add_parser("volume", parents=[common], help="Monte Carlo fraction of violating directions")
    r_args(p)
    p.add_argument("--samples", type=_positive_int, default=1_000_000)
    p.add_argument("--set", choices=("L", "E"), default="L")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(handler=cmd_volume)

    p = sub.add_parser("trajectory", parents=[common], help="r(t) from a spin bath and derived quantities")
    p.add_argument("bath", nargs="+", type=Path, help="bath JSON file; give two for independent environments")
    p.add_argument("--t-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--emit", choices=("r", "max_violation", "volume"), default="r")
    p.add_argument("--samples", type=_positive_int, default=100_000)
    p.add_argument("--set", choices=("L", "E"), default="L")
    p.add_argument("--workers", type=_positive_int, default=1)
    p.set_defaults(handler=cmd_trajectory)

    p = sub.add_parser("selftest", parents=[common], help="run invariant checks")
    p.add_argument("--samples", type=_positive_int, default=10_000)
    p.set_defaults(handler=cmd_selftest)
    return parser


def _manifest(args) -> dict:
    params = {k: v for k, v in vars(args).items() if k not in ("handler", "out", "manifest", "command")}
    return {
        "command": args.command,
        "parameters": params,
        "seed": args.seed,
        "version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    status = EXIT_OK
    try:
        if args.command == "selftest":
            rows, passed = cmd_selftest(args)
            status = EXIT_OK if passed else EXIT_INVARIANT
        else:
            rows = args.handler(args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc.filename}: no such file", file=sys.stderr)
        return EXIT_INPUT
    except InvariantError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT

    text = render(rows, args.format)
    if args.out is not None:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    manifest_path = args.manifest or (args.out.with_name(args.out.name + ".manifest.json") if args.out else None)
    if manifest_path is not None:
        manifest_path.write_text(json.dumps(_manifest(args), indent=2, default=str) + "\n")
    if status != EXIT_OK:
        failed = [r["check"] for r in rows if r.get("status") == "FAIL"]
        print(f"failed checks: {', '.join(failed)}", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
