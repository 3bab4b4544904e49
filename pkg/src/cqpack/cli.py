"""Command line driver: ``cqpack {capacity,hyptest,build-code,verify}``.

Exit status: 0 success, 1 verification failure or non-convergence,
2 input error, 3 resource limit exceeded.
"""
from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from . import _config
from .channel import distribution, load_channel
from .errors import CqpackError, NotConvergedError, ResourceLimitError, SupportError, ValidationError
from .hyptest import alpha, beta, oh_bounds, pinched_test
from .info import capacity, mutual_information, relative_entropy
from .linop import kron_power
from .packing import audit_lines, build_block_code
from .verify import format_report, run_suite

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_LIMIT = 0, 1, 2, 3
LN2 = math.log(2)

ENV_HELP = """\
environment:
  CQPACK_MAX_DIM      largest operator dimension (default 4096)
  CQPACK_MAX_ENUM     largest codeword enumeration (default 1000000)
  CQPACK_MAX_CELLS    largest number of stored matrix entries (default 5e7)
  CQPACK_ALLOW_LARGE  set to 1 to permit limits above the defaults
  CQPACK_NUMBA        set to 0 to use the pure numpy kernels
"""


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def parse_grid(text: str) -> list[float]:
    """``"0.1,0.2"`` or ``"linspace:start,stop,num"``."""
    text = text.strip()
    try:
        if text.startswith("linspace:"):
            start, stop, num = text[len("linspace:"):].split(",")
            values = np.linspace(float(start), float(stop), int(num)).tolist()
        else:
            values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse grid {text!r}") from None
    if not values:
        raise ValidationError(f"grid {text!r} is empty")
    return values


def _emit(rows: list[list], header: list[str], out: str | None) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    if out:
        Path(out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _info(msg: str, args) -> None:
    # the summary goes to stdout only when stdout is not carrying the CSV
    print(msg, file=sys.stdout if args.out else sys.stderr)


def _unit(args) -> float:
    return LN2 if args.bits else 1.0


def _apply_limits(args) -> None:
    changes = {}
    if args.max_dim is not None:
        changes["max_dim"] = args.max_dim
    if args.max_enum is not None:
        changes["max_enum"] = args.max_enum
    if changes or args.allow_large:
        import dataclasses

        _config.set_limits(dataclasses.replace(_config.get_limits(), **changes), allow_large=args.allow_large)


def cmd_capacity(args) -> int:
    ch, _ = load_channel(args.channel)
    result = capacity(ch, tol=args.tol, max_iter=args.max_iter)
    unit = _unit(args)
    header = ["capacity_nats", "capacity_bits", "gap_certificate", "iterations"] + [f"p_{x}" for x in ch.alphabet]
    row = [result.capacity, result.capacity / LN2, result.gap_certificate / unit, result.iterations]
    row += list(result.optimal_p)
    _emit([row], header, args.out)
    _info(
        f"C = {fmt(result.capacity)} nats = {fmt(result.capacity / LN2)} bits; "
        f"gap {fmt(result.gap_certificate / unit)} {'bits' if args.bits else 'nats'}; "
        f"iterations {result.iterations}; p = "
        + ", ".join(f"{x}:{fmt(v)}" for x, v in zip(ch.alphabet, result.optimal_p)),
        args,
    )
    return EXIT_OK


def cmd_hyptest(args) -> int:
    ch, _ = load_channel(args.channel)
    if ch.size < 2 and (args.rho is None or args.sigma is None):
        raise ValidationError("hyptest needs two states: give --rho and --sigma or a two-symbol channel")
    rho = ch.state(args.rho if args.rho is not None else ch.alphabet[0])
    sigma = ch.state(args.sigma if args.sigma is not None else ch.alphabet[1])
    grid = parse_grid(args.a)
    if args.a_scale == "rel":
        d = relative_entropy(rho, sigma)
        if not math.isfinite(d):
            raise ValidationError("relative a-grid needs a finite D(rho||sigma)")
        grid = [v * d for v in grid]
    elif args.bits:
        grid = [v * LN2 for v in grid]
    s_grid = np.linspace(0, 1, args.s_grid)
    unit = _unit(args)
    rows = []
    ok = True
    for n in range(args.n_min, args.n_max + 1):
        rn, sn = kron_power(rho, n), kron_power(sigma, n)
        for a in grid:
            t = pinched_test(rho, sigma, n, a)
            al, be = alpha(rn, t), beta(sn, t)
            beta_bound = math.exp(-n * a) if n * a > -709 else math.inf
            try:
                bounds = [(oh_bounds(rho, sigma, n, a, float(s))[0], float(s)) for s in s_grid]
                alpha_bound, best_s = min(bounds)
                alpha_ok = al <= alpha_bound + 1e-12
            except SupportError:
                alpha_bound, best_s, alpha_ok = "support_error", "", ""
            beta_ok = be <= beta_bound + 1e-12
            ok = ok and beta_ok and alpha_ok is not False
            rows.append([n, a / unit, al, be, best_s, alpha_bound, beta_bound, alpha_ok, beta_ok])
    header = ["n", "a", "alpha", "beta", "best_s", "alpha_bound", "beta_bound", "alpha_ok", "beta_ok"]
    _emit(rows, header, args.out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_build_code(args) -> int:
    ch, p = load_channel(args.channel)
    if args.optimal_p:
        p = capacity(ch, tol=args.tol).optimal_p
    p = distribution(ch, p)
    info = mutual_information(ch, p)
    grid = parse_grid(args.a)
    if args.a_scale == "rel":
        grid = [v * info for v in grid]
    elif args.bits:
        grid = [v * LN2 for v in grid]
    gamma = "auto" if args.gamma == "auto" else float(args.gamma)
    unit = _unit(args)
    rows, audit, ok = [], [], True
    for n in range(args.n_min, args.n_max + 1):
        for a in grid:
            try:
                code, rep = build_block_code(ch, p, n, a, gamma=gamma, lam=args.lam, order=args.order, seed=args.seed)
            except ResourceLimitError as exc:
                raise ResourceLimitError(f"n={n}: {exc}") from None
            ok = ok and rep.all_ok
            rows.append(
                [n, a / unit, rep.delta, rep.gamma, rep.eta, rep.M, rep.rate / unit, rep.pe,
                 rep.satisfied[0], rep.satisfied[1], rep.vacuous]
            )
            audit += audit_lines(code, n=n, a=float(f"{a:.12g}"))
    header = ["n", "a", "delta_n", "gamma_n", "eta", "M_n", "rate", "Pe", "bound3_ok", "bound4_ok", "vacuous"]
    _emit(rows, header, args.out)
    audit_path = args.audit or (f"{args.out}.audit.jsonl" if args.out else None)
    if audit_path:
        Path(audit_path).write_text("".join(line + "\n" for line in audit))
    _info(f"I(p) = {fmt(info / unit)} {'bits' if args.bits else 'nats'}", args)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_verify(args) -> int:
    if args.channel:
        load_channel(args.channel)  # only validates the file
    results = run_suite(seed=args.seed, inject_fault=args.inject_fault)
    report = format_report(results, args.seed)
    if args.out:
        Path(args.out).write_text(report)
    else:
        sys.stdout.write(report)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", help="channel file (YAML or JSON)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--tol", type=float, default=1e-9, help="capacity gap tolerance")
    common.add_argument("--bits", action="store_true", help="show entropic quantities in bits")
    common.add_argument("--max-dim", type=int, help="override the operator dimension limit")
    common.add_argument("--max-enum", type=int, help="override the enumeration limit")
    common.add_argument("--allow-large", action="store_true", help="acknowledge limits above the defaults")

    parser = argparse.ArgumentParser(
        prog="cqpack",
        description="Channel coding experiments with pinched hypothesis tests and greedy packing.",
        epilog=ENV_HELP,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("capacity", parents=[common], help="Holevo capacity with certificate")
    p.add_argument("--max-iter", type=int, default=100_000)
    p.set_defaults(func=cmd_capacity, needs_channel=True)

    p = sub.add_parser("hyptest", parents=[common], help="pinched test errors against their bounds")
    p.add_argument("--rho", help="symbol of the null hypothesis state (default: first)")
    p.add_argument("--sigma", help="symbol of the alternative state (default: second)")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--a", default="linspace:0.1,0.9,9", help="list or linspace:start,stop,num")
    p.add_argument("--a-scale", choices=["rel", "abs"], default="rel",
                   help="rel: a values are fractions of D(rho||sigma)")
    p.add_argument("--s-grid", type=int, default=21, help="number of s points on [0, 1]")
    p.set_defaults(func=cmd_hyptest, needs_channel=True)

    p = sub.add_parser("build-code", parents=[common], help="greedy code construction per block length")
    p.add_argument("--n-min", type=int, default=1)
    p.add_argument("--n-max", type=int, default=4)
    p.add_argument("--a", default="0.5", help="list or linspace:start,stop,num")
    p.add_argument("--a-scale", choices=["rel", "abs"], default="rel", help="rel: a values are fractions of I(p)")
    p.add_argument("--gamma", default="auto", help="real or 'auto' for max(sqrt(delta_n), 1e-3)")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, help="eta = exp(-n lambda)")
    p.add_argument("--order", choices=["lex", "random"], default="lex", help="candidate scan order")
    p.add_argument("--optimal-p", action="store_true", help="use the capacity-achieving distribution")
    p.add_argument("--audit", help="audit trail path (default: <out>.audit.jsonl)")
    p.set_defaults(func=cmd_build_code, needs_channel=True)

    p = sub.add_parser("verify", parents=[common], help="randomized property suite")
    p.add_argument("--inject-fault", action="store_true", help="perturb a decoder element to exercise failure")
    p.set_defaults(func=cmd_verify, needs_channel=False, seed=42)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    saved = _config.get_limits()
    try:
        _apply_limits(args)
        if args.needs_channel and not args.channel:
            raise ValidationError("--channel is required")
        for name in ("n_min", "n_max", "s_grid"):
            if getattr(args, name, 1) < 1:
                raise ValidationError(f"--{name.replace('_', '-')} must be >= 1")
        if getattr(args, "n_max", 1) < getattr(args, "n_min", 1):
            raise ValidationError("--n-max must be >= --n-min")
        if not args.tol > 0:
            raise ValidationError("--tol must be positive")
        return args.func(args)
    except ValidationError as exc:
        print(f"cqpack: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ResourceLimitError as exc:
        print(f"cqpack: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except NotConvergedError as exc:
        print(f"cqpack: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except CqpackError as exc:
        print(f"cqpack: {exc}", file=sys.stderr)
        return EXIT_FAIL
    finally:
        _config.set_limits(saved, allow_large=True)


if __name__ == "__main__":
    sys.exit(main())
