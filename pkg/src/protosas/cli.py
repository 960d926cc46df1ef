"""Batch command-line front end.

Every command writes CSV with ``#`` provenance lines (tool version, the full
flag set, seed) to ``--out`` or stdout.  Exit status: 0 success, 1 computation
error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .channel import (
    InvalidParameterError,
    SAlphaSParams,
    channel_llr,
    gamma_from_ebn0,
    sas_pdf,
)
from .protograph import (
    ParseError,
    ProtographError,
    PunctureMask,
    SearchConstraints,
    design_rate,
    enumerate_search_space,
    format_alist,
    girth,
    lift,
    parse_alist,
    parse_base,
)


class UsageError(Exception):
    pass


def _g(x) -> str:
    return format(float(x), ".6g")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _window(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2 or vals[0] >= vals[1]:
        raise argparse.ArgumentTypeError("window must be 'lo,hi' with lo < hi")
    return vals[0], vals[1]


def _rate(text: str) -> Fraction:
    try:
        r = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad rate {text!r}") from None
    if not 0 < r < 1:
        raise argparse.ArgumentTypeError("rate must lie in (0, 1)")
    return r


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise ProtographError(f"cannot read {path}: {exc.strerror}") from None


def _load_base(args):
    if args.base is None:
        raise UsageError("--base is required")
    return parse_base(_read(args.base))


def _gamma(args, rate) -> float:
    if args.gamma is not None:
        return args.gamma
    if args.ebn0 is None or len(args.ebn0) != 1:
        raise UsageError("give --gamma, or a single --ebn0 value")
    return gamma_from_ebn0(args.ebn0[0], float(rate), args.alpha)


def _grid(lo, hi, step):
    if step <= 0 or hi < lo:
        raise UsageError("need --step > 0 and --max >= --min")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


# --------------------------------------------------------------------------
# commands; each returns the CSV body (without provenance header)


def cmd_pdf(args):
    params = SAlphaSParams(args.alpha, args.gamma if args.gamma is not None else 1.0)
    xs = _grid(args.min, args.max, args.step)
    vals = sas_pdf(xs, params)
    return ["x,pdf"] + [f"{_g(x)},{_g(v)}" for x, v in zip(xs, np.atleast_1d(vals))]


def cmd_llr(args):
    gamma = _gamma(args, args.rate)
    params = SAlphaSParams(args.alpha, gamma)
    ys = _grid(args.min, args.max, args.step)
    return [f"# gamma={_g(gamma)}", "y,llr"] + [f"{_g(y)},{_g(channel_llr(float(y), params))}" for y in ys]


def cmd_rate(args):
    base, punct = _load_base(args)
    r = design_rate(base, punct)
    return ["n_checks,n_vars,n_transmitted,rate,rate_decimal", f"{base.n_checks},{base.n_vars},{punct.n_transmitted},{r},{_g(r)}"]


def _parse_template(text: str) -> np.ndarray:
    rows = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not rows:
        raise ParseError("empty template", 1)
    try:
        n_checks, n_vars = (int(t) for t in rows[0])
    except ValueError:
        raise ParseError("expected 'n_checks n_vars' on the first line", 1) from None
    body = rows[1 : 1 + n_checks]
    if len(body) != n_checks or any(len(r) != n_vars for r in body):
        raise ParseError(f"expected {n_checks} rows of {n_vars} entries", 2)
    try:
        return np.array([[-1 if t in ("*", "x", "-1") else int(t) for t in r] for r in body], dtype=np.int64)
    except ValueError:
        raise ParseError("entries must be integers or '*'", 2) from None


def cmd_search(args):
    if args.base is not None:
        template = _parse_template(_read(args.base))
    else:
        try:
            template = tuple(int(t) for t in args.shape.lower().split("x"))
        except ValueError:
            raise UsageError("--shape must look like 4x7") from None
        if len(template) != 2:
            raise UsageError("--shape must look like 4x7")
    constraints = SearchConstraints(exempt_column=None, coverage_pairs=()) if args.plain else SearchConstraints()
    out = ["index,entries,rate"]
    count = 0
    for count, base in enumerate(enumerate_search_space(template, constraints), start=1):
        if count <= args.limit:
            flat = ";".join(" ".join(str(int(v)) for v in row) for row in base.entries)
            out.append(f"{count - 1},{flat},{design_rate(base, PunctureMask.highest_degree(base))}")
        elif not args.count:
            break
    if args.count:
        out.append(f"# total={count}")
    return out


def cmd_lift(args):
    base, punct = _load_base(args)
    if args.factor is None:
        raise UsageError("--factor is required")
    code = lift(base, args.factor, seed=args.seed, punctures=punct)
    g = girth(code)
    return [f"# n={code.n} m={code.m} n_transmitted={code.n_transmitted} girth={g:g}", format_alist(code).rstrip("\n")]


def cmd_threshold(args):
    from .exit_analysis import sas_pexit_threshold

    base, punct = _load_base(args)
    res = sas_pexit_threshold(
        base,
        punct,
        alpha=args.alpha,
        m=args.samples,
        window=args.window,
        resolution_db=args.res,
        seed=args.seed,
        max_iter=args.max_iter,
        threads=args.threads,
        cn_input=args.cn_input,
    )
    body = res.trajectory_csv().rstrip("\n").splitlines()
    return body + [f"threshold_db,{_g(res.threshold_db)}"]


def cmd_threshold_awgn(args):
    from .exit_analysis import awgn_pexit_threshold

    base, punct = _load_base(args)
    res = awgn_pexit_threshold(base, punct, resolution_db=args.res, window=args.window, max_iter=args.max_iter)
    body = res.trajectory_csv().rstrip("\n").splitlines()
    return body + [f"threshold_db,{_g(res.threshold_db)}"]


def cmd_awd(args):
    from .awd import typical_min_distance_ratio

    base, punct = _load_base(args)
    spec = typical_min_distance_ratio(base, punct, grid_step=args.grid, seed=args.seed, spectrum=True)
    lines = ["delta,r_delta"] + [f"{_g(d)},{_g(r)}" for d, r in zip(spec.deltas, spec.r_values)]
    return lines + [f"delta2c,{'none' if spec.delta2c is None else _g(spec.delta2c)}"]


def cmd_exit_curve(args):
    from .exit_analysis import vnd_exit_curve

    gamma = _gamma(args, args.rate)
    ia = _grid(0.0, 1.0, args.grid)
    curve = vnd_exit_curve(args.dv, args.alpha, gamma, ia, m=args.samples, seed=args.seed)
    return [f"# gamma={_g(gamma)}", "ia,ie"] + [f"{_g(a)},{_g(e)}" for a, e in curve]


def cmd_ber(args):
    from .decoder import ber_csv, ber_simulate

    if args.code is not None:
        code = parse_alist(_read(args.code))
    elif args.base is not None and args.factor is not None:
        base, punct = _load_base(args)
        code = lift(base, args.factor, seed=args.seed, punctures=punct)
    else:
        raise UsageError("give --code, or --base with --factor")
    if not args.ebn0:
        raise UsageError("--ebn0 is required")
    pts = ber_simulate(
        code,
        args.alpha,
        args.ebn0,
        max_block_errors=args.max_errors,
        max_iter=args.max_iter,
        max_blocks=args.max_blocks,
        seed=args.seed,
    )
    return [f"# n={code.n} n_transmitted={code.n_transmitted}"] + ber_csv(pts).rstrip("\n").splitlines()


COMMANDS = {
    "pdf": cmd_pdf,
    "llr": cmd_llr,
    "rate": cmd_rate,
    "search": cmd_search,
    "lift": cmd_lift,
    "threshold": cmd_threshold,
    "threshold-awgn": cmd_threshold_awgn,
    "awd": cmd_awd,
    "exit-curve": cmd_exit_curve,
    "ber": cmd_ber,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=_positive_int, default=1, help="worker threads; never changes results")

    parser = argparse.ArgumentParser(prog="protosas", description="Protograph LDPC analysis for SaS noise channels.")
    parser.add_argument("--version", action="version", version=f"protosas {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text)

    p = add("pdf", "SaS density table")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--min", type=float, default=-10.0)
    p.add_argument("--max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.1)

    p = add("llr", "channel LLR table")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--ebn0", type=_floats)
    p.add_argument("--rate", type=_rate, default=Fraction(1, 2))
    p.add_argument("--min", type=float, default=-10.0)
    p.add_argument("--max", type=float, default=10.0)
    p.add_argument("--step", type=float, default=0.1)

    p = add("rate", "design rate of a base matrix")
    p.add_argument("--base")

    p = add("search", "enumerate candidate base matrices")
    p.add_argument("--base", help="template file; '*' marks a free entry")
    p.add_argument("--shape", default="4x7")
    p.add_argument("--limit", type=int, default=1000, help="rows to print")
    p.add_argument("--count", action="store_true", help="also count the whole space")
    p.add_argument("--plain", action="store_true", help="only the entry domain and column-sum bounds")

    p = add("lift", "lift a base matrix to an alist code")
    p.add_argument("--base")
    p.add_argument("--factor", type=_positive_int)

    for name, help_text in (("threshold", "simulation-based P-EXIT threshold"), ("threshold-awgn", "closed-form AWGN P-EXIT threshold")):
        p = add(name, help_text)
        p.add_argument("--base")
        p.add_argument("--res", type=float, default=0.01)
        p.add_argument("--window", type=_window, default=(-2.0, 10.0), help="lo,hi in dB")
        p.add_argument("--max-iter", type=_positive_int, default=100 if name == "threshold" else 500, help="P-EXIT iterations per probe")
        if name == "threshold":
            p.add_argument("--alpha", type=float, default=1.8)
            p.add_argument("--samples", type=_positive_int, default=30000)
            p.add_argument("--cn-input", choices=("samples", "gaussian"), default="samples")

    p = add("awd", "asymptotic weight spectrum and typical minimum distance ratio")
    p.add_argument("--base")
    p.add_argument("--grid", type=float, default=1e-3)

    p = add("exit-curve", "VND EXIT curve")
    p.add_argument("--dv", type=_positive_int, default=3)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--ebn0", type=_floats)
    p.add_argument("--rate", type=_rate, default=Fraction(1, 2))
    p.add_argument("--samples", type=_positive_int, default=30000)
    p.add_argument("--grid", type=float, default=0.05, help="a-priori MI step")

    p = add("ber", "Monte-Carlo BER/FER")
    p.add_argument("--code", help="alist file")
    p.add_argument("--base")
    p.add_argument("--factor", type=_positive_int)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--ebn0", type=_floats)
    p.add_argument("--max-errors", type=_positive_int, default=100)
    p.add_argument("--max-iter", type=_positive_int, default=100)
    p.add_argument("--max-blocks", type=_positive_int, default=10_000_000)
    return parser


def _header(args) -> list[str]:
    # --threads is left out: it never changes the numbers, and the output must not depend on it
    flags = {k: v for k, v in sorted(vars(args).items()) if k not in ("command", "out", "threads")}
    shown = " ".join(f"--{k.replace('_', '-')}={_flag(v)}" for k, v in flags.items())
    return [f"# protosas {__version__}", f"# command: {args.command}", f"# flags: {shown}", f"# seed: {args.seed}"]


def _flag(v) -> str:
    if isinstance(v, (list, tuple)):
        return ",".join(_flag(x) for x in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        body = COMMANDS[args.command](args)
    except (UsageError, InvalidParameterError) as exc:
        parser.print_usage(sys.stderr)
        print(f"protosas {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError) as exc:
        print(f"protosas {args.command}: {exc}", file=sys.stderr)
        return 1
    text = "\n".join(_header(args) + body) + "\n"
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"protosas: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


def main():
    sys.exit(run_command())
