"""Command-line interface.

Subcommands:

``ber``          Monte-Carlo BER vs SNR, CSV out.
``sweep``        BER over a grid of c1 or c2 values at one SNR, CSV out.
``xform-check``  Transform oracle-equivalence suite; exits nonzero on failure.

Waveform selection (first match wins): explicit ``--c1``/``--c2``, a chirp
slope ``--k``, or a named ``--waveform`` (afdm derives c1 from
``--alpha-max`` via the delay-Doppler separation rule).

A config file of ``key = value`` lines (keys are the long flag names,
``-`` or ``_`` both fine, ``#`` comments) can hold any flags; explicit
flags override the file.  Grid and SNR specs accept ``lo:step:hi`` with
simple arithmetic in each part, where ``N`` stands for the subcarrier
count: ``--grid 0:1/(4N):1``.
"""

from __future__ import annotations

import argparse
import re
import sys

from .channel import ChannelSpec
from .harness import SimConfig, emit_csv, run_ber, sweep_parameter
from .waveform import WaveformParams, afdm_c1_rule, default_c2, params_from_slope
from .xform import oracle_check

_EXPR_ALLOWED = re.compile(r"^[0-9eEN\.\+\-\*/\(\) ]+$")


def _eval_expr(text: str, n: int | None) -> float:
    """Evaluate a small arithmetic expression, with N = subcarrier count.

    Implied multiplication next to N is accepted, so ``1/(4N)`` works.
    """
    text = text.strip()
    if not text or not _EXPR_ALLOWED.match(text):
        raise ValueError(f"cannot parse numeric expression {text!r}")
    expr = re.sub(r"(\d|\))\s*N", r"\1*N", text)
    expr = re.sub(r"N\s*(\d|\()", r"N*\1", expr)
    names = {"N": n} if n is not None else {}
    try:
        return float(eval(expr, {"__builtins__": {}}, names))  # noqa: S307
    except Exception as exc:
        raise ValueError(f"cannot parse numeric expression {text!r}: {exc}") from None


def parse_range(spec: str, n: int | None = None) -> list:
    """Expand ``lo:step:hi`` (inclusive ends) or a single value to floats."""
    parts = spec.split(":")
    if len(parts) == 1:
        return [_eval_expr(parts[0], n)]
    if len(parts) != 3:
        raise ValueError(f"range must be 'lo:step:hi' or a single value, got {spec!r}")
    lo, step, hi = (_eval_expr(p, n) for p in parts)
    if step <= 0:
        raise ValueError(f"range step must be positive, got {step}")
    if hi < lo:
        raise ValueError(f"range end {hi} is below start {lo}")
    count = int((hi - lo) / step + 1e-9) + 1
    return [lo + i * step for i in range(count)]


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key = value file of flag defaults")
    parser.add_argument("--waveform", choices=["ofdm", "ocdm", "afdm"])
    parser.add_argument("--k", type=float, help="chirp slope (overrides --waveform)")
    parser.add_argument("--c1", type=float, help="explicit chirp rate c1")
    parser.add_argument("--c2", type=float, help="explicit chirp rate c2")
    parser.add_argument("--n", type=int, default=256, help="subcarriers (default 256)")
    parser.add_argument(
        "--mod", default="4qam", choices=["bpsk", "qpsk", "4qam", "16qam"]
    )
    parser.add_argument("--detector", default="lmmse", choices=["lmmse", "mp"])
    parser.add_argument("--paths", type=int, help="path count (delays 0..P-1 unless --delays)")
    parser.add_argument("--delays", default="0,1,2", help="comma list of path delays")
    parser.add_argument("--alpha-max", type=float, default=2.0)
    parser.add_argument(
        "--doppler",
        default="jakes",
        help="jakes, integer, or comma list of fixed Doppler values",
    )
    parser.add_argument(
        "--gains", help="comma list of fixed complex path gains (default Rayleigh)"
    )
    parser.add_argument("--l-cpp", type=int, help="prefix length (default delay spread)")
    parser.add_argument("--min-bits", type=int, default=1_000_000)
    parser.add_argument("--max-frames", type=int, default=1_000_000)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1, help="worker threads per SNR point")
    parser.add_argument("--out", default="results.csv", help="CSV destination ('-' for stdout)")
    parser.add_argument("--mp-iters", type=int, default=30)
    parser.add_argument("--mp-damping", type=float, default=0.6)
    parser.add_argument("--mp-prune", type=float, default=1e-3)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="daftsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    ber = sub.add_parser("ber", help="Monte-Carlo BER vs SNR")
    _add_common(ber)
    ber.add_argument("--snr", default="0:2:30", help="SNR grid lo:step:hi in dB, or one value")

    sweep = sub.add_parser("sweep", help="BER over a c1 or c2 grid at fixed SNR")
    _add_common(sweep)
    sweep.add_argument("--target", required=True, choices=["c1", "c2"])
    sweep.add_argument("--grid", help="grid lo:step:hi (N allowed, e.g. 0:1/(4N):1)")
    sweep.add_argument("--grid-list", help="explicit comma list of grid values")
    sweep.add_argument("--snr-db", type=float, default=20.0)

    check = sub.add_parser("xform-check", help="transform oracle-equivalence suite")
    check.add_argument("--sizes", default="4,16,64,256", help="comma list of sizes")
    check.add_argument("--seed", type=int, default=0)
    return parser


def _read_config_file(path: str) -> list:
    """Turn ``key = value`` lines into an argv prefix (flags still win)."""
    argv = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SystemExit(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            argv += [f"--{key.replace('_', '-')}", value]
    return argv


def _apply_config_file(argv: list) -> list:
    """Splice config-file flags in right after the subcommand."""
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    try:
        path = argv[idx + 1]
    except IndexError:
        raise SystemExit("--config needs a file argument") from None
    head, tail = argv[:1], argv[1:]
    return head + _read_config_file(path) + tail


def _waveform_from_args(args) -> WaveformParams:
    if args.c1 is not None:
        c2 = args.c2 if args.c2 is not None else default_c2(args.n)
        return WaveformParams(n=args.n, c1=args.c1, c2=float(c2))
    if args.k is not None:
        return params_from_slope(args.k, args.n, c2=args.c2)
    name = args.waveform or "afdm"
    if name == "ofdm":
        return params_from_slope(0.0, args.n, c2=args.c2)
    if name == "ocdm":
        return params_from_slope(1.0, args.n, c2=args.c2)
    c1 = afdm_c1_rule(int(round(args.alpha_max)), args.n)
    c2 = args.c2 if args.c2 is not None else default_c2(args.n)
    return WaveformParams(n=args.n, c1=c1, c2=float(c2))


def _channel_from_args(args) -> ChannelSpec:
    delays = tuple(int(d) for d in args.delays.split(","))
    if args.paths is not None and args.paths != len(delays):
        delays = tuple(range(args.paths))
    doppler = args.doppler
    if doppler not in ("jakes", "integer"):
        doppler = tuple(float(v) for v in doppler.split(","))
    gains = "rayleigh"
    if args.gains:
        gains = tuple(complex(v) for v in args.gains.split(","))
    return ChannelSpec(
        delays=delays,
        alpha_max=args.alpha_max,
        doppler_model=doppler,
        gain_model=gains,
    )


def _sim_config(args, snr_list) -> SimConfig:
    return SimConfig(
        params=_waveform_from_args(args),
        modulation=args.mod,
        detector=args.detector,
        channel=_channel_from_args(args),
        snr_db_list=tuple(snr_list),
        min_bits=args.min_bits,
        max_frames=args.max_frames,
        master_seed=args.seed,
        l_cpp=args.l_cpp,
        mp_iters=args.mp_iters,
        mp_damping=args.mp_damping,
        mp_prune=args.mp_prune,
    )


def _write_out(records, out: str) -> None:
    if out == "-":
        emit_csv(records, sys.stdout)
    else:
        emit_csv(records, out)


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _apply_config_file(argv)
    args = _build_parser().parse_args(argv)

    if args.command == "xform-check":
        sizes = tuple(int(s) for s in args.sizes.split(","))
        failures = oracle_check(sizes=sizes, seed=args.seed)
        if failures:
            for failure in failures:
                print(f"FAIL {failure}")
            print(f"xform-check: {len(failures)} failure(s)")
            return 1
        print(f"xform-check: all transform oracles agree (sizes {args.sizes})")
        return 0

    if args.command == "ber":
        snr_list = parse_range(args.snr, args.n)
        cfg = _sim_config(args, snr_list)
        records = run_ber(cfg, jobs=args.jobs)
        _write_out(records, args.out)
        return 0

    if args.command == "sweep":
        if (args.grid is None) == (args.grid_list is None):
            raise SystemExit("sweep needs exactly one of --grid or --grid-list")
        if args.grid is not None:
            grid = parse_range(args.grid, args.n)
        else:
            grid = [_eval_expr(v, args.n) for v in args.grid_list.split(",")]
        cfg = _sim_config(args, [args.snr_db])
        records = sweep_parameter(cfg, args.target, grid, args.snr_db, jobs=args.jobs)
        _write_out(records, args.out)
        return 0

    raise SystemExit(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
