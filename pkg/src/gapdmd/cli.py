"""Command-line interface.

Subcommands: ``gen``, ``ip``, ``specgram``, ``fit``, ``select``, ``diag``.
Exit codes: 0 success, 2 usage error, 3 invalid data or parameters,
4 numerical failure.
"""
from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__
from .datagen import GeneratorSpec, generate
from .dmd import fit_window, modes, stack_lagged, write_coeffs_csv, write_eigenvalues_csv, write_modes
from .errors import GapDMDError, SizeError
from .innovation import (
    ip_profile,
    read_spectrogram_csv,
    spectrogram,
    write_profile_csv,
    write_spectrogram_csv,
)
from .matstore import FORMATS, format_float, load_matrix, save_matrix, write_text
from .select import conditioning_report, recommend_order, sensitivity_table
from .subspace import DEFAULT_RANK_TOL
from .svg import eigenvalue_plot, heatmap, line_plot

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("-i", "--input", help="input matrix file")
    p.add_argument("-o", "--output", help="output file (stdout when omitted, where applicable)")
    p.add_argument("--format", choices=FORMATS, help="matrix file format (default: by extension)")
    p.add_argument("--svg", help="write an SVG figure to this path")
    p.add_argument("--seed", type=int, help="random seed (default 0)")
    p.add_argument("--quiet", action="store_true", help="suppress warnings on stderr")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="gapdmd", description="Gap-metric model-order selection for DMD.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("gen", parents=[common], help="generate synthetic snapshots")
    p.add_argument("--spec", help="JSON generator spec; explicit flags override its fields")
    p.add_argument("--n", dest="N", type=int, help="state dimension N")
    p.add_argument("--len", dest="L", type=int, help="number of snapshots L")
    p.add_argument("--period", dest="periods", type=int, action="append", help="period (repeatable)")
    p.add_argument("--amplitude", dest="amplitudes", type=float, action="append", help="amplitude per period")
    p.add_argument("--noise", dest="noise_rel", type=float, help="relative noise level")
    p.add_argument("--kind", choices=("periodic_field", "linear_system"))

    p = sub.add_parser("ip", parents=[common], help="innovation-parameter profile r_k")
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--k-max", type=int)
    p.add_argument("--method", choices=("svd", "recursive"), default="svd")
    p.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)

    p = sub.add_parser("specgram", parents=[common], help="gap spectrogram r[l, k]")
    _specgram_flags(p)

    p = sub.add_parser("fit", parents=[common], help="companion DMD fit")
    p.add_argument("--n", type=int, required=True, help="window size n (uses n-1 predictor snapshots)")
    p.add_argument("--start", type=int, default=1)
    p.add_argument("--lags", type=int, default=0, help="stack this many lagged copies before fitting")
    p.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)
    p.add_argument("--coeffs", help="write the coefficient CSV here")
    p.add_argument("--modes", help="write modes (gdmd + JSON sidecar) here")

    p = sub.add_parser("select", parents=[common], help="recommend the window size n")
    p.add_argument("--specgram", help="use a spectrogram CSV instead of computing one from --input")
    _specgram_flags(p)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--strong-fraction", type=float, default=2.0 / 3.0)
    p.add_argument("--strong-depth", type=float, default=10.0)
    p.add_argument("--weak-depth", type=float, default=3.0)
    p.add_argument("--tie-tol", type=float, default=1e-10)

    p = sub.add_parser("diag", parents=[common], help="conditioning report and sensitivity table")
    p.add_argument("--k-max", type=int)
    p.add_argument("--colinear-tol", type=float, default=1e-8)
    p.add_argument("--prop-table", help="write the perturbation-sensitivity table CSV here")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--dim", type=int, default=20)
    return parser


def _specgram_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--l-max", type=int, help="number of starting indices (default min(50, L-2))")
    p.add_argument("--k-max", type=int, help="largest window size (default L-2)")
    p.add_argument("--method", choices=("svd", "recursive"), default="svd")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)


def _load(args):
    if not args.input:
        raise UsageError("the following arguments are required: -i/--input")
    return load_matrix(args.input, args.format)


def cmd_gen(args) -> None:
    if not args.output:
        raise UsageError("the following arguments are required: -o/--output")
    fields = {}
    if args.spec:
        fields.update(GeneratorSpec.from_json(Path(args.spec).read_text(encoding="utf-8")).__dict__)
    for name in ("N", "L", "periods", "amplitudes", "noise_rel", "kind"):
        value = getattr(args, name)
        if value is not None:
            fields[name] = value
    if args.seed is not None or "seed" not in fields:
        fields["seed"] = args.seed or 0
    if "N" not in fields or "L" not in fields:
        raise UsageError("--n and --len are required unless given in --spec")
    save_matrix(generate(GeneratorSpec(**fields)), args.output, args.format)


def cmd_ip(args) -> None:
    m = _load(args)
    profile = ip_profile(m, args.start, args.k_max, method=args.method, rel_tol=args.rank_tol)
    write_profile_csv(profile, args.output or sys.stdout)
    if args.svg:
        title = f"innovation parameters, start {args.start} ({args.method})"
        Path(args.svg).write_text(line_plot(profile.ks, profile.values, title), encoding="utf-8")


def _specgram_from_args(args, m):
    l_max = args.l_max if args.l_max is not None else min(50, m.L - 2)
    k_max = args.k_max if args.k_max is not None else m.L - 2
    return spectrogram(m, l_max, k_max, method=args.method, workers=args.workers, rel_tol=args.rank_tol)


def cmd_specgram(args) -> None:
    sg = _specgram_from_args(args, _load(args))
    write_spectrogram_csv(sg, args.output or sys.stdout)
    if args.svg:
        Path(args.svg).write_text(heatmap(sg.values, "gap spectrogram"), encoding="utf-8")


def cmd_fit(args) -> None:
    m = _load(args)
    if args.lags:
        m = stack_lagged(m, args.lags)
    model = fit_window(m, args.start, args.n, rel_tol=args.rank_tol)
    write_eigenvalues_csv(model.eigenvalues, args.output or sys.stdout)
    if args.coeffs:
        write_coeffs_csv(model, args.coeffs)
    if args.svg:
        Path(args.svg).write_text(eigenvalue_plot(model.eigenvalues, f"DMD eigenvalues, n={args.n}"), encoding="utf-8")
    if args.modes:
        write_modes(modes(m, model), args.modes)


def cmd_select(args) -> None:
    if args.specgram:
        sg = read_spectrogram_csv(args.specgram)
    else:
        sg = _specgram_from_args(args, _load(args))
    rec = recommend_order(
        sg,
        k_min=args.k_min,
        strong_fraction=args.strong_fraction,
        strong_depth=args.strong_depth,
        weak_depth=args.weak_depth,
        tie_tol=args.tie_tol,
    )
    write_text(rec.to_json() + "\n", args.output or sys.stdout)


def cmd_diag(args) -> None:
    m = _load(args)
    rep = conditioning_report(m, args.k_max, args.colinear_tol)
    lines = ["k,condition,colinear"] + [
        f"{k},{format_float(c) if np.isfinite(c) else 'inf'},{int(f)}"
        for k, c, f in zip(rep.ks, rep.condition, rep.colinear)
    ]
    write_text("\n".join(lines) + "\n", args.output or sys.stdout)
    if args.prop_table:
        table = sensitivity_table(args.trials, args.dim, args.seed or 0)
        rows = ["trial,lhs,rhs,abs_diff"] + [
            f"{i},{format_float(a)},{format_float(b)},{format_float(d)}" for i, (a, b, d) in enumerate(table, start=1)
        ]
        Path(args.prop_table).write_text("\n".join(rows) + "\n", encoding="utf-8")


COMMANDS = {
    "gen": cmd_gen,
    "ip": cmd_ip,
    "specgram": cmd_specgram,
    "fit": cmd_fit,
    "select": cmd_select,
    "diag": cmd_diag,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    def fail(code: int, msg: str) -> int:
        sys.stderr.write(f"gapdmd {args.command}: error: {' '.join(str(msg).split())}\n")
        return code

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            COMMANDS[args.command](args)
            code = EXIT_OK
        except UsageError as exc:
            sys.stderr.write(f"usage: gapdmd {args.command} [options]\n")
            code = fail(EXIT_USAGE, exc)
        except SizeError as exc:
            code = fail(EXIT_NUMERIC, exc)
        except (GapDMDError, OSError, ValueError) as exc:
            code = fail(EXIT_DATA, exc)
        except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
            code = fail(EXIT_NUMERIC, exc)
    if not args.quiet:
        for w in caught:
            sys.stderr.write(f"gapdmd {args.command}: warning: {w.message}\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
