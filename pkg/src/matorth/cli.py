"""Command-line front end.

Subcommands: structure, verify, orthopoly, recurrence, norms, asymptotics,
export. Exit codes: 0 success, 1 verification failure, 2 configuration error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import closed_forms as cf
from .orthogonal import monic_sequence, orthonormalize_sequence, recurrence_from_sequence
from .suite import (RunConfig, export_tables, params_to_dict, run_parameter_sweep,
                    run_suite)
from .weights import WeightParams, build_structure

__all__ = ["main"]


def _parse_complex(token: str) -> complex:
    return complex(token.strip().replace("i", "j"))


def _parse_a(text: str) -> tuple[complex, ...]:
    try:
        return tuple(_parse_complex(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValueError(f"cannot parse --a {text!r}: {exc}") from None


def _parse_grid(text: str) -> tuple[float, ...]:
    try:
        lo, hi, count = text.split(":")
        return tuple(np.linspace(float(lo), float(hi), int(count)))
    except Exception:
        raise ValueError(f"--grid expects lo:hi:count, got {text!r}") from None


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--size", type=int, default=2, help="matrix size N (default 2)")
    parser.add_argument("--a", default="1",
                        help="comma-separated complex parameters, e.g. '1,0.5+0.5i'")
    parser.add_argument("--b", type=float, default=2.0, help="decay parameter (default 2)")
    parser.add_argument("--nmax", type=int, default=10, help="top polynomial degree")
    parser.add_argument("--grid", default="-3:3:11", help="evaluation grid lo:hi:count")
    parser.add_argument("--tol-abs", type=float, default=1e-10,
                        help="absolute tolerance anchor; scales all absolute checks")
    parser.add_argument("--tol-rel", type=float, default=1e-8,
                        help="relative tolerance anchor; scales all relative checks")
    parser.add_argument("--format", dest="fmt", choices=("json", "csv"), default="json")
    parser.add_argument("--out", default=None, help="output file (or directory for export)")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for randomized verification sweeps")


def _config(args) -> RunConfig:
    params = WeightParams(args.size, _parse_a(args.a), args.b)
    return RunConfig(params=params, nmax=args.nmax, t_grid=_parse_grid(args.grid),
                     tol_abs=args.tol_abs, tol_rel=args.tol_rel, fmt=args.fmt,
                     out=args.out, seed=args.seed)


def _print_matrix(name: str, m: np.ndarray):
    print(f"{name} =")
    with np.printoptions(precision=6, suppress=True, linewidth=120):
        print(np.array2string(m))


def _matrix_json(m: np.ndarray):
    return [[[v.real, v.imag] for v in row] for row in m]


def _cmd_structure(args) -> int:
    config = _config(args)
    s = build_structure(config.params)
    if config.out:
        doc = {"params": params_to_dict(config.params),
               "shift": _matrix_json(s.shift), "number": _matrix_json(s.number),
               "diag_scale": _matrix_json(s.diag_scale),
               "gauss_diag": _matrix_json(s.gauss_diag),
               "nilpotent": _matrix_json(s.nilpotent),
               "odd_coeffs": list(s.odd_coeffs)}
        with open(config.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        print(f"wrote {config.out}")
    else:
        for name in ("shift", "number", "diag_scale", "gauss_diag", "nilpotent"):
            _print_matrix(name, getattr(s, name))
        print(f"odd_coeffs = {list(s.odd_coeffs)}")
    return 0


def _cmd_verify(args) -> int:
    config = _config(args)
    summary = run_suite(config)
    if args.sweeps:
        sweep = run_parameter_sweep(args.sweeps, config.seed, config.t_grid)
        summary.checks.extend(sweep.checks)
    for c in summary.checks:
        if c.skipped:
            print(f"SKIP  {c.name:28s} ({c.note})")
        else:
            tag = "PASS" if c.passed else "FAIL"
            note = f"  [{c.note}]" if c.note else ""
            print(f"{tag}  {c.name:28s} residual={c.residual:.3e} "
                  f"tol={c.tolerance:.1e}{note}")
    print(f"overall: {'pass' if summary.overall else 'FAIL'} "
          f"({summary.total_seconds:.2f}s)")
    if config.out:
        with open(config.out, "w") as fh:
            json.dump(summary.to_dict(), fh, indent=1)
            fh.write("\n")
        print(f"wrote {config.out}")
    return 0 if summary.overall else 1


def _cmd_orthopoly(args) -> int:
    config = _config(args)
    seq = monic_sequence(config.params, config.nmax)
    if seq.truncation_reason:
        print(f"note: {seq.truncation_reason}", file=sys.stderr)
    for n, poly in enumerate(seq.polys):
        print(f"-- degree {n}, norm diagonal "
              f"{np.real(np.diag(seq.norms[n])).round(8).tolist()}")
        if args.coeffs:
            for k, c in enumerate(poly.coeffs):
                _print_matrix(f"P_{n} coeff t^{k}", c)
    if config.out:
        doc = {"params": params_to_dict(config.params),
               "polys": [[_matrix_json(c) for c in poly.coeffs]
                         for poly in seq.polys],
               "norms": [_matrix_json(m) for m in seq.norms]}
        with open(config.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        print(f"wrote {config.out}")
    return 0


def _cmd_recurrence(args) -> int:
    config = _config(args)
    seq = monic_sequence(config.params, config.nmax + 1)
    monic = recurrence_from_sequence(seq)
    orth, _ = orthonormalize_sequence(seq)
    for n in range(1, len(orth.A)):
        print(f"-- n={n}")
        _print_matrix("A_n", orth.A[n])
        if n < len(orth.B):
            _print_matrix("B_n", orth.B[n])
        _print_matrix("Chat_n", monic.C[n])
    print(f"max recurrence identity residual: {max(monic.residuals):.3e}")
    if config.out:
        doc = {"params": params_to_dict(config.params),
               "orthonormal_A": [_matrix_json(m) for m in orth.A],
               "orthonormal_B": [_matrix_json(m) for m in orth.B],
               "monic_Bhat": [_matrix_json(m) for m in monic.B],
               "monic_Chat": [_matrix_json(m) for m in monic.C],
               "residuals": list(monic.residuals)}
        with open(config.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        print(f"wrote {config.out}")
    return 0


def _cmd_norms(args) -> int:
    config = _config(args)
    seq = monic_sequence(config.params, config.nmax)
    doc = {"params": params_to_dict(config.params),
           "monic_norms": [_matrix_json(m) for m in seq.norms]}
    for n, m in enumerate(seq.norms):
        print(f"n={n}: diag {np.real(np.diag(m)).tolist()}")
    if config.params.size == 2:
        doc["closed_monic"] = []
        for n in range(len(seq.norms)):
            closed, _ = cf.closed_norms(config.params, n)
            doc["closed_monic"].append(_matrix_json(closed))
    if config.out:
        with open(config.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        print(f"wrote {config.out}")
    return 0


def _cmd_asymptotics(args) -> int:
    config = _config(args)
    p = config.params
    if p.size != 2:
        print("asymptotics are available only for size 2", file=sys.stderr)
        return 2
    if p.degenerate_b:
        print("no branch limit is defined at b = 1", file=sys.stderr)
        return 2
    rep = cf.asymptotic_report(p, horizon=args.horizon)
    _print_matrix("limit of A_n / sqrt(n)", rep.limit)
    for n in (1, 2, 5, 10, 20, 50, 100, args.horizon):
        if n <= args.horizon:
            print(f"n={n:4d}  error={rep.error_at(n):.6e}")
    if config.out:
        doc = {"params": params_to_dict(p),
               "limit": _matrix_json(rep.limit),
               "errors": [float(v) for v in rep.errors]}
        with open(config.out, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")
        print(f"wrote {config.out}")
    return 0


def _cmd_export(args) -> int:
    config = _config(args)
    manifest = export_tables(config)
    print(f"wrote {len(manifest['tables'])} tables to {config.out}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="matorth",
        description="Matrix-valued orthogonal polynomials for a Gaussian-type "
                    "weight family: construction, verification, tables.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("structure", help="print or export the structure matrices")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_structure)

    sp = sub.add_parser("verify", help="run the verification suite")
    _add_common(sp)
    sp.add_argument("--sweeps", type=int, default=0,
                    help="additionally verify this many random parameter draws")
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("orthopoly", help="monic orthogonal polynomials and norms")
    _add_common(sp)
    sp.add_argument("--coeffs", action="store_true", help="print every coefficient")
    sp.set_defaults(fn=_cmd_orthopoly)

    sp = sub.add_parser("recurrence", help="recurrence coefficient tables")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_recurrence)

    sp = sub.add_parser("norms", help="squared norms of the monic polynomials")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_norms)

    sp = sub.add_parser("asymptotics", help="recurrence coefficient asymptotics (size 2)")
    _add_common(sp)
    sp.add_argument("--horizon", type=int, default=200)
    sp.set_defaults(fn=_cmd_asymptotics)

    sp = sub.add_parser("export", help="write all tables to a directory")
    _add_common(sp)
    sp.set_defaults(fn=_cmd_export)

    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
