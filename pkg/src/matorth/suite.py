"""Verification suite and table export driving the whole library.

``run_suite`` executes every check the construction supports at the given
size (the 2x2 closed-form comparisons join in automatically), never letting
one failed check abort the rest, and returns a machine-readable summary.
``export_tables`` writes the recurrence/norm/normalizer tables in JSON or
CSV with deterministic bytes for a fixed configuration.
"""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import closed_forms as cf
from .linalg import MatrixPolynomial, max_abs
from .operator import (apply_operator, build_operator, check_chi_xi,
                       check_symmetry_equations, eigenvalue_matrix)
from .orthogonal import (monic_sequence, orthonormalize_sequence,
                         quadrature_oracle, recurrence_from_sequence)
from .sampling import draw_abel_case, draw_params
from .weights import (WeightParams, abel_identity_check, build_structure,
                      verify_structure_identities, weight_eval, weight_moment)

__all__ = ["CheckResult", "RunConfig", "VerificationSummary", "run_suite",
           "export_tables", "params_to_dict"]

# tolerance anchors; RunConfig scales them through tol_abs / tol_rel
BASE_ABS = 1e-10
BASE_REL = 1e-8


@dataclass(frozen=True)
class RunConfig:
    """Everything one suite run needs: parameters, depth, grid, tolerances."""

    params: WeightParams
    nmax: int = 10
    t_grid: tuple[float, ...] = tuple(np.linspace(-3.0, 3.0, 11))
    tol_abs: float = 1e-10
    tol_rel: float = 1e-8
    fmt: str = "json"
    out: str | None = None
    seed: int = 0

    def __post_init__(self):
        if self.nmax < 0:
            raise ValueError("nmax must be >= 0")
        if not self.t_grid:
            raise ValueError("the evaluation grid must not be empty")
        if self.fmt not in ("json", "csv"):
            raise ValueError(f"unknown format {self.fmt!r}")


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    skipped: bool = False
    note: str = ""
    seconds: float = 0.0


@dataclass
class VerificationSummary:
    params: WeightParams
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def overall(self) -> bool:
        return all(c.passed or c.skipped for c in self.checks)

    @property
    def total_seconds(self) -> float:
        return sum(c.seconds for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "params": params_to_dict(self.params),
            "checks": [{
                "name": c.name,
                "residual": c.residual,
                "tolerance": c.tolerance,
                "pass": bool(c.passed),
                "skipped": bool(c.skipped),
                "note": c.note,
                "seconds": c.seconds,
            } for c in self.checks],
            "overall": self.overall,
            "total_seconds": self.total_seconds,
        }


def _ri(c: complex) -> list[float]:
    return [float(c.real), float(c.imag)]


def params_to_dict(p: WeightParams) -> dict:
    return {"size": p.size, "a": [_ri(v) for v in p.a], "b": p.b}


def _rel_dev(x: np.ndarray, y: np.ndarray) -> float:
    return max_abs(x - y) / max(1.0, max_abs(x), max_abs(y))


def _poly_rel_dev(x: MatrixPolynomial, y: MatrixPolynomial) -> float:
    return (x - y).max_coeff() / max(1.0, x.max_coeff(), y.max_coeff())


def run_suite(config: RunConfig) -> VerificationSummary:
    """Execute every applicable check; per-check failures never abort the rest."""
    p = config.params
    grid = config.t_grid
    s_abs = config.tol_abs / BASE_ABS
    s_rel = config.tol_rel / BASE_REL
    summary = VerificationSummary(p)
    state: dict = {}

    def seq():
        if "seq" not in state:
            state["seq"] = monic_sequence(p, config.nmax + 1)
        return state["seq"]

    def run(name: str, tolerance: float, fn: Callable[[], tuple[float, str]],
            skip_reason: str | None = None):
        start = time.perf_counter()
        if skip_reason is not None:
            summary.checks.append(CheckResult(name, 0.0, tolerance, True,
                                              skipped=True, note=skip_reason))
            return
        try:
            residual, note = fn()
            passed = residual < tolerance
        except Exception as exc:  # a broken check must not stop the others
            residual, note, passed = math.inf, f"error: {exc}", False
        summary.checks.append(CheckResult(name, residual, tolerance, passed,
                                          note=note,
                                          seconds=time.perf_counter() - start))

    def c_structure():
        s = build_structure(p)
        ok = (s.odd_coeffs[0] == 1.0
              and np.all(np.real(np.diag(s.diag_scale)) > 0)
              and np.all(s.gauss_scales < 0)
              and max_abs(np.tril(s.shift)) == 0.0)
        if not ok:
            raise ArithmeticError("structure invariants violated")
        return 0.0, f"size {p.size}, series terms {len(s.odd_coeffs)}"

    def c_identities():
        worst, skipped = 0.0, ()
        for t in grid:
            rep = verify_structure_identities(p, t)
            worst = max(worst, rep.max_residual)
            skipped = rep.skipped
        note = f"skipped: {', '.join(skipped)}" if skipped else ""
        return worst, note

    def c_abel():
        rng = np.random.default_rng(config.seed)
        worst = 0.0
        for _ in range(50):
            k, z, w = draw_abel_case(rng)
            worst = max(worst, abel_identity_check(k, z, w)[2])
        return worst, "50 draws, k <= 30"

    def symmetry_report():
        if "sym" not in state:
            state["sym"] = check_symmetry_equations(p, grid)
        return state["sym"]

    def c_symmetry():
        return symmetry_report().max_residual, ""

    def c_boundary():
        return symmetry_report().boundary_value, "power-10 decay sample"

    def c_chi_xi():
        rep = check_chi_xi(p, grid)
        worst = max(rep.chi_hermitian_residual, rep.xi_offdiagonal_residual,
                    rep.xi_diagonal_residual)
        return worst, f"literal chi residual {rep.chi_literal_residual:.2e}"

    def c_oracle():
        worst = 0.0
        for m in range(0, min(30, 2 * config.nmax) + 1):
            exact = weight_moment(p, m)
            approx = quadrature_oracle(
                p, lambda t: t ** m * weight_eval(p, t)[1],
                degree_hint=m + 2 * p.size + 10)
            worst = max(worst, max_abs(approx - exact) / max(1.0, max_abs(exact)))
        return worst, ""

    def c_orthogonality():
        s = seq()
        worst = 0.0
        for n in range(len(s.polys)):
            for m in range(n):
                scale = math.sqrt(max_abs(s.norms[n]) * max_abs(s.norms[m]))
                worst = max(worst, max_abs(s.pairing(n, m)) / max(1.0, scale))
        note = s.truncation_reason or ""
        return worst, note

    def c_eigen():
        s = seq()
        op = build_operator(p)
        worst = 0.0
        for n in range(len(s.polys)):
            lam = eigenvalue_matrix(p, n)
            rhs = s.polys[n].lmul(lam)
            worst = max(worst, (apply_operator(op, s.polys[n]) - rhs).max_coeff()
                        / max(1.0, rhs.max_coeff()))
        return worst, ""

    def c_rodrigues_explicit():
        worst = 0.0
        for n in range(1, min(config.nmax, 12) + 1):
            worst = max(worst, _poly_rel_dev(cf.rodrigues_polynomial(p, n),
                                             cf.explicit_polynomial(p, n)))
        return worst, ""

    def c_recurrence_closed():
        s = seq()
        monic = recurrence_from_sequence(s)
        orth, _ = orthonormalize_sequence(s)
        tilde = cf.normalized_recurrence_from_moments(p, s)
        worst = 0.0
        top = min(len(s.polys) - 2, 15)
        for n in range(1, top + 1):
            a_cl, b_cl = cf.orthonormal_recurrence(p, n)
            rec = cf.recurrence_closed_forms(p, n)
            worst = max(worst,
                        _rel_dev(orth.A[n], a_cl), _rel_dev(orth.B[n], b_cl),
                        _rel_dev(monic.B[n], rec.monic_b),
                        _rel_dev(monic.C[n], rec.monic_c),
                        _rel_dev(tilde.A[n], rec.rodrigues_a),
                        _rel_dev(tilde.B[n], rec.rodrigues_b),
                        _rel_dev(tilde.C[n], rec.rodrigues_c))
        return worst, f"degrees 1..{top}"

    def c_recurrence_identity():
        table = recurrence_from_sequence(seq())
        return max(table.residuals), ""

    def c_norms():
        s = seq()
        worst = 0.0
        top = min(len(s.polys) - 1, 15)
        for n in range(top + 1):
            monic_cl, rodr_cl = cf.closed_norms(p, n)
            worst = max(worst, _rel_dev(s.norms[n], monic_cl))
            lead = cf.normalization(p, n).leading
            worst = max(worst, _rel_dev(lead @ s.norms[n] @ lead.conj().T, rodr_cl))
        return worst, f"degrees 0..{top}"

    def c_rodrigues_equation():
        worst = 0.0
        for n in range(1, min(config.nmax, 10) + 1):
            worst = max(worst, cf.rodrigues_pde_residual(p, n, grid))
        return worst, ""

    def c_asymptotics():
        rep = cf.asymptotic_report(p, horizon=200)
        err = rep.error_at(200)
        tail = rep.errors[19:]
        monotone = bool(np.all(np.diff(tail) <= 1e-15))
        note = "monotone from n=20" if monotone else "tail not monotone"
        return err if monotone else math.inf, note

    run("structure-build", 1.0, c_structure)
    run("structure-identities", BASE_ABS * s_abs, c_identities)
    run("abel-identity", 1e-12 * s_rel, c_abel)
    run("symmetry-equations", 1e-9 * s_abs, c_symmetry)
    run("boundary-decay", 1e-6, c_boundary)
    run("chi-xi", 1e-9 * s_abs, c_chi_xi)
    run("moment-oracle", 1e-9 * s_rel, c_oracle)
    run("monic-orthogonality", BASE_REL * s_rel, c_orthogonality)
    run("eigenvalue-equation", BASE_REL * s_rel, c_eigen)
    two = None if p.size == 2 else "closed forms exist only for size 2"
    run("recurrence-identity", 1e-9 * s_rel, c_recurrence_identity)
    run("rodrigues-explicit", 1e-9 * s_rel, c_rodrigues_explicit, two)
    run("recurrence-closed-forms", BASE_REL * s_rel, c_recurrence_closed, two)
    run("norm-closed-forms", BASE_REL * s_rel, c_norms, two)
    run("rodrigues-equation", BASE_ABS * s_abs, c_rodrigues_equation, two)
    asym_skip = two
    if asym_skip is None and p.degenerate_b:
        asym_skip = "no branch limit at b = 1"
    run("recurrence-asymptotics", 0.02, c_asymptotics, asym_skip)
    return summary


def run_parameter_sweep(count: int, seed: int,
                        grid: tuple[float, ...]) -> VerificationSummary:
    """Randomized-parameter verification: max residuals over ``count`` draws."""
    rng = np.random.default_rng(seed)
    draws = [draw_params(rng) for _ in range(count)]
    summary = VerificationSummary(draws[0]) if draws else VerificationSummary(
        WeightParams(2, (1.0,), 2.0))
    worst_idn = worst_sym = worst_chi = 0.0
    start = time.perf_counter()
    for p in draws:
        for t in (-2.0, 0.3, 1.9):
            worst_idn = max(worst_idn, verify_structure_identities(p, t).max_residual)
        worst_sym = max(worst_sym, check_symmetry_equations(p, grid).max_residual)
        rep = check_chi_xi(p, grid)
        worst_chi = max(worst_chi, rep.chi_hermitian_residual,
                        rep.xi_offdiagonal_residual, rep.xi_diagonal_residual)
    elapsed = time.perf_counter() - start
    note = f"{count} draws, seed {seed}"
    summary.checks.append(CheckResult("sweep-structure-identities", worst_idn,
                                      1e-10, worst_idn < 1e-10, note=note,
                                      seconds=elapsed))
    summary.checks.append(CheckResult("sweep-symmetry-equations", worst_sym,
                                      1e-9, worst_sym < 1e-9, note=note))
    summary.checks.append(CheckResult("sweep-chi-xi", worst_chi, 1e-9,
                                      worst_chi < 1e-9, note=note))
    return summary


# -- table export -------------------------------------------------------------

def _matrix_to_json(m: np.ndarray) -> list:
    return [[_ri(v) for v in row] for row in m]


def _flatten_header(dim: int) -> list[str]:
    cols = []
    for i in range(dim):
        for j in range(dim):
            cols.extend([f"e{i}{j}_re", f"e{i}{j}_im"])
    return cols


def _flatten_matrix(m: np.ndarray) -> list[str]:
    vals = []
    for i in range(m.shape[0]):
        for j in range(m.shape[1]):
            vals.extend([f"{m[i, j].real:.17g}", f"{m[i, j].imag:.17g}"])
    return vals


def export_tables(config: RunConfig) -> dict:
    """Write every table for the configuration; returns the manifest.

    ``config.out`` names a directory; each table becomes one JSON document or
    one CSV file. Output bytes are deterministic for a fixed configuration.
    """
    if not config.out:
        raise ValueError("export needs an output directory (--out)")
    p = config.params
    out_dir = Path(config.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    seq = monic_sequence(p, config.nmax + 1)
    monic = recurrence_from_sequence(seq)
    orth, deltas = orthonormalize_sequence(seq)

    tables: dict[str, dict] = {}

    def add(name: str, data: list, start_index: int, kind: str = "matrix"):
        tables[name] = {"start_index": start_index, "kind": kind, "data": data}

    rows = len(monic.B)
    add("monic_Bhat", [monic.B[n] for n in range(rows)], 0)
    add("monic_Chat", [monic.C[n] for n in range(1, rows + 1)], 1)
    add("monic_norms", [seq.norms[n] for n in range(len(seq.norms))], 0)
    add("orthonormal_A", [orth.A[n] for n in range(1, len(orth.A))], 1)
    add("orthonormal_B", [orth.B[n] for n in range(len(orth.B))], 0)
    add("orthonormal_C", [orth.C[n] for n in range(1, len(orth.C))], 1)
    add("normalizers", list(deltas), 0)
    poly_rows = []
    for n, poly in enumerate(seq.polys):
        for k, c in enumerate(poly.coeffs):
            poly_rows.append((n, k, c))
    add("monic_polys", poly_rows, 0, kind="poly")

    if p.size == 2:
        add("gamma", [cf.gamma_value(p, n) for n in range(len(seq.polys))], 0,
            kind="scalar")
        add("Delta", [cf.normalization(p, n).delta for n in range(len(seq.polys))], 0)
        add("G", [cf.normalization(p, n).gauge for n in range(len(seq.polys))], 0)
        tilde = cf.normalized_recurrence_from_moments(p, seq)
        add("normalized_Atilde", [tilde.A[n] for n in range(1, len(tilde.A))], 1)
        add("normalized_Btilde", [tilde.B[n] for n in range(len(tilde.B))], 0)
        add("normalized_Ctilde", [tilde.C[n] for n in range(1, len(tilde.C))], 1)

    manifest = {"params": params_to_dict(p), "format": config.fmt,
                "nmax": config.nmax, "tables": {}}
    for name, layout in tables.items():
        fname = f"{name}.{config.fmt}"
        path = out_dir / fname
        if config.fmt == "json":
            _write_json_table(path, p, name, layout)
        else:
            _write_csv_table(path, p, name, layout)
        manifest["tables"][name] = fname
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest


def _write_json_table(path: Path, p: WeightParams, name: str, layout: dict):
    doc = {"params": params_to_dict(p), "table": name,
           "start_index": layout["start_index"]}
    if layout["kind"] == "matrix":
        doc["data"] = [_matrix_to_json(m) for m in layout["data"]]
    elif layout["kind"] == "scalar":
        doc["data"] = [float(v) for v in layout["data"]]
    else:  # poly: rows (n, k, matrix)
        doc["data"] = [{"n": n, "power": k, "coeff": _matrix_to_json(c)}
                       for n, k, c in layout["data"]]
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _write_csv_table(path: Path, p: WeightParams, name: str, layout: dict):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        if layout["kind"] == "matrix":
            writer.writerow(["n"] + _flatten_header(p.size))
            for off, m in enumerate(layout["data"]):
                writer.writerow([layout["start_index"] + off] + _flatten_matrix(m))
        elif layout["kind"] == "scalar":
            writer.writerow(["n", name])
            for off, v in enumerate(layout["data"]):
                writer.writerow([layout["start_index"] + off, f"{float(v):.17g}"])
        else:
            writer.writerow(["n", "power"] + _flatten_header(p.size))
            for n, k, c in layout["data"]:
                writer.writerow([n, k] + _flatten_matrix(c))
