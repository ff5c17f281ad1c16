"""Monic orthogonal matrix polynomials from exact moments, their recurrence
tables, orthonormalization, and an independent quadrature oracle.

The construction itself runs in high precision (see :mod:`matorth._mp`);
everything returned here is ordinary complex128. The quadrature oracle is
kept deliberately independent of the exact-moment path so the two can
cross-check each other.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import roots_hermite

from . import _mp
from .linalg import MatrixPolynomial, hermitian_residual, max_abs
from .weights import WeightParams, weight_moment

__all__ = [
    "MonicSequence",
    "RecurrenceTable",
    "monic_sequence",
    "orthonormalize_sequence",
    "quadrature_oracle",
    "recurrence_from_sequence",
]

# The build runs at _mp.DPS digits, so its results stay double-accurate while
# the equilibrated moment system condition is below ~10**(DPS - 20); beyond
# that the sequence truncates rather than degrade silently.
COND_LIMIT = 10.0 ** (_mp.DPS - 20)
DEFAULT_NMAX = 25


@dataclass(frozen=True)
class MonicSequence:
    """Degree-graded monic orthogonal polynomials with their squared norms.

    ``polys[n]`` has exact leading coefficient I and ``norms[n]`` is the
    Hermitian positive definite matrix ``integral P_n W P_n*``. If the build
    stopped early, ``truncated_at`` names the first degree that could not be
    produced and ``truncation_reason`` says why.
    """

    params: WeightParams
    polys: tuple[MatrixPolynomial, ...]
    norms: tuple[np.ndarray, ...]
    truncated_at: int | None = None
    truncation_reason: str | None = None

    @property
    def top_degree(self) -> int:
        return len(self.polys) - 1

    def pairing(self, i: int, j: int) -> np.ndarray:
        """``integral P_i W P_j*`` evaluated through the exact-moment path."""
        return _mp.family(self.params).pair_float(i, j)


@dataclass(frozen=True)
class RecurrenceTable:
    """Per-degree coefficient triples (A_n, B_n, C_n) of one recurrence gauge.

    ``kind`` is "monic", "orthonormal" or "rodrigues-normalized". Entries at
    index 0 of A and C pad the table (the recurrence row n uses A_{n+1}, B_n
    and C_n). ``residuals`` holds the per-row recurrence identity residual,
    normalized by the row's coefficient scale, when it was measured.
    """

    kind: str
    A: tuple[np.ndarray, ...]
    B: tuple[np.ndarray, ...]
    C: tuple[np.ndarray, ...]
    residuals: tuple[float, ...] | None = None


def _hankel_condition(p: WeightParams, deg: int) -> float:
    """Condition estimate of the diagonally equilibrated block moment matrix
    (blocks S_{j+k}, j,k <= deg). Raw moments span hundreds of orders of
    magnitude, so the unequilibrated condition number would say nothing."""
    n = p.size
    size = (deg + 1) * n
    h = np.empty((size, size), dtype=complex)
    for j in range(deg + 1):
        for k in range(deg + 1):
            h[j * n:(j + 1) * n, k * n:(k + 1) * n] = weight_moment(p, j + k)
    d = np.sqrt(np.abs(np.real(np.diag(h))))
    d[d == 0] = 1.0
    h = h / np.outer(d, d)
    return float(np.linalg.cond(h))


_sequence_cache: dict[tuple[WeightParams, int], MonicSequence] = {}


def monic_sequence(p: WeightParams, nmax: int = DEFAULT_NMAX) -> MonicSequence:
    """Build the monic orthogonal sequence up to degree ``nmax``.

    Degrees stop early (with a diagnostic, never a silent regularization)
    if the equilibrated moment system's condition estimate passes 1e12 or a
    squared norm stops being positive definite.
    """
    if nmax < 0:
        raise ValueError("nmax must be >= 0")
    cached = _sequence_cache.get((p, nmax))
    if cached is not None:
        return cached
    fam = _mp.family(p)
    truncated_at = None
    reason = None
    built = len(fam.polys) - 1
    for deg in range(built + 1, nmax + 1):
        cond = _hankel_condition(p, deg)
        if cond > COND_LIMIT:
            truncated_at = deg
            reason = (f"moment system condition estimate {cond:.3e} exceeds "
                      f"{COND_LIMIT:.0e} at degree {deg}")
            break
        try:
            fam.extend(deg)
        except ArithmeticError as exc:
            truncated_at = deg
            reason = f"norm positive definiteness lost at degree {deg}: {exc}"
            break
    top = min(len(fam.polys) - 1, nmax)
    polys = tuple(MatrixPolynomial(fam.poly_float(k)) for k in range(top + 1))
    norms = tuple(fam.norm_float(k) for k in range(top + 1))
    seq = MonicSequence(p, polys, norms, truncated_at, reason)
    _sequence_cache[(p, nmax)] = seq
    return seq


def recurrence_from_sequence(seq: MonicSequence) -> RecurrenceTable:
    """Extract the monic recurrence ``t P_n = P_{n+1} + B_n P_n + C_n P_{n-1}``.

    B_n comes from comparing subleading coefficients, C_n from the norm
    quotient; each row's identity residual is measured on the returned
    double-precision data.
    """
    count = len(seq.polys)
    if count < 2:
        raise ValueError("need at least two polynomials to read a recurrence")
    fam = _mp.family(seq.params)
    n = seq.params.size
    eye = np.eye(n, dtype=complex)
    rows = count - 1
    a = tuple(eye.copy() for _ in range(count))
    b = tuple(_mp.to_complex(fam.monic_b(k)) for k in range(rows))
    c = (np.zeros((n, n), dtype=complex),) + tuple(
        _mp.to_complex(fam.monic_c(k)) for k in range(1, count))
    residuals = []
    for k in range(rows):
        shifted = MatrixPolynomial.monomial(eye, 1) * seq.polys[k]
        resid = shifted - seq.polys[k + 1] - seq.polys[k].lmul(b[k])
        if k >= 1:
            resid = resid - seq.polys[k - 1].lmul(c[k])
        residuals.append(resid.max_coeff() / max(1.0, shifted.max_coeff()))
    return RecurrenceTable("monic", a, b, c, tuple(residuals))


def orthonormalize_sequence(seq: MonicSequence) -> tuple[RecurrenceTable, tuple[np.ndarray, ...]]:
    """Normalizers and the orthonormal recurrence.

    The normalizer Delta_n is the inverse of the upper-triangular Cholesky
    factor of the squared norm; that factor is diagonal whenever the norm is
    diagonal, which pins the gauge so closed forms can be compared entry by
    entry. Returns the orthonormal table (C_n = A_n* by construction) and
    the Delta_n sequence.
    """
    count = len(seq.polys)
    fam = _mp.family(seq.params)
    n = seq.params.size
    with _mp.mp.workdps(_mp.DPS):
        deltas_mp = [fam.delta(k) for k in range(count)]
        chols_mp = [_mp._minv(d, n) for d in deltas_mp]
        a = [np.zeros((n, n), dtype=complex)]
        for k in range(1, count):
            a.append(_mp.to_complex(_mp._mmul(deltas_mp[k - 1], chols_mp[k], n)))
        b = []
        for k in range(count - 1):
            bd = _mp._mmul(_mp._mmul(deltas_mp[k], fam.monic_b(k), n), chols_mp[k], n)
            b.append(_mp.to_complex(bd))
    deltas = tuple(_mp.to_complex(d) for d in deltas_mp)
    for k, bk in enumerate(b):
        if hermitian_residual(bk) > 1e-6 * max(1.0, max_abs(bk)):
            raise ArithmeticError(
                f"orthogonalization defect: B_{k} is not Hermitian")
    c = tuple(m.conj().T for m in a)
    return RecurrenceTable("orthonormal", tuple(a), tuple(b), c), deltas


def _lifted_hermite_rule(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes x_i and total weights w_i exp(x_i**2) of the m-point rule.

    The lifted weight equals 1 / (m * h_{m-1}(x_i)**2) with h_k the
    orthonormal Hermite functions, evaluated by their recurrence with
    per-node renormalization, so no intermediate can overflow at any m.
    """
    nodes, _ = roots_hermite(m)
    v_prev = np.full_like(nodes, math.pi ** -0.25)
    log_scale = -0.5 * nodes ** 2
    v = math.sqrt(2.0) * nodes * v_prev
    for k in range(1, m - 1):
        v, v_prev = (math.sqrt(2.0 / (k + 1)) * nodes * v
                     - math.sqrt(k / (k + 1.0)) * v_prev), v
        big = np.abs(v) > 1e120
        if np.any(big):
            v[big] *= 1e-120
            v_prev[big] *= 1e-120
            log_scale[big] += math.log(1e120)
    log_h2 = 2.0 * (np.log(np.abs(v)) + log_scale)
    return nodes, np.exp(-math.log(m) - log_h2)


def quadrature_oracle(p: WeightParams, integrand: Callable[[float], np.ndarray],
                      degree_hint: int = 64, report_delta: bool = False):
    """Gauss-Hermite cross-check of weight-type integrals.

    Substitutes u = sqrt(c) t at the slowest Gaussian scale c = min(1, b)
    present in the weight, making the slowest component a polynomial (caught
    exactly) and every other component an entire Gaussian. Components at a
    faster scale shrink by the scale ratio after substitution, so the rule
    size grows with max(b, 1/b). The difference between the M and 2M rules
    is the reported accuracy when ``report_delta`` is set. Only used to
    verify the exact-moment path, never to feed it.
    """
    c = min(1.0, p.b)
    root_c = math.sqrt(c)
    ratio = max(p.b, 1.0 / p.b)

    def estimate(m: int) -> np.ndarray:
        # summing exact +/- node pairs lets the integrand's odd part cancel
        # bit-exactly instead of at eps times its (possibly huge) magnitude
        nodes, lifted = _lifted_hermite_rule(m)
        total = np.zeros((p.size, p.size), dtype=complex)
        for x, lw in zip(nodes, lifted / root_c):
            if x > 0.0:
                t = x / root_c
                total = total + lw * (integrand(t) + integrand(-t))
            elif x == 0.0:
                total = total + lw * integrand(0.0)
        return total

    m = int(max(degree_hint, 64) * max(1.0, ratio))
    coarse = estimate(m)
    fine = estimate(2 * m)
    if report_delta:
        return fine, max_abs(fine - coarse)
    return fine
