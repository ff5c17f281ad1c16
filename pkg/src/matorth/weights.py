"""The Gaussian-type weight family: structure matrices, pointwise evaluation,
exact moments and the algebraic identities the construction rests on.

A family member of size N is described by N-1 nonzero complex parameters
``a_1..a_{N-1}`` and one positive real parameter ``b``. The weight density is
``W(t) = T(t) T(t)*`` where ``T(t)`` is a polynomial factor (the exponential
of a nilpotent matrix times t) times a diagonal Gaussian factor. ``b = 1`` is
accepted but degenerate: the series defining the nilpotent generator then
truncates to its first term.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gausserf import GAUSS, GaussErfMatrix, atom
from .linalg import MatrixPolynomial, max_abs, nilpotent_exp

__all__ = [
    "IdentityReport",
    "StructureMatrices",
    "WeightParams",
    "abel_identity_check",
    "alpha_coeff",
    "build_structure",
    "moment_pairing",
    "verify_structure_identities",
    "weight_eval",
    "weight_inverse_2x2",
    "weight_moment",
    "weight_symbolic",
]


@dataclass(frozen=True)
class WeightParams:
    """Free data of one family member: size, off-diagonal parameters, decay."""

    size: int
    a: tuple[complex, ...]
    b: float

    def __post_init__(self):
        if self.size < 2:
            raise ValueError(f"size must be >= 2, got {self.size}")
        object.__setattr__(self, "a", tuple(complex(v) for v in self.a))
        object.__setattr__(self, "b", float(self.b))
        if len(self.a) != self.size - 1:
            raise ValueError(
                f"need {self.size - 1} off-diagonal parameters, got {len(self.a)}")
        for i, v in enumerate(self.a):
            if v == 0:
                raise ValueError(f"a_{i + 1} must be nonzero")
        if self.b <= 0:
            raise ValueError(f"b must be positive, got {self.b}")

    @property
    def degenerate_b(self) -> bool:
        """True when b = 1, where identities with 1/(1-b) factors degenerate."""
        return self.b == 1.0


@dataclass(frozen=True)
class StructureMatrices:
    """The constant matrices every other construction is assembled from.

    shift       strictly upper bidiagonal, entries a_1..a_{N-1}
    number      diag(0, 1, ..., N-1)
    diag_scale  identity plus (b-1)/(N-1) times ``number``; positive diagonal
    gauss_diag  -b/2 times the inverse of ``diag_scale``; negative diagonal
    nilpotent   odd-power series in ``shift`` generating the polynomial factor
    odd_coeffs  its series coefficients, index j weighting shift**(2j+1)
    """

    shift: np.ndarray
    number: np.ndarray
    diag_scale: np.ndarray
    gauss_diag: np.ndarray
    nilpotent: np.ndarray
    odd_coeffs: tuple[float, ...]

    @property
    def gauss_scales(self) -> np.ndarray:
        """Diagonal of ``gauss_diag`` as a real vector."""
        return np.real(np.diag(self.gauss_diag))


def alpha_coeff(size: int, b: float, j: int) -> float:
    """Series coefficient weighting the (2j+1)-th power of the shift matrix."""
    if j == 0:
        return 1.0
    return ((1.0 - b) ** j * (2 * j + 1) ** (j - 1)
            / ((4.0 * b) ** j * (size - 1) ** j * math.factorial(j)))


@lru_cache(maxsize=None)
def build_structure(p: WeightParams) -> StructureMatrices:
    """Assemble the structure matrices for one set of parameters."""
    n, b = p.size, p.b
    shift = np.zeros((n, n), dtype=complex)
    for i, v in enumerate(p.a):
        shift[i, i + 1] = v
    number = np.diag(np.arange(n, dtype=float)).astype(complex)
    psi = 1.0 + (b - 1.0) * np.arange(n) / (n - 1)
    diag_scale = np.diag(psi).astype(complex)
    gauss_diag = np.diag(-b / (2.0 * psi)).astype(complex)
    coeffs = tuple(alpha_coeff(n, b, j) for j in range(n // 2))
    nilpotent = np.zeros((n, n), dtype=complex)
    power = shift.copy()
    sq = shift @ shift
    for j, alpha in enumerate(coeffs):
        nilpotent += alpha * power
        power = power @ sq
    for m in (shift, number, diag_scale, gauss_diag, nilpotent):
        m.setflags(write=False)
    return StructureMatrices(shift, number, diag_scale, gauss_diag,
                             nilpotent, coeffs)


@lru_cache(maxsize=None)
def exp_factor(p: WeightParams, sign: int = 1) -> MatrixPolynomial:
    """Polynomial ``exp(sign * nilpotent * t)``; sign=-1 gives the inverse."""
    s = build_structure(p)
    return nilpotent_exp(sign * s.nilpotent)


def weight_eval(p: WeightParams, t: float) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the factor T and the weight W = T T* at one point."""
    s = build_structure(p)
    gt = np.exp(s.gauss_scales * t * t)
    big_t = exp_factor(p)(t) * gt[np.newaxis, :]
    return big_t, big_t @ big_t.conj().T


@lru_cache(maxsize=None)
def weight_symbolic(p: WeightParams) -> GaussErfMatrix:
    """The weight as an exact polynomial-times-Gaussian function matrix."""
    s = build_structure(p)
    e = exp_factor(p)
    n = p.size
    terms = []
    for k in range(n):
        # column k of T carries exp(d_k t^2), an atom of scale -d_k > 0
        c = -s.gauss_scales[k]
        for j, ej in enumerate(e.coeffs):
            col = np.zeros((n, n), dtype=complex)
            col[:, k] = ej[:, k]
            terms.append((atom(j, GAUSS, c), col))
    t_sym = GaussErfMatrix(n, terms)
    return t_sym @ t_sym.conj_t()


@lru_cache(maxsize=None)
def weight_moment(p: WeightParams, m: int) -> np.ndarray:
    """Exact m-th moment ``integral t**m W(t) dt`` via per-atom Gaussian
    integrals; memoized because the orthogonalizer asks repeatedly."""
    if m < 0:
        raise ValueError("moment order must be >= 0")
    out = weight_symbolic(p).integrate(extra_power=m)
    out.setflags(write=False)
    return out


def moment_pairing(p: WeightParams, lhs: MatrixPolynomial,
                   rhs: MatrixPolynomial) -> np.ndarray:
    """``integral lhs(t) W(t) rhs(t)* dt`` expanded over exact moments."""
    out = np.zeros((p.size, p.size), dtype=complex)
    for j, cj in enumerate(lhs.coeffs):
        for k, ck in enumerate(rhs.coeffs):
            out += cj @ weight_moment(p, j + k) @ ck.conj().T
    return out


def weight_inverse_2x2(p: WeightParams, t: float) -> np.ndarray:
    """Closed-form inverse of the 2x2 weight."""
    if p.size != 2:
        raise ValueError("closed-form inverse exists only for size 2")
    a, b = p.a[0], p.b
    ebt = math.exp(b * t * t)
    et = math.exp(t * t)
    return np.array([
        [ebt, -a * ebt * t],
        [-np.conj(a) * ebt * t, abs(a) ** 2 * ebt * t * t + et],
    ], dtype=complex)


def weight_inverse_symbolic_2x2(p: WeightParams) -> GaussErfMatrix:
    """Symbolic 2x2 inverse; its Gaussian atoms have negative scales, so it
    only makes sense inside products that cancel them."""
    if p.size != 2:
        raise ValueError("closed-form inverse exists only for size 2")
    a, b = p.a[0], p.b
    one = np.zeros((2, 2), dtype=complex)
    terms = []
    m = one.copy(); m[0, 0] = 1.0
    terms.append((atom(0, GAUSS, -b), m))
    m = one.copy(); m[0, 1] = -a; m[1, 0] = -np.conj(a)
    terms.append((atom(1, GAUSS, -b), m))
    m = one.copy(); m[1, 1] = abs(a) ** 2
    terms.append((atom(2, GAUSS, -b), m))
    m = one.copy(); m[1, 1] = 1.0
    terms.append((atom(0, GAUSS, -1.0), m))
    return GaussErfMatrix(2, terms)


@dataclass(frozen=True)
class IdentityReport:
    """Max-abs residuals of the structural identities, keyed by name.

    Identities that degenerate at b = 1 are listed in ``skipped`` instead of
    carrying a residual.
    """

    residuals: dict[str, float]
    skipped: tuple[str, ...]

    @property
    def max_residual(self) -> float:
        return max(self.residuals.values(), default=0.0)


def verify_structure_identities(p: WeightParams, t: float) -> IdentityReport:
    """Evaluate both sides of the six structural identities at one point."""
    s = build_structure(p)
    n, b = p.size, p.b
    acal, number, psi, gd = s.nilpotent, s.number, s.diag_scale, s.gauss_diag
    bracket = acal @ number - number @ acal
    ident = np.eye(n, dtype=complex)
    res: dict[str, float] = {}
    skipped: list[str] = []

    series = np.zeros((n, n), dtype=complex)
    power = s.shift.copy()
    sq = s.shift @ s.shift
    for j, alpha in enumerate(s.odd_coeffs):
        series += (2 * j + 1) * alpha * power
        power = power @ sq
    res["bracket_series"] = max_abs(bracket - series)

    et = exp_factor(p)(t)
    et_inv = exp_factor(p, -1)(t)
    f2_t = psi + (b - 1.0) / (n - 1) * t * bracket
    res["exp_intertwines_scale"] = max_abs(et @ psi - f2_t @ et)

    conj_gd = et @ gd @ et_inv
    rhs = -b / 2.0 * ident - (b - 1.0) * t / (n - 1) * (conj_gd @ bracket)
    res["gauss_conj_scale_left"] = max_abs(conj_gd @ psi - rhs)
    rhs = -b / 2.0 * ident - (b - 1.0) * t / (n - 1) * (bracket @ conj_gd)
    res["gauss_conj_scale_right"] = max_abs(psi @ conj_gd - rhs)

    if p.degenerate_b:
        skipped.append("even_power_sum")
    else:
        even = np.zeros((n, n), dtype=complex)
        power = sq.copy()
        for j in range(1, (n - 1) // 2 + 1):
            even += (alpha_coeff(n, b, j) * (2 * j) ** j
                     / (2 * j + 1) ** (j - 1)) * power
            power = power @ sq
        lhs = acal @ bracket
        res["even_power_sum"] = max_abs(lhs - 2 * b * (n - 1) / (1 - b) * even)

    rhs = (1 - b) / (2 * b * (n - 1)) * (acal @ acal @ bracket)
    res["bracket_defect"] = max_abs(bracket - acal - rhs)

    return IdentityReport(res, tuple(skipped))


def abel_identity_check(k: int, z: complex, w: complex) -> tuple[complex, complex, float]:
    """Binomial-sum identity used by the structural proofs.

    Returns (lhs, rhs, relative residual) for
    ``sum_m C(k,m) (m+z)**m (k-m+w)**(k-m-1) = (z+w+k)**k / w``.
    Uses the 0**0 = 1 convention. Refuses k > 40 rather than silently losing
    precision in the binomials.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    if k > 40:
        raise ValueError("k > 40 would lose precision in double binomials")
    if w == 0:
        raise ValueError("w must be nonzero")
    z, w = complex(z), complex(w)
    lhs = 0.0 + 0.0j
    for m in range(k + 1):
        lhs += (math.comb(k, m) * (m + z) ** m
                * (k - m + w) ** (k - m - 1))
    rhs = (z + w + k) ** k / w
    residual = abs(lhs - rhs) / max(abs(rhs), 1e-30)
    return lhs, rhs, residual
