"""Small dense complex linear algebra: matrix polynomials, nilpotent matrix
exponentials and iterated commutators.

All matrices are plain ``numpy`` arrays of ``complex128``. Every operation is
a pure function returning fresh arrays; nothing here mutates its inputs, so
values can be shared freely between threads.
"""
from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "MatrixPolynomial",
    "ad_power",
    "as_square",
    "hermitian_residual",
    "max_abs",
    "nilpotent_exp",
]


def as_square(m: np.ndarray | Sequence, dim: int | None = None) -> np.ndarray:
    """Coerce ``m`` to a square complex128 array, validating its shape."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if dim is not None and a.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {a.shape[0]}")
    return a


def max_abs(a: np.ndarray) -> float:
    """Largest entry magnitude; 0 for empty input."""
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a)))


def hermitian_residual(m: np.ndarray) -> float:
    """max |M - M*|, i.e. the distance from being Hermitian."""
    return max_abs(m - m.conj().T)


class MatrixPolynomial:
    """Polynomial in one real variable with square matrix coefficients.

    ``coeffs[k]`` multiplies ``t**k``. The zero polynomial keeps an explicit
    dimension and has degree -1. Instances are immutable.
    """

    __slots__ = ("_coeffs", "dim")

    def __init__(self, coeffs: Iterable[np.ndarray | Sequence], dim: int | None = None):
        mats = [as_square(c) for c in coeffs]
        if mats:
            if dim is not None and mats[0].shape[0] != dim:
                raise ValueError("coefficients do not match the requested dim")
            dim = mats[0].shape[0]
            for c in mats:
                if c.shape[0] != dim:
                    raise ValueError("all coefficients must share one dimension")
        elif dim is None:
            raise ValueError("zero polynomial needs an explicit dim")
        while mats and not np.any(mats[-1]):
            mats.pop()
        for c in mats:
            c.setflags(write=False)
        self._coeffs = tuple(mats)
        self.dim = int(dim)

    @classmethod
    def zero(cls, dim: int) -> "MatrixPolynomial":
        return cls((), dim=dim)

    @classmethod
    def constant(cls, m: np.ndarray) -> "MatrixPolynomial":
        return cls([m])

    @classmethod
    def monomial(cls, m: np.ndarray, power: int) -> "MatrixPolynomial":
        m = as_square(m)
        parts = [np.zeros_like(m) for _ in range(power)]
        parts.append(m)
        return cls(parts)

    @property
    def coeffs(self) -> tuple[np.ndarray, ...]:
        return self._coeffs

    @property
    def degree(self) -> int:
        return len(self._coeffs) - 1

    def coeff(self, k: int) -> np.ndarray:
        if 0 <= k < len(self._coeffs):
            return self._coeffs[k]
        return np.zeros((self.dim, self.dim), dtype=complex)

    def __call__(self, t: float | complex) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c in reversed(self._coeffs):
            out = out * t + c
        return out

    def derivative(self, order: int = 1) -> "MatrixPolynomial":
        """Coefficient-wise derivative; degree drops by ``order`` (floor -1)."""
        if order < 0:
            raise ValueError("order must be >= 0")
        if order == 0:
            return self
        if order > self.degree:
            return MatrixPolynomial.zero(self.dim)
        parts = []
        for k in range(order, len(self._coeffs)):
            fac = 1.0
            for i in range(k - order + 1, k + 1):
                fac *= i
            parts.append(fac * self._coeffs[k])
        return MatrixPolynomial(parts, dim=self.dim)

    def __add__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        n = max(len(self._coeffs), len(other._coeffs))
        parts = [self.coeff(k) + other.coeff(k) for k in range(n)]
        return MatrixPolynomial(parts, dim=self.dim)

    def __sub__(self, other: "MatrixPolynomial") -> "MatrixPolynomial":
        n = max(len(self._coeffs), len(other._coeffs))
        parts = [self.coeff(k) - other.coeff(k) for k in range(n)]
        return MatrixPolynomial(parts, dim=self.dim)

    def __neg__(self) -> "MatrixPolynomial":
        return MatrixPolynomial([-c for c in self._coeffs], dim=self.dim)

    def __mul__(self, other):
        if isinstance(other, MatrixPolynomial):
            if other.dim != self.dim:
                raise ValueError("dimension mismatch")
            if not self._coeffs or not other._coeffs:
                return MatrixPolynomial.zero(self.dim)
            out = [np.zeros((self.dim, self.dim), dtype=complex)
                   for _ in range(self.degree + other.degree + 1)]
            for j, cj in enumerate(self._coeffs):
                for k, ck in enumerate(other._coeffs):
                    out[j + k] = out[j + k] + cj @ ck
            return MatrixPolynomial(out, dim=self.dim)
        return MatrixPolynomial([other * c for c in self._coeffs], dim=self.dim)

    __rmul__ = __mul__

    def lmul(self, m: np.ndarray) -> "MatrixPolynomial":
        """Constant matrix times polynomial: ``m @ P(t)``."""
        m = as_square(m, self.dim)
        return MatrixPolynomial([m @ c for c in self._coeffs], dim=self.dim)

    def rmul(self, m: np.ndarray) -> "MatrixPolynomial":
        """Polynomial times constant matrix: ``P(t) @ m``."""
        m = as_square(m, self.dim)
        return MatrixPolynomial([c @ m for c in self._coeffs], dim=self.dim)

    def conj_t(self) -> "MatrixPolynomial":
        """Coefficient-wise conjugate transpose (the adjoint for real t)."""
        return MatrixPolynomial([c.conj().T for c in self._coeffs], dim=self.dim)

    def max_coeff(self) -> float:
        return max((max_abs(c) for c in self._coeffs), default=0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MatrixPolynomial):
            return NotImplemented
        if self.dim != other.dim or len(self._coeffs) != len(other._coeffs):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self._coeffs, other._coeffs))

    def __repr__(self) -> str:
        return f"MatrixPolynomial(dim={self.dim}, degree={self.degree})"


def nilpotent_exp(m: np.ndarray) -> MatrixPolynomial:
    """Exact matrix exponential ``exp(m t)`` of a nilpotent matrix.

    The series terminates, so the result is a polynomial of degree < N with
    coefficients ``m**k / k!``. Non-nilpotent input is rejected: ``m**N`` must
    vanish up to ``1e-14 * max(1, |m|_max**N)``.
    """
    m = as_square(m)
    n = m.shape[0]
    powers = [np.eye(n, dtype=complex)]
    for _ in range(n):
        powers.append(powers[-1] @ m)
    tol = 1e-14 * max(1.0, max_abs(m) ** n)
    if max_abs(powers[n]) > tol:
        raise ValueError("matrix is not nilpotent (m**N does not vanish)")
    coeffs = [powers[k] / math.factorial(k) for k in range(n)]
    return MatrixPolynomial(coeffs, dim=n)


def ad_power(x: np.ndarray, y: np.ndarray, n: int) -> np.ndarray:
    """Iterated commutator: ad^0 = y, ad^{k+1} = [x, ad^k]."""
    x = as_square(x)
    y = as_square(y, x.shape[0])
    if n < 0:
        raise ValueError("n must be >= 0")
    out = y
    for _ in range(n):
        out = x @ out - out @ x
    return out
