"""High-precision internals behind the moment-based orthogonalizer.

Building monic orthogonal matrix polynomials from raw moments is a
Hankel-type problem whose double-precision error grows roughly like 4**n
for this family; the acceptance tolerances (1e-8 relative at degrees 15-20)
are unreachable that way. The moments, however, are exact closed forms, so
this module redoes the small amount of arithmetic that matters - moments,
inner products, Gram-Schmidt, Cholesky factors - with mpmath at fixed
precision, and rounds to complex128 only at the boundary.

Everything here is private to :mod:`matorth.orthogonal`.
"""
from __future__ import annotations

import math
import numpy as np
from mpmath import mp, mpc, mpf

from .weights import WeightParams

DPS = 50

_contexts: dict[WeightParams, "_MpFamily"] = {}


def family(p: WeightParams) -> "_MpFamily":
    ctx = _contexts.get(p)
    if ctx is None:
        ctx = _contexts[p] = _MpFamily(p)
    return ctx


# -- tiny matrix helpers on nested lists of mpc -------------------------------

def _zeros(n: int) -> list[list[mpc]]:
    return [[mpc(0) for _ in range(n)] for _ in range(n)]


def _eye(n: int) -> list[list[mpc]]:
    out = _zeros(n)
    for i in range(n):
        out[i][i] = mpc(1)
    return out


def _mmul(a, b, n: int):
    out = _zeros(n)
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for k in range(n):
            aik = ai[k]
            if aik:
                bk = b[k]
                for j in range(n):
                    oi[j] += aik * bk[j]
    return out


def _msub(a, b, n: int):
    return [[a[i][j] - b[i][j] for j in range(n)] for i in range(n)]


def _mscale(a, s, n: int):
    return [[s * a[i][j] for j in range(n)] for i in range(n)]


def _conj_t(a, n: int):
    return [[a[j][i].conjugate() for j in range(n)] for i in range(n)]


def _minv(a, n: int):
    """Gauss-Jordan inverse with partial pivoting."""
    work = [[a[i][j] for j in range(n)] + [mpc(1) if j == i else mpc(0) for j in range(n)]
            for i in range(n)]
    for col in range(n):
        piv = max(range(col, n), key=lambda r: abs(work[r][col]))
        if work[piv][col] == 0:
            raise ArithmeticError("singular matrix in high-precision inverse")
        work[col], work[piv] = work[piv], work[col]
        inv_p = 1 / work[col][col]
        work[col] = [v * inv_p for v in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                f = work[r][col]
                work[r] = [vr - f * vc for vr, vc in zip(work[r], work[col])]
    return [row[n:] for row in work]


def _chol_upper(a, n: int):
    """Factor a Hermitian positive definite matrix as U U* with U upper
    triangular and positive diagonal (diagonal input gives diagonal U)."""
    flip = [[a[n - 1 - i][n - 1 - j] for j in range(n)] for i in range(n)]
    low = _zeros(n)
    for i in range(n):
        for j in range(i + 1):
            s = flip[i][j]
            for k in range(j):
                s -= low[i][k] * low[j][k].conjugate()
            if i == j:
                re = s.real
                if re <= 0:
                    raise ArithmeticError("matrix is not positive definite")
                low[i][j] = mp.sqrt(re)
            else:
                low[i][j] = s / low[j][j]
    return [[low[n - 1 - i][n - 1 - j] for j in range(n)] for i in range(n)]


def to_complex(a) -> np.ndarray:
    n = len(a)
    out = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            v = a[i][j]
            out[i, j] = complex(float(v.real), float(v.imag))
    return out


def _gauss_moment(power: int, scale: mpf, cache: dict) -> mpf:
    key = (power, scale)
    got = cache.get(key)
    if got is None:
        if power % 2:
            got = mpf(0)
        else:
            m = power // 2
            dfac = mpf(1)
            k = 2 * m - 1
            while k > 1:
                dfac *= k
                k -= 2
            got = mp.sqrt(mp.pi) * dfac / (mpf(2) ** m * scale ** (m + mpf(1) / 2))
        cache[key] = got
    return got


class _MpFamily:
    """Per-parameter high-precision state: moments and the monic sequence."""

    def __init__(self, p: WeightParams):
        self.p = p
        self.n = p.size
        with mp.workdps(DPS):
            self._build_structure()
        self._moments: list = []
        self._gauss_cache: dict = {}
        self.polys: list[list[list[list[mpc]]]] = []   # polys[k][power] = matrix
        self.norms: list = []
        self._norm_invs: list = []
        self._deltas: list = []

    def _build_structure(self):
        p, n = self.p, self.n
        b = mpf(p.b)
        shift = _zeros(n)
        for i, v in enumerate(p.a):
            shift[i][i + 1] = mpc(v.real, v.imag)
        psi = [1 + (b - 1) * k / (n - 1) for k in range(n)]
        self.gauss_scales = [-b / (2 * pk) for pk in psi]
        nil = _zeros(n)
        power = shift
        sq = _mmul(shift, shift, n)
        for j in range(n // 2):
            if j == 0:
                alpha = mpf(1)
            else:
                alpha = ((1 - b) ** j * mpf(2 * j + 1) ** (j - 1)
                         / ((4 * b) ** j * mpf(n - 1) ** j * math.factorial(j)))
            nil = [[nil[i][k] + alpha * power[i][k] for k in range(n)] for i in range(n)]
            power = _mmul(power, sq, n)
        exp_coeffs = [_eye(n)]
        for k in range(1, n):
            nxt = _mscale(_mmul(exp_coeffs[-1], nil, n), mpf(1) / k, n)
            exp_coeffs.append(nxt)
        self.exp_coeffs = exp_coeffs

    def moment(self, m: int):
        with mp.workdps(DPS):
            while len(self._moments) <= m:
                self._moments.append(self._compute_moment(len(self._moments)))
        return self._moments[m]

    def _compute_moment(self, m: int):
        n = self.n
        out = _zeros(n)
        for col in range(n):
            scale = -2 * self.gauss_scales[col]
            for j1, e1 in enumerate(self.exp_coeffs):
                for j2, e2 in enumerate(self.exp_coeffs):
                    g = _gauss_moment(j1 + j2 + m, scale, self._gauss_cache)
                    if not g:
                        continue
                    for i in range(n):
                        v1 = e1[i][col]
                        if not v1:
                            continue
                        for j in range(n):
                            v2 = e2[j][col]
                            if v2:
                                out[i][j] += g * v1 * v2.conjugate()
        return out

    def pair(self, pc, qc):
        """<P, Q> = sum_{j,k} P_j S_{j+k} Q_k* for coefficient lists."""
        n = self.n
        self.moment(len(pc) + len(qc) - 2)
        with mp.workdps(DPS):
            out = _zeros(n)
            q_conj = [_conj_t(c, n) for c in qc]
            for j, cj in enumerate(pc):
                if not any(any(row) for row in cj):
                    continue
                for k, ck in enumerate(q_conj):
                    term = _mmul(_mmul(cj, self._moments[j + k], n), ck, n)
                    for i in range(n):
                        oi, ti = out[i], term[i]
                        for l in range(n):
                            oi[l] += ti[l]
            return out

    def extend(self, nmax: int):
        """Grow the monic sequence up to degree nmax by block Gram-Schmidt
        against the exact moments (single pass; the arithmetic is exact to
        working precision, so no re-orthogonalization is needed)."""
        n = self.n
        with mp.workdps(DPS):
            if not self.polys:
                self.polys.append([_eye(n)])
                self.norms.append(self.moment(0))
                self._norm_invs.append(_minv(self.norms[0], n))
            while len(self.polys) - 1 < nmax:
                deg = len(self.polys)
                coeffs = [_zeros(n) for _ in range(deg)] + [_eye(n)]
                for m in range(deg):
                    proj = _mmul(self.pair(coeffs, self.polys[m]),
                                 self._norm_invs[m], n)
                    for k, pk in enumerate(self.polys[m]):
                        coeffs[k] = _msub(coeffs[k], _mmul(proj, pk, n), n)
                self.polys.append(coeffs)
                norm = self.pair(coeffs, coeffs)
                _chol_upper(norm, n)  # positive definiteness guard
                self.norms.append(norm)
                self._norm_invs.append(_minv(norm, n))

    def delta(self, k: int):
        """Inverse upper Cholesky factor of the k-th norm (the orthonormalizer)."""
        with mp.workdps(DPS):
            while len(self._deltas) <= k:
                i = len(self._deltas)
                self._deltas.append(_minv(_chol_upper(self.norms[i], self.n), self.n))
        return self._deltas[k]

    # -- float views ---------------------------------------------------------

    def poly_float(self, k: int) -> list[np.ndarray]:
        return [to_complex(c) for c in self.polys[k]]

    def norm_float(self, k: int) -> np.ndarray:
        return to_complex(self.norms[k])

    def pair_float(self, i: int, j: int) -> np.ndarray:
        return to_complex(self.pair(self.polys[i], self.polys[j]))

    def monic_b(self, k: int):
        """Subdiagonal recurrence coefficient from coefficient comparison:
        coeff_{n-1} of P_n minus coeff_n of P_{n+1}."""
        n = self.n
        with mp.workdps(DPS):
            low = self.polys[k][k - 1] if k >= 1 else _zeros(n)
            return _msub(low, self.polys[k + 1][k], n)

    def monic_c(self, k: int):
        with mp.workdps(DPS):
            return _mmul(self.norms[k], self._norm_invs[k - 1], self.n)
