"""Mask functions, the infinite-product Fourier transform and Fourier matrices.

Sign convention: ``mu_hat(xi) = integral of exp(-2 pi i <xi, x>) d mu(x)``,
so for ``mu = mu(R, B)``

    mu_hat(xi) = prod_{j >= 1} conj(m_B((R^T)^{-j} xi)).

Moduli and zero sets do not depend on the sign choice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import latmath as lm
from .cyclotomic import int_root_sum_vanishes, root_sum_vanishes

DEFAULT_TOL = 1e-9
TWO_PI = 2.0 * math.pi


class ToleranceUnreachable(ArithmeticError):
    """The certified truncation error cannot be pushed below the tolerance."""

    def __init__(self, achieved: float, depth: int):
        super().__init__(f"certified error {achieved:.3e} at maximal depth {depth}")
        self.achieved = achieved
        self.depth = depth


def _is_exact(x) -> bool:
    return all(isinstance(t, (int, Fraction, np.integer)) and not isinstance(t, bool) for t in x)


def as_point(x) -> tuple[tuple, bool]:
    """Return ``(coordinates, exact)``; ints and Fractions stay exact."""
    if isinstance(x, np.ndarray):
        x = x.tolist() if x.ndim else [x.item()]
    elif not isinstance(x, (list, tuple)):
        x = [x]
    if _is_exact(x):
        return lm.as_vector(x), True
    return tuple(float(t) for t in x), False


def _frac_phase(num: int, den: int) -> float:
    """``num / den mod 1`` as a float in [0, 1), computed exactly first."""
    if den < 0:
        num, den = -num, -den
    return (num % den) / den


# ---------------------------------------------------------------------------
# mask


@dataclass(frozen=True)
class Mask:
    """``m_B(x) = (1/#B) sum_b exp(2 pi i <b, x>)``."""

    digits: tuple

    def __init__(self, digits):
        object.__setattr__(self, "digits", lm.as_digits(digits))

    @property
    def dim(self) -> int:
        return len(self.digits[0])

    @property
    def normalizer(self) -> Fraction:
        return Fraction(1, len(self.digits))

    def __call__(self, x) -> complex:
        return mask_eval(self, x)


def _digits_of(mask_or_digits) -> tuple:
    if isinstance(mask_or_digits, Mask):
        return mask_or_digits.digits
    return lm.as_digits(mask_or_digits)


def mask_phases(B, x) -> list[Fraction]:
    """Exact phases ``<b, x>`` for rational ``x``."""
    return [Fraction(lm.dot(b, x)) for b in _digits_of(B)]


def mask_eval(B, x) -> complex:
    digits = _digits_of(B)
    x, exact = as_point(x)
    if len(x) != len(digits[0]):
        raise ValueError("dimension mismatch between digits and argument")
    if exact:
        ph = [float(p % 1) for p in mask_phases(digits, x)]
    else:
        ph = [float(np.dot(b, x)) for b in digits]
    return complex(np.mean(np.exp(1j * TWO_PI * np.asarray(ph))))


def mask_modulus_one(B, x) -> bool:
    """Exact ``|m_B(x)| == 1`` for rational ``x``; needs ``0 in B``."""
    return all(p.denominator == 1 for p in mask_phases(B, lm.as_vector(x)))


def mask_vanishes(B, x) -> bool:
    """Exact ``m_B(x) == 0`` for rational ``x``."""
    return root_sum_vanishes(mask_phases(B, lm.as_vector(x)))


def qmf_residual(R, B, L, x) -> float:
    """``| sum_{l in L} |m_B((R^T)^{-1}(x + l))|^2 - 1 |`` evaluated numerically."""
    R = lm.as_matrix(R)
    d = len(R)
    B = lm.as_digits(B, d)
    L = lm.as_digits(L, d)
    if len(B) != len(L):
        raise ValueError("#B != #L")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    At = np.array(lm.transpose(R), dtype=float)
    Bm = np.array(B, dtype=float)
    total = 0.0
    for l in L:
        y = np.linalg.solve(At, x + np.array(l, dtype=float))
        total += abs(np.mean(np.exp(1j * TWO_PI * (Bm @ y)))) ** 2
    return abs(total - 1.0)


# ---------------------------------------------------------------------------
# infinite product


@dataclass(frozen=True)
class MuHatResult:
    value: complex
    error_bound: float
    depth: int
    zero_level: int | None = None


@dataclass
class MuHatEvaluator:
    """Truncated-product evaluator for the Fourier transform of ``mu(R, B)``.

    The decay bound ``||(R^T)^{-j}|| <= C rho^{-j}`` comes from the smallest
    power ``m`` with ``||(R^T)^{-m}||_2 < 1``.
    """

    R: lm.Matrix
    B: tuple
    tol: float = DEFAULT_TOL
    max_depth: int = 400
    contraction_power: int = field(init=False)
    rho: float = field(init=False)
    C: float = field(init=False)

    def __post_init__(self):
        self.R = lm.as_matrix(self.R)
        d = len(self.R)
        self.B = lm.as_digits(self.B, d)
        if not lm.is_expansive(self.R):
            raise ValueError("R is not expansive")
        self._det = lm.det(self.R)
        self._adj = lm.adjugate(self.R)
        self._Ainv = np.linalg.inv(np.array(lm.transpose(self.R), dtype=float))
        self._Bf = np.array(self.B, dtype=float)
        self._maxb = max(float(np.linalg.norm(b)) for b in self._Bf)
        # powers adj(R)^j b, so that R^{-j} b = adj(R)^j b / det(R)^j
        self._w = [list(self.B)]
        self._dets = [1]
        m, P = 0, np.eye(d)
        norms = [1.0]
        while True:
            m += 1
            P = self._Ainv @ P
            q = float(np.linalg.norm(P, 2)) * (1 + 1e-12)
            if q < 1.0:
                break
            norms.append(q)
            if m > 10_000:
                raise ArithmeticError("no contracting power found")
        self.contraction_power = m
        self.rho = q ** (-1.0 / m)
        self.C = max(self.rho**r * norms[r] for r in range(m))

    @property
    def dim(self) -> int:
        return len(self.R)

    @property
    def N(self) -> int:
        return len(self.B)

    def _level(self, j: int):
        while len(self._w) <= j:
            self._w.append([lm.mat_vec(self._adj, w) for w in self._w[-1]])
            self._dets.append(self._dets[-1] * self._det)
        return self._w[j], self._dets[j]

    def tail_bound(self, xi_norm: float, J: int) -> float:
        """Certified bound on ``|mu_hat - product of the first J factors|``."""
        if xi_norm == 0:
            return 0.0
        return TWO_PI * self._maxb * self.C * xi_norm * self.rho ** (-J) / (self.rho - 1.0)

    def depth_for(self, xi_norm: float, tol: float) -> int:
        if xi_norm == 0:
            return 0
        c = TWO_PI * self._maxb * self.C * xi_norm / (self.rho - 1.0)
        J = max(0, math.ceil(math.log(c / tol) / math.log(self.rho)))
        while self.tail_bound(xi_norm, J) >= tol:
            J += 1
        if J > self.max_depth:
            raise ToleranceUnreachable(self.tail_bound(xi_norm, self.max_depth), self.max_depth)
        return J

    def factor_phases(self, xi: Sequence, j: int) -> list[Fraction]:
        """Exact phases ``<b, (R^T)^{-j} xi>`` for rational ``xi``."""
        w, D = self._level(j)
        return [Fraction(lm.dot(wb, xi)) / D for wb in w]

    def factor_vanishes(self, xi: Sequence, j: int) -> bool:
        """Exact test of ``m_B((R^T)^{-j} xi) == 0`` for rational ``xi``."""
        q = lm.common_denominator(xi)
        v = [int(t * q) for t in xi]
        w, D = self._level(j)
        return int_root_sum_vanishes([lm.dot(wb, v) for wb in w], D * q)

    def evaluate(self, xi, tol: float | None = None) -> MuHatResult:
        tol = self.tol if tol is None else tol
        xi, exact = as_point(xi)
        if len(xi) != self.dim:
            raise ValueError("dimension mismatch")
        if exact:
            q = lm.common_denominator(xi)
            v = [int(t * q) for t in xi]
            norm = float(np.linalg.norm([float(t) for t in xi]))
        else:
            y = np.asarray(xi, dtype=float)
            norm = float(np.linalg.norm(y))
        J = self.depth_for(norm, tol)
        value = 1.0 + 0.0j
        for j in range(1, J + 1):
            if exact:
                w, D = self._level(j)
                ph = np.array([_frac_phase(lm.dot(wb, v), D * q) for wb in w])
            else:
                y = self._Ainv @ y
                ph = self._Bf @ y
            f = np.mean(np.exp(-1j * TWO_PI * ph))
            if exact and abs(f) < 1e-6 and self.factor_vanishes(xi, j):
                return MuHatResult(0j, 0.0, j, zero_level=j)
            value *= f
        return MuHatResult(complex(value), self.tail_bound(norm, J), J)

    def batch(self, xis, tol: float | None = None) -> np.ndarray:
        """Vectorised float evaluation for an array of points of shape (K, d)."""
        tol = self.tol if tol is None else tol
        Y = np.asarray(xis, dtype=float).reshape(-1, self.dim)
        if len(Y) == 0:
            return np.zeros(0, dtype=complex)
        J = self.depth_for(float(np.max(np.linalg.norm(Y, axis=1))), tol)
        out = np.ones(len(Y), dtype=complex)
        for _ in range(J):
            Y = Y @ self._Ainv.T
            out *= np.mean(np.exp(-1j * TWO_PI * (Y @ self._Bf.T)), axis=1)
        return out


def mu_hat(ev: MuHatEvaluator, xi, tol: float | None = None) -> complex:
    """Fourier transform of ``mu(R, B)`` at ``xi`` with certified error below ``tol``.

    Raises :class:`ToleranceUnreachable` when ``ev.max_depth`` is too small.
    """
    return ev.evaluate(xi, tol).value


def zero_certificate(ev: MuHatEvaluator, xi, max_depth: int | None = None) -> int | None:
    """Level ``j`` with ``m_B((R^T)^{-j} xi) == 0`` exactly, or None.

    The search stops once ``||(R^T)^{-j} xi||`` is too small for the mask to
    vanish. None is not a proof that ``mu_hat(xi) != 0``.
    """
    xi = lm.as_vector(xi, ev.dim)
    norm = float(np.linalg.norm([float(t) for t in xi]))
    limit = ev.max_depth if max_depth is None else max_depth
    for j in range(1, limit + 1):
        if TWO_PI * ev._maxb * ev.C * norm * ev.rho ** (-j) < 1.0:
            break
        if ev.factor_vanishes(xi, j):
            return j
    return None


# ---------------------------------------------------------------------------
# Fourier matrices


def _int_rows(vectors, scale=None):
    """Integer matrix ``q * rows`` and ``q`` for rational (optionally scaled) vectors."""
    vecs = [tuple(v) for v in vectors]
    qv = lm.common_denominator(x for v in vecs for x in v)
    X = [[int(x * qv) for x in v] for v in vecs]
    if scale is None:
        return X, qv
    qs = lm.common_denominator(x for r in scale for x in r)
    A = np.array([[int(x * qs) for x in r] for r in scale], dtype=object)
    rows = (np.array(X, dtype=object) @ A.T).tolist()
    q = qs * qv
    g = math.gcd(q, *(x for r in rows for x in r))
    return [[x // g for x in r] for r in rows], q // g


def phase_matrix(U: list[list[int]], V: list[list[int]], den: int) -> np.ndarray:
    """``(V U^T) / den mod 1`` as floats, exact integer arithmetic throughout."""
    big = max((abs(x) for r in U for x in r), default=0) * max((abs(x) for r in V for x in r), default=0)
    d = len(U[0]) if U else 0
    if big * max(d, 1) < 2**62 and abs(den) < 2**62:
        P = np.asarray(V, dtype=np.int64) @ np.asarray(U, dtype=np.int64).T
        if den < 0:
            P, den = -P, -den
        return np.mod(P, den) / den
    P = np.asarray(V, dtype=object) @ np.asarray(U, dtype=object).T
    if den < 0:
        P, den = -P, -den
    return np.vectorize(lambda t: (t % den) / den, otypes=[float])(P)


@dataclass
class FourierMatrix:
    """``entry(l, b) = exp(sign 2 pi i <scale b, l>) / sqrt(#cols)``."""

    rows: tuple
    cols: tuple
    scale: lm.Matrix
    matrix: np.ndarray
    sign: int = 1

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def build_fourier_matrix(scale, digits, freqs, sign: int = 1) -> FourierMatrix:
    """Fourier matrix with rows indexed by ``freqs`` and columns by ``digits``."""
    digits = [lm.as_vector(b) for b in digits]
    freqs = [lm.as_vector(f) for f in freqs]
    if not digits or not freqs:
        raise ValueError("empty digit or frequency list")
    d = len(digits[0])
    scale = lm.as_matrix(scale) if not isinstance(scale, tuple) else scale
    if len(scale) != d or any(len(v) != d for v in digits + freqs):
        raise ValueError("dimension mismatch")
    U, qu = _int_rows(digits, scale)
    V, qv = _int_rows(freqs)
    P = phase_matrix(U, V, qu * qv)
    M = np.exp(sign * 1j * TWO_PI * P) / math.sqrt(len(digits))
    return FourierMatrix(tuple(freqs), tuple(digits), scale, M, sign)


@dataclass(frozen=True)
class FrameBounds:
    """Squared extreme singular values of a Fourier matrix."""

    lower: float
    upper: float

    @property
    def sigma_min(self) -> float:
        return math.sqrt(max(self.lower, 0.0))

    @property
    def sigma_max(self) -> float:
        return math.sqrt(self.upper)


def gram_bounds(G: np.ndarray, residual_tol: float = 1e-10) -> FrameBounds:
    evals, evecs = np.linalg.eigh(G)
    scale = max(1.0, float(np.max(np.abs(evals))))
    for k in (0, len(evals) - 1):
        v = evecs[:, k]
        res = np.linalg.norm(G @ v - evals[k] * v)
        if res > residual_tol * scale * np.linalg.norm(v):
            raise ArithmeticError(f"eigen-residual {res:.2e} exceeds tolerance")
    return FrameBounds(max(float(evals[0]), 0.0), float(evals[-1]))


def frame_bounds(F) -> FrameBounds:
    """Extreme eigenvalues of ``F^* F`` (size = number of columns)."""
    M = F.matrix if isinstance(F, FourierMatrix) else np.asarray(F)
    return gram_bounds(M.conj().T @ M)


def unitarity_defect(F) -> float:
    """``max |F^* F - I|`` for a square matrix."""
    M = F.matrix if isinstance(F, FourierMatrix) else np.asarray(F)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"unitarity defect needs a square matrix, got {M.shape}")
    return float(np.max(np.abs(M.conj().T @ M - np.eye(M.shape[1]))))


def character_unitarity_defect(R, B, L, cap: int = 1 << 22, block: int = 1 << 22) -> float | None:
    """``max |H^* H - I|`` from the character sum of ``L`` on ``Z^d / R Z^d``.

    The Gram entry for ``b, b'`` is ``(1/N) sum_l exp(2 pi i <R^{-1}(b' - b), l>)``,
    a function of ``b' - b`` modulo ``R Z^d``. With ``U R V = diag(s)`` the
    pairing becomes ``sum_i a_i c_i / s_i`` for ``a = U(b' - b)`` and
    ``c = V^T l``, so all sums come from one FFT of size ``|det R|``.
    Returns ``None`` when ``|det R|`` exceeds ``cap``.
    """
    R = lm.as_matrix(R)
    d = len(R)
    if abs(lm.det(R)) > cap:
        return None
    s, U, V = lm.smith_form(R)
    keep = [i for i in range(d) if s[i] > 1]
    N = len(B)
    if not keep:
        return 0.0 if N == 1 else 1.0
    shape = tuple(s[i] for i in keep)
    mod = np.array(shape, dtype=np.int64)
    Bi = np.array([lm.as_vector(b, d) for b in B], dtype=object)
    Li = np.array([lm.as_vector(l, d) for l in L], dtype=object)
    A = (Bi @ np.array(U, dtype=object).T)[:, keep]
    C = (Li @ np.array(V, dtype=object))[:, keep]
    A = np.array([[int(x) % m for x, m in zip(row, shape)] for row in A], dtype=np.int64)
    C = np.array([[int(x) % m for x, m in zip(row, shape)] for row in C], dtype=np.int64)
    hist = np.zeros(shape)
    np.add.at(hist, tuple(C.T), 1.0)
    chi = np.abs(np.fft.ifftn(hist)).ravel() * (hist.size / N)
    step = max(1, block // N)
    worst = 0.0
    for r0 in range(0, N, step):
        diff = (A[None, :, :] - A[r0 : r0 + step, None, :]) % mod
        vals = chi[np.ravel_multi_index(tuple(np.moveaxis(diff, -1, 0)), shape)]
        rows = np.arange(vals.shape[0])
        vals[rows, r0 + rows] = 0.0  # diagonal entries are exactly one
        worst = max(worst, float(vals.max()))
    return worst


def product_unitarity_defect(R, B, L, n: int, block: int = 512) -> float:
    """Unitarity defect of the level-``n`` matrix of a triple without forming it.

    Columns are ``B_n`` in word order and rows ``Lambda_n``; the Gram entry for
    digits ``b, b'`` factors as ``prod_{j=1..n} m_L(R^{-j}(b' - b))`` because
    ``Lambda_n`` is the direct sum ``L + R^T L + ... ``. Each factor is a
    rank-``#L`` Gram matrix, so the Gram is assembled blockwise.
    """
    from .triple import digit_expansion

    R = lm.as_matrix(R)
    Bn = digit_expansion(R, B, n)
    L = lm.as_digits(L, len(R))
    N = len(L)
    factors = []
    for j in range(1, n + 1):
        U, q = _int_rows(Bn, lm.mat_pow(R, -j))
        V, qv = _int_rows(L)
        P = phase_matrix(U, V, q * qv)
        factors.append(np.exp(1j * TWO_PI * P))  # (#L, #Bn)
    size = len(Bn)
    worst = 0.0
    for s in range(0, size, block):
        G = np.ones((min(block, size - s), size), dtype=complex)
        for E in factors:
            G *= (E[:, s : s + block].conj().T @ E) / N
        G[np.arange(G.shape[0]), s + np.arange(G.shape[0])] -= 1.0
        worst = max(worst, float(np.max(np.abs(G))))
    return worst
