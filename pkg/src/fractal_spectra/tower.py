"""Almost-Parseval-frame towers and frame-bound subset selection."""

from __future__ import annotations

import csv
import enum
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import latmath as lm
from .fourier import FrameBounds, build_fourier_matrix, frame_bounds
from .triple import AffinePair, digit_expansion

TWO_PI = 2 * math.pi
SELECTION_CAP = 200_000


class TowerError(ValueError):
    pass


@dataclass(frozen=True)
class TowerLevel:
    N: int
    B: tuple
    L: tuple
    eps: float
    K: int | None = None
    alpha: int | None = None

    @property
    def M(self) -> int:
        return len(self.B)


@dataclass(frozen=True)
class APFLevelReport:
    bounds: FrameBounds
    eps_meas: float
    perturbation: float | None = None  # ||F - H|| when the level comes from (M, K, alpha)


@dataclass
class Tower:
    levels: list
    reports: list = field(default_factory=list)

    @property
    def epsilon_sum(self) -> float:
        return sum(lv.eps for lv in self.levels)

    def scale(self, j: int) -> int:
        """``N_1 N_2 ... N_j``."""
        return math.prod(lv.N for lv in self.levels[:j])


def apf_matrix(N: int, B, L, denominator: int | None = None):
    """``(1/sqrt(M)) [exp(2 pi i b l / den)]`` with rows ``L``, columns ``B``; ``den`` defaults to ``N``."""
    den = N if denominator is None else denominator
    return build_fourier_matrix(((Fraction(1, den),),), [(b,) for b in B], [(l,) for l in L])


def verify_apf_level(N: int, B, L) -> APFLevelReport:
    B, L = tuple(int(b) for b in B), tuple(int(l) for l in L)
    if any(not 0 <= b < N for b in B) or 0 not in B:
        raise TowerError(f"B must lie in [0, {N}) and contain 0")
    if 0 not in L:
        raise TowerError("L must contain 0")
    fb = frame_bounds(apf_matrix(N, B, L))
    return APFLevelReport(fb, max(1 - fb.sigma_min, fb.sigma_max - 1))


def apf_perturbation_norm(M: int, K: int, alpha: int) -> float:
    """Operator norm ``||F - H||`` between the level matrices with denominators ``MK + alpha`` and ``MK``."""
    B = [k * K for k in range(M)]
    L = list(range(M))
    F = apf_matrix(M * K + alpha, B, L).matrix
    H = apf_matrix(M * K, B, L, M * K).matrix
    return float(np.linalg.norm(F - H, 2))


def th01_level(M: int, K: int, alpha: int) -> TowerLevel:
    if not 0 <= alpha < M:
        raise TowerError(f"need 0 <= alpha < M, got alpha={alpha}, M={M}")
    if M < 1 or K < 1:
        raise TowerError("M and K must be positive")
    N = M * K + alpha
    eps = TWO_PI * alpha * math.sqrt(M) / K
    return TowerLevel(N, tuple(k * K for k in range(M)), tuple(range(M)), eps, K, alpha)


def build_tower_th01(specs) -> Tower:
    """Levels ``N = MK + alpha``, ``B = {0, K, ..., (M-1)K}``, ``L = {0, ..., M-1}``.

    Each level is checked against ``eps = 2 pi alpha sqrt(M) / K``; a level with
    ``eps >= 1`` gives no lower frame bound and is rejected.
    """
    levels, reports = [], []
    for idx, (M, K, alpha) in enumerate(specs, start=1):
        lv = th01_level(M, K, alpha)
        if lv.eps >= 1:
            kmin = math.floor(TWO_PI * alpha * math.sqrt(M)) + 1
            raise TowerError(
                f"level {idx}: eps = {lv.eps:.4f} >= 1 for (M, K, alpha) = ({M}, {K}, {alpha}); "
                f"take K >= {kmin}"
            )
        rep = verify_apf_level(lv.N, lv.B, lv.L)
        pert = apf_perturbation_norm(M, K, alpha)
        if rep.eps_meas > lv.eps + 1e-12 or pert > lv.eps + 1e-12:
            raise TowerError(f"level {idx}: measured eps {rep.eps_meas:.3e} exceeds {lv.eps:.3e}")
        levels.append(lv)
        reports.append(APFLevelReport(rep.bounds, rep.eps_meas, pert))
    return Tower(levels, reports)


def self_similar_tower(N: int, B, L, depth: int) -> Tower:
    """``depth`` copies of one level; ``eps`` is the measured deviation."""
    rep = verify_apf_level(N, B, L)
    lv = TowerLevel(int(N), tuple(B), tuple(L), rep.eps_meas)
    return Tower([lv] * depth, [rep] * depth)


@dataclass(frozen=True)
class TowerMuHat:
    value: complex
    levels_used: int
    tail_argument: float  # |xi| / (N_1 ... N_n); the unbuilt tail is taken as 1


def tower_mu_hat(t: Tower, xi, start: int = 0) -> TowerMuHat:
    """``prod_j conj(m_{B_j}(xi / (N_1 ... N_j)))`` over the built levels after ``start``.

    With ``start = n`` this is the transform of the tail measure ``mu_{>n}``.
    """
    if not t.levels:
        raise TowerError("empty tower")
    xi = float(xi)
    value = 1.0 + 0.0j
    scale = 1
    for lv in t.levels[start:]:
        scale *= lv.N
        ph = np.array(lv.B, dtype=float) * (xi / scale)
        value *= np.mean(np.exp(-1j * TWO_PI * ph))
    return TowerMuHat(complex(value), len(t.levels) - start, abs(xi) / scale)


@dataclass
class TowerSpectrum:
    freqs: list
    lower_constant: float  # prod (1 - eps_j)^2
    upper_constant: float  # prod (1 + eps_j)^2
    delta: float | None = None  # min |mu_{>k}_hat(l)|^2 over l in Lambda_k, k <= n


def tower_levels(t: Tower, n: int) -> list:
    """``Lambda_n = L_1 + N_1 L_2 + ... + (N_1 ... N_{n-1}) L_n``, sorted."""
    if not 1 <= n <= len(t.levels):
        raise TowerError(f"n must be in [1, {len(t.levels)}]")
    out = {0}
    for j in range(n):
        s = t.scale(j)
        out = {a + s * l for a in out for l in t.levels[j].L}
    return sorted(out)


def tower_frame_spectrum(t: Tower, n: int, with_delta: bool = True) -> TowerSpectrum:
    freqs = tower_levels(t, n)
    lo = math.prod((1 - lv.eps) ** 2 for lv in t.levels[:n])
    hi = math.prod((1 + lv.eps) ** 2 for lv in t.levels[:n])
    delta = None
    if with_delta:
        delta = min(
            abs(tower_mu_hat(t, lam, k).value) ** 2
            for k in range(1, n + 1)
            for lam in tower_levels(t, k)
        )
    return TowerSpectrum(freqs, lo, hi, delta)


# ---------------------------------------------------------------------------
# subset selection


class Method(enum.Enum):
    EXHAUSTIVE = "Exhaustive"
    GREEDY = "Greedy"
    RANDOM_SWAP = "RandomSwap"


@dataclass
class SelectionProblem:
    """Choose ``N^n`` frequencies among the residues mod ``(R^T)^n`` for the columns ``B_n``."""

    pair: AffinePair
    n: int

    def __post_init__(self):
        RT = lm.transpose(self.pair.R)
        self.universe = sorted(lm.complete_residues(lm.mat_pow(RT, self.n)))
        self.digits = digit_expansion(self.pair.R, self.pair.B, self.n)
        self.target = self.pair.N**self.n
        F = build_fourier_matrix(lm.inverse(lm.mat_pow(self.pair.R, self.n)), self.digits, self.universe)
        self.matrix = F.matrix  # rows: universe, columns: B_n, entries scaled by 1/sqrt(N^n)

    def bounds(self, rows) -> FrameBounds:
        """Squared extreme singular values of the row-selected matrix."""
        s = np.linalg.svd(self.matrix[list(rows)], compute_uv=False)
        k = min(len(rows), self.matrix.shape[1])
        return FrameBounds(float(s[k - 1] ** 2) if len(rows) >= self.matrix.shape[1] else 0.0, float(s[0] ** 2))

    def sigma_floor(self, rows) -> float:
        """Smallest of the ``min(|rows|, N^n)`` singular values (used while growing a set)."""
        s = np.linalg.svd(self.matrix[list(rows)], compute_uv=False)
        return float(s[-1])


@dataclass
class SelectionResult:
    J: list
    bounds: FrameBounds
    method: Method
    seed: int | None = None
    n: int = 0

    def record(self) -> dict:
        return {
            "n": self.n,
            "method": self.method.value,
            "seed": "" if self.seed is None else self.seed,
            "lower": repr(self.bounds.lower),
            "upper": repr(self.bounds.upper),
        }


def records_csv(results) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["n", "method", "seed", "lower", "upper"], lineterminator="\n")
    w.writeheader()
    for r in results:
        w.writerow(r.record())
    return buf.getvalue()


_TIE = 1e-12


def _better(a: FrameBounds, b: FrameBounds | None) -> bool:
    """Larger lower bound, then larger lower/upper ratio."""
    if b is None:
        return True
    if a.lower > b.lower + _TIE:
        return True
    if a.lower < b.lower - _TIE:
        return False
    return a.lower / a.upper > b.lower / b.upper + _TIE


def exhaustive_select(p: SelectionProblem, cap: int = SELECTION_CAP) -> SelectionResult:
    count = math.comb(len(p.universe), p.target)
    if count > cap:
        raise OverflowError(f"{count} subsets exceed cap {cap}; use heuristic_select")
    best, best_rows = None, None
    for rows in itertools.combinations(range(len(p.universe)), p.target):
        fb = p.bounds(rows)
        if _better(fb, best):
            best, best_rows = fb, rows
    return SelectionResult([p.universe[i] for i in best_rows], best, Method.EXHAUSTIVE, None, p.n)


class LCG:
    """64-bit linear congruential stream; ``index(n) = (x >> 33) % n`` after each step."""

    A = 6364136223846793005
    C = 1442695040888963407
    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.x = seed & self.MASK

    def next(self) -> int:
        self.x = (self.A * self.x + self.C) & self.MASK
        return self.x

    def index(self, n: int) -> int:
        return (self.next() >> 33) % n


def _greedy(p: SelectionProblem) -> list:
    chosen: list[int] = []
    rest = list(range(len(p.universe)))
    while len(chosen) < p.target:
        scores = [p.sigma_floor(chosen + [i]) for i in rest]
        k = max(range(len(rest)), key=lambda t: (scores[t], -t))
        chosen.append(rest.pop(k))
    return sorted(chosen)


def _random_swap(p: SelectionProblem, seed: int, iterations: int) -> list:
    rng = LCG(seed)
    idx = list(range(len(p.universe)))
    for i in range(len(idx) - 1, 0, -1):  # Fisher-Yates driven by the stream
        j = rng.index(i + 1)
        idx[i], idx[j] = idx[j], idx[i]
    inside, outside = sorted(idx[: p.target]), sorted(idx[p.target :])
    cur = p.bounds(inside)
    if not outside:
        return inside
    for _ in range(iterations):
        a, b = rng.index(len(inside)), rng.index(len(outside))
        trial = sorted(inside[:a] + inside[a + 1 :] + [outside[b]])
        fb = p.bounds(trial)
        if _better(fb, cur):
            out_el = inside[a]
            inside, cur = trial, fb
            outside = sorted(outside[:b] + outside[b + 1 :] + [out_el])
    return inside


def heuristic_select(p: SelectionProblem, method: Method = Method.GREEDY, seed: int = 0, iterations: int = 400) -> SelectionResult:
    """Greedy growth by the smallest singular value, or seeded single-element swaps."""
    if method == Method.GREEDY:
        rows, sd = _greedy(p), None
    elif method == Method.RANDOM_SWAP:
        rows, sd = _random_swap(p, seed, iterations), seed
    else:
        raise ValueError(f"not a heuristic: {method}")
    return SelectionResult([p.universe[i] for i in rows], p.bounds(rows), method, sd, p.n)
