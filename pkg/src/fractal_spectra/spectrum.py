"""Candidate spectra: canonical and cycle-generated levels, delta estimates,
Parseval identities for step functions, offset completion and orthogonal-set search."""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import networkx as nx
import numpy as np

from . import latmath as lm
from .fourier import MuHatEvaluator, build_fourier_matrix, zero_certificate
from .triple import PRODUCT_CAP, HadamardTriple, digit_expansion

NUMERIC_PREFILTER = 1e-6


class Provenance(enum.Enum):
    CANONICAL = "Canonical"
    CYCLE_GENERATED = "CycleGenerated"
    OFFSET_MODIFIED = "OffsetModified"


@dataclass
class SpectrumCandidate:
    """Nested frequency levels; level ``k`` is paired with the scale ``(R^T)^{-m_k}``."""

    triple: HadamardTriple
    levels: list
    provenance: Provenance
    scales: list  # m_k for each level
    offsets: list = field(default_factory=list)  # per level: {j: k(j)} for nonzero k(j)

    @property
    def depth(self) -> int:
        return len(self.levels)

    def is_nested(self) -> bool:
        return all(set(a) <= set(b) for a, b in zip(self.levels, self.levels[1:]))


def canonical_levels(T: HadamardTriple, n: int, cap: int = PRODUCT_CAP) -> SpectrumCandidate:
    """``Lambda_k = L + R^T L + ... + (R^T)^{k-1} L`` for ``k = 1..n``."""
    if T.N**n > cap:
        raise OverflowError(f"N^n = {T.N ** n} exceeds cap {cap}")
    RT = lm.transpose(T.R)
    levels = [sorted(set(digit_expansion(RT, T.L, k))) for k in range(1, n + 1)]
    return SpectrumCandidate(T, levels, Provenance.CANONICAL, list(range(1, n + 1)))


def cycle_levels(T: HadamardTriple, n: int) -> SpectrumCandidate:
    """Levels of the set generated by the extreme cycles, words of length ``<= k``."""
    from .dynamics import TransitionSystem, dynamically_simple_spectrum, enumerate_extreme_cycles

    ts = TransitionSystem(T)
    cycles = enumerate_extreme_cycles(ts).cycles
    levels = [dynamically_simple_spectrum(ts, k, cycles) for k in range(1, n + 1)]
    return SpectrumCandidate(T, levels, Provenance.CYCLE_GENERATED, list(range(1, n + 1)))


def _evaluator(pair) -> MuHatEvaluator:
    if isinstance(pair, MuHatEvaluator):
        return pair
    return MuHatEvaluator(pair.R, pair.B)


@dataclass
class OrthogonalityReport:
    max_value: float
    argmax: tuple | None
    pairs: int
    certified_zero: int


def orthogonality_check(pair, freqs, tol: float = 1e-12, cap: int = 1 << 22) -> OrthogonalityReport:
    """Largest ``|mu_hat(l - l')|`` over distinct pairs, each within ``tol``.

    The reported maximum adds the certified truncation error.
    """
    ev = _evaluator(pair)
    freqs = [lm.as_vector(f, ev.dim) for f in freqs]
    npairs = len(freqs) * (len(freqs) - 1) // 2
    if npairs > cap:
        raise OverflowError(f"{npairs} pairs exceed cap {cap}")
    diffs: dict = {}
    for a, b in itertools.combinations(freqs, 2):
        d = lm.vec_sub(a, b)
        neg = tuple(-t for t in d)
        key = max(d, neg)  # |mu_hat(-x)| = |mu_hat(x)| for real measures
        diffs.setdefault(key, (a, b))
    worst, arg, zeros = 0.0, None, 0
    for key, p in diffs.items():
        r = ev.evaluate(key, tol)
        if r.zero_level is not None:
            zeros += 1
        val = abs(r.value) + r.error_bound
        if val > worst:
            worst, arg = val, p
    return OrthogonalityReport(worst, arg, npairs, zeros)


@dataclass
class DeltaEstimate:
    """Running minimum of ``|mu_hat((R^T)^{-m_k} l)|^2``; an upper bound for delta."""

    value: float
    depth: int
    argmin: tuple | None
    per_depth: list  # running minimum after each level
    level_min: list  # minimum within each level


def delta_estimate(pair, cand: SpectrumCandidate, depth: int | None = None, tol: float = 1e-12) -> DeltaEstimate:
    ev = _evaluator(pair)
    depth = cand.depth if depth is None else min(depth, cand.depth)
    RT = np.array(lm.transpose(ev.R), dtype=float)
    best, arg = math.inf, None
    running, mins = [], []
    for k in range(depth):
        lam = np.array(cand.levels[k], dtype=float).reshape(-1, ev.dim)
        m = cand.scales[k]
        X = np.linalg.solve(np.linalg.matrix_power(RT, m), lam.T).T
        vals = np.abs(ev.batch(X, tol)) ** 2
        i = int(np.argmin(vals))
        mins.append(float(vals[i]))
        if vals[i] < best:
            best, arg = float(vals[i]), (k + 1, cand.levels[k][i])
        running.append(best)
    return DeltaEstimate(best, depth, arg, running, mins)


# ---------------------------------------------------------------------------
# step functions


@dataclass
class StepFunction:
    """``f = sum_b w_b 1_{tau_b(T)}`` over level-``n`` pieces, ``b`` in ``B_n`` word order."""

    n: int
    weights: np.ndarray

    def norm_sq(self, N: int) -> float:
        return float(np.sum(np.abs(self.weights) ** 2)) / N**self.n


@dataclass
class ParsevalResult:
    identity_defect: float
    lhs: float
    rhs: float
    norm_sq: float
    ratio: float
    delta_lower: float


def _mu_hat_level(ev: MuHatEvaluator, RT, lams, n: int) -> np.ndarray:
    """Exact-argument evaluations of ``mu_hat((R^T)^{-n} l)``."""
    Pinv = lm.inverse(lm.mat_pow(RT, n))
    return np.array([ev.evaluate(lm.mat_vec(Pinv, l), 1e-14).value for l in lams])


def parseval_defect(T: HadamardTriple, f: StepFunction, mu_level=None) -> ParsevalResult:
    """Both sides of the level-``n`` Parseval identity for a step function.

    The left side sums the closed-form piece integrals
    ``(1/N^n) exp(-2 pi i <R^{-n} b, l>) mu_hat((R^T)^{-n} l)`` one digit at a
    time with exact phases; the right side goes through the matrix ``H_n``.
    """
    n, N = f.n, T.N
    RT = lm.transpose(T.R)
    Bn = digit_expansion(T.R, T.B, n)
    Ln = digit_expansion(RT, T.L, n)
    w = np.asarray(f.weights, dtype=complex)
    if len(w) != len(Bn):
        raise ValueError(f"expected {len(Bn)} weights, got {len(w)}")
    ev = MuHatEvaluator(T.R, T.B)
    mh = _mu_hat_level(ev, RT, Ln, n) if mu_level is None else mu_level
    Nn = N**n
    # left side, exact phases <R^{-n} b, l> = <adj^n b, l> / det^n
    adj, D = lm.mat_pow(lm.adjugate(T.R), n), lm.det(T.R) ** n
    W = [lm.mat_vec(adj, b) for b in Bn]
    lhs = 0.0
    for li, l in enumerate(Ln):
        ph = np.array([(lm.dot(wb, l) % D) / D for wb in W])
        integral = mh[li] * np.sum(w * np.exp(-2j * math.pi * ph)) / Nn
        lhs += abs(integral) ** 2
    H = build_fourier_matrix(lm.inverse(lm.mat_pow(T.R, n)), Bn, Ln, sign=-1).matrix
    Hw = H @ w
    rhs = float(np.sum(np.abs(mh) ** 2 * np.abs(Hw) ** 2)) / Nn
    nsq = f.norm_sq(N)
    delta = float(np.min(np.abs(mh) ** 2))
    lhs = float(lhs)
    return ParsevalResult(abs(lhs - rhs), lhs, rhs, nsq, lhs / nsq if nsq else 0.0, delta)


# ---------------------------------------------------------------------------
# completion by integer offsets


class CompletionFailure(RuntimeError):
    def __init__(self, level: int, j: tuple, x: tuple):
        super().__init__(f"no admissible integer offset for j = {j} at level {level} (x = {x})")
        self.level = level
        self.j = j
        self.x = x


@dataclass
class CompletionConfig:
    eps0: float = 0.1
    delta0: float = 1e-4
    kmax: int = 5
    levels: int = 3
    method: str = "certified"  # or "net": centre and corners only
    max_refine: int = 10
    cap: int = PRODUCT_CAP


def _offsets(dim: int, kmax: int) -> list:
    ks = list(itertools.product(range(-kmax, kmax + 1), repeat=dim))
    ks.sort(key=lambda k: (max(map(abs, k)), sum(map(abs, k)), k))
    return ks


def _net(dim: int, eps: float) -> np.ndarray:
    """Centre plus the ``2^d`` corners of the cube inscribed in the ``eps``-ball."""
    r = eps / math.sqrt(dim)
    corners = [np.array(c, dtype=float) * r for c in itertools.product((-1, 1), repeat=dim)]
    return np.array([np.zeros(dim)] + corners)


def mu_hat_lipschitz(pair) -> float:
    """Lipschitz constant of ``|mu_hat|``: ``2 pi`` times the radius of the support about the centre of its box."""
    from .dynamics import attractor_box

    box = attractor_box(pair.R, pair.B)
    half = [float(h - l) / 2 for l, h in zip(box.lo, box.hi)]
    return 2 * math.pi * math.sqrt(sum(t * t for t in half))


def _net_ok(ev, X, k, cfg) -> np.ndarray:
    pts = (X[:, None, :] + np.asarray(k, dtype=float) + _net(ev.dim, cfg.eps0)[None, :, :]).reshape(-1, ev.dim)
    vals = np.abs(ev.batch(pts)) ** 2
    return np.all(vals.reshape(len(X), -1) >= cfg.delta0, axis=1)


def _ball_ok(ev, X, k, cfg, lip: float) -> np.ndarray:
    """Certify ``|mu_hat(x + y + k)|^2 >= delta0`` on the whole ``eps0``-ball, per row ``x`` of ``X``.

    Branch and bound on cubes: a cube is settled when its centre value minus
    ``lip`` times its half diagonal clears ``sqrt(delta0)``; a sample inside
    the ball below ``sqrt(delta0)`` refutes; cubes still open after
    ``cfg.max_refine`` halvings count as refuted.
    """
    d, eps, floor = ev.dim, cfg.eps0, math.sqrt(cfg.delta0)
    ok = np.ones(len(X), dtype=bool)
    owner = np.arange(len(X))
    off = np.zeros((len(X), d))  # cube centre relative to x + k
    half = eps
    kk = np.asarray(k, dtype=float)
    children = np.array(list(itertools.product((-0.5, 0.5), repeat=d)))
    for depth in range(cfg.max_refine + 1):
        if not len(owner):
            break
        keep = ok[owner]
        owner, off = owner[keep], off[keep]
        rad = half * math.sqrt(d)
        dist = np.linalg.norm(off, axis=1)
        inside = dist - rad <= eps
        owner, off, dist = owner[inside], off[inside], dist[inside]
        if not len(owner):
            break
        vals = np.abs(ev.batch(X[owner] + kk + off)) + ev.tol
        bad = (vals < floor) & (dist <= eps)
        ok[owner[bad]] = False
        open_ = (~bad) & (vals - lip * rad - 2 * ev.tol < floor)
        owner, off = owner[open_], off[open_]
        if depth == cfg.max_refine:
            ok[owner] = False
            break
        owner = np.repeat(owner, len(children))
        off = (off[:, None, :] + children[None, :, :] * half).reshape(-1, d)
        half /= 2
    return ok


def _contraction_depth(ev: MuHatEvaluator, lams, n_min: int, eps: float) -> int:
    """Smallest ``n >= n_min`` with ``||(R^T)^{-(n+p)} l|| < eps`` for all ``l`` and ``p >= 0``."""
    L = np.array(lams, dtype=float).reshape(-1, ev.dim)
    top = float(np.max(np.linalg.norm(L, axis=1)))
    if top == 0:
        return n_min
    n = n_min
    while True:
        # the decay bound settles every p beyond P
        P = max(0, math.ceil(math.log(ev.C * top / eps) / math.log(ev.rho)) - n + 1)
        Y = L.T.copy()
        for _ in range(n):
            Y = ev._Ainv @ Y
        ok = True
        for _ in range(P + 1):
            if np.max(np.linalg.norm(Y, axis=0)) >= eps:
                ok = False
                break
            Y = ev._Ainv @ Y
        if ok:
            return n
        n += 1


def complete_spectrum(T: HadamardTriple, cfg: CompletionConfig | None = None) -> SpectrumCandidate:
    """Offset-modified levels ``Lambda_{k+1} = Lambda_k + (R^T)^{m_k} J_hat``.

    Each ``j`` in ``J_n`` is moved by ``(R^T)^n k(j)`` where ``k(j)`` is the first
    integer vector (ordered by sup norm) such that ``|mu_hat(x + y + k)|^2 >= delta0``
    at ``x = (R^T)^{-n} j`` for every ``||y|| <= eps0``. With ``method="certified"``
    this is proven by branch and bound; ``method="net"`` only samples the centre
    and the corners of the inscribed cube.
    Raises :class:`CompletionFailure` naming the first ``j`` without an offset.
    """
    cfg = cfg or CompletionConfig()
    ev = MuHatEvaluator(T.R, T.B)
    d = T.dim
    RT = lm.transpose(T.R)
    lip = mu_hat_lipschitz(T.pair) if cfg.method == "certified" else 0.0
    ks = _offsets(d, cfg.kmax)
    lam = [tuple([0] * d)]
    n_prev, m_prev = 0, 0
    levels, scales, offsets = [], [], []
    for level in range(1, cfg.levels + 1):
        n = _contraction_depth(ev, lam, n_prev + 1, cfg.eps0)
        if T.N**n * len(lam) > cfg.cap:
            raise OverflowError(f"level {level} needs {T.N ** n * len(lam)} frequencies, cap {cfg.cap}")
        J = digit_expansion(RT, T.L, n)
        Pn = lm.mat_pow(RT, n)
        X = np.linalg.solve(np.array(Pn, dtype=float), np.array(J, dtype=float).T).T
        choice = [None] * len(J)
        pending = np.arange(len(J))
        for k in ks:
            if not len(pending):
                break
            if cfg.method == "net":
                good = _net_ok(ev, X[pending], k, cfg)
            else:
                good = _ball_ok(ev, X[pending], k, cfg, lip)
            for idx in pending[good]:
                choice[idx] = k
            pending = pending[~good]
            if k == tuple([0] * d) and choice[0] is None:
                raise CompletionFailure(level, J[0], tuple(X[0]))
        if len(pending):
            i = int(pending[0])
            raise CompletionFailure(level, J[i], tuple(float(t) for t in X[i]))
        Jhat = [lm.vec_add(j, lm.mat_vec(Pn, k)) for j, k in zip(J, choice)]
        shift = lm.mat_pow(RT, m_prev)
        new = sorted({lm.vec_add(a, lm.mat_vec(shift, j)) for a in lam for j in Jhat})
        m = m_prev + n
        levels.append(new)
        scales.append(m)
        offsets.append({j: k for j, k in zip(J, choice) if any(k)})
        lam, n_prev, m_prev = new, n, m
    return SpectrumCandidate(T, levels, Provenance.OFFSET_MODIFIED, scales, offsets)


# ---------------------------------------------------------------------------
# orthogonal sets on rational grids


@dataclass
class OrthoSearchResult:
    best: list
    max_size_reached: bool
    nodes: int
    edges: int
    exhaustive: bool


def rational_points(lo, hi, den: int) -> list:
    """Rationals with denominator ``<= den`` in the box, coordinatewise."""
    axes = []
    for a, b in zip(lo, hi):
        vals = {Fraction(p, q) for q in range(1, den + 1) for p in range(math.ceil(a * q), math.floor(b * q) + 1)}
        axes.append(sorted(vals))
    return [tuple(p) for p in itertools.product(*axes)]


def orthogonal_set_search(
    pair, lo, hi, den: int, max_size: int = 8, exhaustive_cap: int = 5000
) -> OrthoSearchResult:
    """Largest set of grid frequencies whose pairwise differences are certified zeros of ``mu_hat``."""
    ev = _evaluator(pair)
    pts = rational_points(lo, hi, den)
    if not pts:
        return OrthoSearchResult([], False, 0, 0, True)
    P = np.array(pts, dtype=float).reshape(len(pts), ev.dim)
    G = nx.Graph()
    G.add_nodes_from(range(len(pts)))
    cert: dict = {}
    for i in range(len(pts)):
        D = P[i + 1 :] - P[i]
        if not len(D):
            continue
        vals = np.abs(ev.batch(D))
        for off in np.nonzero(vals < NUMERIC_PREFILTER)[0]:
            j = i + 1 + int(off)
            diff = lm.vec_sub(pts[j], pts[i])
            key = max(diff, tuple(-t for t in diff))
            if key not in cert:
                cert[key] = zero_certificate(ev, key) is not None
            if cert[key]:
                G.add_edge(i, j)
    # greedy pass, highest degree first
    best: list = []
    for v in sorted(G.nodes, key=lambda v: -G.degree(v)):
        clique = [v]
        for u in sorted(G[v], key=lambda u: -G.degree(u)):
            if all(G.has_edge(u, w) for w in clique):
                clique.append(u)
        if len(clique) > len(best):
            best = clique
        if len(best) >= max_size:
            break
    exhaustive = False
    active = G.subgraph([v for v in G if G.degree(v)])
    if len(best) < max_size and active.number_of_nodes() <= exhaustive_cap:
        exhaustive = True
        for c in nx.find_cliques(active):
            if len(c) > len(best):
                best = c
                if len(best) >= max_size:
                    exhaustive = False
                    break
    sol = sorted(pts[i] for i in best[:max_size])
    return OrthoSearchResult(sol, len(sol) >= max_size, len(pts), G.number_of_edges(), exhaustive)
