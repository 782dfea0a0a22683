"""Transition maps on frequency space, extreme cycles and dynamically simple spectra."""

from __future__ import annotations

import enum
import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import latmath as lm
from .cyclotomic import root_sum_vanishes
from .fourier import MuHatEvaluator, mask_eval, mask_modulus_one, mask_vanishes, zero_certificate
from .triple import AffinePair, HadamardTriple

NUMERIC_ZERO = 1e-9
CANDIDATE_CAP = 100_000
POINT_CAP = 1 << 22


@dataclass(frozen=True)
class TransitionSystem:
    """Maps ``tau_l(x) = (R^T)^{-1}(x + l)`` for ``l`` in ``L``, weighted by ``|m_B|^2``."""

    triple: HadamardTriple

    @property
    def R(self):
        return self.triple.R

    @property
    def B(self):
        return self.triple.B

    @property
    def L(self):
        return self.triple.L

    @property
    def dim(self) -> int:
        return self.triple.dim

    @property
    def RT(self):
        return lm.transpose(self.triple.R)

    def tau(self, l, x) -> lm.Vector:
        """Exact image ``(R^T)^{-1}(x + l)``."""
        return lm.solve(self.RT, lm.vec_add(x, l))

    def tau_word(self, word, x) -> lm.Vector:
        """``tau_{l_1 ... l_m}(x) = tau_{l_1}(... tau_{l_m}(x))``."""
        for l in reversed(word):
            x = self.tau(l, x)
        return x

    def extreme_successor(self, x):
        """The unique ``l`` with ``|m_B(tau_l x)| = 1`` and its image, or None."""
        hits = []
        for l in self.L:
            y = self.tau(l, x)
            if mask_modulus_one(self.B, y):
                hits.append((l, y))
        assert len(hits) <= 1, "two extreme transitions contradict the QMF identity"
        return hits[0] if hits else None


# ---------------------------------------------------------------------------
# attractor


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple
    power: int = 1  # invariance holds for all compositions of this many maps

    def contains(self, x) -> bool:
        return all(a <= t <= b for a, t, b in zip(self.lo, x, self.hi))

    def contains_box(self, other: "Box") -> bool:
        return all(a <= c and d <= b for a, b, c, d in zip(self.lo, self.hi, other.lo, other.hi))


def _interval_image(G, c, lo, hi):
    """Exact interval hull of ``G x + c`` over the box ``[lo, hi]``."""
    new_lo, new_hi = [], []
    for row, ci in zip(G, c):
        a = sum((g * (l if g >= 0 else h) for g, l, h in zip(row, lo, hi)), Fraction(0))
        b = sum((g * (h if g >= 0 else l) for g, l, h in zip(row, lo, hi)), Fraction(0))
        new_lo.append(a + ci)
        new_hi.append(b + ci)
    return new_lo, new_hi


def attractor_box(A, digits, max_power: int = 64) -> Box:
    """Smallest box invariant under the interval hulls of ``x -> A^{-1}(x + l)``.

    The hull map is affine in ``(lo, hi)``, so its fixed point solves a linear
    system exactly. When ``|A^{-1}|`` is not a contraction the same is done for
    the ``m``-fold compositions (the attractor is unchanged), and the box's
    ``power`` records ``m``.
    """
    A = lm.as_matrix(A)
    d = len(A)
    digits = lm.as_digits(digits, d)
    for m in range(1, max_power + 1):
        G = lm.inverse(lm.mat_pow(A, m))
        Gf = np.abs(np.array(G, dtype=float))
        if max(abs(np.linalg.eigvals(Gf))) >= 1 - 1e-12:
            continue
        shifts = [lm.mat_vec(G, v) for v in _words_sum(A, digits, m)]
        cmin = [min(s[i] for s in shifts) for i in range(d)]
        cmax = [max(s[i] for s in shifts) for i in range(d)]
        P = [[g if g > 0 else Fraction(0) for g in row] for row in G]
        Nn = [[-g if g < 0 else Fraction(0) for g in row] for row in G]
        # [lo; hi] = [[P, -Nn], [-Nn, P]] [lo; hi] + [cmin; cmax]
        size = 2 * d
        M = [[Fraction(int(i == j)) for j in range(size)] for i in range(size)]
        for i in range(d):
            for j in range(d):
                M[i][j] -= P[i][j]
                M[i][d + j] += Nn[i][j]
                M[d + i][j] += Nn[i][j]
                M[d + i][d + j] -= P[i][j]
        sol = lm.solve(tuple(tuple(r) for r in M), cmin + cmax)
        lo, hi = tuple(sol[:d]), tuple(sol[d:])
        box = Box(lo, hi, m)
        for s in shifts:
            ilo, ihi = _interval_image(G, s, lo, hi)
            if not box.contains_box(Box(tuple(ilo), tuple(ihi))):
                raise ArithmeticError("interval fixed point failed the invariance check")
        return box
    raise ArithmeticError(f"no contracting interval hull up to power {max_power}")


def _words_sum(A, digits, m: int) -> list:
    """``{l_1 + A l_2 + ... + A^{m-1} l_m}``, the digit set of the m-fold composition."""
    from .triple import digit_expansion

    return digit_expansion(A, digits, m) if m > 1 else list(digits)


def attractor_points(pair: AffinePair, depth: int, cap: int = POINT_CAP) -> np.ndarray:
    """All ``sum_{k=1..depth} R^{-k} b_k`` as floats, in lexicographic word order."""
    N, d = pair.N, pair.dim
    if N**depth > cap:
        raise OverflowError(f"{N}^{depth} points exceed cap {cap}")
    Rinv = np.array(lm.inverse(pair.R), dtype=float)
    Bf = np.array(pair.B, dtype=float)
    S = np.zeros((1, d))
    for _ in range(depth):
        S = (Bf[:, None, :] + S[None, :, :]).reshape(-1, d) @ Rinv.T
    return S


def attractor_points_exact(pair: AffinePair, depth: int, cap: int = 1 << 14) -> list:
    if pair.N**depth > cap:
        raise OverflowError(f"{pair.N}^{depth} points exceed cap {cap}")
    S = [tuple([0] * pair.dim)]
    for _ in range(depth):
        S = [lm.solve(pair.R, lm.vec_add(b, s)) for b in pair.B for s in S]
    return S


# ---------------------------------------------------------------------------
# extreme cycles


@dataclass(frozen=True)
class ExtremeCycle:
    word: tuple
    points: tuple
    base_point: tuple

    @property
    def period(self) -> int:
        return len(self.word)


@dataclass
class CycleSearch:
    cycles: list
    candidates: int
    complete: bool
    box: Box


def _canonical(word: list) -> tuple[tuple, int]:
    m = len(word)
    rots = [tuple(word[i:] + word[:i]) for i in range(m)]
    k = min(range(m), key=lambda i: rots[i])
    return rots[k], k


def enumerate_extreme_cycles(ts: TransitionSystem, cap: int = CANDIDATE_CAP) -> CycleSearch:
    """All extreme cycles, found on the dual of the invariant lattice inside an invariant box."""
    box = attractor_box(ts.RT, ts.L)
    inv = lm.smallest_invariant_lattice(ts.R, ts.B)
    if not inv.full_rank:
        raise ValueError("digit lattice is not full rank")
    dual = lm.dual_lattice(inv)
    try:
        cand = lm.lattice_points_in_box(dual, box.lo, box.hi, cap)
        complete = True
    except lm.TooManyPoints as exc:
        cand, complete = exc.points, False
    cand = [x for x in cand if mask_modulus_one(ts.B, x)]
    cset = set(cand)
    succ = {}
    for x in cand:
        nxt = ts.extreme_successor(x)
        if nxt is not None and nxt[1] in cset:
            succ[x] = nxt
    seen: set = set()
    cycles = {}
    for start in cand:
        path, pos = [], {}
        x = start
        while x in succ and x not in seen and x not in pos:
            pos[x] = len(path)
            path.append(x)
            x = succ[x][1]
        if x in pos:
            loop = path[pos[x]:]
            # walking x -> tau_a(x) means x = tau_{a_m ... a_1}(x); the word is reversed
            steps = [succ[p][0] for p in loop]
            word = list(reversed(steps))
            cw, _ = _canonical(word)
            if cw not in cycles:
                base = _fixed_point(ts, cw)
                pts = [base]
                for i in range(len(cw) - 1, 0, -1):
                    pts.append(ts.tau_word(cw[i:], base))
                cycles[cw] = ExtremeCycle(cw, tuple(pts), base)
        seen.update(path)
    out = sorted(cycles.values(), key=lambda c: (c.period, c.base_point))
    for c in out:
        _check_cycle(ts, c, box)
    return CycleSearch(out, len(cand), complete, box)


def _fixed_point(ts: TransitionSystem, word) -> lm.Vector:
    """Fixed point of the affine contraction ``tau_word``: ``x = A^{-m} x + s``."""
    m = len(word)
    s = ts.tau_word(word, tuple([0] * ts.dim))
    Am_inv = lm.inverse(lm.mat_pow(ts.RT, m))
    I = lm.identity(ts.dim)
    M = tuple(tuple(I[i][j] - Am_inv[i][j] for j in range(ts.dim)) for i in range(ts.dim))
    return lm.solve(M, s)


def _check_cycle(ts: TransitionSystem, c: ExtremeCycle, box: Box) -> None:
    assert ts.tau_word(c.word, c.base_point) == c.base_point
    for p in c.points:
        assert mask_modulus_one(ts.B, p) and box.contains(p)


def cycle_points(cycles) -> list:
    return sorted({p for c in cycles for p in c.points})


def dynamically_simple_spectrum(ts: TransitionSystem, n: int, cycles=None) -> list:
    """``{l_0 + R^T l_1 + ... + (R^T)^{k-1} l_{k-1} - (R^T)^k c}`` for ``k <= n``.

    ``c`` ranges over extreme cycle points. Returned sorted.
    """
    if cycles is None:
        cycles = enumerate_extreme_cycles(ts).cycles
    from .triple import digit_expansion

    RT = ts.RT
    out = set()
    pts = cycle_points(cycles)
    for k in range(n + 1):
        Lk = digit_expansion(RT, ts.L, k) if k else [tuple([0] * ts.dim)]
        P = lm.mat_pow(RT, k)
        tails = [lm.mat_vec(P, c) for c in pts]
        for lam in Lk:
            for t in tails:
                out.add(lm.normalize(lm.vec_sub(lam, t)))
    return sorted(out)


# ---------------------------------------------------------------------------
# invariant sets


@dataclass
class Closure:
    points: set
    complete: bool
    numeric_only: bool
    edges: int = 0


def transition_possible(ts: TransitionSystem, y) -> tuple[bool, bool]:
    """``(possible, exact)`` for a transition landing on ``y``."""
    exact = all(isinstance(t, (int, Fraction)) for t in y)
    if exact:
        return not mask_vanishes(ts.B, y), True
    return abs(mask_eval(ts.B, y)) > NUMERIC_ZERO, False


def invariant_closure(ts: TransitionSystem, seeds, cap: int = 10_000) -> Closure:
    """Closure of ``seeds`` under possible transitions, breadth first."""
    pts = set()
    queue = deque()
    for s in seeds:
        s = lm.as_vector(s, ts.dim) if all(isinstance(t, (int, Fraction)) for t in s) else tuple(map(float, s))
        if s not in pts:
            pts.add(s)
            queue.append(s)
    numeric = False
    edges = 0
    while queue:
        x = queue.popleft()
        for l in ts.L:
            if isinstance(x[0], float):
                y = tuple(np.linalg.solve(np.array(ts.RT, dtype=float), np.add(x, l)).tolist())
            else:
                y = ts.tau(l, x)
            ok, exact = transition_possible(ts, y)
            numeric |= not exact
            if not ok:
                continue
            edges += 1
            if y not in pts:
                if len(pts) >= cap:
                    return Closure(pts, False, numeric, edges)
                pts.add(y)
                queue.append(y)
    return Closure(pts, True, numeric, edges)


def invariant_coordinate_blocks(ts: TransitionSystem) -> list[tuple[int, ...]]:
    """Proper coordinate subsets ``E`` on which ``(R^T)^{-1}`` acts by itself.

    For such ``E``, ``(tau_l x)_E`` depends only on ``x_E``.
    """
    G = lm.inverse(ts.RT)
    d = ts.dim
    out = []
    for r in range(1, d):
        for E in itertools.combinations(range(d), r):
            if all(G[i][j] == 0 for i in E for j in range(d) if j not in E):
                out.append(E)
    return out


def mask_vanishes_on_slice(B, E, xE) -> bool:
    """Exact test that ``m_B(x) = 0`` for every ``x`` whose ``E``-coordinates equal ``xE``."""
    groups: dict = {}
    for b in B:
        free = tuple(t for i, t in enumerate(b) if i not in E)
        groups.setdefault(free, []).append(sum(Fraction(b[i]) * v for i, v in zip(E, xE)))
    return all(root_sum_vanishes(ph) for ph in groups.values())


def slice_closure(ts: TransitionSystem, E, seeds, cap: int = 10_000) -> Closure:
    """Closure of ``E``-coordinate values under transitions not ruled out on the whole slice.

    With ``S`` the result, ``{x in box : x_E in S}`` is a compact invariant set
    whenever the closure completes.
    """
    G = lm.inverse(ts.RT)
    GE = [[G[i][j] for j in E] for i in E]
    LE = sorted({tuple(l[i] for i in E) for l in ts.L})
    pts = {tuple(Fraction(t) for t in s) for s in seeds}
    queue = deque(pts)
    edges = 0
    while queue:
        x = queue.popleft()
        for l in LE:
            y = lm.normalize(lm.mat_vec(GE, lm.vec_add(x, l)))
            if mask_vanishes_on_slice(ts.B, E, y):
                continue
            edges += 1
            if y not in pts:
                if len(pts) >= cap:
                    return Closure(pts, False, False, edges)
                pts.add(y)
                queue.append(y)
    return Closure(pts, True, False, edges)


class Simplicity(enum.Enum):
    SIMPLE = "Simple"
    NOT_SIMPLE = "NotSimple"
    UNKNOWN = "Unknown"


@dataclass
class SimplicityVerdict:
    verdict: Simplicity
    witness_seed: tuple | None = None
    witness_size: int = 0
    reason: str = ""
    seeds_tried: int = 0
    coordinates: tuple | None = None  # the exact block E of a slice witness


def _seed_points(lat: lm.Lattice, q: int, lo, hi) -> list:
    scaled = lm.lattice_from_generators([[Fraction(t, q) for t in v] for v in lat.columns()], lat.dim)
    return lm.lattice_points_in_box(scaled, lo, hi, 100_000)


def dynamical_simplicity(
    ts: TransitionSystem, denominators=(2, 3, 4), cap: int = 200, cycles=None
) -> SimplicityVerdict:
    """Look for a compact invariant set that avoids every extreme cycle.

    Two witness kinds are tried: finite exact closures of rational seeds, and
    slices ``{x in box : x_E in S}`` for coordinate blocks ``E`` preserved by
    the transition maps. Either one proves the triple is not dynamically
    simple. One dimension is always dynamically simple.
    """
    if ts.dim == 1:
        return SimplicityVerdict(Simplicity.SIMPLE, reason="every one-dimensional triple is dynamically simple")
    if cycles is None:
        cycles = enumerate_extreme_cycles(ts).cycles
    cpts = set(cycle_points(cycles))
    box = attractor_box(ts.RT, ts.L)
    dual = lm.dual_lattice(lm.smallest_invariant_lattice(ts.R, ts.B))
    tried, capped = 0, False
    if box.power == 1:
        for E in invariant_coordinate_blocks(ts):
            proj = lm.lattice_from_generators([[v[i] for i in E] for v in dual.columns()], len(E))
            cE = {tuple(p[i] for i in E) for p in cpts}
            lo, hi = [box.lo[i] for i in E], [box.hi[i] for i in E]
            done: set = set()
            for q in denominators:
                for s in _seed_points(proj, q, lo, hi):
                    if s in cE or s in done:
                        continue
                    tried += 1
                    cl = slice_closure(ts, E, [s], cap)
                    if not cl.complete:
                        capped = True
                        continue
                    done |= cl.points
                    if cl.points.isdisjoint(cE):
                        return SimplicityVerdict(
                            Simplicity.NOT_SIMPLE, s, len(cl.points),
                            "invariant slice disjoint from all extreme cycles", tried, E,
                        )
    done = set()
    for q in denominators:
        for s in _seed_points(dual, q, box.lo, box.hi):
            if s in cpts or s in done:
                continue
            tried += 1
            cl = invariant_closure(ts, [s], cap)
            if not cl.complete:
                capped = True
                continue
            done |= cl.points
            if cl.points.isdisjoint(cpts):
                return SimplicityVerdict(
                    Simplicity.NOT_SIMPLE, s, len(cl.points),
                    "finite invariant set disjoint from all extreme cycles", tried,
                )
    reason = "closure cap reached" if capped else "no obstruction found among the seeds"
    return SimplicityVerdict(Simplicity.UNKNOWN, reason=reason, seeds_tried=tried)


# ---------------------------------------------------------------------------
# periodic zero set


@dataclass
class ZeroScanEntry:
    xi: tuple
    certified: bool
    shifts_checked: int
    failed_shift: tuple | None = None
    levels: list = field(default_factory=list)


def rational_grid(dim: int, q: int) -> list:
    """``{0, 1/q, ..., (q-1)/q}^dim``."""
    return [tuple(Fraction(i, q) for i in idx) for idx in itertools.product(range(q), repeat=dim)]


def periodic_zero_scan(pair: AffinePair, grid, depth: int = 200, kmax: int = 3) -> list[ZeroScanEntry]:
    """For each grid point, try to certify ``mu_hat(xi + k) = 0`` for every ``||k||_inf <= kmax``."""
    ev = MuHatEvaluator(pair.R, pair.B, max_depth=depth)
    out = []
    shifts = list(itertools.product(range(-kmax, kmax + 1), repeat=pair.dim))
    for xi in grid:
        xi = lm.as_vector(xi, pair.dim)
        levels, failed = [], None
        for k in shifts:
            j = zero_certificate(ev, lm.vec_add(xi, k), depth)
            if j is None:
                failed = k
                break
            levels.append(j)
        out.append(ZeroScanEntry(xi, failed is None, len(levels) + (failed is not None), failed, levels))
    return out
