"""Acceptance gate: one test per criterion, each timed against its budget.

Run ``pytest tests/test_acceptance.py`` (a PASS/FAIL line per criterion is
printed in the terminal summary) or ``python3 tests/test_acceptance.py``.
"""

import contextlib
import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from fractal_spectra import dynamics as dy
from fractal_spectra import fourier as fo
from fractal_spectra import spectrum as sp
from fractal_spectra import tower as tw
from fractal_spectra import triple as tr

RESULTS: dict[int, tuple[bool, str, float]] = {}


@contextlib.contextmanager
def criterion(num: int, title: str, budget: float | None = None):
    t0 = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        dt = time.perf_counter() - t0
        over = budget is not None and dt >= budget
        RESULTS[num] = (ok and not over, title, dt)
    if over:
        pytest.fail(f"criterion {num} took {dt:.2f} s, budget {budget} s")


def test_c01_jp_triple(cantor4):
    with criterion(1, "scale-4 Cantor triple verified, QMF residual < 1e-12", budget=1.0):
        rep = tr.verify_triple(4, [0, 2], [0, 1])
        assert rep.is_triple and rep.unitarity_defect < 1e-12
        rng = np.random.default_rng(1)
        for x in rng.uniform(-10, 10, 100):
            assert fo.qmf_residual(4, [0, 2], [0, 1], float(x)) < 1e-12


def test_c02_product_triples(cantor4, zero_set):
    with criterion(2, "product triples n <= 6 on the scale-4 Cantor triple and the planar zero-set triple", budget=10.0):
        for T in (cantor4, zero_set):
            for n in range(1, 7):
                P = tr.product_triple(T, n)
                rep = tr.verify_triple(P.R, P.B, P.L)
                assert rep.is_triple, (n, rep.defects)


def test_c03_orthogonality(cantor4):
    with criterion(3, "scale-4 Cantor Lambda_6 pairwise |mu_hat| < 1e-8", budget=30.0):
        lam = sp.canonical_levels(cantor4, 6).levels[-1]
        assert len(lam) == 64
        r = sp.orthogonality_check(cantor4.pair, lam)
        assert r.max_value < 1e-8


def test_c04_parseval(cantor4):
    with criterion(4, "Parseval identity defect < 1e-10, upper sandwich, 100 step functions"):
        rng = np.random.default_rng(4)
        ev = fo.MuHatEvaluator(cantor4.R, cantor4.B)
        from fractal_spectra import latmath as lm

        RT = lm.transpose(cantor4.R)
        cache = {n: sp._mu_hat_level(ev, RT, tr.digit_expansion(RT, cantor4.L, n), n) for n in range(1, 6)}
        for i in range(100):
            n = 1 + i % 5
            w = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
            r = sp.parseval_defect(cantor4, sp.StepFunction(n, w), cache[n])
            assert r.identity_defect < 1e-10
            assert r.lhs <= r.norm_sq * (1 + 1e-9)


def test_c05_incompleteness(lebesgue):
    with criterion(5, "(2,{0,1}) delta strictly decreasing, < 1e-3 by depth 10"):
        d = sp.delta_estimate(lebesgue.pair, sp.canonical_levels(lebesgue, 10))
        assert all(b < a for a, b in zip(d.per_depth, d.per_depth[1:]))
        assert d.value < 1e-3
        assert d.argmin == (10, (2**10 - 1,))


def test_c06_extreme_cycles(lebesgue, not_simple):
    with criterion(6, "extreme cycles exact for (2,{0,1}) and the 2x2 example", budget=5.0):
        cs = dy.enumerate_extreme_cycles(dy.TransitionSystem(lebesgue))
        assert {frozenset(c.points) for c in cs.cycles} == {frozenset({(0,)}), frozenset({(1,)})}
        cs = dy.enumerate_extreme_cycles(dy.TransitionSystem(not_simple))
        got = {frozenset(c.points) for c in cs.cycles}
        assert got == {frozenset({p}) for p in [(0, 0), (1, 0), (0, 1), (1, -1)]}
        assert all(isinstance(t, (int, Fraction)) for c in cs.cycles for p in c.points for t in p)


def test_c07_simple_spectrum(lebesgue, not_simple):
    with criterion(7, "cycle-generated spectrum: Z cap [-32,31]; 2x2 subset of Z^2"):
        got = dy.dynamically_simple_spectrum(dy.TransitionSystem(lebesgue), 5)
        assert got == [(k,) for k in range(-32, 32)]
        got = dy.dynamically_simple_spectrum(dy.TransitionSystem(not_simple), 4)
        assert all(Fraction(t).denominator == 1 for p in got for t in p)
        assert (Fraction(1, 3), 0) not in got


def test_c08_zero_set(zero_set):
    with criterion(8, "zero certificates at (0,1/3)+k for 49 shifts; completion fails"):
        ev = fo.MuHatEvaluator(zero_set.R, zero_set.B)
        for k in itertools.product(range(-3, 4), repeat=2):
            assert fo.zero_certificate(ev, (k[0], Fraction(1, 3) + k[1])) is not None
        with pytest.raises(sp.CompletionFailure):
            sp.complete_spectrum(zero_set)


def test_c09_tower():
    with criterion(9, "tower (2,100,1) x3 perturbation and eps bounds; (2,5,1) rejected"):
        t = tw.build_tower_th01([(2, 100, 1)] * 3)
        for r in t.reports:
            assert r.perturbation <= 2 * math.pi * math.sqrt(2) / 100
            assert r.eps_meas <= 0.08886
        with pytest.raises(tw.TowerError) as exc:
            tw.build_tower_th01([(2, 5, 1)])
        assert abs(tw.th01_level(2, 5, 1).eps - 1.777) < 1e-3
        assert "1.777" in str(exc.value)


def test_c10_two_paths():
    with criterion(10, "self-similar tower vs IFS evaluator within 1e-9 at 50 points"):
        t = tw.self_similar_tower(4, [0, 2], [0, 1], 40)
        ev = fo.MuHatEvaluator(4, [0, 2], tol=1e-12)
        rng = np.random.default_rng(10)
        for xi in rng.uniform(-8, 8, 50):
            assert abs(tw.tower_mu_hat(t, float(xi)).value - ev.evaluate(float(xi)).value) < 1e-9


def test_c11_selection():
    with criterion(11, "selection oracle (0.5,1.5); heuristics within 5%; reproducible seeds"):
        r = tw.exhaustive_select(tw.SelectionProblem(tr.AffinePair(3, [0, 2]), 1))
        assert abs(r.bounds.lower - 0.5) < 1e-10 and abs(r.bounds.upper - 1.5) < 1e-10
        p = tw.SelectionProblem(tr.AffinePair(3, [0, 2]), 2)
        best = tw.exhaustive_select(p).bounds.lower
        for m in (tw.Method.GREEDY, tw.Method.RANDOM_SWAP):
            assert tw.heuristic_select(p, m, 7).bounds.lower >= 0.95 * best
        a = tw.records_csv([tw.heuristic_select(p, tw.Method.RANDOM_SWAP, 7)])
        b = tw.records_csv([tw.heuristic_select(p, tw.Method.RANDOM_SWAP, 7)])
        assert a == b


def test_c12_middle_third(middle_third):
    with criterion(12, "middle-third search finds no 3 mutually orthogonal frequencies", budget=60.0):
        r = sp.orthogonal_set_search(middle_third, [-10], [10], 12)
        assert len(r.best) <= 2 and r.exhaustive


def report_lines() -> list[str]:
    lines = []
    for num in range(1, 13):
        if num not in RESULTS:
            lines.append(f"criterion {num:2d}: NOT RUN")
            continue
        ok, title, dt = RESULTS[num]
        lines.append(f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({dt:.2f} s)")
    return lines


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
