import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractal_spectra import spectrum as sp
from fractal_spectra.fourier import MuHatEvaluator
from fractal_spectra.triple import AffinePair, HadamardTriple, digit_expansion

from test_fourier import cantor4_oracle, lebesgue_oracle


def test_canonical_levels(cantor4, lebesgue):
    c = sp.canonical_levels(cantor4, 2)
    assert c.levels[0] == [(0,), (1,)]
    assert c.levels[1] == [(0,), (1,), (4,), (5,)]
    assert c.is_nested()
    assert sp.canonical_levels(lebesgue, 3).levels[2] == [(k,) for k in range(8)]


def test_cycle_levels_match_canonical_for_cantor4(cantor4):
    a = sp.canonical_levels(cantor4, 3).levels[-1]
    b = sp.cycle_levels(cantor4, 3).levels[-1]
    assert set(a) == set(b)


def test_orthogonality(cantor4, lebesgue):
    assert sp.orthogonality_check(cantor4.pair, sp.canonical_levels(cantor4, 3).levels[-1]).max_value < 1e-8
    assert sp.orthogonality_check(lebesgue.pair, [(k,) for k in range(8)]).max_value < 1e-10
    r = sp.orthogonality_check(cantor4.pair, [(0,)])
    assert r.max_value == 0 and r.pairs == 0


def test_orthogonality_detects_failure(cantor4):
    r = sp.orthogonality_check(cantor4.pair, [(0,), (2,)])
    assert r.max_value == pytest.approx(abs(cantor4_oracle(2)), abs=1e-9)


def test_delta_trivial(cantor4):
    from fractal_spectra.spectrum import Provenance, SpectrumCandidate

    cand = SpectrumCandidate(cantor4, [[(0,)]] * 4, Provenance.CANONICAL, [1, 2, 3, 4])
    assert sp.delta_estimate(cantor4.pair, cand).value == pytest.approx(1.0, abs=1e-12)


def test_delta_lebesgue(lebesgue):
    cand = sp.canonical_levels(lebesgue, 10)
    d = sp.delta_estimate(lebesgue.pair, cand)
    assert all(b < a for a, b in zip(d.per_depth, d.per_depth[1:]))
    assert d.value < 1e-3
    assert d.argmin == (10, (2**10 - 1,))
    x = (2**10 - 1) / 2**10
    assert d.value == pytest.approx(abs(lebesgue_oracle(x)) ** 2, rel=1e-8)


def test_delta_jp_baseline(cantor4):
    d = sp.delta_estimate(cantor4.pair, sp.canonical_levels(cantor4, 12))
    assert d.value > 0
    # frozen baseline
    assert d.value == pytest.approx(0.7363804122732758, abs=1e-10)
    assert d.argmin == (12, (5592405,))
    assert d.value == pytest.approx(abs(cantor4_oracle(5592405 / 4**12)) ** 2, abs=1e-10)


def test_parseval_all_ones(cantor4):
    r = sp.parseval_defect(cantor4, sp.StepFunction(1, np.ones(2)))
    assert r.identity_defect < 1e-10
    assert r.norm_sq == pytest.approx(1.0)


def test_parseval_single_weight(zero_set):
    w = np.zeros(16, dtype=complex)
    w[5] = 1
    r = sp.parseval_defect(zero_set, sp.StepFunction(2, w))
    assert r.norm_sq == pytest.approx(1 / 16)
    assert r.identity_defect < 1e-10


def test_parseval_random(cantor4):
    rng = np.random.default_rng(3)
    for _ in range(20):
        w = rng.normal(size=16) + 1j * rng.normal(size=16)
        r = sp.parseval_defect(cantor4, sp.StepFunction(4, w))
        assert r.identity_defect < 1e-10
        assert r.lhs <= r.norm_sq * (1 + 1e-9)
        assert r.lhs >= r.delta_lower * r.norm_sq * (1 - 1e-9)


def test_parseval_lhs_by_quadrature(lebesgue):
    # for Lebesgue measure the step function sits on dyadic intervals; compare one coefficient
    w = np.array([1.0, 2.0, -1.0, 0.5])
    r = sp.parseval_defect(lebesgue, sp.StepFunction(2, w))
    # sum over lambda in {0..3} of |int f e^{-2 pi i lambda x}|^2 computed directly
    Bn = [b[0] for b in digit_expansion(lebesgue.R, lebesgue.B, 2)]
    total = 0.0
    for lam in range(4):
        c = 0
        for wb, b in zip(w, Bn):
            a = b / 4
            c += wb * (np.exp(-2j * np.pi * lam * (a + 0.25)) - np.exp(-2j * np.pi * lam * a)) / (-2j * np.pi * lam) if lam else wb * 0.25
        total += abs(c) ** 2
    assert r.lhs == pytest.approx(total, rel=1e-12)


def test_complete_jp(cantor4):
    cand = sp.complete_spectrum(cantor4)
    assert all(not o for o in cand.offsets)
    canon = sp.canonical_levels(cantor4, cand.scales[-1]).levels
    assert [canon[m - 1] for m in cand.scales] == cand.levels


def test_complete_lebesgue(lebesgue):
    cand = sp.complete_spectrum(lebesgue)
    assert any(cand.offsets)
    # compare at the same scales: the canonical set collapses toward the zero at 1
    canon = sp.canonical_levels(lebesgue, cand.scales[-1])
    assert sp.delta_estimate(lebesgue.pair, cand).value > sp.delta_estimate(lebesgue.pair, canon).value
    assert sp.orthogonality_check(lebesgue.pair, cand.levels[1]).max_value < 1e-10


def test_complete_zero_set_fails(zero_set):
    with pytest.raises(sp.CompletionFailure):
        sp.complete_spectrum(zero_set)


def test_lipschitz_bound_holds(cantor4):
    ev = MuHatEvaluator(cantor4.R, cantor4.B, tol=1e-13)
    lip = sp.mu_hat_lipschitz(cantor4.pair)
    xs = np.linspace(-3, 3, 301)
    vals = np.array([ev.evaluate(float(x)).value for x in xs])
    slopes = np.abs(np.diff(vals)) / np.diff(xs)
    assert np.max(slopes) <= lip


def test_orthosearch_jp(cantor4):
    r = sp.orthogonal_set_search(cantor4.pair, [0], [20], 1, max_size=4)
    assert len(r.best) >= 4
    ev = MuHatEvaluator(cantor4.R, cantor4.B)
    for a, b in itertools.combinations(r.best, 2):
        assert ev.evaluate(tuple(Fraction(x) - Fraction(y) for x, y in zip(a, b))).value == 0


def test_orthosearch_empty_box(cantor4):
    r = sp.orthogonal_set_search(cantor4.pair, [1], [0], 1)
    assert r.best == []


def test_rational_points():
    pts = sp.rational_points([0], [1], 3)
    assert sorted(pts) == sorted({(Fraction(p, q),) for q in (1, 2, 3) for p in range(q + 1)})
