import itertools
from fractions import Fraction

import numpy as np
import pytest

from fractal_spectra import dynamics as dy
from fractal_spectra import latmath as lm
from fractal_spectra.fourier import MuHatEvaluator, mask_eval
from fractal_spectra.triple import AffinePair, HadamardTriple


def test_attractor_box_examples(cantor4, lebesgue, not_simple):
    b = dy.attractor_box(lm.transpose(cantor4.R), cantor4.L)
    assert b.lo[0] >= 0 and b.hi[0] <= Fraction(1, 3)
    b = dy.attractor_box(lm.transpose(lebesgue.R), lebesgue.L)
    assert (b.lo, b.hi) == ((0,), (1,))
    b = dy.attractor_box(lm.transpose(not_simple.R), not_simple.L)
    assert b.contains_box(dy.Box((0, -1), (1, 1)))


def test_attractor_box_is_invariant(not_simple, zero_set):
    for T in (not_simple, zero_set):
        A = lm.transpose(T.R)
        box = dy.attractor_box(A, T.L)
        Ainv = lm.inverse(A)
        for corner in itertools.product(*zip(box.lo, box.hi)):
            for l in T.L:
                y = lm.mat_vec(Ainv, lm.vec_add(corner, l))
                if box.power == 1:
                    assert box.contains(y)


def test_attractor_points_examples():
    pts = dy.attractor_points(AffinePair(2, [0, 1]), 3)
    assert sorted(pts[:, 0].tolist()) == [k / 8 for k in range(8)]
    pts = dy.attractor_points(AffinePair(4, [0, 2]), 2)
    assert sorted(pts[:, 0].tolist()) == [0, 1 / 8, 1 / 2, 5 / 8]
    exact = dy.attractor_points_exact(AffinePair(4, [0, 2]), 2)
    assert sorted(exact) == [(0,), (Fraction(1, 8),), (Fraction(1, 2),), (Fraction(5, 8),)]


def test_attractor_points_count(zero_set):
    pts = dy.attractor_points(zero_set.pair, 8)
    assert pts.shape == (4**8, 2)


def test_attractor_points_in_box(not_simple):
    pts = dy.attractor_points(not_simple.pair, 6)
    box = dy.attractor_box(not_simple.R, not_simple.B)
    lo, hi = np.array(box.lo, dtype=float), np.array(box.hi, dtype=float)
    assert np.all(pts >= lo - 1e-12) and np.all(pts <= hi + 1e-12)


def cycle_sets(cs):
    return {frozenset(c.points) for c in cs.cycles}


def test_cycles_lebesgue(lebesgue):
    cs = dy.enumerate_extreme_cycles(dy.TransitionSystem(lebesgue))
    assert cs.complete
    assert cycle_sets(cs) == {frozenset({(0,)}), frozenset({(1,)})}


def test_cycles_jp(cantor4):
    cs = dy.enumerate_extreme_cycles(dy.TransitionSystem(cantor4))
    assert cycle_sets(cs) == {frozenset({(0,)})}


def test_cycles_not_simple(not_simple):
    cs = dy.enumerate_extreme_cycles(dy.TransitionSystem(not_simple))
    assert cycle_sets(cs) == {frozenset({p}) for p in [(0, 0), (1, 0), (0, 1), (1, -1)]}
    for c in cs.cycles:
        for p in c.points:
            assert all(isinstance(t, (int, Fraction)) for t in p)


def test_cycle_points_are_extreme(not_simple, zero_set):
    for T in (not_simple, zero_set):
        ts = dy.TransitionSystem(T)
        for c in dy.enumerate_extreme_cycles(ts).cycles:
            for p in c.points:
                assert abs(abs(mask_eval(T.B, p)) - 1) < 1e-12
            assert dy.TransitionSystem.tau_word(ts, c.word, c.base_point) == c.base_point


def test_simple_spectrum_lebesgue(lebesgue):
    ts = dy.TransitionSystem(lebesgue)
    assert dy.dynamically_simple_spectrum(ts, 4) == [(k,) for k in range(-16, 16)]
    assert dy.dynamically_simple_spectrum(ts, 5) == [(k,) for k in range(-32, 32)]


def test_simple_spectrum_jp(cantor4):
    got = dy.dynamically_simple_spectrum(dy.TransitionSystem(cantor4), 3)
    want = sorted({(sum(4**k * l for k, l in enumerate(ls)),) for ls in itertools.product([0, 1], repeat=3)})
    assert got == want


def test_simple_spectrum_not_simple(not_simple):
    got = dy.dynamically_simple_spectrum(dy.TransitionSystem(not_simple), 3)
    assert all(all(Fraction(t).denominator == 1 for t in p) for p in got)
    assert (Fraction(1, 3), 0) not in got
    assert (0, 0) in got


def test_simple_spectrum_orthogonal(not_simple):
    ev = MuHatEvaluator(not_simple.R, not_simple.B)
    pts = dy.dynamically_simple_spectrum(dy.TransitionSystem(not_simple), 2)
    for p, q in itertools.combinations(pts, 2):
        assert abs(ev.evaluate(lm.vec_sub(p, q)).value) < 1e-8


def test_invariant_closure_examples(lebesgue, not_simple):
    ts = dy.TransitionSystem(lebesgue)
    assert dy.invariant_closure(ts, [(0,)]).points == {(0,)}
    assert dy.invariant_closure(ts, [(1,)]).points == {(1,)}
    ts2 = dy.TransitionSystem(not_simple)
    cl = dy.invariant_closure(ts2, [(Fraction(1, 3), 0)], cap=500)
    cyc = {p for c in dy.enumerate_extreme_cycles(ts2).cycles for p in c.points}
    assert not (cl.points & cyc)


def test_simplicity_verdicts(lebesgue, not_simple, zero_set):
    assert dy.dynamical_simplicity(dy.TransitionSystem(lebesgue)).verdict is dy.Simplicity.SIMPLE
    v = dy.dynamical_simplicity(dy.TransitionSystem(not_simple))
    assert v.verdict is dy.Simplicity.NOT_SIMPLE
    assert v.witness_seed is not None
    v = dy.dynamical_simplicity(dy.TransitionSystem(zero_set))
    assert v.verdict is dy.Simplicity.NOT_SIMPLE


def test_slice_witness_is_invariant(not_simple):
    # every transition from a point with first coordinate in {1/3, 2/3} either lands
    # back in that slice or is impossible
    ts = dy.TransitionSystem(not_simple)
    for x1 in (Fraction(1, 3), Fraction(2, 3)):
        for x2 in [Fraction(k, 4) for k in range(-4, 5)]:
            for l in ts.L:
                y = ts.tau(l, (x1, x2))
                if abs(mask_eval(ts.B, y)) > 1e-12:
                    assert y[0] in (Fraction(1, 3), Fraction(2, 3))


def test_zero_scan_zero_set(zero_set):
    entries = dy.periodic_zero_scan(zero_set.pair, [(0, Fraction(1, 3))], kmax=3)
    assert entries[0].certified and entries[0].shifts_checked == 49


def test_zero_scan_jp(cantor4):
    entries = dy.periodic_zero_scan(cantor4.pair, dy.rational_grid(1, 6), kmax=2)
    assert entries and not any(e.certified for e in entries)


def test_zero_scan_origin_never(zero_set):
    e = dy.periodic_zero_scan(zero_set.pair, [(0, 0)], kmax=1)[0]
    assert not e.certified and e.failed_shift is not None
    ev = MuHatEvaluator(zero_set.R, zero_set.B)
    assert abs(ev.evaluate(e.failed_shift).value) > 1e-6
