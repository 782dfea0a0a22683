import cmath
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from fractal_spectra.cyclotomic import cyclotomic_poly, int_root_sum_vanishes, root_sum_vanishes


def test_cyclotomic_small():
    assert cyclotomic_poly(1) == (-1, 1)
    assert cyclotomic_poly(6) == (1, -1, 1)
    assert cyclotomic_poly(12) == (1, 0, -1, 0, 1)


def test_known_sums():
    assert root_sum_vanishes([Fraction(0), Fraction(1, 2)])
    assert root_sum_vanishes([Fraction(0), Fraction(1, 3), Fraction(2, 3)])
    assert not root_sum_vanishes([Fraction(0), Fraction(1, 3)])
    assert root_sum_vanishes([Fraction(0), Fraction(1, 2)], [2, 2])
    assert not root_sum_vanishes([Fraction(0), Fraction(1, 2)], [2, 1])
    # a 2-cycle plus a rotated 3-cycle mod 30
    assert int_root_sum_vanishes([0, 15, 1, 11, 21], 30)
    assert not int_root_sum_vanishes([0, 15, 1, 11], 30)


@given(st.integers(1, 40), st.lists(st.integers(0, 200), min_size=1, max_size=8))
@settings(max_examples=300, deadline=None)
def test_matches_numeric(den, nums):
    s = sum(cmath.exp(2j * cmath.pi * k / den) for k in nums)
    if abs(s) > 1e-6:
        assert not int_root_sum_vanishes(nums, den)
    elif abs(s) < 1e-12:
        assert int_root_sum_vanishes(nums, den)
