import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fractal_spectra import latmath as lm
from fractal_spectra import triple as tr


def brute_gram_defect(R, B, L):
    """Max entry of |H* H - I| built directly from R^{-1} as floats."""
    Rinv = np.linalg.inv(np.array(R, dtype=float))
    H = np.array([[np.exp(2j * np.pi * (np.array(l) @ Rinv @ np.array(b))) for b in B] for l in L]) / np.sqrt(len(B))
    return float(np.max(np.abs(H.conj().T @ H - np.eye(len(B)))))


@pytest.mark.parametrize("data", [(4, [0, 2], [0, 1]), (2, [0, 1], [0, 1])])
def test_verify_examples(data):
    rep = tr.verify_triple(*data)
    assert rep.is_triple and rep.exact_certified
    assert rep.unitarity_defect < 1e-12


def test_zero_set_triple(zero_set):
    assert zero_set.report.is_triple


def test_rejects():
    assert not tr.verify_triple(3, [0, 2], [0, 1]).is_triple
    assert not tr.verify_triple(1, [0], [0]).is_triple
    assert not tr.verify_triple(4, [0, 2], [0, 1, 2]).is_triple
    with pytest.raises(tr.TripleError):
        tr.HadamardTriple.from_data(3, [0, 2], [0, 1])


def test_product_examples(cantor4, lebesgue):
    P = tr.product_triple(cantor4, 2)
    assert sorted(P.B) == [(0,), (2,), (8,), (10,)]
    assert sorted(P.L) == [(0,), (1,), (4,), (5,)]
    assert tr.product_triple(cantor4, 1).B == cantor4.B
    P3 = tr.product_triple(lebesgue, 3)
    assert sorted(P3.B) == [(k,) for k in range(8)] == sorted(P3.L)


@pytest.mark.parametrize("n", [2, 3])
def test_product_defect_matches_brute(zero_set, n):
    P = tr.product_triple(zero_set, n)
    assert brute_gram_defect(P.R, P.B, P.L) < 1e-9


def test_digit_expansion_order():
    # word order: the first digit is the least significant
    assert tr.digit_expansion(4, [0, 2], 2) == [(0,), (8,), (2,), (10,)]


def test_conjugate(cantor4, zero_set):
    assert tr.conjugate_triple(cantor4, [[1]]).B == cantor4.B
    C = tr.conjugate_triple(zero_set, [[1, 0], [1, 1]])
    assert C.report.is_triple
    assert tr.conjugate_triple(zero_set, [[1, 0], [0, 1]]).R == zero_set.R
    with pytest.raises(tr.TripleError):
        tr.conjugate_triple(zero_set, [[2, 0], [0, 1]])


@given(st.sampled_from([((1, 0), (1, 1)), ((1, 1), (0, 1)), ((2, 1), (1, 1)), ((0, 1), (1, 0)), ((1, -1), (0, 1))]))
@settings(max_examples=10, deadline=None)
def test_conjugation_preserves_triples(M):
    T = tr.HadamardTriple.from_data([[2, 1], [0, 2]], [[0, 0], [3, 0], [0, 1], [3, 1]], [[0, 0], [1, 0], [0, 1], [1, 1]])
    C = tr.conjugate_triple(T, M)
    assert C.report.is_triple
    assert brute_gram_defect(C.R, C.B, C.L) < 1e-12


def test_quasi_product_witness(zero_set):
    w = tr.QuasiProductWitness(
        M=((1, 0), (0, 1)), r=1, R1=((4,),), R2=((2,),), C=((1,),), Q=((3,),),
        u=[(0,), (1,)], v=[(0,), (0,)], c=[[(0,), (1,)], [(0,), (1,)]],
    )
    assert tr.verify_quasi_product(zero_set, w).ok


def test_quasi_product_bad_q():
    pair = tr.AffinePair([[2, 0], [0, 2]], [[0, 0], [0, 1], [1, 0], [1, 1]])
    w = tr.QuasiProductWitness(
        M=((1, 0), (0, 1)), r=1, R1=((2,),), R2=((2,),), C=((0,),), Q=((1,),),
        u=[(0,), (1,)], v=[(0,), (0,)], c=[[(0,), (1,)], [(0,), (1,)]],
    )
    rep = tr.verify_quasi_product(pair, w)
    assert not rep.ok and rep.defects


def test_quasi_product_needs_dim_two(cantor4):
    with pytest.raises(tr.TripleError):
        tr.search_quasi_product(cantor4)


def test_quasi_search(zero_set):
    w = tr.search_quasi_product(zero_set, entry_bound=1)
    assert w is not None
    assert w.M == ((1, 0), (0, 1))
    assert tr.verify_quasi_product(zero_set, w).ok


def test_exact_orthogonality_matches_numeric():
    # every 2-digit set mod 6 against every 2-frequency set
    for b in range(1, 6):
        for l in range(1, 6):
            exact = tr.exact_orthogonality(((6,),), ((0,), (b,)), ((0,), (l,)))
            assert exact == (brute_gram_defect([[6]], [[0], [b]], [[0], [l]]) < 1e-12)


def test_residue_candidates_are_complete():
    R = [[2, 1], [0, 2]]
    B = lm.complete_residues(R)
    L = lm.complete_residues(lm.transpose(R))
    # complete residues never give a Hadamard triple with L from (R^T) residues unless compatible
    rep = tr.verify_triple(R, B, L)
    assert rep.is_triple == (brute_gram_defect(R, B, L) < 1e-10)
