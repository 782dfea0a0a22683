"""Hadamard triples: verification, level-n products, conjugation, quasi-product witnesses."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from . import latmath as lm
from .cyclotomic import int_root_sum_vanishes
from .fourier import build_fourier_matrix, character_unitarity_defect, product_unitarity_defect, unitarity_defect

UNITARY_TOL = 1e-10
EXACT_PAIR_CAP = 64  # exact column-orthogonality certificates only for #B <= this
PRODUCT_CAP = 1 << 16
DENSE_DEFECT_MAX = 256


class TripleError(ValueError):
    pass


@dataclass(frozen=True)
class AffinePair:
    """Expansive integer matrix ``R`` with a simple digit set ``B`` (0 in B)."""

    R: lm.Matrix
    B: tuple

    def __init__(self, R, B):
        R = lm.as_matrix(R)
        B = lm.as_digits(B, len(R))
        if not lm.is_expansive(R):
            raise TripleError(f"R = {R} is not expansive")
        if not lm.residues_distinct(R, B):
            raise TripleError("B is not a simple digit set for R")
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "B", B)

    @property
    def dim(self) -> int:
        return len(self.R)

    @property
    def N(self) -> int:
        return len(self.B)

    @property
    def RT(self) -> lm.Matrix:
        return lm.transpose(self.R)


@dataclass
class TripleReport:
    is_triple: bool
    size_match: bool
    zero_in_B: bool
    zero_in_L: bool
    B_simple: bool
    L_simple: bool
    unitarity_defect: float
    exact_certified: bool | None
    defects: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.is_triple


@dataclass(frozen=True)
class HadamardTriple:
    pair: AffinePair
    L: tuple
    report: TripleReport = field(compare=False, repr=False)

    @property
    def R(self):
        return self.pair.R

    @property
    def B(self):
        return self.pair.B

    @property
    def N(self) -> int:
        return len(self.L)

    @property
    def dim(self) -> int:
        return self.pair.dim

    @classmethod
    def from_data(cls, R, B, L, tol: float = UNITARY_TOL) -> "HadamardTriple":
        report = verify_triple(R, B, L, tol)
        if not report.is_triple:
            raise TripleError("not a Hadamard triple: " + "; ".join(report.defects))
        return cls(AffinePair(R, B), lm.as_digits(L, len(lm.as_matrix(R))), report)


def exact_orthogonality(R, B, L) -> bool:
    """Exact certificate that distinct columns of the Hadamard matrix are orthogonal."""
    adj, D = lm.adjugate(R), lm.det(R)
    W = [lm.mat_vec(adj, b) for b in B]
    for w, z in itertools.combinations(W, 2):
        y = lm.vec_sub(w, z)
        if not int_root_sum_vanishes([lm.dot(y, l) for l in L], D):
            return False
    return True


def _check(R, B, L, tol, defect_fn) -> TripleReport:
    R = lm.as_matrix(R)
    d = len(R)
    B = [lm.as_vector(b, d) for b in B]
    L = [lm.as_vector(l, d) for l in L]
    zero = tuple([0] * d)
    defects = []
    size_match = len(B) == len(L)
    if not size_match:
        defects.append(f"#B = {len(B)} but #L = {len(L)}")
    if len(set(B)) != len(B) or len(set(L)) != len(L):
        defects.append("repeated digits")
    zb, zl = zero in B, zero in L
    if not zb:
        defects.append("0 not in B")
    if not zl:
        defects.append("0 not in L")
    if not lm.is_expansive(R):
        defects.append("R is not expansive")
    b_simple = lm.residues_distinct(R, B)
    l_simple = lm.residues_distinct(lm.transpose(R), L)
    if not b_simple:
        defects.append("B has digits congruent mod R Z^d")
    if not l_simple:
        defects.append("L has digits congruent mod R^T Z^d")
    defect = float("inf")
    exact = None
    if size_match:
        defect = defect_fn(R, B, L)
        if defect >= tol:
            defects.append(f"unitarity defect {defect:.3e} >= {tol:.1e}")
        if len(B) <= EXACT_PAIR_CAP:
            exact = exact_orthogonality(R, B, L)
    return TripleReport(
        is_triple=not defects,
        size_match=size_match,
        zero_in_B=zb,
        zero_in_L=zl,
        B_simple=b_simple,
        L_simple=l_simple,
        unitarity_defect=defect,
        exact_certified=exact,
        defects=defects,
    )


def hadamard_matrix(R, B, L):
    """``H = [exp(2 pi i <R^{-1} b, l>)] / sqrt(N)``, rows L, columns B."""
    R = lm.as_matrix(R)
    return build_fourier_matrix(lm.inverse(R), B, L)


def verify_triple(R, B, L, tol: float = UNITARY_TOL) -> TripleReport:
    """Check sizes, zero digits, simple-digit conditions and unitarity of ``H``."""
    R = lm.as_matrix(R)
    d = len(R)
    if any(len(lm.as_vector(v)) != d for v in list(B) + list(L)):
        raise TripleError("dimension mismatch between R and the digit sets")
    return _check(R, B, L, tol, _defect)


def _defect(R, B, L) -> float:
    # beyond a few hundred digits the N^3 Gram product dominates; the
    # character-sum form needs one FFT of size |det R| and N^2 lookups
    if len(B) > DENSE_DEFECT_MAX:
        fast = character_unitarity_defect(R, B, L)
        if fast is not None:
            return fast
    return unitarity_defect(hadamard_matrix(R, B, L))


def digit_expansion(R, B, n: int) -> list:
    """``B + R B + ... + R^{n-1} B`` in lexicographic order of the word ``(b_0, ..., b_{n-1})``."""
    R = lm.as_matrix(R)
    d = len(R)
    B = [lm.as_vector(b, d) for b in B]
    powers = [lm.mat_pow(R, k) for k in range(n)]
    scaled = [[lm.mat_vec(P, b) for b in B] for P in powers]
    out = []
    for word in itertools.product(range(len(B)), repeat=n):
        v = [0] * d
        for k, i in enumerate(word):
            v = [a + c for a, c in zip(v, scaled[k][i])]
        out.append(tuple(v))
    return out


def product_triple(T: HadamardTriple, n: int, tol: float = UNITARY_TOL, cap: int = PRODUCT_CAP) -> HadamardTriple:
    """The level-``n`` triple ``(R^n, B_n, Lambda_n)``, re-verified.

    Unitarity is measured on the factored Gram matrix, which is exact for
    the product structure and avoids an ``N^n x N^n`` matrix product.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if n == 1:
        return T
    if T.N**n > cap:
        raise OverflowError(f"N^n = {T.N ** n} exceeds cap {cap}")
    Rn = lm.mat_pow(T.R, n)
    Bn = digit_expansion(T.R, T.B, n)
    Ln = digit_expansion(lm.transpose(T.R), T.L, n)
    report = _check(Rn, Bn, Ln, tol, lambda *_: product_unitarity_defect(T.R, T.B, T.L, n))
    if not report.is_triple:
        raise TripleError("product triple failed verification: " + "; ".join(report.defects))
    return HadamardTriple(AffinePair(Rn, Bn), tuple(Ln), report)


def conjugate_triple(T: HadamardTriple, M) -> HadamardTriple:
    """``(M R M^{-1}, M B, (M^T)^{-1} L)`` for unimodular ``M``."""
    M = lm.as_matrix(M)
    if abs(lm.det(M)) != 1:
        raise TripleError("conjugating matrix must be unimodular")
    Minv = lm.inverse(M)
    Rt = lm.mat_mul(lm.mat_mul(M, T.R), Minv)
    Bt = [lm.mat_vec(M, b) for b in T.B]
    Lt = [lm.normalize(lm.mat_vec(lm.transpose(Minv), l)) for l in T.L]
    return HadamardTriple.from_data(Rt, Bt, Lt)


# ---------------------------------------------------------------------------
# quasi-product form


@dataclass
class QuasiProductWitness:
    """Data for the block form ``M R M^{-1} = [[R1, 0], [C, R2]]`` and
    ``M B = {(u_i, v_i + Q c_ij)}``."""

    M: lm.Matrix
    r: int
    R1: lm.Matrix
    R2: lm.Matrix
    C: tuple  # (d-r) x r rows
    Q: lm.Matrix
    u: list
    v: list
    c: list  # c[i][j] vectors of length d - r

    @property
    def N1(self) -> int:
        return len(self.u)


@dataclass
class QuasiProductReport:
    ok: bool
    defects: list[str] = field(default_factory=list)
    R2_tilde: lm.Matrix | None = None

    def __bool__(self) -> bool:
        return self.ok


def _blocks(A, r):
    top_left = tuple(tuple(row[:r]) for row in A[:r])
    top_right = tuple(tuple(row[r:]) for row in A[:r])
    bottom_left = tuple(tuple(row[:r]) for row in A[r:])
    bottom_right = tuple(tuple(row[r:]) for row in A[r:])
    return top_left, top_right, bottom_left, bottom_right


def verify_quasi_product(T: HadamardTriple | AffinePair, w: QuasiProductWitness) -> QuasiProductReport:
    """Check a quasi-product witness; every failed condition is listed."""
    pair = T.pair if isinstance(T, HadamardTriple) else T
    d = pair.dim
    if d < 2:
        raise TripleError("a quasi-product witness requires d >= 2")
    defects = []
    M = lm.as_matrix(w.M)
    if len(M) != d:
        raise TripleError("M has the wrong dimension")
    if not 1 <= w.r < d:
        raise TripleError(f"split dimension r = {w.r} must satisfy 1 <= r < {d}")
    r, s = w.r, d - w.r
    if abs(lm.det(M)) != 1:
        defects.append("M is not unimodular")
        return QuasiProductReport(False, defects)
    Rt = lm.mat_mul(lm.mat_mul(M, pair.R), lm.inverse(M))
    tl, tr, bl, br = _blocks(Rt, r)
    if any(x != 0 for row in tr for x in row):
        defects.append("M R M^-1 is not block lower triangular for this split")
    if tl != lm.as_matrix(w.R1):
        defects.append("R1 block mismatch")
    if br != lm.as_matrix(w.R2):
        defects.append("R2 block mismatch")
    if bl != tuple(tuple(row) for row in w.C):
        defects.append("C block mismatch")
    R2 = lm.as_matrix(w.R2)
    Q = lm.as_matrix(w.Q)
    det_R2 = abs(lm.det(R2))
    R2_tilde = None
    if len(Q) != s:
        defects.append("Q has the wrong size")
    else:
        if abs(lm.det(Q)) < 2:
            defects.append("|det Q| < 2")
        else:
            cand = lm.mat_mul(lm.mat_mul(lm.inverse(Q), R2), Q)
            if all(lm.is_integral(row) for row in cand):
                R2_tilde = tuple(tuple(int(x) for x in row) for row in cand)
            else:
                defects.append("Q^-1 R2 Q is not an integer matrix")
    N = pair.N
    if len(w.u) != len(w.v) or len(w.c) != len(w.u):
        defects.append("u, v, c have inconsistent lengths")
    elif N % det_R2 or N // det_R2 != len(w.u):
        defects.append(f"N1 = {len(w.u)} but N / |det R2| = {Fraction(N, det_R2)}")
    elif len(Q) == s:
        built = []
        for i, (ui, vi) in enumerate(zip(w.u, w.v)):
            ui, vi = lm.as_vector(ui, r), lm.as_vector(vi, s)
            if len(w.c[i]) != det_R2:
                defects.append(f"row {i}: {len(w.c[i])} c-vectors, expected {det_R2}")
                continue
            qc = [lm.mat_vec(Q, lm.as_vector(cij, s)) for cij in w.c[i]]
            if not lm.residues_distinct(R2, qc):
                defects.append(f"row {i}: {{Q c_ij}} is not a complete residue set mod R2")
            built.extend(ui + lm.vec_add(vi, q) for q in qc)
        MB = sorted(lm.mat_vec(M, b) for b in pair.B)
        if sorted(built) != MB:
            defects.append("M B does not decompose as {(u_i, v_i + Q c_ij)}")
    return QuasiProductReport(not defects, defects, R2_tilde)


def search_quasi_product(T: HadamardTriple | AffinePair, entry_bound: int = 2, cap: int = 10**6) -> QuasiProductWitness | None:
    """Scan unimodular ``M`` with entries in ``[-entry_bound, entry_bound]``.

    For each block-triangular split, ``Q`` is taken as the HNF basis of the
    smallest ``R2``-invariant lattice spanned by the in-fibre digit
    differences. Returns the first verified witness; None proves nothing.
    """
    pair = T.pair if isinstance(T, HadamardTriple) else T
    d = pair.dim
    if d < 2:
        raise TripleError("quasi-product search requires d >= 2")
    rng = range(-entry_bound, entry_bound + 1)
    count = 0
    # identity first so the trivial conjugation is preferred
    candidates = itertools.chain([lm.identity(d)], (tuple(tuple(e[i * d : (i + 1) * d]) for i in range(d)) for e in itertools.product(rng, repeat=d * d)))
    for M in candidates:
        count += 1
        if count > cap:
            break
        if abs(lm.det(M)) != 1:
            continue
        Rt = lm.mat_mul(lm.mat_mul(M, pair.R), lm.inverse(M))
        MB = [lm.mat_vec(M, b) for b in pair.B]
        for r in range(1, d):
            w = _witness_for_split(pair, M, Rt, MB, r)
            if w is not None and verify_quasi_product(pair, w).ok:
                return w
    return None


def _witness_for_split(pair, M, Rt, MB, r):
    tl, tr, bl, br = _blocks(Rt, r)
    if any(x != 0 for row in tr for x in row):
        return None
    s = pair.dim - r
    if not (lm.is_expansive(tl) and lm.is_expansive(br)):
        return None
    det_R2 = abs(lm.det(br))
    fibres: dict[tuple, list] = {}
    for b in MB:
        fibres.setdefault(tuple(b[:r]), []).append(tuple(b[r:]))
    if any(len(f) != det_R2 for f in fibres.values()):
        return None
    diffs = [lm.vec_sub(x, f[0]) for f in fibres.values() for x in f[1:]]
    if not diffs:
        return None
    lat = lm.lattice_from_generators(diffs, s)
    if not lat.full_rank:
        return None
    lat = lm.smallest_invariant_lattice(br, [tuple([0] * s)] + [tuple(c) for c in lat.columns()])
    Q = lat.basis
    Qinv = lm.inverse(Q)
    u, v, c = [], [], []
    for key in sorted(fibres):
        f = fibres[key]
        u.append(key)
        v.append(f[0])
        c.append([lm.normalize(lm.mat_vec(Qinv, lm.vec_sub(x, f[0]))) for x in f])
    return QuasiProductWitness(M=M, r=r, R1=tl, R2=br, C=bl, Q=Q, u=u, v=v, c=c)
