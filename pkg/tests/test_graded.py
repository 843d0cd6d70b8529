import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from stringtop import linalg
from stringtop.cdga import FreeCDGA
from stringtop.graded import (
    ChainComplex, GradedBasis, LinearMapByDegree, NotAComplexError, TruncationError,
    graded_dual, hom_complex_differential, homology, koszul_sign,
)

F = Fraction


def two_term():
    basis = GradedBasis({0: ["e0"], 1: ["e1"]})
    d = LinearMapByDegree(basis, basis, 1, {0: [[F(1)]]})
    return ChainComplex(basis, d, 0, 2)


def point_complex(degree=0):
    basis = GradedBasis({degree: ["1"]})
    return ChainComplex(basis, LinearMapByDegree(basis, basis, 1), degree, degree + 1)


def x2y3():
    return FreeCDGA([("x", 2), ("y", 3)], {"y": "x^2"})


def test_homology_single_element():
    assert homology(point_complex(), [0]).betti() == {0: 1}


def test_homology_acyclic_two_term():
    assert homology(two_term(), [0, 1]).betti() == {0: 0, 1: 0}


def test_homology_of_x2y3():
    betti = x2y3().homology(7).betti()
    assert betti == {0: 1, 1: 0, 2: 1, 3: 0, 4: 0, 5: 0, 6: 0, 7: 0}


def test_homology_representatives_are_cocycles():
    c = x2y3().cochain_complex(8)
    for p, h in homology(c, range(0, 8)).items():
        for rep in h.representatives:
            assert not any(linalg.matvec(c.d(p), rep))


def test_homology_rejects_insufficient_truncation():
    with pytest.raises(TruncationError, match="insufficient truncation"):
        homology(two_term(), [5])


def test_homology_rejects_non_complex():
    basis = GradedBasis({0: ["a"], 1: ["b"], 2: ["c"]})
    d = LinearMapByDegree(basis, basis, 1, {0: [[F(1)]], 1: [[F(1)]]})
    with pytest.raises(NotAComplexError):
        homology(ChainComplex(basis, d, 0, 3), [1])


def test_hom_differential_of_identity_is_zero():
    c = two_term()
    ident = LinearMapByDegree(c.basis, c.basis, 0, {0: [[F(1)]], 1: [[F(1)]]})
    assert hom_complex_differential(ident, c, c).is_zero()


def test_hom_differential_of_chain_map_is_zero():
    c = x2y3().cochain_complex(6)
    blocks = {p: [[F(2) * (i == j) for j in range(c.basis.dim(p))]
                  for i in range(c.basis.dim(p))] for p in range(0, 7)}
    phi = LinearMapByDegree(c.basis, c.basis, 0, blocks)
    assert hom_complex_differential(phi, c, c).is_zero()


def test_hom_differential_example():
    src = two_term()
    tb = GradedBasis({1: ["1"]})
    tgt = ChainComplex(tb, LinearMapByDegree(tb, tb, 1), 1, 2)
    phi = LinearMapByDegree(src.basis, tb, 0, {1: [[F(1)]]})
    Dphi = hom_complex_differential(phi, src, tgt)
    # D(phi) = d∘phi - phi∘d and the target differential is zero
    assert Dphi.degree == 1
    assert Dphi.block(0) == [[F(-1)]]


def test_hom_differential_basis_mismatch():
    c = two_term()
    other = GradedBasis({0: ["z"]})
    phi = LinearMapByDegree(other, c.basis, 0)
    with pytest.raises(ValueError):
        hom_complex_differential(phi, c, c)


def test_koszul_sign_examples():
    assert koszul_sign([], [7]) == 1
    assert koszul_sign([3], [3]) == -1
    assert koszul_sign([2, 3], [3]) == -1


def test_dual_of_point_and_identity():
    basis = GradedBasis({0: ["1"]})
    ident = LinearMapByDegree(basis, basis, 0, {0: [[F(1)]]})
    dual_basis, dual = graded_dual(basis, ident)
    assert dual_basis.degrees() == [0] and dual_basis.dim(0) == 1
    assert dual.block(0) == [[F(1)]]


def test_dual_preserves_betti_of_x2y3():
    c = x2y3().cochain_complex(8)
    betti = homology(c, range(0, 8)).betti()
    dual_basis, dmap = graded_dual(c.basis, c.differential)
    dual = ChainComplex(dual_basis, LinearMapByDegree(dual_basis, dual_basis, 1, dmap.blocks),
                        -8, 0)
    dbetti = homology(dual, range(-7, 0)).betti()
    assert {-p: b for p, b in dbetti.items()} == {p: betti[p] for p in range(1, 8)}


def _random_invertible(rng, n):
    while True:
        m = [[F(rng.randint(-2, 2)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(m, n) == n:
            return m


def random_complex(rng, classes, pairs, lo=0):
    """Direct sum of ``classes[i]`` copies of Q in degree lo+i and ``pairs[i]``
    acyclic pieces e -> f starting in degree lo+i, in random bases.

    Returns the complex and its Betti numbers, known by construction.
    """
    top = lo + len(classes)
    labels, blocks = {}, {}
    for p in range(lo, top + 1):
        i = p - lo
        h = classes[i] if i < len(classes) else 0
        out_pairs = pairs[i] if i < len(pairs) else 0
        in_pairs = pairs[i - 1] if 0 < i <= len(pairs) else 0
        labels[p] = ["h"] * h + ["e"] * out_pairs + ["f"] * in_pairs
    basis = GradedBasis({p: [f"v{p}_{j}" for j in range(len(v))] for p, v in labels.items()})
    change = {p: _random_invertible(rng, len(v)) for p, v in labels.items()}
    for p in range(lo, top):
        src, tgt = labels[p], labels[p + 1]
        d = linalg.zeros(len(tgt), len(src))
        es = [j for j, t in enumerate(src) if t == "e"]
        fs = [j for j, t in enumerate(tgt) if t == "f"]
        for a, b in zip(es, fs):
            d[b][a] = F(1)
        n = len(src)
        if n and len(tgt):
            inv = linalg.inverse(change[p])
            blocks[p] = linalg.matmul(linalg.matmul(change[p + 1], d, n), inv, n)
        else:
            blocks[p] = linalg.zeros(len(tgt), n)
    betti = {lo + i: h for i, h in enumerate(classes)}
    c = ChainComplex(basis, LinearMapByDegree(basis, basis, 1, blocks), lo, top)
    return c, betti


small = st.lists(st.integers(0, 3), min_size=2, max_size=5)


@settings(max_examples=40, deadline=None)
@given(small, small, st.integers(0, 10**6))
def test_random_complex_properties(classes, pairs, seed):
    c, betti = random_complex(random.Random(seed), classes, pairs)
    c.check_d_squared()
    h = homology(c, range(c.lo, c.hi))
    for p in range(c.lo, c.hi):
        n = c.basis.dim(p)
        rank_out = linalg.rank(c.d(p), n) if n else 0
        rank_in = linalg.rank(c.d(p - 1), c.basis.dim(p - 1)) if c.basis.dim(p - 1) else 0
        assert (n - rank_out) + rank_out == n
        assert h[p].betti == (n - rank_out) - rank_in == betti[p]


def _permuted(c, rng):
    perms = {p: rng.sample(range(c.basis.dim(p)), c.basis.dim(p)) for p in c.basis.degrees()}
    basis = GradedBasis({p: [c.basis[p][i] for i in perm] for p, perm in perms.items()})
    blocks = {}
    for p in range(c.lo, c.hi):
        d = c.d(p)
        src, tgt = perms.get(p, []), perms.get(p + 1, [])
        blocks[p] = [[d[i][j] for j in src] for i in tgt]
    return ChainComplex(basis, LinearMapByDegree(basis, basis, 1, blocks), c.lo, c.hi)


@pytest.mark.parametrize("seed", range(10))
def test_homology_independent_of_basis_order(seed):
    rng = random.Random(seed)
    c = FreeCDGA([("x", 2), ("y", 3), ("a", 3), ("b", 4)],
                 {"y": "x^2", "b": "x*a"}).cochain_complex(12)
    betti = homology(c, range(0, 12)).betti()
    assert homology(_permuted(c, rng), range(0, 12)).betti() == betti


@settings(max_examples=40, deadline=None)
@given(small, small, small, small, st.integers(0, 10**6), st.integers(-2, 2))
def test_hom_differential_squares_to_zero(c1, p1, c2, p2, seed, k):
    rng = random.Random(seed)
    src, _ = random_complex(rng, c1, p1)
    tgt, _ = random_complex(rng, c2, p2)
    blocks = {}
    for p in src.basis.degrees():
        blocks[p] = [[F(rng.randint(-3, 3)) for _ in range(src.basis.dim(p))]
                     for _ in range(tgt.basis.dim(p + k))]
    phi = LinearMapByDegree(src.basis, tgt.basis, k, blocks)
    D1 = hom_complex_differential(phi, src, tgt)
    D2 = hom_complex_differential(D1, src, tgt)
    for p in range(src.lo, src.hi - 1):
        if tgt.lo <= p + k and p + k + 2 < tgt.hi:
            assert linalg.is_zero(D2.block(p))


@settings(max_examples=40, deadline=None)
@given(small, small, st.integers(0, 10**6))
def test_dual_is_involution(classes, pairs, seed):
    c, betti = random_complex(random.Random(seed), classes, pairs)
    db, dm = graded_dual(c.basis, c.differential)
    dual = ChainComplex(db, LinearMapByDegree(db, db, 1, dm.blocks), -c.hi, -c.lo + 1)
    dbetti = homology(dual, range(-c.hi + 1, -c.lo + 1)).betti()
    for p in range(c.lo + 1, c.hi):
        assert dbetti[-p] == betti[p]
    # dualizing twice returns (-1)^k f for a degree-k map
    _, ddm = graded_dual(db, dm)
    for p in range(c.lo, c.hi):
        assert ddm.block(p) == [[-v for v in row] for row in c.differential.block(p)]


@pytest.mark.parametrize("seed", range(3))
def test_random_complex_under_each_backend(backend, seed):
    c, betti = random_complex(random.Random(seed), [1, 2, 0, 3], [2, 1, 3, 1])
    assert homology(c, range(c.lo, c.hi)).betti() == {p: betti[p] for p in range(c.lo, c.hi)}
