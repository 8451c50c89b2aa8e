import pytest
from hypothesis import given, strategies as st

from ratmoore.chain import (CIRCLE, RP2, TORUS, FreeComplex, RingMatrix, ScalarComplex,
                            classifying_complex, coinvariants, dualize, dualizing_resolution,
                            dumps_complex, dumps_scalar, fox_complex, kunneth_betti, loads_complex,
                            loads_scalar, scalar_tensor, simplicial_complex, tensor,
                            tensor_rank_formula)
from ratmoore.groupring import GroupSpec, InputError, RingElement

F2 = GroupSpec((2,))


def test_fox_boundary():
    C = fox_complex(2)
    assert str(C.boundary[1][0, 0]) == "-1 + a"
    assert str(C.boundary[1][0, 1]) == "-1 + b"
    assert coinvariants(C).boundary[1] == {}
    assert coinvariants(C).betti() == {0: 1, 1: 2}


def test_circle_resolution():
    assert coinvariants(fox_complex(1)).betti() == {0: 1, 1: 1}


@pytest.mark.parametrize("d,ranks", [(1, [1, 2]), (2, [1, 4, 4]), (3, [1, 6, 12, 8])])
def test_tensor_ranks(d, ranks):
    C = classifying_complex(GroupSpec((2,) * d))
    assert [C.rank(n) for n in C.degrees()] == ranks
    assert ranks == [tensor_rank_formula(d, j) for j in range(d + 1)]
    assert C.dd_zero()
    assert coinvariants(C).euler() == (-1) ** d


def test_salvetti_homology():
    C = tensor(fox_complex(2), fox_complex(2))
    assert coinvariants(C).betti() == {0: 1, 1: 4, 2: 4}


def test_double_dual():
    C = classifying_complex(GroupSpec((2, 2)))
    assert dualize(dualize(C, 2), 2) == C
    assert dualize(C, 2).dd_zero()


def test_dualizing_resolution_ranks():
    F, D = dualizing_resolution(F2, 3)
    assert (F.rank(3), F.rank(4)) == (2, 1)
    F, D = dualizing_resolution(GroupSpec((2, 2)), 3)
    assert [F.rank(n) for n in (3, 4, 5)] == [4, 4, 1]
    assert D.generators == 4
    with pytest.raises(ValueError):
        dualizing_resolution(F2, 1)


@pytest.mark.parametrize("simplices,homology", [
    (CIRCLE, {0: (1, []), 1: (1, [])}),
    (TORUS, {0: (1, []), 1: (2, []), 2: (1, [])}),
    (RP2, {0: (1, []), 1: (0, [2]), 2: (0, [])}),
])
def test_classical_homology(simplices, homology):
    S = simplicial_complex(simplices)
    assert S.dd_zero()
    assert S.homology() == homology


def test_zero_complex():
    assert ScalarComplex({0: 0, 1: 0}).homology() == {0: (0, []), 1: (0, [])}


def test_rp2_mod2():
    assert simplicial_complex(RP2).betti(2) == {0: 1, 1: 1, 2: 1}


def test_complex_text_roundtrip():
    C = classifying_complex(GroupSpec((2, 2)))
    assert loads_complex(dumps_complex(C)) == C
    S = simplicial_complex(TORUS)
    S2 = loads_scalar(dumps_scalar(S))
    assert S2.ranks == S.ranks and S2.boundary == S.boundary


def test_malformed_complex():
    with pytest.raises(InputError):
        loads_complex("complex f2 kind Z degrees 0..1\nranks 0:1 1:2\nboundary 1 1x2 1\n")
    with pytest.raises(InputError):
        loads_complex("nonsense")


def test_shape_validation():
    with pytest.raises(ValueError):
        FreeComplex(F2, {0: 1, 1: 2}, {1: RingMatrix(F2, 2, 2)})
    with pytest.raises(ValueError):
        RingMatrix(F2, 1, 1, {(1, 0): RingElement.one(F2)})


# Kunneth and dd = 0 over the test matrix of products of free-group complexes
FACTOR_RANKS = [1, 2, 3]
pairs = [(a, b, c) for a in FACTOR_RANKS for b in FACTOR_RANKS for c in (0, *FACTOR_RANKS)]


def _product(ks):
    C = fox_complex(ks[0])
    for k in ks[1:]:
        C = tensor(C, fox_complex(k))
    return C


@pytest.mark.parametrize("ks", [p[:2] if p[2] == 0 else p for p in pairs])
def test_kunneth_matrix(ks):
    C = _product(ks)
    total = sum(C.ranks.values())
    if total > 64:
        pytest.skip("outside the rank budget")
    assert C.dd_zero()
    expected = {0: 1}
    for k in ks:
        expected = kunneth_betti(expected, {0: 1, 1: k})
    assert coinvariants(C).betti() == expected
    assert dualize(dualize(C, len(ks)), len(ks)) == C


simplex_lists = st.lists(st.lists(st.integers(0, 5), min_size=1, max_size=3, unique=True),
                         min_size=1, max_size=6)


@given(simplex_lists)
def test_simplicial_dd_zero(simplices):
    S = simplicial_complex(simplices)
    assert S.dd_zero()
    b = S.betti()
    assert sum((-1) ** n * x for n, x in b.items()) == S.euler()


@given(simplex_lists, simplex_lists)
def test_scalar_kunneth(s1, s2):
    A, B = simplicial_complex(s1), simplicial_complex(s2)
    T = scalar_tensor(A, B)
    assert T.dd_zero()
    assert {n: v for n, v in T.betti().items() if v} == \
        {n: v for n, v in kunneth_betti(A.betti(), B.betti()).items() if v}
