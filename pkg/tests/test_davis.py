import json

import pytest
from hypothesis import given, strategies as st

from ratmoore.davis import (CoxeterSpec, FlagComplex, MirroredSpace, StructureError,
                            basic_construction, decomposition_check, duality_check, example,
                            flag_check, load_flag, load_mirrored)
from ratmoore.groupring import InputError

OCTAHEDRON = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]


def test_flag_examples():
    assert flag_check([(0,), (1,), (2,), (0, 1), (1, 2), (0, 2)]) == (False, (0, 1, 2))
    assert flag_check(FlagComplex.from_simplices([(0, 1), (1, 2), (2, 3), (0, 3)])) == (True, None)
    assert flag_check(FlagComplex.from_simplices(OCTAHEDRON)) == (True, None)


def test_flag_check_needs_closed_input():
    with pytest.raises(StructureError):
        flag_check([(0, 1)])


def test_coxeter_relations():
    L = FlagComplex.from_simplices([(0, 1), (2,)])
    assert CoxeterSpec.from_flag(L).relations() == ["s0^2", "s1^2", "s2^2", "s0*s1*s0*s1"]


# frozen values for the shipped examples
EXPECTED = {
    "interval": ({0: 4, 1: 4}, [1, 1], 0, 4),
    "disk": ({0: 64, 1: 192, 2: 128}, [1, 2, 1], 0, 16),
    "annulus": ({0: 176, 1: 448, 2: 256}, [1, 17, 0], -16, 16),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_basic_construction(name):
    S = example(name)
    B = basic_construction(S)
    counts, betti, chi, chambers = EXPECTED[name]
    assert B.cell_counts() == counts
    assert B.betti() == betti
    assert B.euler() == chi
    assert B.chambers == chambers == 2 ** len(S.L.vertices)
    assert B.union_find_ok
    assert B.complex.dd_zero()


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_decomposition(name):
    rep = decomposition_check(example(name))
    assert rep["equal_Q"] and rep["equal_Z2"]
    assert rep["euler_equal"] and rep["chambers_ok"]


def test_duality():
    for name in ("interval", "disk"):
        S = example(name)
        rep = duality_check(basic_construction(S), S.dimension)
        assert rep["ok"] and rep["witness"] is None
    S = example("disk")
    assert duality_check(basic_construction(S), 2)["betti_Z2"] == [1, 2, 1]


def test_broken_mirror_has_witness():
    S = example("half_interval")
    rep = duality_check(basic_construction(S), 1)
    assert not rep["closed"]
    assert rep["witness"] == ((1,), 0, 1)
    rep = duality_check(basic_construction(example("annulus")), 2)
    assert rep["witness"] == ((9, 10), 0, 1)


def test_non_flag_l_rejected():
    L = FlagComplex.from_simplices([(0, 1), (1, 2), (0, 2)])
    with pytest.raises(StructureError):
        MirroredSpace(L, [(0, 1)], {0: (0,)})


def test_loaders(tmp_path):
    lp = tmp_path / "l.json"
    lp.write_text(json.dumps({"simplices": [[0], [1]]}))
    mp = tmp_path / "m.json"
    mp.write_text(json.dumps({"simplices": [[0, 1]], "labels": [[0, [0]], [1, [1]]]}))
    S = load_mirrored(str(mp), load_flag(str(lp)))
    assert basic_construction(S).betti() == [1, 1]
    mp.write_text("{")
    with pytest.raises(InputError):
        load_mirrored(str(mp), load_flag(str(lp)))
    mp.write_text(json.dumps({"simplices": [[0, 1]]}))
    with pytest.raises(InputError):
        load_mirrored(str(mp), load_flag(str(lp)))


cycles = st.integers(4, 7)


@given(cycles)
def test_cycles_are_flag(m):
    L = FlagComplex.from_simplices([(i, (i + 1) % m) for i in range(m)])
    assert flag_check(L) == (True, None)


@given(st.sets(st.tuples(st.integers(0, 5), st.integers(0, 5)).filter(lambda e: e[0] < e[1]),
               max_size=10))
def test_clique_complex_is_flag(edges):
    import networkx as nx

    G = nx.Graph(list(edges))
    G.add_nodes_from(range(6))
    K = FlagComplex.from_simplices([tuple(c) for c in nx.find_cliques(G)])
    assert flag_check(K)[0]
