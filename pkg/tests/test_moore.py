import time

import pytest

from ratmoore.chain import coinvariants
from ratmoore.groupring import GroupSpec
from ratmoore.homalg import dual_fox_resolution, group_homology
from ratmoore.moore import (Caps, CapsExhausted, Cell, build, classifying_union, demo_twist,
                            dumps_model, init_wedge, loads_model_terms, parse_cell,
                            self_duality_check, suspend)
from ratmoore.truncation import PropagationComplex, truncated_homology

F2 = GroupSpec((2,))
F2SQ = GroupSpec((2, 2))


@pytest.fixture(scope="module")
def f2_model():
    return build(F2, 3)


@pytest.fixture(scope="module")
def f2sq_model():
    return build(F2SQ, 3)


def test_initial_wedge():
    m = init_wedge(F2, 3)
    assert m.ranks == {3: 2}
    assert all(not m.diff[(3, i)].terms for i in range(2))
    assert all(m.section[(3, i)] == m.alg.gen(m.cell(3, i)) for i in range(2))


def test_f2_build(f2_model):
    model, report = f2_model
    assert sorted(model.ranks) == [3, 4]
    assert report.ok
    assert report.to_text().endswith("result ok\n")
    assert model.emitted_complex() == model.scaled_resolution()


def test_f2sq_build(f2sq_model):
    model, report = f2sq_model
    assert sorted(model.ranks) == [3, 4, 5]
    assert model.scales == {4: 1, 5: 1}
    for step in report.steps[1:]:
        assert {"h o s = id", "d s = s d_F", "d d = 0", "equivariance",
                "bracket-free part = N f"} <= set(step.checks)
        assert step.ok
    assert model.emitted_complex() == model.scaled_resolution()


def test_r2_build():
    model, report = build(F2, 2)
    assert report.ok and sorted(model.ranks) == [2, 3]


def test_twisted_lift():
    caps = Caps(radius=1, radius_ceiling=1)
    model, report = build(F2SQ, 2, caps, twist_factory=demo_twist)
    assert report.ok
    last = report.steps[-1]
    assert (last.degree, last.scale, last.phi_terms) == (4, 2, 1)
    assert model.diff[(4, 0)].bracket_part()
    assert model.emitted_complex() == model.scaled_resolution()


def test_caps_exhausted():
    with pytest.raises(CapsExhausted):
        build(F2SQ, 2, Caps(radius=1, radius_ceiling=1, max_scale=1), twist_factory=demo_twist)


def test_union_and_duality(f2sq_model):
    model, _ = f2sq_model
    U = classifying_union(model)
    rep = self_duality_check(U, 3, 2)
    assert rep["ranks"] == [1, 4, 4, 4, 4, 1]
    assert rep["palindromic"] and rep["matrix_duality"] and rep["ok"]
    assert rep["euler"] == rep["euler_expected"] == 0


def test_union_euler_and_degree_r(f2_model):
    model, _ = f2_model
    U = classifying_union(model)
    X = U.complex
    chi_resolution = sum((-1) ** (n - 3) * model.resolution.rank(n) for n in model.resolution.degrees())
    assert X.euler() == -1 + (-1) ** 3 * chi_resolution
    b = coinvariants(X.to_kind("Q")).betti()
    assert b[3] == group_homology(dual_fox_resolution(2), 0).dimension == 2


def test_suspension_shifts_window(f2_model):
    model, _ = f2_model
    U = classifying_union(model)
    S = suspend(U.complex, U.chain_map)
    assert S.complex.dd_zero()
    chi_b = -1
    assert coinvariants(S.complex).euler() == 2 * chi_b - coinvariants(U.complex).euler()
    before = truncated_homology(PropagationComplex.from_free(U.complex), (1, 2), degrees=[3])
    after = truncated_homology(PropagationComplex.from_free(S.complex), (1, 2), degrees=[4])
    assert [r.estimate for r in before.rows] == [r.estimate for r in after.rows]


def test_model_roundtrip(f2sq_model):
    model, _ = f2sq_model
    text = dumps_model(model)
    header, terms, _ = loads_model_terms(text)
    assert header["group"] == "f2^2" and header["r"] == "3"
    for (n, i), e in model.diff.items():
        if e.terms:
            got = terms[("d", model.cell(n, i))]
            assert got.embed() == e.embed()


def test_parse_cell():
    c = parse_cell("c4.1@a|C", F2SQ)
    assert c == Cell(4, 1, F2SQ.element("a|C"))
    assert str(c) == "c4.1@a|C"


def test_determinism():
    texts = {dumps_model(build(F2SQ, 3)[0]) for _ in range(2)}
    reports = {build(F2SQ, 3)[1].to_text() for _ in range(2)}
    assert len(texts) == len(reports) == 1


def test_runtime_budget():
    t0 = time.perf_counter()
    build(F2SQ, 3, Caps(bracket=2, radius=3))
    assert time.perf_counter() - t0 < 300
