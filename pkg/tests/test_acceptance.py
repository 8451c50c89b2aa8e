"""Acceptance criteria 1-8, one PASS/FAIL line each."""
import os
import subprocess
import sys
import time
from pathlib import Path

import pytest

from ratmoore.chain import (CIRCLE, RP2, TORUS, classifying_complex, coinvariants, dualize,
                            dualizing_resolution, fox_complex, kunneth_betti, simplicial_complex,
                            tensor)
from ratmoore.davis import basic_construction, decomposition_check, example
from ratmoore.groupring import GroupSpec
from ratmoore.homalg import INF, tensor_square, dual_fox_resolution, vanishing_assembly
from ratmoore.l2 import (Chambers, chi_gap, chi_gap_replayed, davis_transfer, euler,
                         free_product_power, singer_verdict)
from ratmoore.lie import (GradedGenerators, dgl_homology, dimension, hall_count, primitives,
                          sphere_model, tensor_dimension)
from ratmoore.moore import Caps, build, classifying_union, suspend
from ratmoore.truncation import (PropagationComplex, diagonal_coinvariants, hom_complex,
                                 invariants_dimension, truncated_homology)

HERE = Path(__file__).parent


@pytest.fixture
def verdict(capsys):
    def report(n: int, title: str, failures: list[str]):
        with capsys.disabled():
            status = "PASS" if not failures else "FAIL"
            print(f"\nACCEPTANCE {n} {status}: {title}"
                  + ("" if not failures else " | " + "; ".join(failures)))
        assert not failures, failures
    return report


def test_criterion_1_moore_builder(verdict):
    fails = []
    for spec in (GroupSpec((2,)), GroupSpec((2, 2))):
        t0 = time.perf_counter()
        model, report = build(spec, 3, Caps(bracket=2, radius=3))
        elapsed = time.perf_counter() - t0
        if model.top != model.resolution.hi:
            fails.append(f"{spec}: build incomplete")
        if model.emitted_complex() != model.scaled_resolution():
            fails.append(f"{spec}: emitted complex differs from (F, N f)")
        for step in report.steps[1:]:
            for name in ("h o s = id", "d s = s d_F", "equivariance"):
                if not step.checks.get(name):
                    fails.append(f"{spec}: degree {step.degree} {name}")
        if model.caps.samples < 20:
            fails.append("fewer than 20 equivariance samples")
        if elapsed >= 300:
            fails.append(f"{spec}: {elapsed:.0f}s")
    verdict(1, "Moore builder end-to-end for (F_2, 3) and (F_2^2, 3)", fails)


def test_criterion_2_sphere_homotopy(verdict):
    fails = []
    for r in range(2, 6):
        D = sphere_model(r)
        got = {k: dgl_homology(D, k - 1) for k in range(2, 4 * (r - 1) + 2)}
        want = {r: 1, **({2 * r - 1: 1} if r % 2 == 0 else {})}
        if {k: v for k, v in got.items() if v} != want:
            fails.append(f"S^{r}: {got}")
    verdict(2, "rational homotopy of S^r, r <= 5", fails)


def test_criterion_3_lie_counts(verdict):
    fails = []
    for r in range(2, 6):
        for k in range(1, 4):
            gens = GradedGenerators.of([r - 1] * k)
            for n in range(1, 5):
                if tensor_dimension(gens, n * (r - 1)) != k ** n:
                    fails.append(f"T(V) r={r} k={k} n={n}")
    sets = [(1,), (2,), (3,), (1, 1), (1, 2), (2, 2), (2, 3), (1, 1, 1), (1, 2, 3), (2, 2, 2),
            (3, 3, 3)]
    for degs in sets:
        gens = GradedGenerators.of(degs)
        for n in range(1, 4 * min(degs) + 1):
            a, b, c = primitives(n, gens), hall_count(gens, n), dimension(gens, n)
            if not a == b == c:
                fails.append(f"{degs} degree {n}: {a},{b},{c}")
    verdict(3, "tensor dimensions k^n; primitives = Hall = Witt", fails)


def test_criterion_4_vanishing(verdict):
    fails = []
    res = tensor_square(dual_fox_resolution(2))
    rep = truncated_homology(res.diagonal, (2, 3, 4, 5, 6), degrees=[1])
    ests = [r.estimate for r in rep.for_degree(1)]
    stab = [r.stabilized for r in rep.for_degree(1)]
    # stabilization is a comparison with the previous radius, so it starts at radius 3
    if ests != [0] * 5 or not all(stab[1:]):
        fails.append(f"H_1 window {ests} {stab}")
    _, D = dualizing_resolution(GroupSpec((2,)), 2)
    if invariants_dimension(D) != 0:
        fails.append("D^F_2 != 0")
    v = vanishing_assembly(4)
    tree = v.text()
    if v.verdict != "vanishes" or "base case" not in tree or "d = 4:" not in tree:
        fails.append(f"assembly: {v.verdict}")
    if vanishing_assembly(4, {0: INF, 1: 1, 2: 0}).verdict != "does not vanish":
        fails.append("negative control did not flip")
    verdict(4, "H_1(BF_2; D(x)D) window, D^F_2 = 0, vanishing_assembly(4)", fails)


def test_criterion_5_davis(verdict):
    fails = []
    expected = {"interval": [1, 1], "disk": [1, 2, 1]}
    for name in ("interval", "disk", "annulus"):
        S = example(name)
        B = basic_construction(S)
        if name in expected and B.betti() != expected[name]:
            fails.append(f"{name} betti {B.betti()}")
        dec = decomposition_check(S, B)
        for key in ("equal_Q", "equal_Z2", "euler_equal", "chambers_ok"):
            if not dec[key]:
                fails.append(f"{name} {key}")
        if B.chambers != 2 ** len(S.L.vertices):
            fails.append(f"{name} chambers")
    verdict(5, "Davis: circle, torus, decomposition, Euler, chambers", fails)


def test_criterion_6_l2(verdict):
    fails = []
    p = free_product_power(4)
    if p.b(4) != 1 or any(p.b(k) for k in range(4)):
        fails.append(f"b(F_2^4) = {p.values}")
    for d in range(1, 7):
        if euler(free_product_power(d)) != (-1) ** d:
            fails.append(f"chi(F_2^{d})")
    if singer_verdict(davis_transfer(p, "2^m", 7)) != "violates":
        fails.append("symbolic 2^m")
    for m in range(0, 11):
        if singer_verdict(davis_transfer(p, Chambers(value=2 ** m), 7)) != "violates":
            fails.append(f"m={m}")
    for b4, ch, want in ((0, 16, -32), (32, 16, 0), (40, 16, 8)):
        if chi_gap(b4, ch)[0] != want or chi_gap_replayed(b4, ch) != want:
            fails.append(f"chi_gap({b4},{ch})")
    verdict(6, "L2 ledger: b_4(F_2^4) = 1, chi, Singer verdict, chi gap", fails)


def _constructed_complexes():
    out = {}
    for k in (1, 2, 3):
        out[f"fox{k}"] = fox_complex(k)
    for factors in ((2,), (2, 2), (2, 3), (2, 2, 2), (1, 2)):
        spec = GroupSpec(factors)
        C = classifying_complex(spec)
        out[f"E{spec}"] = C
        out[f"dual E{spec}"] = dualize(C, C.hi)
        out[f"F {spec}"] = dualizing_resolution(spec, 3)[0]
    for spec, r in ((GroupSpec((2,)), 3), (GroupSpec((2, 2)), 3), (GroupSpec((2,)), 2)):
        model, _ = build(spec, r)
        out[f"model {spec} {r}"] = model.emitted_complex()
        U = classifying_union(model)
        out[f"union {spec} {r}"] = U.complex
        out[f"suspension {spec} {r}"] = suspend(U.complex, U.chain_map).complex
    return out


def test_criterion_7_exactness(verdict):
    fails = []
    cx = _constructed_complexes()
    for name, C in cx.items():
        if not C.dd_zero():
            fails.append(f"dd {name}")
    D = dualize(fox_complex(2), 1)
    props = {"diagonal D(x)D": diagonal_coinvariants(D, D),
             "hom(E, F)": hom_complex(fox_complex(2), dualizing_resolution(GroupSpec((2,)), 2)[0])}
    for name, P in props.items():
        if not P.dd_zero():
            fails.append(f"dd {name}")
    for name in ("interval", "disk", "annulus", "half_interval"):
        if not basic_construction(example(name)).complex.dd_zero():
            fails.append(f"dd davis {name}")
    for ks in [(a, b) for a in (1, 2, 3) for b in (1, 2, 3)] + [(2, 2, 2), (1, 2, 3), (3, 3, 3)]:
        C = fox_complex(ks[0])
        for k in ks[1:]:
            C = tensor(C, fox_complex(k))
        if sum(C.ranks.values()) > 64:
            continue
        want = {0: 1}
        for k in ks:
            want = kunneth_betti(want, {0: 1, 1: k})
        if coinvariants(C).betti() != want:
            fails.append(f"kunneth {ks}")
        if dualize(dualize(C, len(ks)), len(ks)) != C:
            fails.append(f"double dual {ks}")
    classical = {"circle": (CIRCLE, {0: (1, []), 1: (1, [])}),
                 "torus": (TORUS, {0: (1, []), 1: (2, []), 2: (1, [])}),
                 "RP2": (RP2, {0: (1, []), 1: (0, [2]), 2: (0, [])})}
    for name, (simp, want) in classical.items():
        S = simplicial_complex(simp)
        if not S.dd_zero() or S.homology() != want:
            fails.append(f"SNF {name}")
    verdict(7, f"dd = 0 on {len(cx) + len(props) + 4} complexes; Kunneth, double dual, SNF", fails)


def test_criterion_8_determinism(verdict, tmp_path):
    sys.path.insert(0, str(HERE))
    from golden_runs import GOLDEN

    fails = []
    for run in range(3):
        env = dict(os.environ, PYTHONHASHSEED=str(run + 11))
        for name, argv in GOLDEN.items():
            out = tmp_path / f"run{run}" / name
            proc = subprocess.run([sys.executable, "-m", "ratmoore.cli", *argv, "--out", str(out)],
                                  capture_output=True, env=env)
            if proc.returncode != 0:
                fails.append(f"{name} exit {proc.returncode}")
                continue
            for f in (HERE / "golden" / name).iterdir():
                if (out / f.name).read_bytes() != f.read_bytes():
                    fails.append(f"run {run} {name}/{f.name} differs")
    verdict(8, "golden files byte-identical over three runs", fails)
