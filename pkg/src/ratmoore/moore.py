"""Equivariant rational Moore space models built from the dualizing resolution.

A model is a free DGL over Q whose letters are the translates ``Cell(n, i, g)``
of the orbit cells of the free modules F_n.  A cell of degree n sits in Lie
degree n - 1 and the group acts by ``g . Cell(n, i, h) = Cell(n, i, gh)``.
For each orbit cell x we store its differential dx and its section value
s(x) = x + phi(x); translates are obtained by translating these.

Attaching F_{n+1}: for a new orbit cell x with resolution boundary f(x),
put t = s_n(f x) and (optionally) a bracket twist w(x) in Lie degree n.  Then

    dx = N (t + dw),   solve d(phi~) = t - dx / N,   phi = N phi~,

with N the least common multiple of the denominators met.  This gives
h(dx) = N f(x), h(s x) = x and d s(x) = s_n(N f x).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Mapping, NamedTuple, Sequence

from .chain import (FreeComplex, RingMatrix, classifying_complex, dualizing_resolution)
from .groupring import GroupElement, GroupSpec, InputError, RingElement, ball
from .lie import CapError, FreeLieAlgebra, LieElement, derive, normalize_expr
from .linalg import solve_minimal
from .truncation import PropagationComplex, truncated_homology

VERSION_TAG = "ratmoore-moore/1"


class CapsExhausted(RuntimeError):
    """No lift was found inside the configured caps."""


class Cell(NamedTuple):
    n: int
    i: int
    g: GroupElement

    def __str__(self):
        return f"c{self.n}.{self.i}@{self.g}"


def cell_key(c: Cell):
    return (c.n, c.i, c.g.sort_key())


def make_algebra(cap: int) -> FreeLieAlgebra:
    return FreeLieAlgebra(lambda c: c.n - 1, cap, key=cell_key)


@dataclass
class Caps:
    bracket: int = 2
    radius: int = 3
    radius_ceiling: int = 4
    max_scale: int = 10 ** 6
    window_radii: tuple[int, ...] = (2, 3)
    samples: int = 20
    seed: int = 0

    def text(self) -> str:
        return (f"bracket={self.bracket} radius={self.radius} ceiling={self.radius_ceiling} "
                f"max_scale={self.max_scale} window={','.join(map(str, self.window_radii))} "
                f"samples={self.samples} seed={self.seed}")


@dataclass
class StepReport:
    degree: int
    scale: int
    radius_used: int | None
    unknowns: int
    equations: int
    bracket_space: int
    phi_terms: int
    checks: dict[str, bool] = field(default_factory=dict)
    window: dict[int, tuple[int, bool]] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def lines(self) -> list[str]:
        out = [f"step attach degree {self.degree}: N={self.scale} "
               f"radius={'-' if self.radius_used is None else self.radius_used} "
               f"system={self.equations}x{self.unknowns} bracket_space={self.bracket_space} "
               f"phi_terms={self.phi_terms}"]
        for name in sorted(self.checks):
            out.append(f"  check {name}: {'pass' if self.checks[name] else 'FAIL'}")
        for n in sorted(self.window):
            est, stab = self.window[n]
            out.append(f"  window H_{n} = {est} ({'stabilized' if stab else 'not stabilized'})")
        return out


@dataclass
class MooreBuildReport:
    spec: GroupSpec
    r: int
    caps: Caps
    steps: list[StepReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.steps)

    def to_text(self) -> str:
        lines = [f"moore build report {VERSION_TAG}",
                 f"group {self.spec} r {self.r} d {self.spec.dimension}",
                 f"caps {self.caps.text()}"]
        for s in self.steps:
            lines.extend(s.lines())
        lines.append(f"result {'ok' if self.ok else 'invariant failure'}")
        return "\n".join(lines) + "\n"


@dataclass
class EquivariantDGLModel:
    spec: GroupSpec
    r: int
    alg: FreeLieAlgebra
    ranks: dict[int, int]
    diff: dict[tuple[int, int], LieElement]
    section: dict[tuple[int, int], LieElement]
    scales: dict[int, int]
    resolution: FreeComplex
    caps: Caps

    @property
    def top(self) -> int:
        return max(self.ranks)

    def cell(self, n: int, i: int, g: GroupElement | None = None) -> Cell:
        return Cell(n, i, g if g is not None else self.spec.identity())

    # group action
    def translate(self, X: LieElement, g: GroupElement) -> LieElement:
        if g.is_identity() or not X.terms:
            return X
        T = {tuple(Cell(c.n, c.i, g * c.g) for c in w): v for w, v in X.embed().items()}
        return self.alg.reduce(T)

    def d_letter(self, c: Cell):
        dx = self.diff.get((c.n, c.i))
        if dx is None or not dx.terms:
            return None
        return self.translate(dx, c.g).embed()

    def d(self, X: LieElement) -> LieElement:
        return self.alg.reduce(derive(self.alg, self.d_letter, X.embed()))

    def s_of_chain(self, chain: Mapping[Cell, Fraction]) -> LieElement:
        out = self.alg.zero()
        for c, v in sorted(chain.items(), key=lambda t: cell_key(t[0])):
            out = out + self.translate(self.section[(c.n, c.i)], c.g).scale(v)
        return out

    def boundary_chain(self, n: int, i: int, scale: int = 1) -> dict[Cell, Fraction]:
        """Resolution boundary of the orbit cell (n, i) as a chain of translates."""
        out: dict[Cell, Fraction] = {}
        for k, a in self.resolution.boundary[n].column(i).items():
            for u, c in a.items():
                out[Cell(n - 1, k, u)] = Fraction(c) * scale
        return out

    def emitted_complex(self) -> FreeComplex:
        """Bracket-free part of the model differential as a complex over the group ring."""
        bd = {}
        for n in range(self.r + 1, self.top + 1):
            entries: dict[tuple[int, int], dict] = {}
            for i in range(self.ranks[n]):
                for c, v in self.diff[(n, i)].linear_part().items():
                    entries.setdefault((c.i, i), {})
                    entries[(c.i, i)][c.g] = v
            bd[n] = RingMatrix(self.spec, self.ranks[n - 1], self.ranks[n],
                               {ij: RingElement(self.spec, t, "Q") for ij, t in entries.items()}, "Q")
        return FreeComplex(self.spec, dict(self.ranks), bd, "Q")

    def scaled_resolution(self) -> FreeComplex:
        F = self.resolution.to_kind("Q")
        bd = {n: m.scale(self.scales[n]) for n, m in F.boundary.items() if n in self.scales}
        return FreeComplex(self.spec, dict(F.ranks),
                           {n: bd.get(n, F.boundary[n]) for n in F.boundary}, "Q")


def init_wedge(spec: GroupSpec, r: int, caps: Caps | None = None) -> EquivariantDGLModel:
    if r < 2:
        raise ValueError(f"need r >= 2, got r = {r}")
    F, _ = dualizing_resolution(spec, r)
    caps = caps or Caps()
    alg = make_algebra(F.hi)
    model = EquivariantDGLModel(spec, r, alg, {r: F.rank(r)}, {}, {}, {}, F, caps)
    for i in range(F.rank(r)):
        x = model.cell(r, i)
        model.diff[(r, i)] = alg.zero()
        model.section[(r, i)] = alg.gen(x)
    return model


def _denominators(X: LieElement) -> int:
    out = 1
    for v in X.terms.values():
        out = lcm(out, v.denominator)
    return out


def _lift_unknowns(model: EquivariantDGLModel, degree: int, radius: int):
    letters = [model.cell(m, i, g) for m in sorted(model.ranks) for i in range(model.ranks[m])
               for g in ball(model.spec, radius)]
    alg = model.alg
    basis = [b for b in alg.basis(letters, degree, model.caps.bracket)
             if alg.bracket_length(b) >= 2]

    def order(b):
        return (alg.bracket_length(b), max(len(c.g) for c in b[1]), alg.basis_key(b))

    return sorted(basis, key=order)


def _solve_lift(model: EquivariantDGLModel, degree: int, rhs: LieElement):
    """Find phi~ of Lie degree ``degree`` with d(phi~) = rhs, growing the radius."""
    caps = model.caps
    tried = []
    for radius in range(caps.radius, caps.radius_ceiling + 1):
        tried.append(radius)
        basis = _lift_unknowns(model, degree, radius)
        cols = [model.d(LieElement(model.alg, {b: 1})).terms for b in basis]
        eqs = {k for c in cols for k in c} | set(rhs.terms)
        sol = solve_minimal(cols, rhs.terms)
        if sol is not None:
            phi = LieElement(model.alg, {basis[j]: v for j, v in sol.items()})
            return phi, radius, len(basis), len(eqs)
    raise CapsExhausted(f"no lift in Lie degree {degree} with bracket cap {caps.bracket}, "
                        f"radii tried {tried}")


def attach_step(model: EquivariantDGLModel, twist: Mapping[int, LieElement] | None = None):
    """Attach the next free module of the resolution; returns (model, report)."""
    n = model.top
    if n + 1 > model.resolution.hi:
        raise ValueError("the resolution has no further degree to attach")
    caps, alg = model.caps, model.alg
    twist = dict(twist or {})
    m = model.resolution.rank(n + 1)
    targets, lifts = {}, {}
    for i in range(m):
        t = model.s_of_chain(model.boundary_chain(n + 1, i))
        w = twist.get(i)
        if w is not None:
            if w.linear_part() or any(d != n for d in w.degrees()):
                raise ValueError("a twist must be a bracket element of Lie degree n")
            t_total = t + model.d(w)
        else:
            t_total = t
        targets[i] = (t, t_total)
    # the new cells must exist before derivations can see them
    new_ranks = dict(model.ranks)
    new_ranks[n + 1] = m
    staged = EquivariantDGLModel(model.spec, model.r, alg, new_ranks, dict(model.diff),
                                 dict(model.section), dict(model.scales), model.resolution, caps)
    radius_used, unknowns, equations = None, 0, 0
    N = 1
    for i in range(m):
        t, t_total = targets[i]
        rhs = t - t_total  # = t - dx/N
        if rhs:
            phi_t, radius_used, unknowns, equations = _solve_lift(model, n, rhs)
        else:
            phi_t = alg.zero()
        lifts[i] = phi_t
        N = lcm(N, _denominators(t_total), _denominators(phi_t))
    if N > caps.max_scale:
        raise CapsExhausted(f"scale N = {N} exceeds the guard {caps.max_scale}")
    for i in range(m):
        t, t_total = targets[i]
        x = staged.cell(n + 1, i)
        staged.diff[(n + 1, i)] = t_total.scale(N)
        staged.section[(n + 1, i)] = alg.gen(x) + lifts[i].scale(N)
    staged.scales[n + 1] = N
    space = 0
    if n <= alg.cap:
        letters = [staged.cell(k, i) for k in sorted(model.ranks) for i in range(model.ranks[k])]
        space = sum(1 for b in alg.basis(letters, n, caps.bracket) if alg.bracket_length(b) >= 2)
    report = StepReport(n + 1, N, radius_used, unknowns, equations, space,
                        sum(len(lifts[i].terms) for i in range(m)))
    report.checks = verify_step(staged, n + 1)
    # H_r is the dualizing module itself; above r everything must die
    degs = [k for k in (n, n + 1) if k > model.r and (k == n or k == model.resolution.hi)]
    if degs:
        report.window = window_check(staged, degs)
        for k, (est, stab) in report.window.items():
            report.checks[f"window H_{k} vanishes"] = est == 0 and stab
    return staged, report


def _samples(model: EquivariantDGLModel) -> list[GroupElement]:
    rng = random.Random(model.caps.seed)
    pool = [g for g in ball(model.spec, 3) if not g.is_identity()]
    return [rng.choice(pool) for _ in range(model.caps.samples)]


def verify_step(model: EquivariantDGLModel, n: int) -> dict[str, bool]:
    alg = model.alg
    checks = {"h o s = id": True, "d s = s d_F": True, "d d = 0": True,
              "equivariance": True, "bracket-free part = N f": True}
    N = model.scales.get(n, 1)
    samples = _samples(model)
    for i in range(model.ranks[n]):
        x = model.cell(n, i)
        sx, dx = model.section[(n, i)], model.diff[(n, i)]
        if sx.linear_part() != {x: 1}:
            checks["h o s = id"] = False
        if model.d(sx) != model.s_of_chain(model.boundary_chain(n, i, N)):
            checks["d s = s d_F"] = False
        if model.d(dx):
            checks["d d = 0"] = False
        fx = model.boundary_chain(n, i, N)
        if dx.linear_part() != fx:
            checks["bracket-free part = N f"] = False
        for g in samples:
            gs = model.translate(sx, g)
            if model.d(gs) != model.translate(model.d(sx), g):
                checks["equivariance"] = False
                break
            if model.translate(dx, g) != model.d(alg.gen(Cell(n, i, g))):
                checks["equivariance"] = False
                break
    return checks


def window_check(model: EquivariantDGLModel, degrees: Sequence[int]) -> dict[int, tuple[int, bool]]:
    P = PropagationComplex.from_free(model.emitted_complex())
    report = truncated_homology(P, model.caps.window_radii, degrees=list(degrees))
    return {n: (report.estimate(n), report.stabilized(n)) for n in degrees}


def build(spec: GroupSpec, r: int, caps: Caps | None = None,
          twists: Mapping[int, Mapping[int, LieElement]] | None = None,
          twist_factory=None):
    """Fold attach_step over the resolution; returns (model, report).

    ``twist_factory(model, degree)`` may supply bracket twists for a step.
    """
    model = init_wedge(spec, r, caps)
    report = MooreBuildReport(spec, r, model.caps)
    init = StepReport(r, 1, None, 0, 0, 0, 0, {"h o s = id": True, "d = 0": True})
    report.steps.append(init)
    while model.top < model.resolution.hi:
        tw = None
        if twist_factory is not None:
            tw = twist_factory(model, model.top + 1)
        elif twists:
            tw = twists.get(model.top + 1)
        model, step = attach_step(model, tw)
        report.steps.append(step)
    return model, report


def demo_twist(model: EquivariantDGLModel, degree: int):
    """Half of the bracket of the first two orbit cells below ``degree``.

    Used to exercise a nonzero lift: the twist enters dx with coefficient 1/2
    so the solver must produce phi and N = 2.
    """
    ks = sorted(model.ranks)
    if degree - 1 not in model.ranks or len(ks) < 2:
        return None
    a, b = model.cell(ks[0], 0), model.cell(ks[1], 0)
    if (a.n - 1) + (b.n - 1) != degree - 1:
        return None
    w = model.alg.bracket(model.alg.gen(a), model.alg.gen(b)).scale(Fraction(1, 2))
    return {0: w}


# ---------------------------------------------------------------------------
# complexes derived from a model

@dataclass
class UnionComplex:
    complex: FreeComplex
    classifying_ranks: dict[int, int]
    chain_map: dict[int, RingMatrix]


def _block_sum(spec, blocks: Sequence[FreeComplex], kind="Q") -> tuple[FreeComplex, list[dict]]:
    lo = min(b.lo for b in blocks)
    hi = max(b.hi for b in blocks)
    ranks = {n: sum(b.rank(n) for b in blocks) for n in range(lo, hi + 1)}
    offsets = []
    for n in range(lo, hi + 1):
        acc = 0
        for t, b in enumerate(blocks):
            if len(offsets) <= t:
                offsets.append({})
            offsets[t][n] = acc
            acc += b.rank(n)
    bd = {}
    for n in range(lo + 1, hi + 1):
        entries = {}
        for t, b in enumerate(blocks):
            if n in b.boundary:
                for (i, j), x in b.boundary[n].entries.items():
                    entries[(offsets[t][n - 1] + i, offsets[t][n] + j)] = x.to_kind(kind)
        bd[n] = RingMatrix(spec, ranks[n - 1], ranks[n], entries, kind)
    return FreeComplex(spec, ranks, bd, kind), offsets


def classifying_union(model: EquivariantDGLModel, spec: GroupSpec | None = None) -> UnionComplex:
    spec = spec or model.spec
    if model.top != model.resolution.hi:
        raise ValueError("model is not built through r + d")
    E = classifying_complex(spec, "Q")
    X, offsets = _block_sum(spec, [E, model.emitted_complex()])
    one = RingElement.one(spec, "Q")
    cmap = {n: RingMatrix(spec, E.rank(n), X.rank(n), {(i, i): one for i in range(E.rank(n))}, "Q")
            for n in X.degrees()}
    return UnionComplex(X, dict(E.ranks), cmap)


def self_duality_check(U: UnionComplex, r: int, d: int) -> dict:
    X = U.complex
    E = classifying_complex(X.spec, "Q")
    out = {"ranks": [X.rank(n) for n in X.degrees()]}
    out["palindromic"] = all(X.rank(j) == E.rank(j) + E.rank(r + d - j) for j in X.degrees())
    scales, matched = {}, True
    for n in range(r + 1, r + d + 1):
        dual = E.boundary[r + d - n + 1].transpose_involute()
        block = {}
        for (i, j), x in X.boundary[n].entries.items():
            oi, oj = E.rank(n - 1), E.rank(n)
            if i >= oi and j >= oj:
                block[(i - oi, j - oj)] = x
        ratio = None
        if set(block) != set(dual.entries):
            matched = False
            continue
        for ij, x in block.items():
            y = dual.entries[ij].to_kind("Q")
            g = next(iter(y.support()))
            q = x.coefficient(g) / y.coefficient(g)
            if y.scale(q) != x or (ratio is not None and q != ratio):
                matched = False
            ratio = q
        scales[n] = ratio
    out["matrix_duality"] = matched
    out["scales"] = scales
    chi_b = E.euler()
    out["euler"] = X.euler()
    out["euler_expected"] = chi_b * (1 + (-1) ** (r + d))
    out["ok"] = out["palindromic"] and matched and out["euler"] == out["euler_expected"]
    return out


def suspend(X: FreeComplex, chain_map: Mapping[int, RingMatrix] | None,
            E: FreeComplex | None = None) -> UnionComplex:
    """Algebraic double mapping cylinder E u_X E.

    Degree n holds (a, b, x) with a, b in E_n and x in X_{n-1};
    d(a, b, x) = (da + phi x, db - phi x, -dx).
    """
    if not chain_map:
        raise ValueError("suspension needs a chain map to the classifying complex")
    spec = X.spec
    E = E or classifying_complex(spec, "Q")
    lo, hi = min(E.lo, X.lo + 1), max(E.hi, X.hi + 1)
    ranks = {n: 2 * E.rank(n) + X.rank(n - 1) for n in range(lo, hi + 1)}
    bd = {}
    for n in range(lo + 1, hi + 1):
        eA, eB = E.rank(n - 1), E.rank(n)
        entries = {}
        if n in E.boundary:
            for (i, j), v in E.boundary[n].entries.items():
                entries[(i, j)] = v.to_kind("Q")
                entries[(eA + i, eB + j)] = v.to_kind("Q")
        if n - 1 in chain_map:
            for (i, j), v in chain_map[n - 1].entries.items():
                entries[(i, 2 * eB + j)] = v.to_kind("Q")
                entries[(eA + i, 2 * eB + j)] = -v.to_kind("Q")
        if n - 1 in X.boundary:
            for (i, j), v in X.boundary[n - 1].entries.items():
                entries[(2 * eA + i, 2 * eB + j)] = -v.to_kind("Q")
        bd[n] = RingMatrix(spec, ranks[n - 1], ranks[n], entries, "Q")
    S = FreeComplex(spec, ranks, bd, "Q")
    one = RingElement.one(spec, "Q")
    cmap = {n: RingMatrix(spec, E.rank(n), ranks[n],
                          {**{(i, i): one for i in range(E.rank(n))},
                           **{(i, E.rank(n) + i): one for i in range(E.rank(n))}}, "Q")
            for n in ranks}
    return UnionComplex(S, dict(E.ranks), cmap)


# ---------------------------------------------------------------------------
# model file format

def dumps_model(model: EquivariantDGLModel) -> str:
    lines = ["moore-model " + VERSION_TAG,
             f"group {model.spec}", f"r {model.r}", f"dim {model.spec.dimension}",
             f"caps {model.caps.text()}",
             "scales " + " ".join(f"{n}:{model.scales[n]}" for n in sorted(model.scales)),
             "cells " + " ".join(f"{n}:{model.ranks[n]}" for n in sorted(model.ranks))]
    for tag, table in (("d", model.diff), ("s", model.section)):
        for (n, i) in sorted(table):
            x = model.cell(n, i)
            for b, c in table[(n, i)].sorted_terms():
                lines.append(f"{tag} {x} {c} {model.alg.render(b)}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _parse_monomial(text: str, spec: GroupSpec):
    text = text.strip()
    if text.startswith("["):
        depth = 0
        for pos, ch in enumerate(text):
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            elif ch == "," and depth == 1:
                return (_parse_monomial(text[1:pos], spec), _parse_monomial(text[pos + 1:-1], spec))
        raise InputError(f"unbalanced bracket {text!r}")
    return parse_cell(text, spec)


def parse_cell(text: str, spec: GroupSpec) -> Cell:
    try:
        head, elem = text.split("@")
        n, i = head[1:].split(".")
        if head[0] != "c":
            raise ValueError
        return Cell(int(n), int(i), spec.element(elem))
    except ValueError as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"bad cell {text!r}") from None


def loads_model_terms(text: str):
    """Parse a model file into (header dict, {('d'|'s', cell): LieElement})."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("moore-model"):
        raise InputError("not a model file")
    header = {}
    pos = 1
    while pos < len(lines) and not lines[pos].startswith(("d ", "s ", "end")):
        k, _, v = lines[pos].partition(" ")
        header[k] = v
        pos += 1
    spec = GroupSpec.parse(header["group"])
    cap = max(int(t.split(":")[0]) for t in header["cells"].split())
    alg = make_algebra(cap)
    out: dict = {}
    for ln in lines[pos:]:
        if ln == "end":
            break
        try:
            tag, cell_txt, coef, mono = ln.split(" ", 3)
        except ValueError:
            raise InputError(f"bad model line {ln!r}") from None
        cell = parse_cell(cell_txt, spec)
        term = normalize_expr(alg, _parse_monomial(mono, spec)).scale(Fraction(coef))
        out[(tag, cell)] = out.get((tag, cell), alg.zero()) + term
    return header, out, alg
