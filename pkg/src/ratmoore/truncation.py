"""Window estimates for homology of infinite-rank complexes with finite propagation.

A ``PropagationComplex`` has, in degree n, ``rank[n]`` families of coordinates,
each indexed by the group.  Boundary entries are bimodule elements
``{(u, v): c}`` acting on a coordinate ``x`` by ``x -> sum c * (u x v)``; an
ordinary group-ring entry ``r`` of a free complex acts by right multiplication.

For an outer radius R and margin m the inner window is ball(R - m).  The
estimate in degree n is the dimension of cycles supported in the inner window
modulo boundaries of chains supported in ball(R):

    est = |C_in| - rank(d_n | C_in) - rank(d_{n+1} | B_R) + rank(P_out d_{n+1} | B_R)

where P_out projects away from the inner window.  Targets are never truncated.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .chain import FreeComplex, ModulePresentation, RingMatrix, classifying_complex
from .groupring import GroupElement, GroupSpec, RingElement, ball
from .linalg import IntEchelon

BiElement = dict  # (u, v) -> coefficient


def right_mult(r: RingElement) -> BiElement:
    e = r.spec.identity()
    return {(e, g): c for g, c in r.items()}


def left_mult(r: RingElement) -> BiElement:
    e = r.spec.identity()
    return {(g, e): c for g, c in r.items()}


def bi_radius(b: BiElement) -> int:
    return max((len(u) + len(v) for u, v in b), default=0)


def bi_compose(outer: BiElement, inner: BiElement) -> BiElement:
    """Apply ``inner`` first, then ``outer``."""
    out: dict = {}
    for (u1, v1), c1 in inner.items():
        for (u2, v2), c2 in outer.items():
            k = (u2 * u1, v1 * v2)
            s = out.get(k, 0) + c1 * c2
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def _bi_add(acc: BiElement, b: BiElement, sign=1):
    for k, c in b.items():
        s = acc.get(k, 0) + sign * c
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


@dataclass
class PropagationComplex:
    spec: GroupSpec
    ranks: dict[int, int]
    boundary: dict[int, dict[tuple[int, int], BiElement]] = field(default_factory=dict)
    labels: dict[int, list] = field(default_factory=dict)

    def __post_init__(self):
        for n, m in self.boundary.items():
            for (i, j) in m:
                if not (0 <= i < self.ranks.get(n - 1, 0) and 0 <= j < self.ranks.get(n, 0)):
                    raise ValueError(f"boundary {n} entry ({i},{j}) out of range")
            self.boundary[n] = {ij: b for ij, b in m.items() if b}

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def propagation(self, n: int | None = None) -> int:
        ms = [self.boundary.get(n, {})] if n is not None else self.boundary.values()
        return max((bi_radius(b) for m in ms for b in m.values()), default=0)

    def columns(self, n: int) -> dict[int, list[tuple[int, BiElement]]]:
        cols: dict[int, list] = {}
        for (i, j), b in sorted(self.boundary.get(n, {}).items()):
            cols.setdefault(j, []).append((i, b))
        return cols

    def dd_zero(self) -> bool:
        for n in self.boundary:
            if n - 1 not in self.boundary:
                continue
            A, B = self.boundary[n - 1], self.boundary[n]
            acc: dict[tuple[int, int], BiElement] = {}
            for (j, k), b in B.items():
                for (i, jj), a in A.items():
                    if jj == j:
                        _bi_add(acc.setdefault((i, k), {}), bi_compose(a, b))
            if any(acc.values()):
                return False
        return True

    @classmethod
    def from_free(cls, C: FreeComplex) -> "PropagationComplex":
        bd = {n: {ij: right_mult(x) for ij, x in m.entries.items()} for n, m in C.boundary.items()}
        return cls(C.spec, dict(C.ranks), bd)


def hom_complex(Q: FreeComplex, P: FreeComplex) -> PropagationComplex:
    """Total complex of Hom over the group ring from Q to P, graded by k - m.

    A map f : Q_m -> P_k is stored by its coordinates f_{ji} (component e_i of
    f(e_j)).  Post-composition with d_P right-multiplies by d_P entries;
    pre-composition with d_Q left-multiplies by d_Q entries;
    D f = d_P f - (-1)^t f d_Q.
    """
    if Q.spec != P.spec:
        raise TypeError("group mismatch")
    basis: dict[int, list[tuple[int, int, int, int]]] = {}
    for m in Q.degrees():
        for k in P.degrees():
            for j in range(Q.rank(m)):
                for i in range(P.rank(k)):
                    basis.setdefault(k - m, []).append((m, j, k, i))
    index = {t: {b: s for s, b in enumerate(bs)} for t, bs in basis.items()}
    bd: dict[int, dict] = {}
    for t, bs in basis.items():
        if t - 1 not in basis:
            continue
        mat: dict[tuple[int, int], BiElement] = {}
        for col, (m, j, k, i) in enumerate(bs):
            if k > P.lo:
                for l, a in P.boundary[k].column(i).items():
                    _bi_add(mat.setdefault((index[t - 1][(m, j, k - 1, l)], col), {}), right_mult(a))
            if m < Q.hi:
                sign = -((-1) ** t)
                for jp in range(Q.rank(m + 1)):
                    b = Q.boundary[m + 1][(j, jp)]
                    if b:
                        _bi_add(mat.setdefault((index[t - 1][(m + 1, jp, k, i)], col), {}),
                                left_mult(b), sign)
        bd[t] = mat
    labels = {t: bs for t, bs in basis.items()}
    return PropagationComplex(P.spec, {t: len(bs) for t, bs in basis.items()}, bd, labels)


def diagonal_coinvariants(P: FreeComplex, P2: FreeComplex) -> PropagationComplex:
    """(P (x) P2) tensored over the group with Q, for the diagonal action.

    The diagonal action on pairs (g, h) is free; the coordinate of
    g e_i (x) h e_j is x = g^-1 h.  The first-factor differential acts by left
    multiplication with involuted entries, the second by right
    multiplication, with Koszul sign (-1)^p.
    """
    if P.spec != P2.spec:
        raise TypeError("group mismatch")
    basis: dict[int, list] = {}
    for p in P.degrees():
        for q in P2.degrees():
            for i in range(P.rank(p)):
                for j in range(P2.rank(q)):
                    basis.setdefault(p + q, []).append((p, i, q, j))
    index = {n: {b: s for s, b in enumerate(bs)} for n, bs in basis.items()}
    bd: dict[int, dict] = {}
    for n, bs in basis.items():
        if n - 1 not in basis:
            continue
        mat: dict = {}
        for col, (p, i, q, j) in enumerate(bs):
            if p > P.lo:
                for k, a in P.boundary[p].column(i).items():
                    _bi_add(mat.setdefault((index[n - 1][(p - 1, k, q, j)], col), {}),
                            left_mult(a.involute()))
            if q > P2.lo:
                sign = -1 if p % 2 else 1
                for l, b in P2.boundary[q].column(j).items():
                    _bi_add(mat.setdefault((index[n - 1][(p, i, q - 1, l)], col), {}),
                            right_mult(b), sign)
        bd[n] = mat
    return PropagationComplex(P.spec, {n: len(bs) for n, bs in basis.items()}, bd,
                              {n: bs for n, bs in basis.items()})


@dataclass
class WindowRow:
    degree: int
    outer: int
    inner: int
    estimate: int
    stabilized: bool


@dataclass
class TruncationReport:
    margin: int
    rows: list[WindowRow]
    monotone_violation: list[int] = field(default_factory=list)

    def for_degree(self, n: int) -> list[WindowRow]:
        return [r for r in self.rows if r.degree == n]

    def estimate(self, n: int) -> int:
        return self.for_degree(n)[-1].estimate

    def stabilized(self, n: int) -> bool:
        return self.for_degree(n)[-1].stabilized

    def to_text(self) -> str:
        lines = [f"truncation report (margin {self.margin}); numerically stabilized, not certified",
                 f"{'degree':>6} {'outer':>5} {'inner':>5} {'estimate':>8} stabilized"]
        for r in self.rows:
            lines.append(f"{r.degree:>6} {r.outer:>5} {r.inner:>5} {r.estimate:>8} "
                         f"{'yes' if r.stabilized else 'no'}")
        if self.monotone_violation:
            lines.append("monotone stabilization violated in degrees "
                         + ", ".join(map(str, self.monotone_violation)))
        return "\n".join(lines) + "\n"


class _Indexer:
    def __init__(self, spec: GroupSpec, radius: int):
        self.elems = ball(spec, radius)
        self.order = {g: t for t, g in enumerate(self.elems)}
        self.size = len(self.elems)

    def key(self, i: int, g: GroupElement) -> int:
        return i * self.size + self.order[g]


def _apply(cols, j: int, x: GroupElement, idx: _Indexer) -> dict[int, "int | Fraction"]:
    out: dict[int, "int | Fraction"] = {}
    for i, b in cols.get(j, ()):
        for (u, v), c in b.items():
            k = idx.key(i, u * x * v)
            s = out.get(k, 0) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


class TruncationError(ValueError):
    pass


def truncated_homology(P: PropagationComplex, radii: Sequence[int] = (2, 3, 4, 5, 6),
                       degrees: Sequence[int] | None = None,
                       margin: int | None = None) -> TruncationReport:
    radii = list(radii)
    if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
        raise TruncationError("radii must be a nonempty increasing list")
    bound = P.propagation()
    margin = bound if margin is None else margin
    if margin < bound:
        raise TruncationError(f"margin {margin} is below the propagation bound {bound}")
    if radii[0] < margin:
        raise TruncationError(f"radius {radii[0]} leaves an empty inner window (margin {margin})")
    degrees = list(P.degrees() if degrees is None else degrees)
    cols = {n: P.columns(n) for n in P.ranks}
    rows: list[WindowRow] = []
    violations: list[int] = []
    history: dict[int, list[int]] = {n: [] for n in degrees}
    for R in radii:
        idx = _Indexer(P.spec, R + 2 * bound)
        outer = ball(P.spec, R)
        inner = ball(P.spec, R - margin)
        inner_pos = {idx.order[g] for g in inner}
        # boundary images are recomputed per radius; recheck dd = 0 on them
        images: dict[int, list[dict]] = {}
        for n in set(degrees) | {n + 1 for n in degrees}:
            if n not in P.ranks or n - 1 not in P.ranks:
                continue
            imgs = []
            for j in range(P.ranks[n]):
                for x in outer:
                    imgs.append(_apply(cols[n], j, x, idx))
            images[n] = imgs
        for n, imgs in images.items():
            if n - 1 not in P.boundary:
                continue
            lower = cols[n - 1]
            for img in imgs:
                acc: dict = {}
                for k, c in img.items():
                    i, t = divmod(k, idx.size)
                    g = idx.elems[t]
                    for kk, cc in _apply(lower, i, g, idx).items():
                        s = acc.get(kk, 0) + c * cc
                        if s:
                            acc[kk] = s
                        else:
                            acc.pop(kk, None)
                if acc:
                    raise TruncationError(f"boundary composition nonzero at radius {R}, degree {n}")
        for n in degrees:
            size_in = P.ranks[n] * len(inner)
            r_in = 0
            if n in images:
                ech = IntEchelon()
                nout = len(outer)
                pos = {g: t for t, g in enumerate(outer)}
                for j in range(P.ranks[n]):
                    for x in inner:
                        img = images[n][j * nout + pos[x]]
                        if img:
                            ech.insert(img)
                r_in = ech.rank
            r_up = r_out = 0
            if n + 1 in images:
                full, proj = IntEchelon(), IntEchelon()
                for img in images[n + 1]:
                    if not img:
                        continue
                    full.insert(img)
                    outside = {k: c for k, c in img.items() if k % idx.size not in inner_pos}
                    if outside:
                        proj.insert(outside)
                r_up, r_out = full.rank, proj.rank
            est = size_in - r_in - r_up + r_out
            hist = history[n]
            stab = bool(hist) and hist[-1] == est
            if len(hist) >= 2 and hist[-1] == hist[-2] and est != hist[-1] and n not in violations:
                violations.append(n)
            hist.append(est)
            rows.append(WindowRow(n, R, R - margin, est, stab))
    rows.sort(key=lambda r: (r.degree, r.outer))
    return TruncationReport(margin, rows, violations)


# ---------------------------------------------------------------------------
# invariants of a presented module

def _resolution_of(M: ModulePresentation) -> FreeComplex:
    """Two-term free complex for the free part plus a classifying complex per trivial generator."""
    spec = M.spec
    free = [i for i, a in enumerate(M.action) if a == "free"]
    trivial = [i for i, a in enumerate(M.action) if a == "trivial"]
    E = classifying_complex(spec, M.relations.kind)
    ranks = {0: len(free) + len(trivial) * E.rank(0)}
    for n in range(1, E.hi + 1):
        ranks[n] = len(trivial) * E.rank(n)
    ranks[1] += M.relations.ncols
    free_pos = {g: t for t, g in enumerate(free)}
    bd: dict[int, dict] = {n: {} for n in range(1, E.hi + 1)}
    for (i, j), x in M.relations.entries.items():
        bd[1][(free_pos[i], j)] = x
    for s, _ in enumerate(trivial):
        for n in range(1, E.hi + 1):
            r0 = len(free) if n == 1 else 0
            c0 = M.relations.ncols if n == 1 else 0
            for (i, j), x in E.boundary[n].entries.items():
                bd[n][(r0 + s * E.rank(n - 1) + i, c0 + s * E.rank(n) + j)] = x
    return FreeComplex(spec, ranks, {n: RingMatrix(spec, ranks[n - 1], ranks[n], m, M.relations.kind)
                                     for n, m in bd.items()}, M.relations.kind)


def invariants_dimension(M: ModulePresentation, corroborate: bool = True,
                         radii: Sequence[int] = (2, 3, 4)) -> int:
    """Dimension of the invariant, finitely supported elements of M.

    Exact value from the orbit argument: a nonzero invariant supported on
    free orbits of an infinite group would need infinite support, so only the
    trivial-action generators contribute.  With ``corroborate`` the value is
    compared with the degree-0 window estimate of Hom(resolution of Q, resolution of M).
    """
    for (i, _), x in M.relations.entries.items():
        if M.action[i] == "trivial":
            raise ValueError("orbit argument needs the trivial generators to carry no relations")
    value = M.action.count("trivial")
    if corroborate:
        P = _resolution_of(M)
        Q = classifying_complex(M.spec, M.relations.kind)
        H = hom_complex(Q, P)
        report = truncated_homology(H, radii, degrees=[0])
        if not report.stabilized(0) or report.estimate(0) != value:
            raise ValueError(
                f"orbit count {value} disagrees with the window estimate "
                f"{report.estimate(0)} (stabilized={report.stabilized(0)})")
    return value
