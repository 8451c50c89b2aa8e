"""Free chain complexes over group rings, and finite scalar complexes.

Convention (left modules, rows = target basis): a chain ``v`` with
coordinates ``v_j`` in the group ring has boundary ``d(v)_i = sum_j v_j * M[i, j]``.
So ``d(e_j) = sum_i M[i, j] e_i`` and composition is
``(A o B)[i, k] = sum_j B[j, k] * A[i, j]``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Iterable, Mapping

from .groupring import GroupSpec, InputError, RingElement
from .linalg import rank, rank_mod, smith_diagonal


class RingMatrix:
    """Sparse matrix of RingElements; missing entries are zero."""

    __slots__ = ("spec", "kind", "nrows", "ncols", "entries")

    def __init__(self, spec: GroupSpec, nrows: int, ncols: int,
                 entries: Mapping[tuple[int, int], RingElement] | None = None, kind: str = "Z"):
        self.spec, self.kind, self.nrows, self.ncols = spec, kind, nrows, ncols
        self.entries: dict[tuple[int, int], RingElement] = {}
        for (i, j), x in (entries or {}).items():
            if not (0 <= i < nrows and 0 <= j < ncols):
                raise ValueError(f"entry ({i},{j}) outside a {nrows}x{ncols} matrix")
            if x.spec != spec or x.kind != kind:
                raise TypeError(f"entry ({i},{j}) has the wrong group or scalar kind")
            if x:
                self.entries[(i, j)] = x

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij) -> RingElement:
        x = self.entries.get(ij)
        return x if x is not None else RingElement.zero(self.spec, self.kind)

    def __eq__(self, other):
        return (
            isinstance(other, RingMatrix)
            and self.shape == other.shape
            and self.spec == other.spec
            and self.entries == other.entries
        )

    def is_zero(self) -> bool:
        return not self.entries

    def column(self, j: int) -> dict[int, RingElement]:
        return {i: x for (i, jj), x in self.entries.items() if jj == j}

    def transpose_involute(self) -> "RingMatrix":
        return RingMatrix(self.spec, self.ncols, self.nrows,
                          {(j, i): x.involute() for (i, j), x in self.entries.items()}, self.kind)

    def augment(self) -> dict[tuple[int, int], "int | Fraction"]:
        out = {}
        for ij, x in self.entries.items():
            e = x.augmentation()
            if e:
                out[ij] = e
        return out

    def scale(self, c) -> "RingMatrix":
        return RingMatrix(self.spec, self.nrows, self.ncols,
                          {ij: x.scale(c) for ij, x in self.entries.items()}, self.kind)

    @property
    def radius(self) -> int:
        return max((x.radius for x in self.entries.values()), default=0)

    def to_kind(self, kind: str) -> "RingMatrix":
        return RingMatrix(self.spec, self.nrows, self.ncols,
                          {ij: x.to_kind(kind) for ij, x in self.entries.items()}, kind)


def compose(A: RingMatrix, B: RingMatrix) -> RingMatrix:
    """Matrix of ``A o B`` (apply B first) under the left-module convention."""
    if B.nrows != A.ncols:
        raise ValueError(f"cannot compose {A.shape} after {B.shape}")
    by_row: dict[int, list] = {}
    for (j, k), b in B.entries.items():
        by_row.setdefault(j, []).append((k, b))
    out: dict[tuple[int, int], RingElement] = {}
    for (i, j), a in A.entries.items():
        for k, b in by_row.get(j, ()):
            prod = b * a
            cur = out.get((i, k))
            out[(i, k)] = prod if cur is None else cur + prod
    return RingMatrix(A.spec, A.nrows, B.ncols, {ij: x for ij, x in out.items() if x}, A.kind)


@dataclass
class FreeComplex:
    """Free complex over the group ring of ``spec`` in degrees lo..hi.

    ``boundary[n]`` is the matrix of d_n : C_n -> C_{n-1}; it is present for
    lo < n <= hi.
    """

    spec: GroupSpec
    ranks: dict[int, int]
    boundary: dict[int, RingMatrix] = field(default_factory=dict)
    kind: str = "Z"

    def __post_init__(self):
        if not self.ranks:
            raise ValueError("a complex needs at least one degree")
        degs = sorted(self.ranks)
        if degs != list(range(degs[0], degs[-1] + 1)):
            raise ValueError(f"degrees must be contiguous, got {degs}")
        for n in range(degs[0] + 1, degs[-1] + 1):
            m = self.boundary.get(n)
            if m is None:
                m = self.boundary[n] = RingMatrix(self.spec, self.ranks[n - 1], self.ranks[n],
                                                  kind=self.kind)
            if m.shape != (self.ranks[n - 1], self.ranks[n]):
                raise ValueError(f"boundary {n} has shape {m.shape}, expected "
                                 f"{(self.ranks[n - 1], self.ranks[n])}")
        extra = set(self.boundary) - set(range(degs[0] + 1, degs[-1] + 1))
        if extra:
            raise ValueError(f"boundary given in degrees {sorted(extra)} outside the range")

    @property
    def lo(self) -> int:
        return min(self.ranks)

    @property
    def hi(self) -> int:
        return max(self.ranks)

    def degrees(self) -> range:
        return range(self.lo, self.hi + 1)

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def d(self, n: int) -> RingMatrix | None:
        return self.boundary.get(n)

    def euler(self) -> int:
        return sum((-1) ** n * r for n, r in self.ranks.items())

    def dd_zero(self) -> bool:
        return all(
            compose(self.boundary[n - 1], self.boundary[n]).is_zero()
            for n in range(self.lo + 2, self.hi + 1)
        )

    def check(self) -> "FreeComplex":
        if not self.dd_zero():
            raise ValueError("boundary composition is not zero")
        return self

    def __eq__(self, other):
        return (
            isinstance(other, FreeComplex)
            and self.spec == other.spec
            and self.ranks == other.ranks
            and self.boundary == other.boundary
        )

    def to_kind(self, kind: str) -> "FreeComplex":
        return FreeComplex(self.spec, dict(self.ranks),
                           {n: m.to_kind(kind) for n, m in self.boundary.items()}, kind)

    @property
    def propagation(self) -> int:
        return max((m.radius for m in self.boundary.values()), default=0)


def fox_complex(k: int, kind: str = "Z") -> FreeComplex:
    """Cellular chains of the universal cover of a wedge of k circles."""
    if k < 1:
        raise ValueError("free-group rank must be >= 1")
    spec = GroupSpec((k,))
    one = RingElement.one(spec, kind)
    entries = {
        (0, i): RingElement.of(g, 1, kind) - one for i, g in enumerate(spec.generators())
    }
    return FreeComplex(spec, {0: 1, 1: k}, {1: RingMatrix(spec, 1, k, entries, kind)}, kind)


def _tensor_basis(C: FreeComplex, D: FreeComplex):
    basis: dict[int, list[tuple[int, int, int, int]]] = {}
    for p in C.degrees():
        for q in D.degrees():
            for i in range(C.rank(p)):
                for j in range(D.rank(q)):
                    basis.setdefault(p + q, []).append((p, i, q, j))
    return basis


def tensor(C: FreeComplex, D: FreeComplex) -> FreeComplex:
    """Tensor product over the product group; Koszul sign on the second factor.

    Basis of degree n is ordered by (p, i, q, j) with e_i in C_p, e_j in D_q.
    """
    if C.kind != D.kind:
        raise TypeError("scalar kind mismatch")
    spec = C.spec.product(D.spec)
    off = len(C.spec.factors)
    basis = _tensor_basis(C, D)
    index = {n: {b: t for t, b in enumerate(bs)} for n, bs in basis.items()}
    ranks = {n: len(bs) for n, bs in basis.items()}
    bd: dict[int, RingMatrix] = {}
    for n in range(min(basis) + 1, max(basis) + 1):
        entries: dict[tuple[int, int], RingElement] = {}
        for col, (p, i, q, j) in enumerate(basis[n]):
            if p > C.lo:
                for k, x in C.boundary[p].column(i).items():
                    entries[(index[n - 1][(p - 1, k, q, j)], col)] = x.embed(spec, 0)
            if q > D.lo:
                sign = -1 if p % 2 else 1
                for l, y in D.boundary[q].column(j).items():
                    entries[(index[n - 1][(p, i, q - 1, l)], col)] = y.embed(spec, off).scale(sign)
        bd[n] = RingMatrix(spec, ranks[n - 1], ranks[n], entries, C.kind)
    return FreeComplex(spec, ranks, bd, C.kind)


def classifying_complex(spec: GroupSpec, kind: str = "Z") -> FreeComplex:
    """Free resolution of the trivial module for a product of free groups."""
    out = fox_complex(spec.factors[0], kind)
    for k in spec.factors[1:]:
        out = tensor(out, fox_complex(k, kind))
    return out


def dualize(C: FreeComplex, top: int) -> FreeComplex:
    """Degree n of the result is C_{top-n}^*, with d_n = involute(d^C_{top-n+1})^T."""
    ranks = {top - m: r for m, r in C.ranks.items()}
    bd = {}
    for n in range(min(ranks) + 1, max(ranks) + 1):
        bd[n] = C.boundary[top - n + 1].transpose_involute()
    return FreeComplex(C.spec, ranks, bd, C.kind)


@dataclass
class ModulePresentation:
    """Module presented as the cokernel of ``relations`` (rows = generators).

    ``action[i]`` is ``"free"`` when generator i spans a copy of the group
    ring, ``"trivial"`` when the group fixes it.
    """

    spec: GroupSpec
    generators: int
    relations: RingMatrix
    action: tuple[str, ...] = ()

    def __post_init__(self):
        if self.relations.nrows != self.generators:
            raise ValueError("relation matrix rows must match the generator count")
        if not self.action:
            self.action = ("free",) * self.generators
        if len(self.action) != self.generators or set(self.action) - {"free", "trivial"}:
            raise ValueError("action must list 'free' or 'trivial' per generator")


def dualizing_resolution(spec: GroupSpec, r: int, kind: str = "Z"):
    """Free resolution F_r..F_{r+d} of the dualizing module, and D = coker(d_{r+1})."""
    if r < 2:
        raise ValueError(f"need r >= 2, got r = {r}")
    F = dualize(classifying_complex(spec, kind), top=r + spec.dimension)
    D = ModulePresentation(spec, F.rank(r), F.boundary[r + 1])
    return F, D


@dataclass
class ScalarComplex:
    """Finite complex of free abelian groups (or Q-vector spaces).

    ``boundary[n]`` maps (row, col) -> nonzero int/Fraction, shape
    ranks[n-1] x ranks[n].
    """

    ranks: dict[int, int]
    boundary: dict[int, dict[tuple[int, int], "int | Fraction"]] = field(default_factory=dict)

    def __post_init__(self):
        for n, m in self.boundary.items():
            for (i, j), v in m.items():
                if not (0 <= i < self.ranks.get(n - 1, 0) and 0 <= j < self.ranks.get(n, 0)):
                    raise ValueError(f"boundary {n} entry ({i},{j}) out of range")
        self.boundary = {n: {ij: v for ij, v in m.items() if v} for n, m in self.boundary.items()}

    def degrees(self) -> list[int]:
        return sorted(self.ranks)

    def rank(self, n: int) -> int:
        return self.ranks.get(n, 0)

    def euler(self) -> int:
        return sum((-1) ** n * r for n, r in self.ranks.items())

    def _cols(self, n: int) -> list[dict[int, "int | Fraction"]]:
        cols: dict[int, dict] = {}
        for (i, j), v in self.boundary.get(n, {}).items():
            cols.setdefault(j, {})[i] = v
        return list(cols.values())

    def boundary_rank(self, n: int, p: int = 0) -> int:
        cols = self._cols(n)
        return rank_mod(cols, p) if p else rank(cols)

    def dd_zero(self) -> bool:
        for n in self.boundary:
            if n - 1 not in self.boundary:
                continue
            A, B = self.boundary[n - 1], self.boundary[n]
            acc: dict = {}
            rows_b: dict[int, list] = {}
            for (j, k), b in B.items():
                rows_b.setdefault(j, []).append((k, b))
            for (i, j), a in A.items():
                for k, b in rows_b.get(j, ()):
                    acc[(i, k)] = acc.get((i, k), 0) + a * b
            if any(acc.values()):
                return False
        return True

    def betti(self, p: int = 0) -> dict[int, int]:
        """Betti numbers over Q (p = 0) or over Z/p."""
        rk = {n: self.boundary_rank(n, p) for n in self.ranks}
        return {n: self.rank(n) - rk[n] - rk.get(n + 1, 0) for n in self.degrees()}

    def torsion(self) -> dict[int, list[int]]:
        """Nontrivial invariant factors of H_n over Z."""
        out = {}
        for n in self.degrees():
            m = self.boundary.get(n + 1, {})
            diag = smith_diagonal(m, self.rank(n), self.rank(n + 1)) if m else []
            out[n] = [x for x in diag if x > 1]
        return out

    def homology(self) -> dict[int, tuple[int, list[int]]]:
        b, t = self.betti(), self.torsion()
        return {n: (b[n], t[n]) for n in self.degrees()}


def coinvariants(C: FreeComplex) -> ScalarComplex:
    return ScalarComplex(dict(C.ranks), {n: m.augment() for n, m in C.boundary.items()})


def scalar_tensor(A: ScalarComplex, B: ScalarComplex) -> ScalarComplex:
    """Tensor of scalar complexes with the same Koszul convention as ``tensor``."""
    basis: dict[int, list] = {}
    for p in A.degrees():
        for q in B.degrees():
            for i in range(A.rank(p)):
                for j in range(B.rank(q)):
                    basis.setdefault(p + q, []).append((p, i, q, j))
    index = {n: {b: t for t, b in enumerate(bs)} for n, bs in basis.items()}
    colsA = {n: {} for n in A.boundary}
    for n, m in A.boundary.items():
        for (i, j), v in m.items():
            colsA[n].setdefault(j, []).append((i, v))
    colsB = {n: {} for n in B.boundary}
    for n, m in B.boundary.items():
        for (i, j), v in m.items():
            colsB[n].setdefault(j, []).append((i, v))
    bd: dict[int, dict] = {}
    for n, bs in basis.items():
        if n - 1 not in basis:
            continue
        m = {}
        for col, (p, i, q, j) in enumerate(bs):
            for k, v in colsA.get(p, {}).get(i, ()):
                m[(index[n - 1][(p - 1, k, q, j)], col)] = v
            sign = -1 if p % 2 else 1
            for l, v in colsB.get(q, {}).get(j, ()):
                m[(index[n - 1][(p, i, q - 1, l)], col)] = sign * v
        bd[n] = m
    return ScalarComplex({n: len(bs) for n, bs in basis.items()}, bd)


def kunneth_betti(b1: Mapping[int, int], b2: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for p, x in b1.items():
        for q, y in b2.items():
            out[p + q] = out.get(p + q, 0) + x * y
    return out


def tensor_rank_formula(d: int, j: int) -> int:
    """Rank in degree j of the d-fold tensor power of the rank-2 Fox complex."""
    return comb(d, j) * 2 ** j


# ---------------------------------------------------------------------------
# text format

def dumps_complex(C: FreeComplex) -> str:
    lines = [f"complex {C.spec} kind {C.kind} degrees {C.lo}..{C.hi}"]
    lines.append("ranks " + " ".join(f"{n}:{C.rank(n)}" for n in C.degrees()))
    for n in range(C.lo + 1, C.hi + 1):
        m = C.boundary[n]
        lines.append(f"boundary {n} {m.nrows}x{m.ncols} {len(m.entries)}")
        for (i, j) in sorted(m.entries):
            lines.append(f"  {i} {j} {m.entries[(i, j)]}")
    lines.append("end")
    return "\n".join(lines) + "\n"


_HEAD = re.compile(r"complex (\S+) kind ([ZQ]) degrees (-?\d+)\.\.(-?\d+)")


def loads_complex(text: str) -> FreeComplex:
    try:
        lines = [ln.rstrip() for ln in text.splitlines() if ln.strip()]
        m = _HEAD.fullmatch(lines[0])
        if not m:
            raise InputError(f"bad complex header {lines[0]!r}")
        spec, kind = GroupSpec.parse(m.group(1)), m.group(2)
        ranks = {}
        for tok in lines[1].split()[1:]:
            n, r = tok.split(":")
            ranks[int(n)] = int(r)
        bd = {}
        pos = 2
        while lines[pos] != "end":
            _, n, shape, cnt = lines[pos].split()
            nr, nc = (int(x) for x in shape.split("x"))
            entries = {}
            for ln in lines[pos + 1: pos + 1 + int(cnt)]:
                i, j, txt = ln.strip().split(" ", 2)
                entries[(int(i), int(j))] = RingElement.parse(txt, spec, kind)
            bd[int(n)] = RingMatrix(spec, nr, nc, entries, kind)
            pos += 1 + int(cnt)
        return FreeComplex(spec, ranks, bd, kind)
    except InputError:
        raise
    except (IndexError, ValueError, TypeError) as exc:
        raise InputError(f"malformed complex file: {exc}") from None


def dumps_scalar(S: ScalarComplex) -> str:
    lines = ["scalar-complex", "ranks " + " ".join(f"{n}:{S.rank(n)}" for n in S.degrees())]
    for n in sorted(S.boundary):
        m = S.boundary[n]
        lines.append(f"boundary {n} {len(m)}")
        lines.extend(f"  {i} {j} {m[(i, j)]}" for (i, j) in sorted(m))
    lines.append("end")
    return "\n".join(lines) + "\n"


def loads_scalar(text: str) -> ScalarComplex:
    try:
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if lines[0] != "scalar-complex":
            raise InputError("not a scalar complex file")
        ranks = {int(a): int(b) for a, b in (t.split(":") for t in lines[1].split()[1:])}
        bd, pos = {}, 2
        while lines[pos] != "end":
            _, n, cnt = lines[pos].split()
            m = {}
            for ln in lines[pos + 1: pos + 1 + int(cnt)]:
                i, j, v = ln.split()
                fv = Fraction(v)
                m[(int(i), int(j))] = int(fv) if fv.denominator == 1 else fv
            bd[int(n)] = m
            pos += 1 + int(cnt)
        return ScalarComplex(ranks, bd)
    except InputError:
        raise
    except (IndexError, ValueError) as exc:
        raise InputError(f"malformed scalar complex file: {exc}") from None


# ---------------------------------------------------------------------------
# classical test complexes

def simplicial_complex(simplices: Iterable[Iterable[int]]) -> ScalarComplex:
    """Oriented simplicial chain complex of the downward closure of ``simplices``."""
    from itertools import combinations

    faces: set[tuple[int, ...]] = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            faces.update(combinations(s, k))
    by_dim: dict[int, list] = {}
    for f in sorted(faces):
        by_dim.setdefault(len(f) - 1, []).append(f)
    index = {f: i for fs in by_dim.values() for i, f in enumerate(fs)}
    bd = {}
    for n, fs in by_dim.items():
        if n == 0:
            continue
        m = {}
        for j, f in enumerate(fs):
            for t in range(len(f)):
                m[(index[f[:t] + f[t + 1:]], j)] = (-1) ** t
        bd[n] = m
    return ScalarComplex({n: len(fs) for n, fs in by_dim.items()}, bd)


CIRCLE = [(0, 1), (1, 2), (0, 2)]
TORUS = [  # 7-vertex torus
    tuple(sorted(((i + a) % 7, (i + b) % 7, (i + 3) % 7)))
    for i in range(7) for a, b in ((0, 1), (0, 2))
]
RP2 = [  # standard 6-vertex triangulation
    (0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
    (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3),
]
