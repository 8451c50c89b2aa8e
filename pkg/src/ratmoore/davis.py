"""Reflection-group basic construction over the finite quotient (Z/2)^V.

M is a finite simplicial complex whose boundary is the barycentric subdivision
bL of a flag complex L: each boundary vertex of M is labelled by a simplex of
L, and a boundary simplex of M is one whose labels form a strict chain.  For a
boundary cell c let sigma0(c) be the smallest simplex of its chain; c lies in
the mirror of v exactly when v is in sigma0(c), so its stabilizer is
Q_c = <e_v : v in sigma0(c)>.  Interior cells have trivial stabilizer.

The cells of U/G are pairs (c, coset of Q_c in Q), with Q = (Z/2)^V encoded as
bitmasks over the vertex order of L.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from itertools import combinations
from typing import Iterable, Mapping, Sequence

import networkx as nx

from .chain import ScalarComplex
from .groupring import InputError

Simplex = tuple


class StructureError(ValueError):
    """Input complex violates a structural precondition."""


def closure(simplices: Iterable[Iterable]) -> set[Simplex]:
    out: set[Simplex] = set()
    for s in simplices:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


@dataclass(frozen=True)
class FlagComplex:
    vertices: tuple
    simplices: frozenset

    @classmethod
    def from_simplices(cls, simplices: Iterable[Iterable], close: bool = True) -> "FlagComplex":
        simp = closure(simplices) if close else {tuple(sorted(s)) for s in simplices}
        verts = tuple(sorted({v for s in simp for v in s}))
        K = cls(verts, frozenset(simp))
        if not close:
            missing = closure(simp) - simp
            if missing:
                raise StructureError(f"not downward closed: missing face {sorted(missing)[0]}")
        return K

    def edges(self) -> list[Simplex]:
        return sorted(s for s in self.simplices if len(s) == 2)

    def graph(self) -> nx.Graph:
        G = nx.Graph()
        G.add_nodes_from(self.vertices)
        G.add_edges_from(self.edges())
        return G

    def dimension(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def chains(self) -> set[tuple[Simplex, ...]]:
        """All strict chains of nonempty simplices: the simplices of bL."""
        order = sorted(self.simplices, key=lambda s: (len(s), s))
        out: set = set()

        def rec(chain):
            out.add(tuple(chain))
            last = chain[-1]
            for s in order:
                if len(s) > len(last) and set(last) <= set(s):
                    rec(chain + [s])

        for s in order:
            rec([s])
        return out


def flag_check(K: FlagComplex | Iterable[Iterable]) -> tuple[bool, Simplex | None]:
    """True iff every clique of the 1-skeleton spans a simplex; else a minimal witness."""
    if not isinstance(K, FlagComplex):
        K = FlagComplex.from_simplices(K, close=False)
    else:
        missing = closure(K.simplices) - set(K.simplices)
        if missing:
            raise StructureError(f"not downward closed: missing face {sorted(missing)[0]}")
    # cliques come out in increasing size, so the first miss is minimal
    for clique in nx.enumerate_all_cliques(K.graph()):
        if tuple(sorted(clique)) not in K.simplices:
            return False, tuple(sorted(clique))
    return True, None


@dataclass(frozen=True)
class CoxeterSpec:
    vertices: tuple
    commuting: tuple

    @classmethod
    def from_flag(cls, L: FlagComplex) -> "CoxeterSpec":
        return cls(L.vertices, tuple(L.edges()))

    def relations(self) -> list[str]:
        rels = [f"s{v}^2" for v in self.vertices]
        rels += [f"s{a}*s{b}*s{a}*s{b}" for a, b in self.commuting]
        return rels


@dataclass
class MirroredSpace:
    L: FlagComplex
    simplices: list[Simplex]  # all simplices of M, closed under faces
    labels: dict  # boundary vertex -> simplex of L
    name: str = ""

    def __post_init__(self):
        self.simplices = sorted(closure(self.simplices), key=lambda s: (len(s), s))
        ok, wit = flag_check(self.L)
        if not ok:
            raise StructureError(f"L is not flag: clique {wit} spans no simplex")
        for v, s in self.labels.items():
            if tuple(sorted(s)) not in self.L.simplices:
                raise StructureError(f"label {s} of vertex {v} is not a simplex of L")
        self.labels = {v: tuple(sorted(s)) for v, s in self.labels.items()}
        self.vindex = {v: t for t, v in enumerate(self.L.vertices)}
        self._sigma0: dict[Simplex, Simplex | None] = {}
        chains = {}
        for c in self.simplices:
            ch = self._chain(c)
            self._sigma0[c] = ch[0] if ch else None
            if ch:
                if ch in chains:
                    raise StructureError(f"cells {chains[ch]} and {c} cover the same simplex of bL")
                chains[ch] = c
        missing = self.L.chains() - set(chains)
        if missing:
            raise StructureError(f"boundary of M does not cover bL: chain {sorted(missing)[0]} missing")

    def _chain(self, c: Simplex):
        if not all(v in self.labels for v in c):
            return None
        ch = sorted((self.labels[v] for v in c), key=lambda s: (len(s), s))
        for a, b in zip(ch, ch[1:]):
            if len(a) == len(b) or not set(a) <= set(b):
                return None
        return tuple(ch)

    def sigma0(self, c: Simplex) -> Simplex | None:
        return self._sigma0[c]

    def mask(self, c: Simplex) -> int:
        s = self._sigma0[c]
        return 0 if s is None else sum(1 << self.vindex[v] for v in s)

    def boundary_cells(self) -> list[Simplex]:
        return [c for c in self.simplices if self._sigma0[c] is not None]

    def mirror(self, v) -> list[Simplex]:
        """Closed star of v in bL."""
        return [c for c in self.boundary_cells() if v in self._sigma0[c]]

    def mirror_union(self, T: Iterable) -> set[Simplex]:
        T = set(T)
        return {c for c in self.boundary_cells() if T & set(self._sigma0[c])}

    @property
    def dimension(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def chain_complex(self, removed: set[Simplex] = frozenset()) -> ScalarComplex:
        """Chains of M relative to a subcomplex."""
        cells: dict[int, list] = {}
        for c in self.simplices:
            if c not in removed:
                cells.setdefault(len(c) - 1, []).append(c)
        top = self.dimension
        index = {c: i for cs in cells.values() for i, c in enumerate(cs)}
        ranks = {n: len(cells.get(n, [])) for n in range(top + 1)}
        bd = {}
        for n in range(1, top + 1):
            m = {}
            for j, c in enumerate(cells.get(n, [])):
                for t in range(len(c)):
                    f = c[:t] + c[t + 1:]
                    if f in index:
                        m[(index[f], j)] = (-1) ** t
            bd[n] = m
        return ScalarComplex(ranks, bd)


@dataclass
class BasicConstruction:
    space: MirroredSpace
    cells: dict[int, list[tuple[Simplex, int]]]
    complex: ScalarComplex
    union_find_ok: bool

    @property
    def chambers(self) -> int:
        return 2 ** len(self.space.L.vertices)

    def cell_counts(self) -> dict[int, int]:
        return {n: len(cs) for n, cs in sorted(self.cells.items())}

    def euler(self) -> int:
        return self.complex.euler()

    def betti(self, p: int = 0) -> list[int]:
        b = self.complex.betti(p)
        return [b[n] for n in sorted(b)]


def _union_find_classes(S: MirroredSpace, c: Simplex, q: int) -> bool:
    """Fold across the mirrors of c and compare the classes with cosets of Q_c."""
    parent = list(range(q))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    s0 = S.sigma0(c) or ()
    for u in range(q):
        for v in s0:
            a, b = find(u), find(u ^ (1 << S.vindex[v]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    m = S.mask(c)
    classes: dict[int, set] = {}
    for u in range(q):
        classes.setdefault(find(u), set()).add(u)
    return all(len({u & ~m for u in cls}) == 1 for cls in classes.values()) and \
        len(classes) == q >> bin(m).count("1")


def basic_construction(S: MirroredSpace) -> BasicConstruction:
    q = 2 ** len(S.L.vertices)
    cells: dict[int, list] = {}
    for c in S.simplices:
        m = S.mask(c)
        for u in range(q):
            if u & m == 0:
                cells.setdefault(len(c) - 1, []).append((c, u))
    index = {cell: i for cs in cells.values() for i, cell in enumerate(cs)}
    bd = {}
    for n in range(1, S.dimension + 1):
        mat = {}
        for j, (c, u) in enumerate(cells.get(n, [])):
            for t in range(len(c)):
                f = c[:t] + c[t + 1:]
                mat[(index[(f, u & ~S.mask(f))], j)] = (-1) ** t
        bd[n] = mat
    X = ScalarComplex({n: len(cells.get(n, [])) for n in range(S.dimension + 1)}, bd)
    uf = all(_union_find_classes(S, c, q) for c in S.boundary_cells())
    return BasicConstruction(S, cells, X, uf)


def _subsets(vertices: Sequence):
    for k in range(len(vertices) + 1):
        yield from combinations(vertices, k)


def decomposition_check(S: MirroredSpace, B: BasicConstruction | None = None) -> dict:
    """Compare H(U/G) with the sum over T of H(M, M^T), over Q and Z/2."""
    B = B or basic_construction(S)
    top = S.dimension
    sums = {0: [0] * (top + 1), 2: [0] * (top + 1)}
    chi_sum = 0
    for T in _subsets(S.L.vertices):
        rel = S.chain_complex(S.mirror_union(T))
        chi_sum += rel.euler()
        for p in (0, 2):
            b = rel.betti(p)
            for n in range(top + 1):
                sums[p][n] += b.get(n, 0)
    left = {p: B.betti(p) for p in (0, 2)}
    return {
        "U_betti_Q": left[0], "sum_betti_Q": sums[0],
        "U_betti_Z2": left[2], "sum_betti_Z2": sums[2],
        "equal_Q": left[0] == sums[0], "equal_Z2": left[2] == sums[2],
        "euler_cells": B.euler(), "euler_subset_sum": chi_sum,
        "euler_equal": B.euler() == chi_sum,
        "chambers": B.chambers, "chambers_ok": B.chambers == 2 ** len(S.L.vertices)
        and len(B.cells[top]) == B.chambers * sum(1 for c in S.simplices if len(c) == top + 1),
    }


def duality_check(B: BasicConstruction, n: int) -> dict:
    """Z/2 Betti palindromicity and the pseudo-manifold incidence test."""
    b = B.betti(2)
    b += [0] * (n + 1 - len(b))
    pal = all(b[k] == b[n - k] for k in range(n + 1))
    counts: dict[int, int] = {}
    for (i, j) in B.complex.boundary.get(n, {}):
        counts[i] = counts.get(i, 0) + 1
    witness = None
    for i, cell in enumerate(B.cells.get(n - 1, [])):
        if counts.get(i, 0) != 2:
            witness = (cell[0], cell[1], counts.get(i, 0))
            break
    return {"betti_Z2": b, "palindromic": pal, "closed": witness is None,
            "witness": witness, "ok": pal and witness is None}


# ---------------------------------------------------------------------------
# file formats and shipped examples

def load_flag(data: Mapping | str) -> FlagComplex:
    if isinstance(data, str):
        data = _read_json(data)
    try:
        simp = data["simplices"]
        verts = data.get("vertices", [])
    except (KeyError, TypeError):
        raise InputError("flag complex file needs a 'simplices' list") from None
    K = FlagComplex.from_simplices(simp + [[v] for v in verts], close=data.get("close", False))
    return K


def load_mirrored(mdata: Mapping | str, L: FlagComplex) -> MirroredSpace:
    if isinstance(mdata, str):
        mdata = _read_json(mdata)
    try:
        labels = {v: tuple(s) for v, s in mdata["labels"]}
        return MirroredSpace(L, [tuple(s) for s in mdata["simplices"]], labels,
                             mdata.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StructureError):
            raise
        raise InputError(f"malformed mirrored-space file: {exc}") from None


def _read_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: {exc}") from None


EXAMPLES = ("interval", "disk", "annulus", "half_interval")


def example(name: str) -> MirroredSpace:
    """One of the shipped examples: interval, disk, annulus, half_interval."""
    if name not in EXAMPLES:
        raise KeyError(f"unknown example {name!r}; choose from {', '.join(EXAMPLES)}")
    pkg = resources.files("ratmoore") / "data" / "davis"
    mdata = json.loads((pkg / f"{name}_m.json").read_text())
    ldata = json.loads((pkg / f"{mdata['l']}_l.json").read_text())
    return load_mirrored(mdata, load_flag(ldata))
