"""Exact sparse linear algebra: ranks over Q and Z/p, Smith normal form, RREF solves.

Sparse vectors are dicts ``column -> scalar`` with no stored zeros.  Columns may
be any mutually comparable keys.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Hashable, Iterable, Mapping, Sequence

SparseRow = Mapping[Hashable, "int | Fraction"]


def _integral(row: SparseRow) -> dict:
    """Scale a rational row to a primitive integer row."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = lcm(den, v.denominator)
    out = {}
    for k, v in row.items():
        if v:
            out[k] = int(v * den)
    return _primitive(out)


def _primitive(row: dict) -> dict:
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        return {k: v // g for k, v in row.items()}
    return row


class IntEchelon:
    """Incremental fraction-free echelon form over Z (rank over Q).

    Rows are inserted one at a time; each is reduced against the stored
    pivots and kept if something survives.  Content is divided out after
    every elimination, which keeps entries small on the sparse, +-1 heavy
    matrices met in practice.
    """

    def __init__(self, key=None):
        self.pivots: dict = {}
        self.key = key

    def _lead(self, row):
        return min(row, key=self.key) if self.key else min(row)

    def insert(self, row: SparseRow) -> bool:
        row = _integral(row)
        while row:
            c = self._lead(row)
            p = self.pivots.get(c)
            if p is None:
                if row[c] < 0:
                    row = {k: -v for k, v in row.items()}
                self.pivots[c] = row
                return True
            a, b = p[c], row[c]
            g = gcd(a, b)
            ma, mb = a // g, b // g
            new = {k: ma * v for k, v in row.items()} if ma != 1 else dict(row)
            for k, v in p.items():
                nv = new.get(k, 0) - mb * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            row = _primitive(new)
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)


class ModEchelon:
    """Incremental echelon form over Z/p."""

    def __init__(self, p: int, key=None):
        self.p = p
        self.pivots: dict = {}
        self.key = key

    def insert(self, row: SparseRow) -> bool:
        p = self.p
        cur = {}
        for k, v in row.items():
            if isinstance(v, Fraction):
                if v.denominator % p == 0:
                    raise ZeroDivisionError(f"denominator of {v} vanishes mod {p}")
                v = v.numerator * pow(v.denominator, -1, p)
            v %= p
            if v:
                cur[k] = v
        while cur:
            c = min(cur, key=self.key) if self.key else min(cur)
            piv = self.pivots.get(c)
            if piv is None:
                inv = pow(cur[c], -1, p)
                self.pivots[c] = {k: v * inv % p for k, v in cur.items()}
                return True
            f = cur[c]
            for k, v in piv.items():
                nv = (cur.get(k, 0) - f * v) % p
                if nv:
                    cur[k] = nv
                else:
                    cur.pop(k, None)
        return False

    @property
    def rank(self) -> int:
        return len(self.pivots)


def rank(rows: Iterable[SparseRow], key=None) -> int:
    """Exact rank over Q of a matrix given as sparse rows (or columns)."""
    ech = IntEchelon(key)
    for r in rows:
        if r:
            ech.insert(r)
    return ech.rank


def rank_mod(rows: Iterable[SparseRow], p: int, key=None) -> int:
    ech = ModEchelon(p, key)
    for r in rows:
        if r:
            ech.insert(r)
    return ech.rank


def _fix_divisibility(diag: list[int]) -> list[int]:
    diag = sorted(abs(d) for d in diag if d)
    changed = True
    while changed:
        changed = False
        for i in range(len(diag)):
            for j in range(i + 1, len(diag)):
                a, b = diag[i], diag[j]
                if b % a:
                    diag[i], diag[j] = gcd(a, b), lcm(a, b)
                    changed = True
        diag.sort()
    return diag


def smith_diagonal(entries: Mapping[tuple, int], nrows: int, ncols: int) -> list[int]:
    """Nonzero invariant factors of an integer matrix, ascending.

    ``entries`` maps (row, col) to a nonzero integer.  Elimination is
    fraction free and always pivots on an entry of minimal absolute value.
    """
    rows: dict[int, dict[int, int]] = {}
    cols: dict[int, dict[int, int]] = {}
    for (i, j), v in entries.items():
        if isinstance(v, Fraction):
            if v.denominator != 1:
                raise ValueError("Smith normal form needs an integer matrix")
            v = v.numerator
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, {})[i] = v

    def setv(i, j, v):
        if v:
            rows.setdefault(i, {})[j] = v
            cols.setdefault(j, {})[i] = v
        else:
            rows.get(i, {}).pop(j, None)
            cols.get(j, {}).pop(i, None)
            if i in rows and not rows[i]:
                del rows[i]
            if j in cols and not cols[j]:
                del cols[j]

    diag: list[int] = []
    while rows:
        # pivot on a unit if one is around, else the global min-abs entry
        best = None
        for i, r in rows.items():
            for j, v in r.items():
                if best is None or abs(v) < best[0]:
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best and best[0] == 1:
                break
        _, pi, pj = best
        while True:
            pv = rows[pi][pj]
            done = True
            # clear the pivot column
            for i, v in list(cols.get(pj, {}).items()):
                if i == pi:
                    continue
                q = v // pv
                if q:
                    for j, w in list(rows[pi].items()):
                        setv(i, j, rows.get(i, {}).get(j, 0) - q * w)
                if rows.get(i, {}).get(pj, 0):
                    done = False
            # clear the pivot row
            for j, v in list(rows.get(pi, {}).items()):
                if j == pj:
                    continue
                q = v // pv
                if q:
                    for i, w in list(cols[pj].items()):
                        setv(i, j, cols.get(j, {}).get(i, 0) - q * w)
                if rows.get(pi, {}).get(j, 0):
                    done = False
            if done:
                break
            # a remainder survived: move pivot to the smallest entry in row/col
            cand = [(abs(v), i, pj) for i, v in cols[pj].items()]
            cand += [(abs(v), pi, j) for j, v in rows[pi].items()]
            _, pi, pj = min(cand)
        diag.append(rows[pi][pj])
        setv(pi, pj, 0)
    return _fix_divisibility(diag)


def solve_minimal(columns: Sequence[SparseRow], rhs: SparseRow):
    """Solve sum_j x_j * columns[j] = rhs exactly over Q.

    Pivots are taken on the earliest possible columns and free variables are
    set to zero, so callers control tie-breaking through column order.
    Returns ``{j: x_j}`` (nonzero entries only) or ``None`` if inconsistent.
    """
    # transpose to equation rows
    eqs: dict[Hashable, dict[int, Fraction]] = {}
    for j, col in enumerate(columns):
        for r, v in col.items():
            if v:
                eqs.setdefault(r, {})[j] = Fraction(v)
    rvals = {r: Fraction(v) for r, v in rhs.items() if v}
    for r in rvals:
        eqs.setdefault(r, {})
    order = sorted(eqs, key=repr)
    work = [(dict(eqs[r]), rvals.get(r, Fraction(0))) for r in order]
    pivots: dict[int, tuple[dict, Fraction]] = {}
    for row, b in work:
        for c in [k for k in row if k in pivots]:
            f = row.get(c)
            if not f:
                continue
            prow, pb = pivots[c]
            for k, v in prow.items():
                nv = row.get(k, 0) - f * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
            b -= f * pb
        if not row:
            if b:
                return None
            continue
        c = min(row)
        inv = 1 / row[c]
        row = {k: v * inv for k, v in row.items()}
        b *= inv
        # keep the stored pivots fully reduced
        for pc, (prow, pb) in list(pivots.items()):
            f = prow.get(c)
            if f:
                for k, v in row.items():
                    nv = prow.get(k, 0) - f * v
                    if nv:
                        prow[k] = nv
                    else:
                        prow.pop(k, None)
                pivots[pc] = (prow, pb - f * b)
        pivots[c] = (row, b)
    return {c: b for c, (_, b) in pivots.items() if b}
