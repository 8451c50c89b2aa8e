"""Free graded Lie algebras over Q via the tensor algebra.

Basis: graded Lyndon words w with their standard bracketing P(w), plus the
squares [P(v), P(v)] of odd-degree Lyndon words v.  Every Lie element is
normalized by embedding it in T(V) and peeling off lexicographically least
words: P(w) has least word w (coefficient 1), an odd square has least word vv
(coefficient 2).

Letters may be any hashable objects; the algebra is told their degree and
their order.  Every computation carries a degree cap, and asking for anything
beyond it raises ``CapError``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .chain import ScalarComplex
from .linalg import rank

Word = tuple
Tensor = dict  # word -> Fraction


class CapError(ValueError):
    """A query went past the declared degree cap."""


def _add_into(acc: dict, other: Mapping, c=1):
    for k, v in other.items():
        s = acc.get(k, 0) + c * v
        if s:
            acc[k] = s
        else:
            acc.pop(k, None)


class FreeLieAlgebra:
    def __init__(self, degree: Callable[[Hashable], int] | Mapping[Hashable, int],
                 cap: int, key: Callable[[Hashable], object] | None = None):
        self._deg = degree.__getitem__ if isinstance(degree, Mapping) else degree
        self.cap = cap
        self._key = key or (lambda x: x)
        self._kcache: dict = {}
        self._expand_cache: dict = {}

    # letters and words
    def deg(self, letter) -> int:
        return self._deg(letter)

    def word_degree(self, w: Word) -> int:
        return sum(self._deg(x) for x in w)

    def lkey(self, letter):
        k = self._kcache.get(letter)
        if k is None:
            k = self._kcache[letter] = self._key(letter)
        return k

    def wkey(self, w: Word) -> tuple:
        return tuple(self.lkey(x) for x in w)

    def is_lyndon(self, w: Word) -> bool:
        if not w:
            return False
        k = self.wkey(w)
        return all(k < k[i:] + k[:i] for i in range(1, len(k)))

    def standard_factor(self, w: Word) -> tuple[Word, Word]:
        for i in range(1, len(w)):
            if self.is_lyndon(w[i:]):
                return w[:i], w[i:]
        raise ValueError(f"{w} has no standard factorization")

    # tensor algebra
    def tmul(self, X: Tensor, Y: Tensor) -> Tensor:
        out: dict = {}
        for u, a in X.items():
            for v, b in Y.items():
                w = u + v
                s = out.get(w, 0) + a * b
                if s:
                    out[w] = s
                else:
                    out.pop(w, None)
        return out

    def tcommutator(self, X: Tensor, Y: Tensor) -> Tensor:
        out: dict = {}
        for u, a in X.items():
            du = self.word_degree(u)
            for v, b in Y.items():
                sign = -1 if (du * self.word_degree(v)) % 2 else 1
                for w, c in ((u + v, a * b), (v + u, -sign * a * b)):
                    s = out.get(w, 0) + c
                    if s:
                        out[w] = s
                    else:
                        out.pop(w, None)
        return out

    def expand(self, b) -> Tensor:
        """Tensor expansion of a basis key ('L', w) or ('S', v)."""
        t = self._expand_cache.get(b)
        if t is not None:
            return t
        kind, w = b
        if kind == "L":
            if len(w) == 1:
                t = {w: Fraction(1)}
            else:
                u, v = self.standard_factor(w)
                t = self.tcommutator(self.expand(("L", u)), self.expand(("L", v)))
        else:
            p = self.expand(("L", w))
            t = self.tcommutator(p, p)
        self._expand_cache[b] = t
        return t

    def _check_cap(self, d: int):
        if d > self.cap:
            raise CapError(f"degree {d} exceeds the cap {self.cap}")

    def reduce(self, T: Tensor) -> "LieElement":
        """Rewrite a tensor known to be a Lie element in the basis."""
        T = {w: Fraction(c) for w, c in T.items() if c}
        out: dict = {}
        while T:
            m = min(T, key=self.wkey)
            c = T[m]
            self._check_cap(self.word_degree(m))
            if self.is_lyndon(m):
                b, lead = ("L", m), 1
            else:
                h = len(m) // 2
                v = m[:h]
                if len(m) % 2 or m[h:] != v or not self.is_lyndon(v) or self.word_degree(v) % 2 == 0:
                    raise ValueError(f"tensor is not a Lie element (stuck at word {m})")
                b, lead = ("S", v), 2
            f = c / lead
            out[b] = out.get(b, 0) + f
            _add_into(T, self.expand(b), -f)
        return LieElement(self, {b: c for b, c in out.items() if c})

    # Lie elements
    def gen(self, letter, coef=1) -> "LieElement":
        self._check_cap(self.deg(letter))
        return LieElement(self, {("L", (letter,)): Fraction(coef)})

    def zero(self) -> "LieElement":
        return LieElement(self, {})

    def bracket(self, X: "LieElement", Y: "LieElement") -> "LieElement":
        if not X.terms or not Y.terms:
            return self.zero()
        return self.reduce(self.tcommutator(X.embed(), Y.embed()))

    def basis(self, letters: Sequence, degree: int, max_length: int | None = None) -> list:
        """Basis keys of the given degree over a finite letter set.

        ``max_length`` bounds the bracket length (number of letters).
        """
        self._check_cap(degree)
        letters = sorted(set(letters), key=self.lkey)
        out = [("L", w) for w in self.words(letters, degree, max_length) if self.is_lyndon(w)]
        if degree % 2 == 0:
            half = degree // 2
            if half % 2:
                half_len = None if max_length is None else max_length // 2
                out += [("S", v) for v in self.words(letters, half, half_len) if self.is_lyndon(v)]
        return sorted(out, key=self.basis_key)

    def words(self, letters: Sequence, degree: int, max_length: int | None = None) -> list[Word]:
        out: list[Word] = []
        letters = sorted(set(letters), key=self.lkey)

        def rec(prefix, left):
            if left == 0:
                out.append(tuple(prefix))
                return
            if max_length is not None and len(prefix) >= max_length:
                return
            for x in letters:
                d = self.deg(x)
                if d <= left:
                    prefix.append(x)
                    rec(prefix, left - d)
                    prefix.pop()

        if degree > 0:
            rec([], degree)
        return out

    def basis_key(self, b):
        kind, w = b
        return (len(w) * (2 if kind == "S" else 1), self.wkey(w), kind)

    def render(self, b) -> str:
        kind, w = b
        if kind == "S":
            p = self.render(("L", w))
            return f"[{p},{p}]"
        if len(w) == 1:
            return str(w[0])
        u, v = self.standard_factor(w)
        return f"[{self.render(('L', u))},{self.render(('L', v))}]"

    def bracket_length(self, b) -> int:
        kind, w = b
        return len(w) * (2 if kind == "S" else 1)


class LieElement:
    """Q-linear combination of basis keys of a FreeLieAlgebra."""

    __slots__ = ("alg", "terms")

    def __init__(self, alg: FreeLieAlgebra, terms: Mapping):
        self.alg = alg
        self.terms = {b: Fraction(c) for b, c in terms.items() if c}

    def embed(self) -> Tensor:
        out: dict = {}
        for b, c in self.terms.items():
            _add_into(out, self.alg.expand(b), c)
        return out

    def __add__(self, other: "LieElement") -> "LieElement":
        out = dict(self.terms)
        _add_into(out, other.terms)
        return LieElement(self.alg, out)

    def __sub__(self, other: "LieElement") -> "LieElement":
        out = dict(self.terms)
        _add_into(out, other.terms, -1)
        return LieElement(self.alg, out)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c) -> "LieElement":
        return LieElement(self.alg, {b: c * v for b, v in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, LieElement):
            return self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    __hash__ = None

    def __bool__(self):
        return bool(self.terms)

    def degrees(self) -> set[int]:
        return {self.alg.word_degree(w) * (2 if k == "S" else 1) for k, w in self.terms}

    def linear_part(self) -> dict:
        """Coefficients of the bracket-free (single letter) terms."""
        return {w[0]: c for (k, w), c in self.terms.items() if k == "L" and len(w) == 1}

    def bracket_part(self) -> "LieElement":
        return LieElement(self.alg, {b: c for b, c in self.terms.items()
                                     if self.alg.bracket_length(b) > 1})

    def letters(self) -> set:
        return {x for _, w in self.terms for x in w}

    def max_bracket_length(self) -> int:
        return max((self.alg.bracket_length(b) for b in self.terms), default=0)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: self.alg.basis_key(t[0]))

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for b, c in self.sorted_terms():
            r = self.alg.render(b)
            a = abs(c)
            body = r if a == 1 else f"{a}*{r}"
            if not parts:
                parts.append(("-" if c < 0 else "") + body)
            else:
                parts.append((" - " if c < 0 else " + ") + body)
        return "".join(parts)

    def __repr__(self):
        return f"LieElement({self})"


def normalize_expr(alg: FreeLieAlgebra, expr) -> LieElement:
    """Normalize a nested bracket expression.

    ``expr`` is a letter, a LieElement, a pair ``(x, y)`` meaning [x, y], or a
    list of ``(coefficient, expr)`` terms.
    """
    if isinstance(expr, LieElement):
        return expr
    if isinstance(expr, list):
        out = alg.zero()
        for c, e in expr:
            out = out + normalize_expr(alg, e).scale(c)
        return out
    if isinstance(expr, tuple) and len(expr) == 2:
        return alg.bracket(normalize_expr(alg, expr[0]), normalize_expr(alg, expr[1]))
    return alg.gen(expr)


# ---------------------------------------------------------------------------
# graded generator sets and counts

@dataclass(frozen=True)
class GradedGenerators:
    gens: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [n for n, _ in self.gens]
        if len(set(names)) != len(names):
            raise ValueError("generator names must be unique")
        if any(d < 1 for _, d in self.gens):
            raise ValueError("generator degrees must be positive")

    @classmethod
    def of(cls, degrees: Iterable[int], prefix: str = "x") -> "GradedGenerators":
        return cls(tuple((f"{prefix}{i + 1}", d) for i, d in enumerate(degrees)))

    @property
    def names(self) -> list[str]:
        return [n for n, _ in self.gens]

    def degree_map(self) -> dict[str, int]:
        return dict(self.gens)

    def algebra(self, cap: int) -> FreeLieAlgebra:
        order = {n: i for i, n in enumerate(self.names)}
        return FreeLieAlgebra(self.degree_map(), cap, key=order.__getitem__)


def dimension(gens: GradedGenerators, degree: int, cap: int | None = None) -> int:
    """Dimension of the free graded Lie algebra in ``degree`` (PBW / Witt count)."""
    if cap is not None and degree > cap:
        raise CapError(f"degree {degree} exceeds the cap {cap}")
    if degree < 1:
        return 0
    N = degree
    # log of 1 / (1 - sum t^|x|)
    a = [0] * (N + 1)
    for _, d in gens.gens:
        if d <= N:
            a[d] += 1
    log_rhs = [Fraction(0)] * (N + 1)
    power = [Fraction(0)] * (N + 1)
    power[0] = Fraction(1)
    for m in range(1, N + 1):
        new = [Fraction(0)] * (N + 1)
        for i, p in enumerate(power):
            if p:
                for d in range(1, N + 1 - i):
                    if a[d]:
                        new[i + d] += p * a[d]
        power = new
        for i in range(N + 1):
            log_rhs[i] += power[i] / m
    dims = [0] * (N + 1)
    for n in range(1, N + 1):
        acc = log_rhs[n]
        for k in range(1, n):
            if n % k == 0 and dims[k]:
                j = n // k
                c = Fraction((-1) ** (j + 1), j) if k % 2 else Fraction(1, j)
                acc -= dims[k] * c
        # coefficient of t^n from L_n itself is dim L_n (j = 1 in either parity)
        if acc.denominator != 1 or acc < 0:
            raise AssertionError(f"non-integral Lie dimension at degree {n}: {acc}")
        dims[n] = int(acc)
    return dims[N]


def tensor_dimension(gens: GradedGenerators, degree: int) -> int:
    alg = gens.algebra(cap=max(degree, 1))
    return len(alg.words(gens.names, degree))


def hall_count(gens: GradedGenerators, degree: int) -> int:
    return len(gens.algebra(cap=max(degree, 1)).basis(gens.names, degree))


def _shuffle_sign(w: Word, I: tuple[int, ...], deg) -> int:
    Iset = set(I)
    s = 0
    for a in range(len(w)):
        if a in Iset:
            continue
        for b in range(a + 1, len(w)):
            if b in Iset:
                s += deg(w[a]) * deg(w[b])
    return -1 if s % 2 else 1


def reduced_coproduct(w: Word, deg) -> dict:
    out: dict = {}
    n = len(w)
    for k in range(1, n):
        for I in combinations(range(n), k):
            J = tuple(t for t in range(n) if t not in I)
            key = (tuple(w[t] for t in I), tuple(w[t] for t in J))
            s = out.get(key, 0) + _shuffle_sign(w, I, deg)
            if s:
                out[key] = s
            else:
                out.pop(key, None)
    return out


def primitives(degree: int, gens: GradedGenerators, cap: int | None = None) -> int:
    """Dimension of the primitive elements of T(V) in ``degree``."""
    if cap is not None and degree > cap:
        raise CapError(f"degree {degree} exceeds the cap {cap}")
    deg = gens.degree_map().__getitem__
    words = gens.algebra(cap=max(degree, 1)).words(gens.names, degree)
    cols = [reduced_coproduct(w, deg) for w in words]
    return len(words) - rank(cols, key=repr)


def is_primitive(T: Tensor, deg) -> bool:
    acc: dict = {}
    for w, c in T.items():
        _add_into(acc, reduced_coproduct(w, deg), c)
    return not acc


# ---------------------------------------------------------------------------
# differential graded Lie algebras

def derive(alg: FreeLieAlgebra, dletter: Callable[[Hashable], Tensor | None], T: Tensor) -> Tensor:
    """Extend a letter differential to T(V) as a degree -1 derivation."""
    out: dict = {}
    for w, c in T.items():
        sdeg = 0
        for i, x in enumerate(w):
            dx = dletter(x)
            if dx:
                sign = -c if sdeg % 2 else c
                pre, post = w[:i], w[i + 1:]
                for u, a in dx.items():
                    ww = pre + u + post
                    s = out.get(ww, 0) + sign * a
                    if s:
                        out[ww] = s
                    else:
                        out.pop(ww, None)
            sdeg += alg.deg(x)
    return out


class DGL:
    """Free DGL on finitely many letters; ``differential`` maps letter -> LieElement."""

    def __init__(self, alg: FreeLieAlgebra, letters: Sequence, differential: Mapping):
        self.alg = alg
        self.letters = sorted(set(letters), key=alg.lkey)
        self.differential = {x: differential.get(x, alg.zero()) for x in self.letters}
        for x, dx in self.differential.items():
            bad = {d for d in dx.degrees() if d != alg.deg(x) - 1}
            if bad:
                raise ValueError(f"differential of {x} is not of degree -1")
        self._dletter = {x: dx.embed() for x, dx in self.differential.items()}

    @classmethod
    def from_generators(cls, gens: GradedGenerators, cap: int,
                        differential: Mapping[str, object] | None = None) -> "DGL":
        alg = gens.algebra(cap)
        diff = {x: normalize_expr(alg, e) for x, e in (differential or {}).items()}
        return cls(alg, gens.names, diff)

    @property
    def cap(self) -> int:
        return self.alg.cap

    def d_tensor(self, T: Tensor) -> Tensor:
        return derive(self.alg, self._dletter.get, T)

    def d(self, X: LieElement) -> LieElement:
        return self.alg.reduce(self.d_tensor(X.embed()))

    def basis(self, n: int) -> list:
        return self.alg.basis(self.letters, n)

    def boundary_columns(self, n: int) -> list[dict]:
        return [self.d(LieElement(self.alg, {b: 1})).terms for b in self.basis(n)]

    def dd_zero(self) -> bool:
        for n in range(2, self.cap + 1):
            for b in self.basis(n):
                if self.d(self.d(LieElement(self.alg, {b: 1}))):
                    return False
        return True


def dgl_homology(D: DGL, degree: int) -> int:
    if degree + 1 > D.cap:
        raise CapError(f"insufficient cap: degree {degree} needs cap >= {degree + 1}, have {D.cap}")
    if degree < 1:
        return 0
    dim = len(D.basis(degree))
    r_n = rank(D.boundary_columns(degree), key=D.alg.basis_key) if degree > 1 else 0
    r_up = rank(D.boundary_columns(degree + 1), key=D.alg.basis_key)
    return dim - r_n - r_up


def hurewicz_projection(D: DGL) -> ScalarComplex:
    """Bracket-free part of the differential, indexed by Lie degree."""
    by_deg: dict[int, list] = {}
    for x in D.letters:
        by_deg.setdefault(D.alg.deg(x), []).append(x)
    lo, hi = min(by_deg, default=1), max(by_deg, default=1)
    ranks = {n: len(by_deg.get(n, [])) for n in range(lo, hi + 1)}
    pos = {x: i for xs in by_deg.values() for i, x in enumerate(xs)}
    bd = {}
    for n in range(lo + 1, hi + 1):
        m = {}
        for x in by_deg.get(n, []):
            for y, c in D.differential[x].linear_part().items():
                m[(pos[y], pos[x])] = int(c) if c.denominator == 1 else c
        bd[n] = m
    return ScalarComplex(ranks, bd)


def hurewicz_is_chain_map(D: DGL) -> bool:
    """h(d b) = d_cell(h b) for every basis element b up to the cap."""
    for n in range(2, D.cap + 1):
        for b in D.basis(n):
            dh = D.d(LieElement(D.alg, {b: 1})).linear_part()
            if D.alg.bracket_length(b) > 1:
                if dh:
                    return False
            elif dh != D.differential[b[1][0]].linear_part():
                return False
    return True


def whitehead_sign(f_degree: int, bracket: LieElement) -> LieElement:
    """Translate a Whitehead product to a Lie bracket: multiply by (-1)^k."""
    return bracket.scale(-1 if f_degree % 2 else 1)


def sphere_model(r: int, cap: int | None = None) -> DGL:
    """Quillen model of S^r: one generator in Lie degree r - 1, zero differential."""
    if r < 2:
        raise ValueError("spheres need r >= 2")
    cap = 4 * (r - 1) + 1 if cap is None else cap
    return DGL.from_generators(GradedGenerators((("x", r - 1),)), cap)
