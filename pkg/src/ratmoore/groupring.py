"""Exact arithmetic in products of free groups and their group rings.

Groups are finite direct products F_{k1} x ... x F_{km}.  Generators get
consecutive lowercase letters across factors (F_2 x F_2 uses a, b | c, d);
uppercase letters are inverses.  An element prints as its per-factor freely
reduced words joined by ``|``, e.g. ``a^2*B|c``; a trivial factor prints as
``1``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence, Union

Scalar = Union[int, Fraction]

__all__ = [
    "InputError",
    "GroupSpec",
    "GroupElement",
    "RingElement",
    "reduce",
    "ball",
    "sphere",
]


class InputError(ValueError):
    """Malformed textual input (unknown generator, bad syntax)."""


@dataclass(frozen=True)
class GroupSpec:
    factors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(int(k) for k in self.factors))
        if not self.factors:
            raise ValueError("a group spec needs at least one free factor")
        if any(k < 1 for k in self.factors):
            raise ValueError(f"free-group ranks must be >= 1, got {self.factors}")
        if sum(self.factors) > 26:
            raise ValueError("at most 26 generators are supported")

    @classmethod
    def parse(cls, text: str) -> "GroupSpec":
        """Parse ``f2^2``, ``f2xf3``, ``f2^4``, ``f1`` style specs."""
        factors: list[int] = []
        for part in text.strip().lower().split("x"):
            m = re.fullmatch(r"f(\d+)(?:\^(\d+))?", part.strip())
            if not m:
                raise InputError(f"bad group spec {text!r}")
            factors.extend([int(m.group(1))] * int(m.group(2) or 1))
        try:
            return cls(tuple(factors))
        except ValueError as exc:
            raise InputError(str(exc)) from None

    def __str__(self) -> str:
        runs: list[str] = []
        i = 0
        while i < len(self.factors):
            j = i
            while j < len(self.factors) and self.factors[j] == self.factors[i]:
                j += 1
            runs.append(f"f{self.factors[i]}" + (f"^{j - i}" if j - i > 1 else ""))
            i = j
        return "x".join(runs)

    @property
    def rank(self) -> int:
        return sum(self.factors)

    @property
    def dimension(self) -> int:
        # each nonabelian or cyclic free factor has cohomological dimension 1
        return len(self.factors)

    def _offsets(self) -> list[int]:
        out, acc = [], 0
        for k in self.factors:
            out.append(acc)
            acc += k
        return out

    def letter(self, factor: int, signed_index: int) -> str:
        ch = chr(ord("a") + self._offsets()[factor] + abs(signed_index) - 1)
        return ch if signed_index > 0 else ch.upper()

    def locate(self, ch: str) -> tuple[int, int]:
        """Return (factor, signed generator index) for a letter."""
        idx = ord(ch.lower()) - ord("a")
        if not ch.isalpha() or not 0 <= idx < self.rank:
            raise InputError(f"unknown generator {ch!r} for group {self}")
        for f, off in enumerate(self._offsets()):
            if off <= idx < off + self.factors[f]:
                sign = 1 if ch.islower() else -1
                return f, sign * (idx - off + 1)
        raise AssertionError("unreachable")

    def identity(self) -> "GroupElement":
        return GroupElement(self, tuple(() for _ in self.factors))

    def generators(self) -> list["GroupElement"]:
        gens = []
        for f, k in enumerate(self.factors):
            for i in range(1, k + 1):
                words = [()] * len(self.factors)
                words[f] = (i,)
                gens.append(GroupElement(self, tuple(words)))
        return gens

    def element(self, text: str) -> "GroupElement":
        return GroupElement.parse(text, self)

    def product(self, other: "GroupSpec") -> "GroupSpec":
        return GroupSpec(self.factors + other.factors)


def _reduce_word(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for x in letters:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _mul_words(u: tuple[int, ...], v: tuple[int, ...]) -> tuple[int, ...]:
    i, n = 0, min(len(u), len(v))
    while i < n and u[-1 - i] == -v[i]:
        i += 1
    return u[: len(u) - i] + v[i:]


def _letter_rank(x: int) -> int:
    return 2 * (abs(x) - 1) + (0 if x > 0 else 1)


class GroupElement:
    """Per-factor freely reduced normal form; equality is syntactic."""

    __slots__ = ("spec", "words", "_hash")

    def __init__(self, spec: GroupSpec, words: tuple[tuple[int, ...], ...]):
        self.spec = spec
        self.words = words
        self._hash = hash(words)

    @classmethod
    def parse(cls, text: str, spec: GroupSpec) -> "GroupElement":
        parts = text.strip().split("|")
        if len(parts) != len(spec.factors):
            raise InputError(
                f"{text!r} has {len(parts)} factor(s), group {spec} has {len(spec.factors)}"
            )
        words = []
        for f, part in enumerate(parts):
            part = part.strip()
            letters: list[int] = []
            if part != "1":
                for tok in part.split("*"):
                    m = re.fullmatch(r"([A-Za-z])(?:\^(\d+))?", tok.strip())
                    if not m:
                        raise InputError(f"bad word token {tok!r} in {text!r}")
                    fac, g = spec.locate(m.group(1))
                    if fac != f:
                        raise InputError(f"letter {m.group(1)!r} does not belong to factor {f}")
                    letters.extend([g] * int(m.group(2) or 1))
            words.append(_reduce_word(letters))
        return cls(spec, tuple(words))

    def __eq__(self, other):
        return (
            isinstance(other, GroupElement)
            and self.words == other.words
            and self.spec == other.spec
        )

    def __hash__(self):
        return self._hash

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        if other.spec != self.spec:
            raise TypeError(f"group mismatch: {self.spec} vs {other.spec}")
        return GroupElement(
            self.spec, tuple(_mul_words(u, v) for u, v in zip(self.words, other.words))
        )

    def inverse(self) -> "GroupElement":
        return GroupElement(self.spec, tuple(tuple(-x for x in reversed(w)) for w in self.words))

    def __len__(self) -> int:
        return sum(len(w) for w in self.words)

    @property
    def length(self) -> int:
        return len(self)

    def is_identity(self) -> bool:
        return not any(self.words)

    def sort_key(self):
        return (
            len(self),
            tuple(len(w) for w in self.words),
            tuple(tuple(_letter_rank(x) for x in w) for w in self.words),
        )

    def __lt__(self, other: "GroupElement") -> bool:
        return self.sort_key() < other.sort_key()

    def embed(self, spec: GroupSpec, offset: int) -> "GroupElement":
        """Place this element into factors ``offset..`` of a larger product."""
        words = [()] * len(spec.factors)
        words[offset : offset + len(self.words)] = self.words
        return GroupElement(spec, tuple(words))

    def _factor_text(self, f: int) -> str:
        w = self.words[f]
        if not w:
            return "1"
        toks, i = [], 0
        while i < len(w):
            j = i
            while j < len(w) and w[j] == w[i]:
                j += 1
            ch = self.spec.letter(f, w[i])
            toks.append(ch + (f"^{j - i}" if j - i > 1 else ""))
            i = j
        return "*".join(toks)

    def __str__(self) -> str:
        return "|".join(self._factor_text(f) for f in range(len(self.words)))

    def __repr__(self) -> str:
        return f"GroupElement({str(self)!r})"


def reduce(raw_word: Union[str, Sequence[str]], spec: GroupSpec) -> GroupElement:
    """Freely reduce a letter sequence; letters from different factors commute."""
    per_factor: list[list[int]] = [[] for _ in spec.factors]
    for ch in raw_word:
        if ch in " *":
            continue
        f, g = spec.locate(ch)
        per_factor[f].append(g)
    return GroupElement(spec, tuple(_reduce_word(ws) for ws in per_factor))


@lru_cache(maxsize=None)
def _free_sphere(k: int, n: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for w in _free_sphere(k, n - 1):
        for x in sorted(list(range(1, k + 1)) + list(range(-k, 0)), key=_letter_rank):
            if w and w[-1] == -x:
                continue
            out.append(w + (x,))
    return tuple(out)


@lru_cache(maxsize=None)
def _ball(spec: GroupSpec, radius: int) -> tuple[GroupElement, ...]:
    combos: list[tuple[tuple[int, ...], ...]] = [()]
    for f, k in enumerate(spec.factors):
        new = []
        for partial in combos:
            used = sum(len(w) for w in partial)
            for n in range(radius - used + 1):
                for w in _free_sphere(k, n):
                    new.append(partial + (w,))
        combos = new
    elems = [GroupElement(spec, ws) for ws in combos]
    elems.sort(key=GroupElement.sort_key)
    return tuple(elems)


def ball(spec: GroupSpec, radius: int) -> list[GroupElement]:
    """All elements of word length <= radius (sum metric), shortlex ordered."""
    if radius < 0:
        raise ValueError("radius must be >= 0")
    return list(_ball(spec, radius))


def sphere(spec: GroupSpec, radius: int) -> list[GroupElement]:
    return [g for g in _ball(spec, radius) if len(g) == radius]


def _coerce(c, kind: str) -> Scalar:
    if kind == "Z":
        if isinstance(c, Fraction):
            if c.denominator != 1:
                raise TypeError(f"non-integral coefficient {c} in an integral group ring")
            return int(c.numerator)
        if isinstance(c, bool) or not isinstance(c, int):
            raise TypeError(f"bad integral coefficient {c!r}")
        return c
    return Fraction(c)


_TERM_SPLIT = re.compile(r"\s+([+-])\s+")
_COEF = re.compile(r"-?\d+(?:/\d+)?")


class RingElement:
    """Finitely supported combination of group elements; immutable.

    ``kind`` is ``"Z"`` (integer coefficients) or ``"Q"`` (rationals).
    """

    __slots__ = ("spec", "kind", "_terms", "_hash")

    def __init__(self, spec: GroupSpec, terms: Mapping[GroupElement, Scalar] | None = None,
                 kind: str = "Z"):
        if kind not in ("Z", "Q"):
            raise ValueError(f"scalar kind must be 'Z' or 'Q', got {kind!r}")
        self.spec = spec
        self.kind = kind
        clean: dict[GroupElement, Scalar] = {}
        for g, c in (terms or {}).items():
            if g.spec != spec:
                raise TypeError(f"element {g} is not in {spec}")
            c = _coerce(c, kind)
            if c:
                clean[g] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, spec, kind, terms):
        obj = cls.__new__(cls)
        obj.spec, obj.kind, obj._terms, obj._hash = spec, kind, terms, None
        return obj

    # constructors
    @classmethod
    def zero(cls, spec: GroupSpec, kind: str = "Z") -> "RingElement":
        return cls(spec, {}, kind)

    @classmethod
    def one(cls, spec: GroupSpec, kind: str = "Z") -> "RingElement":
        return cls(spec, {spec.identity(): 1}, kind)

    @classmethod
    def of(cls, g: GroupElement, coef: Scalar = 1, kind: str = "Z") -> "RingElement":
        return cls(g.spec, {g: coef}, kind)

    @classmethod
    def parse(cls, text: str, spec: GroupSpec, kind: str = "Z") -> "RingElement":
        text = text.strip()
        if text == "0":
            return cls.zero(spec, kind)
        pieces = _TERM_SPLIT.split(text)
        signs = ["+"] + pieces[1::2]
        terms: dict[GroupElement, Scalar] = {}
        for sign, tok in zip(signs, pieces[0::2]):
            tok = tok.strip()
            neg = sign == "-"
            if tok.startswith("-"):
                neg, tok = not neg, tok[1:].strip()
            coef: Fraction = Fraction(1)
            head, star, rest = tok.partition("*")
            if star and _COEF.fullmatch(head):
                coef, tok = Fraction(head), rest
            elif _COEF.fullmatch(tok) and tok != "1":
                raise InputError(f"bare scalar {tok!r}; write it as {tok}*1")
            g = GroupElement.parse(tok, spec)
            terms[g] = terms.get(g, 0) + (-coef if neg else coef)
        try:
            return cls(spec, terms, kind)
        except TypeError as exc:
            raise InputError(str(exc)) from None

    # mapping-like access
    def items(self):
        return self._terms.items()

    def support(self) -> list[GroupElement]:
        return sorted(self._terms, key=GroupElement.sort_key)

    def coefficient(self, g: GroupElement) -> Scalar:
        return self._terms.get(g, 0)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def radius(self) -> int:
        return max((len(g) for g in self._terms), default=0)

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return self.spec == other.spec and self.kind == other.kind and self._terms == other._terms
        if isinstance(other, (int, Fraction)) and other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.kind, frozenset(self._terms.items())))
        return self._hash

    def _check(self, other: "RingElement"):
        if not isinstance(other, RingElement):
            raise TypeError(f"expected RingElement, got {type(other).__name__}")
        if other.spec != self.spec:
            raise TypeError(f"group mismatch: {self.spec} vs {other.spec}")
        if other.kind != self.kind:
            raise TypeError(f"scalar kind mismatch: {self.kind} vs {other.kind}")

    def __add__(self, other: "RingElement") -> "RingElement":
        self._check(other)
        out = dict(self._terms)
        for g, c in other._terms.items():
            v = out.get(g, 0) + c
            if v:
                out[g] = v
            else:
                out.pop(g, None)
        return RingElement._raw(self.spec, self.kind, out)

    def __neg__(self) -> "RingElement":
        return RingElement._raw(self.spec, self.kind, {g: -c for g, c in self._terms.items()})

    def __sub__(self, other: "RingElement") -> "RingElement":
        return self + (-other)

    def scale(self, c: Scalar) -> "RingElement":
        c = _coerce(c, self.kind)
        if not c:
            return RingElement.zero(self.spec, self.kind)
        return RingElement._raw(self.spec, self.kind, {g: c * v for g, v in self._terms.items()})

    def __mul__(self, other) -> "RingElement":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        self._check(other)
        out: dict[GroupElement, Scalar] = {}
        for g, c in self._terms.items():
            for h, d in other._terms.items():
                gh = g * h
                v = out.get(gh, 0) + c * d
                if v:
                    out[gh] = v
                else:
                    out.pop(gh, None)
        return RingElement._raw(self.spec, self.kind, out)

    def __rmul__(self, other) -> "RingElement":
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.scale(other)
        return NotImplemented

    def involute(self) -> "RingElement":
        return RingElement._raw(self.spec, self.kind, {g.inverse(): c for g, c in self._terms.items()})

    def augmentation(self) -> Scalar:
        return sum(self._terms.values(), 0 if self.kind == "Z" else Fraction(0))

    def translate(self, g: GroupElement) -> "RingElement":
        """Left translation x -> g.x."""
        return RingElement._raw(self.spec, self.kind, {g * h: c for h, c in self._terms.items()})

    def to_kind(self, kind: str) -> "RingElement":
        return RingElement(self.spec, self._terms, kind)

    def embed(self, spec: GroupSpec, offset: int) -> "RingElement":
        return RingElement._raw(
            spec, self.kind, {g.embed(spec, offset): c for g, c in self._terms.items()}
        )

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts: list[str] = []
        for g in self.support():
            c = self._terms[g]
            neg = c < 0
            a = -c if neg else c
            body = str(g) if a == 1 else f"{a}*{g}"
            if not parts:
                parts.append(("-" if neg else "") + body)
            else:
                parts.append((" - " if neg else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"RingElement({str(self)!r}, {self.spec}, {self.kind})"


def iter_sphere_sizes(k: int) -> Iterator[int]:
    yield 1
    n = 1
    while True:
        yield 2 * k * (2 * k - 1) ** (n - 1)
        n += 1
