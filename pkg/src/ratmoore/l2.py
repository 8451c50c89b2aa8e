"""Axiomatic ledger of L2-Betti numbers.

Values are exact rationals pushed through rules (Kunneth, cover scaling,
disjoint union, the Davis transfer); nothing is computed analytically.  The
single seeded atom is b(F_2) = (0, 1).
"""
from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

ATOM_F2 = (Fraction(0), Fraction(1))


def _trim(values: Iterable) -> tuple[Fraction, ...]:
    v = [Fraction(x) for x in values]
    while v and v[-1] == 0:
        v.pop()
    return tuple(v)


@dataclass(frozen=True)
class L2Profile:
    label: str
    values: tuple[Fraction, ...]
    n: int | None = None
    closed_manifold: bool = False
    rationally_aspherical: bool = False
    provenance: tuple = ("atom", "seed")

    def __post_init__(self):
        object.__setattr__(self, "values", _trim(self.values))
        if any(x < 0 for x in self.values):
            raise ValueError(f"negative L2-Betti number in {self.label}")

    def b(self, k: int) -> Fraction:
        return self.values[k] if 0 <= k < len(self.values) else Fraction(0)

    def duality_violations(self) -> list[int]:
        if not (self.closed_manifold and self.n is not None):
            return []
        return [k for k in range(self.n + 1) if self.b(k) != self.b(self.n - k)]

    def as_text(self) -> str:
        vals = ", ".join(str(x) for x in self.values) or "0"
        return f"{self.label}: ({vals})"


def atom_f2() -> L2Profile:
    return L2Profile("F_2", ATOM_F2, rationally_aspherical=True, provenance=("atom", "seed"))


def point() -> L2Profile:
    return L2Profile("pt", (1,), n=0, closed_manifold=True, provenance=("atom", "point"))


def kunneth(p: L2Profile, q: L2Profile, label: str | None = None) -> L2Profile:
    out = [Fraction(0)] * (len(p.values) + len(q.values))
    for i, x in enumerate(p.values):
        for j, y in enumerate(q.values):
            out[i + j] += x * y
    n = p.n + q.n if p.n is not None and q.n is not None else None
    return L2Profile(label or f"{p.label} x {q.label}", out, n,
                     p.closed_manifold and q.closed_manifold,
                     p.rationally_aspherical and q.rationally_aspherical,
                     ("derived", "kunneth", (p, q)))


def power(p: L2Profile, d: int) -> L2Profile:
    if d < 1:
        raise ValueError("power needs d >= 1")
    out = p
    for _ in range(d - 1):
        out = kunneth(out, p)
    return L2Profile(f"{p.label}^{d}", out.values, out.n, out.closed_manifold,
                     out.rationally_aspherical, out.provenance)


def free_product_power(d: int) -> L2Profile:
    """Profile of F_2^d derived from the atom."""
    return power(atom_f2(), d)


def euler(p: L2Profile) -> Fraction:
    return sum(((-1) ** k * x for k, x in enumerate(p.values)), Fraction(0))


def cover_scale(p: L2Profile, deg: int) -> L2Profile:
    if deg < 1:
        raise ValueError("cover degree must be >= 1")
    return L2Profile(f"{deg}-cover of {p.label}", [deg * x for x in p.values], p.n,
                     p.closed_manifold, p.rationally_aspherical,
                     ("derived", "cover_scale", (p, deg)))


def disjoint_union(ps: Sequence[L2Profile]) -> L2Profile:
    if not ps:
        raise ValueError("empty disjoint union")
    width = max(len(p.values) for p in ps)
    vals = [sum((p.b(k) for p in ps), Fraction(0)) for k in range(width)]
    ns = {p.n for p in ps}
    return L2Profile(" + ".join(p.label for p in ps) if len(ps) <= 3 else f"{len(ps)} copies",
                     vals, ns.pop() if len(ns) == 1 else None,
                     all(p.closed_manifold for p in ps),
                     all(p.rationally_aspherical for p in ps),
                     ("derived", "disjoint_union", tuple(ps)))


def replay(p: L2Profile) -> L2Profile:
    """Recompute a profile from its provenance chain."""
    kind = p.provenance[0]
    if kind == "atom":
        return p
    rule, args = p.provenance[1], p.provenance[2]
    if rule == "kunneth":
        return kunneth(replay(args[0]), replay(args[1]), p.label)
    if rule == "cover_scale":
        return cover_scale(replay(args[0]), args[1])
    if rule == "disjoint_union":
        return disjoint_union([replay(q) for q in args])
    raise ValueError(f"unknown rule {rule}")


def rule_chain(p: L2Profile, depth: int = 0) -> list[str]:
    pad = "  " * depth
    if p.provenance[0] == "atom":
        return [f"{pad}{p.as_text()} [atom: {p.provenance[1]}]"]
    rule, args = p.provenance[1], p.provenance[2]
    lines = [f"{pad}{p.as_text()} [{rule}]"]
    for a in args:
        if isinstance(a, L2Profile):
            lines += rule_chain(a, depth + 1)
        else:
            lines.append(f"{pad}  factor {a}")
    return lines


# ---------------------------------------------------------------------------
# chamber counts and constraints

@dataclass(frozen=True)
class Chambers:
    """A chamber count: an explicit integer or the symbolic 2^m (m >= 0)."""

    value: int | None = None
    symbol: str | None = None

    @classmethod
    def parse(cls, text: str | int) -> "Chambers":
        if isinstance(text, int):
            return cls(value=text)
        text = str(text).strip()
        if re.fullmatch(r"\d+", text):
            return cls(value=int(text))
        m = re.fullmatch(r"2\^(\d+)", text)
        if m:
            return cls(value=2 ** int(m.group(1)))
        m = re.fullmatch(r"2\^([a-z])", text)
        if m:
            return cls(symbol=text)
        raise ValueError(f"bad chamber count {text!r}")

    def __post_init__(self):
        if self.value is None and self.symbol is None:
            raise ValueError("chamber count needs a value or a symbol")
        if self.value is not None and self.value < 1:
            raise ValueError("chamber count must be >= 1")

    @property
    def lower_bound(self) -> int:
        return self.value if self.value is not None else 1

    def times(self, c: Fraction) -> str:
        if c == 0:
            return "0"
        if self.value is not None:
            return str(c * self.value)
        return self.symbol if c == 1 else f"{c}*{self.symbol}"

    def __str__(self):
        return str(self.value) if self.value is not None else self.symbol


@dataclass(frozen=True)
class Constraint:
    k: int
    rel: str  # "=" or ">="
    coef: Fraction  # multiple of the chamber count
    source: str

    def positive(self, chambers: Chambers) -> bool:
        return self.coef * chambers.lower_bound > 0


@dataclass
class ConstraintSet:
    label: str
    n: int
    chambers: Chambers
    entries: dict[int, Constraint] = field(default_factory=dict)
    closed_manifold: bool = True
    rationally_aspherical: bool = True

    def text(self) -> list[str]:
        out = []
        for k in sorted(self.entries):
            c = self.entries[k]
            out.append(f"b_{k}({self.label}) {c.rel} {self.chambers.times(c.coef)}  [{c.source}]")
        return out


def davis_transfer(p_M: L2Profile, chambers: Chambers | int | str, n: int,
                   complete: bool = True) -> ConstraintSet:
    """Constraints on U/G from the Davis transfer; mid = floor((n + 1) / 2)."""
    ch = chambers if isinstance(chambers, Chambers) else Chambers.parse(chambers)
    mid = (n + 1) // 2
    cs = ConstraintSet("U/G", n, ch)
    for k in range(mid, n + 1):
        rel = "=" if k > mid else ">="
        cs.entries[k] = Constraint(k, rel, p_M.b(k), "transfer")
    return complete_duality(cs) if complete else cs


def complete_duality(cs: ConstraintSet) -> ConstraintSet:
    """Mirror constraints across the middle; idempotent, never lowers a bound."""
    out = ConstraintSet(cs.label, cs.n, cs.chambers, dict(cs.entries),
                        cs.closed_manifold, cs.rationally_aspherical)
    for k, c in cs.entries.items():
        j = cs.n - k
        if j not in out.entries:
            out.entries[j] = Constraint(j, c.rel, c.coef, "duality")
        else:
            cur = out.entries[j]
            if cur.rel == ">=" and c.rel == "=" :
                out.entries[j] = Constraint(j, "=", c.coef, cur.source)
            elif cur.rel == ">=" and c.coef > cur.coef:
                out.entries[j] = Constraint(j, ">=", c.coef, cur.source)
    return out


def singer_verdict(p: L2Profile | ConstraintSet, n: int | None = None) -> str:
    """'violates' iff some b_k > 0 off the middle dimension n/2."""
    if not (p.closed_manifold and p.rationally_aspherical):
        return "not applicable"
    n = p.n if n is None else n
    if n is None:
        return "not applicable"
    if isinstance(p, ConstraintSet):
        bad = [k for k, c in p.entries.items() if 2 * k != n and c.positive(p.chambers)]
    else:
        bad = [k for k, x in enumerate(p.values) if x > 0 and 2 * k != n]
    return "violates" if bad else "consistent"


def chi_gap(b4: Fraction | int, chambers: int) -> tuple[Fraction, str]:
    """b_4(U/G) - 2 |W/G| for the 8-dimensional scenario, with its sign."""
    v = Fraction(b4) - 2 * chambers
    return v, "negative" if v < 0 else ("zero" if v == 0 else "positive")


def euler_from_constraints(cs: ConstraintSet, middle: Fraction | int) -> Fraction:
    """Euler characteristic when every entry off the middle is an equality."""
    mid = cs.n // 2
    total = Fraction(0)
    for k in range(cs.n + 1):
        if k == mid and cs.n % 2 == 0:
            total += (-1) ** k * Fraction(middle)
            continue
        c = cs.entries.get(k)
        if c is None or c.rel != "=":
            raise ValueError(f"b_{k} is not pinned down")
        if cs.chambers.value is None:
            raise ValueError("needs an explicit chamber count")
        total += (-1) ** k * c.coef * cs.chambers.value
    return total


def chi_gap_replayed(b4: Fraction | int, chambers: int) -> Fraction:
    """chi_gap recomputed from the F_2^5, n = 8 transfer."""
    cs = davis_transfer(free_product_power(5), chambers, 8)
    # the transfer leaves b_4 as a lower bound; make the rest equalities
    fixed = ConstraintSet(cs.label, cs.n, cs.chambers,
                          {k: Constraint(k, "=", c.coef, c.source) if k != 4 else c
                           for k, c in cs.entries.items()})
    return euler_from_constraints(fixed, b4)


# ---------------------------------------------------------------------------
# pipelines and persistence

@dataclass
class PipelineResult:
    base: L2Profile
    constraints: ConstraintSet | None
    verdict: str | None
    lines: list[str]


def run_pipeline(text: str, verdict: bool = True) -> PipelineResult:
    """Run e.g. ``f2^4,davis:n=7,chambers=2^m``."""
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError("empty pipeline")
    m = re.fullmatch(r"f2(?:\^(\d+))?", parts[0].lower())
    if not m:
        raise ValueError(f"pipeline must start with f2^d, got {parts[0]!r}")
    d = int(m.group(1) or 1)
    base = free_product_power(d)
    lines = ["derivation:"] + ["  " + ln for ln in rule_chain(base)]
    lines.append(f"  euler = {euler(base)}")
    n, chambers = None, None
    for p in parts[1:]:
        if p.startswith("davis:n="):
            n = int(p.split("=", 1)[1])
        elif p.startswith("chambers="):
            chambers = Chambers.parse(p.split("=", 1)[1])
        else:
            raise ValueError(f"unknown pipeline stage {p!r}")
    cs = None
    out_verdict = None
    if n is not None:
        chambers = chambers or Chambers(symbol="2^m")
        cs = davis_transfer(base, chambers, n)
        lines.append(f"davis transfer n={n} chambers={chambers} mid={(n + 1) // 2}:")
        lines += ["  " + ln for ln in cs.text()]
        if verdict:
            out_verdict = singer_verdict(cs)
            lines.append(f"verdict (rational Singer statement): {out_verdict}")
    elif verdict:
        out_verdict = singer_verdict(base)
        lines.append(f"verdict: {out_verdict}")
    return PipelineResult(base, cs, out_verdict, lines)


def _profile_json(p: L2Profile) -> dict:
    prov = p.provenance
    if prov[0] == "atom":
        pj = {"kind": "atom", "source": prov[1]}
    else:
        pj = {"kind": "derived", "rule": prov[1],
              "inputs": [_profile_json(a) if isinstance(a, L2Profile) else a for a in prov[2]]}
    return {"label": p.label, "values": [str(x) for x in p.values], "n": p.n,
            "closed_manifold": p.closed_manifold,
            "rationally_aspherical": p.rationally_aspherical, "provenance": pj}


def _profile_from_json(d: dict) -> L2Profile:
    pj = d["provenance"]
    if pj["kind"] == "atom":
        prov = ("atom", pj["source"])
    else:
        prov = ("derived", pj["rule"],
                tuple(_profile_from_json(a) if isinstance(a, dict) else a for a in pj["inputs"]))
    return L2Profile(d["label"], [Fraction(x) for x in d["values"]], d["n"],
                     d["closed_manifold"], d["rationally_aspherical"], prov)


class Ledger:
    """Append-only store of profiles keyed by label."""

    def __init__(self):
        self.entries: list[L2Profile] = []

    def add(self, p: L2Profile) -> L2Profile:
        if any(q.label == p.label for q in self.entries):
            raise ValueError(f"label {p.label!r} already recorded")
        self.entries.append(p)
        return p

    def get(self, label: str) -> L2Profile:
        for p in self.entries:
            if p.label == label:
                return p
        raise KeyError(label)

    def verify(self) -> bool:
        return all(replay(p).values == p.values for p in self.entries)

    def dumps(self) -> str:
        return json.dumps([_profile_json(p) for p in self.entries], indent=1, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text: str) -> "Ledger":
        led = cls()
        for d in json.loads(text):
            led.entries.append(_profile_from_json(d))
        return led
