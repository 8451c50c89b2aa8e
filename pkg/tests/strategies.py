"""Hypothesis strategies shared by the test modules."""
from fractions import Fraction

from hypothesis import strategies as st

from ratmoore.groupring import GroupSpec, RingElement, reduce

F2 = GroupSpec((2,))
F2xF2 = GroupSpec((2, 2))


def words(spec: GroupSpec, max_len: int = 5):
    letters = [spec.letter(f, s * (i + 1)) for f, k in enumerate(spec.factors)
               for i in range(k) for s in (1, -1)]
    return st.lists(st.sampled_from(letters), max_size=max_len).map(lambda w: reduce(w, spec))


def ring_elements(spec: GroupSpec = F2, kind: str = "Z", max_terms: int = 4):
    coef = st.integers(-3, 3) if kind == "Z" else st.integers(-12, 12).map(
        lambda n: Fraction(n, 4))
    terms = st.lists(st.tuples(words(spec, 4), coef), max_size=max_terms)

    def build(ts):
        out = RingElement.zero(spec, kind)
        for g, c in ts:
            out = out + RingElement.of(g, c if kind == "Z" else Fraction(c), kind)
        return out

    return terms.map(build)
