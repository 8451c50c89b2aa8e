from fractions import Fraction

import pytest
from hypothesis import given

from ratmoore.groupring import (GroupElement, GroupSpec, InputError, RingElement, ball, reduce,
                                sphere)
from strategies import F2, F2xF2, ring_elements, words


def test_free_cancellation():
    assert reduce("aA", F2).is_identity()
    assert reduce("abBa", F2) == F2.element("a^2")


def test_product_is_componentwise():
    g = F2xF2.element("a|1") * F2xF2.element("1|c")
    assert g == F2xF2.element("a|c") == F2xF2.element("1|c") * F2xF2.element("a|1")
    assert str(g) == "a|c"


def test_spec_parsing():
    assert GroupSpec.parse("f2^2").factors == (2, 2)
    assert GroupSpec.parse("f2xf3").factors == (2, 3)
    assert GroupSpec.parse("f2^4").dimension == 4
    with pytest.raises(InputError):
        GroupSpec.parse("z2")


def test_ring_mul_oracle():
    x = RingElement.parse("a - 1", F2)
    assert x * RingElement.parse("A", F2) == RingElement.parse("1 - A", F2)


def test_involute_oracle():
    assert RingElement.parse("a - 1", F2).involute() == RingElement.parse("A - 1", F2)


@pytest.mark.parametrize("spec,radius,size", [(F2, 0, 1), (F2, 1, 5), (F2, 2, 17), (F2, 3, 53),
                                              (F2xF2, 1, 9)])
def test_ball_sizes(spec, radius, size):
    assert len(ball(spec, radius)) == size


def test_sphere_counts():
    for n in range(1, 5):
        assert len(sphere(F2, n)) == 4 * 3 ** (n - 1)


def test_ball_is_shortlex_and_deterministic():
    b = ball(F2, 3)
    assert b == sorted(b, key=GroupElement.sort_key)
    assert [str(g) for g in b[:5]] == [str(g) for g in ball(F2, 1)]


def test_kinds_do_not_mix():
    with pytest.raises(TypeError):
        RingElement.one(F2, "Z") + RingElement.one(F2, "Q")
    with pytest.raises(TypeError):
        RingElement.of(F2.identity(), Fraction(1, 2), "Z")


def test_text_roundtrip_examples():
    for text in ["0", "1", "2*a^2*B - 1/2*b", "a|c - 3*A|C"]:
        spec = F2xF2 if "|" in text else F2
        kind = "Q" if "/" in text else "Z"
        x = RingElement.parse(text, spec, kind)
        assert RingElement.parse(str(x), spec, kind) == x


def test_malformed_element():
    with pytest.raises(InputError):
        RingElement.parse("a + q", F2)


@given(words(F2), words(F2), words(F2))
def test_group_axioms(g, h, k):
    assert (g * h) * k == g * (h * k)
    assert (g * g.inverse()).is_identity()
    assert (g * h).inverse() == h.inverse() * g.inverse()


def letters(g):
    return [g.spec.letter(f, x) for f, w in enumerate(g.words) for x in w]


@given(words(F2xF2), words(F2xF2))
def test_reduce_idempotent(g, h):
    assert reduce(letters(g), F2xF2) == g
    assert reduce(letters(g) + letters(h), F2xF2) == g * h
    assert GroupElement.parse(str(g), F2xF2) == g


@given(ring_elements(), ring_elements(), ring_elements())
def test_ring_axioms(x, y, z):
    assert (x * y) * z == x * (y * z)
    assert x * (y + z) == x * y + x * z
    assert (x + y) * z == x * z + y * z
    assert x * RingElement.one(F2) == x


@given(ring_elements(), ring_elements())
def test_augmentation_multiplicative(x, y):
    assert (x * y).augmentation() == x.augmentation() * y.augmentation()


@given(ring_elements(), ring_elements())
def test_involution_anti_multiplicative(x, y):
    assert x.involute().involute() == x
    assert (x * y).involute() == y.involute() * x.involute()


@given(ring_elements(F2xF2, "Q"))
def test_parse_roundtrip_property(x):
    assert RingElement.parse(str(x), F2xF2, "Q") == x
