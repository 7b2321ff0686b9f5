from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lamina.field import FE, FieldElement, format_exact, parse_exact

fracs = st.fractions(min_value=-10 ** 6, max_value=10 ** 6,
                     max_denominator=10 ** 4)


def elems(d):
    return st.builds(lambda a, b: FieldElement(a, b, d), fracs, fracs)


@given(elems(2), elems(2), elems(2))
def test_ring_axioms_d2(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x * (y + z) == x * y + x * z
    assert x * y == y * x
    assert x + (-x) == FE(0, d=2)


@given(elems(2))
def test_inverse_d2(x):
    if x != FE(0, d=2):
        assert x * (FE(1, d=2) / x) == FE(1, d=2)


@given(elems(2))
def test_format_parse_roundtrip(x):
    assert parse_exact(format_exact(x), 2) == x


@given(elems(2))
@settings(max_examples=60)
def test_sign_matches_float(x):
    f = float(x)
    if abs(f) > 1e-9:
        assert x.sign() == (1 if f > 0 else -1)


@given(elems(2))
def test_square_then_sqrt(x):
    sq = x * x
    r = sq.sqrt()
    assert r is not None and r * r == sq and r.sign() >= 0


def test_sqrt_of_nonsquare():
    assert FE(2).sqrt() is None                 # d = 1: sqrt(2) irrational
    assert FE(Fraction(4, 9)).sqrt() == FE(Fraction(2, 3))
    two = FieldElement(2, 0, 2)
    assert two.sqrt() == FieldElement(0, 1, 2)  # sqrt(2) = r in Q(sqrt 2)


def test_d1_collapses_b():
    x = FieldElement(1, 2, 1)                   # 1 + 2*sqrt(1) = 3
    assert x == FE(3)
    assert format_exact(x) == "3"


def test_parse_forms():
    assert parse_exact("3/4", 2) == FieldElement(Fraction(3, 4), 0, 2)
    assert parse_exact("1/2+1/3*r", 2) == \
        FieldElement(Fraction(1, 2), Fraction(1, 3), 2)
    assert parse_exact("-2*r", 2) == FieldElement(0, -2, 2)
    with pytest.raises(ValueError):
        parse_exact("", 2)


def test_ordering_is_exact():
    # 99/70 is slightly above sqrt(2)
    r = FieldElement(0, 1, 2)
    assert r < FE(Fraction(99, 70), d=2)
    assert r > FE(Fraction(140, 99), d=2)
