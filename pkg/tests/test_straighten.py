import pytest

from lamina.field import FE, FieldElement
from lamina.curves import parse_curve_line
from lamina.straighten import NullHomotopicError, maximal_cylinder, straighten


def _cyl(surface, word):
    c = parse_curve_line(surface, "curve w: %s" % word)
    geo, is_cyl = straighten(surface, c)
    return geo, is_cyl, maximal_cylinder(surface, geo)


# frozen oracles: heights/circumferences verified against hand drawings of
# the fixtures and an independent holonomy computation when first recorded

def test_l_vertical_cylinders(L):
    geo, is_cyl, cyl = _cyl(L, "+e0")
    assert is_cyl and geo.length2() == FE(4)
    assert cyl.height2 == FE(1) and cyl.circumference2 == FE(4)
    geo, is_cyl, cyl = _cyl(L, "+e1")
    assert is_cyl and cyl.height2 == FE(1) and cyl.circumference2 == FE(1)


def test_l_squared_curve_scales_circumference(L):
    _, _, cyl1 = _cyl(L, "+e0")
    _, _, cyl2 = _cyl(L, "+e0 +e0")
    assert cyl2.height2 == cyl1.height2
    assert cyl2.circumference2 == FE(4) * cyl1.circumference2


def test_l_diagonal_cylinder(L):
    geo, is_cyl, cyl = _cyl(L, "+e2 +e3")
    assert is_cyl
    assert cyl.height2 == FE("1/5") and cyl.circumference2 == FE(5)
    assert cyl.height is None           # sqrt(1/5) not rational


def test_l_rigid_geodesics(L):
    geo, is_cyl, cyl = _cyl(L, "+e2 -e5")
    assert not is_cyl and cyl.height2 == FE(0)
    assert cyl.circumference2 == FE(8)
    assert abs(geo.length_float() ** 2 - 8.0) < 1e-9
    geo, is_cyl, cyl = _cyl(L, "+e4 +e3")
    assert not is_cyl and geo.length2() == FE(4)


def test_octagon_cylinder(octagon):
    geo, is_cyl, cyl = _cyl(octagon, "+e0")
    assert is_cyl
    assert cyl.height2 == FieldElement(4, 0, 2)
    assert cyl.circumference2 == FieldElement(12, 8, 2)   # 12 + 8*sqrt(2)


def test_plus_curves(plus):
    geo, is_cyl, cyl = _cyl(plus, "+e0")
    assert not is_cyl and geo.length2() == FE(1)
    geo, is_cyl, cyl = _cyl(plus, "+e5")
    assert is_cyl and cyl.height2 == FE("1/5") and cyl.circumference2 == FE(5)
    geo, is_cyl, cyl = _cyl(plus, "+e8")
    assert is_cyl and cyl.height2 == FE(1) and cyl.circumference2 == FE(1)


def test_middle_leaf_and_fractions(L):
    _, _, cyl = _cyl(L, "+e1")
    mid = cyl.middle_leaf()
    lo = cyl.leaf_at_fraction(0)
    hi = cyl.leaf_at_fraction(1)
    assert mid.canonical_marking() != lo.canonical_marking()
    assert lo.canonical_marking() != hi.canonical_marking()
    assert cyl.leaf_at_fraction("1/2").canonical_marking() == \
        mid.canonical_marking()


def test_null_homotopic_rejected(L3):
    # crossing a chord-like pair back and forth bounds a disk
    edges = sorted(L3.pair_of_edge)
    e = edges[0]
    back = L3.partner(e)
    c = parse_curve_line(L3, "curve w: +e%d -e%d"
                         % (L3.edge_gid[e], L3.edge_gid[e]))
    with pytest.raises(NullHomotopicError):
        straighten(L3, c)


def test_straighten_same_class_same_geodesic(L):
    a = parse_curve_line(L, "curve a: +e2 +e3")
    b = parse_curve_line(L, "curve b: +e3 +e2")
    ga, _ = straighten(L, a)
    gb, _ = straighten(L, b)
    assert maximal_cylinder(L, ga).circumference2 == \
        maximal_cylinder(L, gb).circumference2
