import pytest

from lamina.curves import CombinatorialCurve, CurveError, parse_curve_line, \
    parse_curves
from lamina.develop import chain_svg, develop


def test_parse_and_tokens(L, lcurves):
    assert lcurves["v1"].tokens() == "+e0"
    assert lcurves["diag"].tokens() == "+e2 +e3"
    assert len(lcurves["diag"]) == 2


def test_parse_rejects_broken_sequences(L, L3):
    with pytest.raises(CurveError):
        parse_curve_line(L, "curve bad: +e99")
    # on the multi-polygon variant, find exits that do not chain up
    edges = sorted(L3.pair_of_edge)
    e1 = edges[0]
    e2 = next(e for e in edges if e[0] != L3.partner(e1)[0])
    with pytest.raises(CurveError):
        CombinatorialCurve(L3, [e1, e2])


def test_canonical_key_invariance(L, lcurves):
    c = lcurves["diag"]
    rot = CombinatorialCurve(L, c.exits[1:] + c.exits[:1])
    assert rot.canonical_key() == c.canonical_key()
    assert c.reversed().canonical_key() == c.canonical_key()
    assert c.reversed().reversed().exits == c.exits


def test_power_and_primitive_root(lcurves):
    c = lcurves["diag"]
    assert c.power() == 1
    sq = c.repeat(3)
    assert sq.power() == 3
    assert sq.primitive_root().canonical_key() == c.canonical_key()


def test_parse_curves_names(L):
    named = parse_curves(L, "curve a: +e0\n# comment\ncurve b: +e1\n")
    assert sorted(named) == ["a", "b"]
    assert named["a"].name == "a"


def test_develop_period_and_holonomy(L, lcurves):
    c = lcurves["diag"]
    one = develop(L, c, turns=1)
    two = develop(L, c, turns=2)
    assert len(two) == 2 * len(one)
    # two periods compose the holonomy with itself
    assert two.holonomy == one.holonomy.compose(one.holonomy)


def test_develop_portals_shared(L, lcurves):
    chain = develop(L, lcurves["v1"], turns=1)
    # each portal is an edge of both neighboring placed polygons
    for i, (pts, _edge) in enumerate(chain.portals):
        a, b = pts
        poly = chain.placed_polygon(i)
        assert a in poly and b in poly


def test_chain_svg_smoke(L, lcurves):
    svg = chain_svg(develop(L, lcurves["diag"], turns=1))
    assert svg.startswith("<svg") and "polygon" in svg
