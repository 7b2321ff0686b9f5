import pytest

from lamina.surface import SurfaceError, parse_surface, serialize_surface, \
    validate
from conftest import SURFACES, load_surface


def test_l_surface_valid(L):
    rep = validate(L)
    assert rep.passed
    assert rep.chi == -2
    # single cone point of angle 6*pi on the genus-2 L-surface
    assert [k for _, k in rep.cone_points] == [6]


def test_l3_same_surface_three_polygons(L3):
    rep = validate(L3)
    assert rep.passed
    assert rep.chi == -2
    assert [k for _, k in rep.cone_points] == [6]


def test_octagon_valid(octagon):
    rep = validate(octagon)
    assert rep.passed
    assert rep.chi == -2
    assert [k for _, k in rep.cone_points] == [6]


def test_octagon2_valid(octagon2):
    rep = validate(octagon2)
    assert rep.passed
    assert rep.chi == -2


def test_plus_valid(plus):
    rep = validate(plus)
    assert rep.passed
    assert rep.chi == -4        # genus 3


def test_torus_rejected():
    text = (SURFACES / "torus.surf").read_text()
    with pytest.raises(SurfaceError, match=r"chi\(S\) < 0 required \(chi = 0\)"):
        parse_surface(text)
    rep = validate(parse_surface(text, check=False))
    assert not rep.passed


def test_serialize_roundtrip(L, octagon):
    for s in (L, octagon):
        t = serialize_surface(s)
        s2 = parse_surface(t)
        assert serialize_surface(s2) == t


def test_partner_involution(L, plus):
    for s in (L, plus):
        for e in s.pair_of_edge:
            assert s.partner(s.partner(e)) == e


def test_gluing_map_sends_edge_to_partner(L, octagon):
    from lamina.field import FE
    for s in (L, octagon):
        for e in s.pair_of_edge:
            sgn, t = s.gluing_map(e)
            pe = s.partner(e)
            p = s.polygons[e[0]]
            q = s.polygons[pe[0]]
            a = p.vertex(e[1])
            b = (FE(sgn) * a[0] + t[0], FE(sgn) * a[1] + t[1])
            # start of e maps to the end of the partner edge
            end = q.vertex((pe[1] + 1) % q.n)
            assert b == end


def test_broken_gluing_rejected(L):
    lines = serialize_surface(L).splitlines()
    bad = "\n".join(l for l in lines if not l.startswith("glue")) + "\n"
    with pytest.raises(SurfaceError):
        parse_surface(bad)
