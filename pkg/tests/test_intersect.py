import pytest

from lamina.field import FE
from lamina.lamination import atom, make_lamination
from lamina.intersect import (BSetWindow, enumerate_Bset,
                              geometric_intersection, intersection_number)


@pytest.fixture()
def lam(L, lcurves):
    return make_lamination(L, [(lcurves["h1"], atom("1/2", 1)),
                               (lcurves["h2"], atom("1/2", 2))])


def test_geometric_intersection_needs_primitive(L, lcurves):
    with pytest.raises(ValueError):
        geometric_intersection(L, lcurves["v1"].repeat(2), lcurves["h1"])


def test_geometric_intersection_certificates(L, lcurves):
    n, flat, hyp = geometric_intersection(L, lcurves["v1"], lcurves["h1"],
                                          certificates=True)
    assert n == 1
    assert flat["backend"] == "flat" and flat["count"] == 1
    assert hyp["backend"] == "hyperbolic" and hyp["count"] == 1


def test_intersection_number_weighted(lam, lcurves):
    assert intersection_number(lam, lcurves["v1"]) == FE(3)
    assert intersection_number(lam, lcurves["v2"]) == FE(1)
    assert intersection_number(lam, lcurves["h1"]) == FE(0)
    assert intersection_number(lam, lcurves["diag"]) == FE(1)


def test_intersection_number_homogeneous(lam, lcurves):
    base = intersection_number(lam, lcurves["v1"])
    for k in (1, 2, 3):
        assert intersection_number(lam, lcurves["v1"].repeat(k)) == \
            base * FE(k)


def test_bset_window_masses(lam, lcurves):
    win = enumerate_Bset(lam, "h1", lcurves["v1"])
    assert not win.empty
    # members: base at 0, h2 lift between, the gamma-translate closing copy
    assert [name for _, name, _ in win.members] == ["h1", "h2", "h1"]
    assert win.counts == {"h1": 1, "h2": 1}
    assert win.half_nu_minus_target() == intersection_number(lam,
                                                             lcurves["v1"])
    # positions are sorted along the axis
    ps = [p for p, _, _ in win.members]
    assert ps == sorted(ps) and ps[0] == 0.0


def test_bset_scales_with_power(lam, lcurves):
    win = enumerate_Bset(lam, "h1", lcurves["v1"].repeat(2))
    assert win.counts == {"h1": 2, "h2": 2}
    assert win.half_nu_minus_target() == FE(6)


def test_bset_empty_when_not_interlaced(lam, lcurves):
    # h1 is not interlaced with its own class, nor h2 with v2
    assert enumerate_Bset(lam, "h1", lcurves["h1"]).empty
    assert enumerate_Bset(lam, "h2", lcurves["v2"]).empty
    assert enumerate_Bset(lam, "h2", lcurves["v2"]).half_nu_minus_target() \
        == FE(0)


def test_bset_json_deterministic(lam, lcurves):
    a = enumerate_Bset(lam, "h1", lcurves["v1"]).to_json()
    b = enumerate_Bset(lam, "h1", lcurves["v1"]).to_json()
    assert a == b
    assert a["half_nu_minus_target"] == "3"


def test_mass_formula_on_fresh_pairs(L, lcurves):
    # the identity half nu(B - gamma lift) = sum delta_i i(c_i, gamma) holds
    # for every interlaced base and several weights
    lam = make_lamination(L, [(lcurves["h1"], atom("1/3", "5/7"))])
    for gamma in (lcurves["v1"], lcurves["v2"], lcurves["diag"]):
        win = enumerate_Bset(lam, "h1", gamma)
        assert win.half_nu_minus_target() == intersection_number(lam, gamma)
