import math

import pytest

from lamina.curves import parse_curve_line
from lamina.crossings import geometric_intersection_flat
from lamina.fuchsian import (GroupWord, axis, fuchsian_for_surface,
                             fuchsian_from_genus, intersection_linking,
                             linked)


def _word(surface, tokens):
    model = fuchsian_for_surface(surface)
    return model.word_for_curve(parse_curve_line(surface,
                                                 "curve w: " + tokens))


def test_models_satisfy_relators(L, octagon, plus):
    for s in (L, octagon, plus):
        model = fuchsian_for_surface(s)
        assert model.relator_residual() < 1e-9


def test_model_cached(L):
    assert fuchsian_for_surface(L) is fuchsian_for_surface(L)


def test_genus_model():
    model = fuchsian_from_genus(2)
    assert len(model.generators) == 4
    assert model.relator_residual() < 1e-9


def test_group_word_reduction(L):
    model = fuchsian_for_surface(L)
    w = GroupWord(model, [1, 2, -2, -1, 3])
    assert w.letters == (3,)
    w = GroupWord(model, [1, 3, -1])        # cyclically reduces to (3,)
    assert w.cyclic == (3,)
    sq = GroupWord(model, [1, 2, 1, 2])
    assert sq.power() == 2
    assert sq.primitive_root().cyclic == (1, 2)


def test_axis_fixed_points(L):
    model = fuchsian_for_surface(L)
    for letters in [(1,), (2,), (1, 2), (3, 1)]:
        m = model.matrix(letters)
        ax = axis(m)
        for x in (ax.attracting, ax.repelling):
            if math.isinf(x):
                assert abs(float(m[1, 0])) < 1e-9
            else:
                img = (float(m[0, 0]) * x + float(m[0, 1])) / \
                    (float(m[1, 0]) * x + float(m[1, 1]))
                assert abs(img - x) < 1e-6 * (1 + abs(x))


def test_linked_symmetry(L):
    model = fuchsian_for_surface(L)
    p = axis(model.matrix((1,)))
    q = axis(model.matrix((2,)))
    assert linked(p, q) == linked(q, p)


def test_linking_matches_flat_on_l_table(L, lcurves):
    pairs = [("v1", "h1", 1), ("v2", "h1", 1), ("v1", "h2", 1),
             ("v2", "h2", 0), ("v1", "v2", 0), ("h1", "h2", 0),
             ("diag", "v1", 1), ("diag", "h2", 0)]
    model = fuchsian_for_surface(L)
    for a, b, want in pairs:
        wa = model.word_for_curve(lcurves[a])
        wb = model.word_for_curve(lcurves[b])
        assert intersection_linking(wa, wb) == want
        assert geometric_intersection_flat(L, lcurves[a], lcurves[b]) == want


def test_linking_conjugation_invariant(L):
    model = fuchsian_for_surface(L)
    wa = _word(L, "+e4 +e5 +e4 +e2")
    wb = _word(L, "+e7 +e1")
    n = intersection_linking(wa, wb)
    assert n == 2
    assert intersection_linking(wa.conjugated((3, -1)), wb) == n


def test_linking_homogeneity(L):
    wa = _word(L, "+e2 +e3")
    wb = _word(L, "+e0")
    base = intersection_linking(wa, wb)
    assert intersection_linking(wa.repeat(2), wb.repeat(3)) == 6 * base


def test_certificate_shape(L):
    wa = _word(L, "+e0")
    wb = _word(L, "+e2")
    n, cert = intersection_linking(wa, wb, certificate=True)
    assert n == 1 and cert["count"] == 1
    assert len(cert["lifts"]) == 1
    rec = cert["lifts"][0]
    assert rec["attracting_sign"] != rec["repelling_sign"]
    lo, hi = cert["window"]
    assert lo <= rec["crossing_log_height"] <= hi
