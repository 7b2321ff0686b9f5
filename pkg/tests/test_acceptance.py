"""Acceptance suite: one test (and one pass/fail line) per criterion."""

import itertools
import time

import pytest

from lamina.field import FE
from lamina.surface import SurfaceError, parse_surface, validate
from lamina.lamination import (CylinderMeasure, atom, discretize,
                               make_lamination, project_psi, section_s,
                               MeasuredMulticurve)
from lamina.intersect import enumerate_Bset, geometric_intersection, \
    intersection_number
from lamina.fuchsian import fuchsian_for_surface
from lamina.tree import (Lift, compare_with_hyperbolic, four_point_check,
                         pseudo_distance, quotient_tree, random_lifts,
                         translation_length)
from conftest import SURFACES, random_closed_words


def _report(num, detail):
    print("criterion %d: pass (%s)" % (num, detail))


@pytest.fixture(scope="module")
def lwords(L):
    return random_closed_words(L, 30, seed=101, max_len=4)


@pytest.fixture(scope="module")
def lams(L, plus, lcurves):
    from lamina.curves import parse_curve_line
    a = make_lamination(L, [(lcurves["h1"], atom("1/2", 1)),
                            (lcurves["h2"], atom("1/2", 2))])
    b = make_lamination(L, [(lcurves["h1"], atom("1/3", "5/7"))])
    c = make_lamination(L, [(lcurves["h2"],
                             CylinderMeasure(uniform=[(0, 1, "3/2")]))])
    d = make_lamination(L, [(lcurves["diag"], atom("1/10", "2/3"))])
    e = make_lamination(plus, [
        (parse_curve_line(plus, "curve c0: +e0"), atom(0, 1)),
        (parse_curve_line(plus, "curve c8: +e8"), atom("1/2", 1))])
    return {"a": a, "b": b, "c": c, "d": d, "e": e}


def test_criterion_1_surface_validation():
    t0 = time.time()
    good = ["L.surf", "octagon.surf", "L3.surf", "octagon2.surf"]
    for name in good:
        s = parse_surface((SURFACES / name).read_text())
        assert validate(s).passed, name
    with pytest.raises(SurfaceError, match="chi"):
        parse_surface((SURFACES / "torus.surf").read_text())
    dt = time.time() - t0
    assert dt < 1.0
    _report(1, "4 valid + 1 rejected in %.2fs" % dt)


def test_criterion_2_backend_agreement(L, octagon):
    t0 = time.time()
    total = 0
    for s in (L, octagon):
        curves = random_closed_words(s, 12, seed=42, max_len=8)
        pairs = list(itertools.combinations(curves, 2))[:50]
        assert len(pairs) >= 50
        for a, b in pairs:
            geometric_intersection(s, a, b)   # raises on disagreement
            total += 1
    dt = time.time() - t0
    assert dt < 120.0
    _report(2, "%d pairs, flat = hyperbolic, %.1fs" % (total, dt))


def test_criterion_3_mass_formula(L, lams, lcurves, lwords):
    t0 = time.time()
    gammas = [lcurves[k] for k in ("v1", "v2", "diag", "h1", "h2")]
    gammas += lwords[:6]
    checked = 0
    for key in ("a", "b", "c", "d"):
        lam = lams[key]
        for gamma in gammas:
            for comp in lam.components:
                if geometric_intersection(L, comp.curve, gamma) == 0:
                    continue    # base not interlaced: window undefined
                win = enumerate_Bset(lam, comp.name, gamma)
                assert win.half_nu_minus_target() == \
                    intersection_number(lam, gamma)
                checked += 1
    dt = time.time() - t0
    assert checked >= 20 and dt < 60.0
    _report(3, "%d interlaced (lam, gamma) pairs, %.1fs" % (checked, dt))


def test_criterion_4_translation_length_is_min(L, lams, lcurves):
    t0 = time.time()
    model = fuchsian_for_surface(L)
    lam = lams["a"]
    cases = [lcurves[k] for k in ("v1", "v2", "diag", "h1", "h2")]
    for gamma in cases:
        ell = translation_length(lam, gamma)
        letters = model.word_for_curve(gamma).letters
        sample = random_lifts(lam, 26, seed=17, max_len=3)
        # plain lifts of both strips so every orbit case is represented
        sample += [Lift(lam, 0, FE("1/4")), Lift(lam, 0, FE("1/2")),
                   Lift(lam, 1, FE("1/2")), Lift(lam, 1, FE("3/2"))]
        assert len(sample) >= 30
        dists = [pseudo_distance(lam, l, l.translated(letters))
                 for l in sample]
        interlaced = any(
            geometric_intersection(L, c.curve, gamma) > 0
            for c in lam.components)
        assert min(dists) == ell.value
        if interlaced:
            assert ell.hyperbolic_action and ell.value > FE(0)
        else:
            # elliptic case: zero length with an exact fixed point
            assert not ell.hyperbolic_action and ell.value == FE(0)
            assert any(d == FE(0) for d in dists)
    dt = time.time() - t0
    assert dt < 120.0
    _report(4, "min over 30 lifts = ell_T for %d words, %.1fs"
            % (len(cases), dt))


def test_criterion_5_spectra_agree(L, plus, lams, lwords):
    t0 = time.time()
    total = 0
    pwords = random_closed_words(plus, 30, seed=55, max_len=4)
    for key in ("a", "b", "c", "d", "e"):
        lam = lams[key]
        words = pwords if lam.surface is plus else lwords
        report = compare_with_hyperbolic(lam, words)
        assert len(report) >= 30
        assert all(r["equal"] for r in report)
        total += len(report)
    dt = time.time() - t0
    assert dt < 120.0
    _report(5, "5 laminations x 30 words, %d equal lengths, %.1fs"
            % (total, dt))


def test_criterion_6_section_and_fiber(L, lcurves, lwords):
    import random
    rng = random.Random(7)
    families = [("h1",), ("h2",), ("v1",), ("h1", "h2"), ("v1", "v2"),
                ("h2", "diag")]
    for i in range(10):
        fam = families[i % len(families)]
        entries = [(lcurves[n], FE(rng.randint(1, 9)) / FE(rng.randint(1, 9)))
                   for n in fam]
        mc = MeasuredMulticurve(L, entries)
        assert project_psi(section_s(mc, L)).weights() == mc.weights()
    # equal (class, delta) profiles are indistinguishable by intersection
    lam1 = make_lamination(L, [(lcurves["h1"], atom("1/4", 1)),
                               (lcurves["h2"], atom("1/2", 2))])
    lam2 = make_lamination(L, [
        (lcurves["h1"], CylinderMeasure(uniform=[(0, 1, 1)])),
        (lcurves["h2"], CylinderMeasure(atoms=[("1/3", 1), ("2/3", 1)]))])
    for gamma in lwords[:20]:
        assert intersection_number(lam1, gamma) == \
            intersection_number(lam2, gamma)
    _report(6, "psi o s = id on 10 multicurves; fibers indistinguishable "
            "on 20 words")


def test_criterion_7_homogeneity(L, lams, lwords):
    checked = 0
    for key in ("a", "b", "c", "d"):
        lam = lams[key]
        for gamma in lwords[:6]:
            base = intersection_number(lam, gamma)
            for k in (1, 2, 3):
                assert intersection_number(lam, gamma.repeat(k)) == \
                    base * FE(k)
                checked += 1
    _report(7, "i(mu, alpha^k) = k i(mu, alpha), %d checks" % checked)


def test_criterion_8_four_point(L, lams):
    t0 = time.time()
    for key in ("a", "b", "e"):
        lam = lams[key]
        sample = random_lifts(lam, 200, seed=23, max_len=4)
        assert four_point_check(lam, sample)
    dt = time.time() - t0
    assert dt < 300.0
    _report(8, "3 laminations x 200 lifts, exact 0-hyperbolicity, %.1fs"
            % dt)


def test_criterion_9_discretize_invariance(L, lams, lcurves, lwords):
    lam = make_lamination(L, [
        (lcurves["h1"], CylinderMeasure(atoms=[("1/8", "1/2")],
                                        uniform=[("1/4", "3/4", 2)])),
        (lcurves["h2"], CylinderMeasure(uniform=[(0, 1, "1/3")]))])
    base_tree = quotient_tree(lam)
    words = [lcurves["v1"], lcurves["v2"], lcurves["diag"]] + lwords[:5]
    base_lengths = base_tree.lengths(words)
    for n in (1, 2, 8):
        lam_n = discretize(lam, n)
        assert project_psi(lam_n).weights() == project_psi(lam).weights()
        for gamma in words:
            assert intersection_number(lam_n, gamma) == \
                intersection_number(lam, gamma)
        tree_n = quotient_tree(lam_n)
        assert tree_n.lengths(words) == base_lengths
        assert tree_n.edge_lengths() == base_tree.edge_lengths()
    _report(9, "psi-image, intersections and tree spectra stable for "
            "n in {1,2,8}")
