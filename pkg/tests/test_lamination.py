import pytest

from lamina.field import FE, format_exact
from lamina.lamination import (CylinderMeasure, LaminationError, atom,
                               discretize, dump_document, fiber_description,
                               lamination_from_json, lamination_to_json,
                               make_lamination, multicurve_from_json,
                               multicurve_to_json, project_psi, section_s)


@pytest.fixture()
def lam(L, lcurves):
    return make_lamination(L, [(lcurves["h1"], atom("1/2", 1)),
                               (lcurves["h2"], atom("1/2", 2))])


def test_measure_validation():
    with pytest.raises(LaminationError):
        CylinderMeasure()                              # zero mass
    with pytest.raises(LaminationError):
        CylinderMeasure(atoms=[("1/2", 0)])            # nonpositive mass
    with pytest.raises(LaminationError):
        CylinderMeasure(atoms=[("1/2", 1), ("1/2", 1)])
    with pytest.raises(LaminationError):
        CylinderMeasure(uniform=[(0, 1, 1), ("1/2", 2, 1)])
    m = CylinderMeasure(atoms=[("1/4", 1)], uniform=[("1/2", 1, 2)])
    assert m.mass == FE(2) and m.max_position() == FE(1)


def test_component_mass_and_height(lam):
    assert [c.name for c in lam.components] == ["h1", "h2"]
    assert lam.component("h1").mass == FE(1)
    assert lam.component("h2").mass == FE(2)
    assert lam.component(0).height == FE(1)


def test_rejects_bad_components(L, lcurves):
    with pytest.raises(LaminationError, match="not primitive"):
        make_lamination(L, [(lcurves["h1"].repeat(2), atom(0, 1))])
    with pytest.raises(LaminationError, match="position exceeds height"):
        make_lamination(L, [(lcurves["h1"], atom("3/2", 1))])
    with pytest.raises(LaminationError, match="interlaced pair"):
        make_lamination(L, [(lcurves["h1"], atom("1/2", 1)),
                            (lcurves["v1"], atom("1/2", 1))])
    with pytest.raises(LaminationError, match="duplicate class"):
        make_lamination(L, [(lcurves["h1"], atom("1/2", 1)),
                            (lcurves["h1"], atom("1/4", 1))])


def test_rigid_component_needs_origin_atom(plus):
    from lamina.curves import parse_curve_line
    rigid = parse_curve_line(plus, "curve c: +e0")
    with pytest.raises(LaminationError, match="single atom at t = 0"):
        make_lamination(plus, [(rigid, atom("1/2", 1))])
    lam = make_lamination(plus, [(rigid, atom(0, 3))])
    assert lam.component("c").mass == FE(3)


def test_project_and_section_roundtrip(L, lam):
    mc = project_psi(lam)
    assert {k: str(v) for k, v in mc.weights().items()} == \
        {"h1": "FieldElement(1)", "h2": "FieldElement(2)"}
    lam2 = section_s(mc, L)
    assert project_psi(lam2).weights() == mc.weights()
    # section puts the atom on the middle leaf
    assert lam2.component("h1").measure.atoms == [(FE("1/2"), FE(1))]


def test_fiber_description(L, lam):
    rows = fiber_description(project_psi(lam), L)
    assert rows == [("h1", FE(1), FE(1)), ("h2", FE(1), FE(2))]


def test_discretize_preserves_mass(L, lcurves):
    lam = make_lamination(L, [(lcurves["h1"],
                               CylinderMeasure(uniform=[(0, 1, 1)]))])
    for n in (1, 2, 8):
        lam_n = discretize(lam, n)
        comp = lam_n.component("h1")
        assert len(comp.measure.atoms) == n
        assert comp.mass == FE(1)
    # midpoints for n = 2
    lam2 = discretize(lam, 2)
    assert lam2.component("h1").measure.atoms == \
        [(FE("1/4"), FE("1/2")), (FE("3/4"), FE("1/2"))]


def test_json_roundtrip(L, lam):
    doc = lamination_to_json(lam)
    lam2 = lamination_from_json(L, doc)
    assert lamination_to_json(lam2) == doc
    assert dump_document(doc) == dump_document(lamination_to_json(lam2))
    mdoc = multicurve_to_json(project_psi(lam))
    mc2 = multicurve_from_json(L, mdoc)
    assert multicurve_to_json(mc2) == mdoc


def test_measure_serialization_is_exact(L, lcurves):
    lam = make_lamination(L, [(lcurves["diag"],
                               atom(FE("1/5") / FE(3), FE("7/3")))])
    doc = lamination_to_json(lam)
    assert doc["components"][0]["atoms"] == [["1/15", "7/3"]]
    assert format_exact(lam.component(0).mass) == "7/3"
