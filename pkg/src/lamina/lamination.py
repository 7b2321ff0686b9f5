"""Measured flat laminations of cylinder type and their hyperbolic images.

A lamination is a finite list of weighted flat cylinders: each component is
a primitive class with its maximal cylinder and a finite transverse measure
on [0, L] (atoms plus uniform pieces).  Projecting collapses each cylinder
to its class with the total mass as weight; the section goes back by placing
one atom on the middle leaf.  Leaves are stored unoriented, so measures are
invariant under orientation reversal by construction.
"""

import json

from .field import FE, format_exact, parse_exact
from .curves import CombinatorialCurve, parse_curve_line
from .straighten import NullHomotopicError, maximal_cylinder, straighten
from .crossings import count_crossings


class LaminationError(ValueError):
    pass


def _name_of(curve):
    return curve.name if curve.name else curve.tokens()


class CylinderMeasure:
    """Finite transverse measure on [0, L]: atoms plus uniform pieces.

    atoms: [(position, mass)], uniform: [(t0, t1, density)]; the height
    bound is checked when the measure meets its cylinder.
    """

    def __init__(self, atoms=(), uniform=(), d=1):
        self.atoms = []
        for t, m in atoms:
            t, m = FE(t, d=d), FE(m, d=d)
            if m.sign() <= 0:
                raise LaminationError("atom mass must be positive")
            if t.sign() < 0:
                raise LaminationError("atom position must be nonnegative")
            self.atoms.append((t, m))
        self.atoms.sort(key=lambda a: float(a[0]))
        for (t0, _), (t1, _) in zip(self.atoms, self.atoms[1:]):
            if t0 == t1:
                raise LaminationError("duplicate atom position %s" % format_exact(t0))
        self.uniform = []
        for t0, t1, rho in uniform:
            t0, t1, rho = FE(t0, d=d), FE(t1, d=d), FE(rho, d=d)
            if rho.sign() <= 0:
                raise LaminationError("uniform density must be positive")
            if t0.sign() < 0 or not t0 < t1:
                raise LaminationError("uniform piece needs 0 <= t0 < t1")
            self.uniform.append((t0, t1, rho))
        self.uniform.sort(key=lambda u: float(u[0]))
        for (_, a1, _), (b0, _, _) in zip(self.uniform, self.uniform[1:]):
            if b0 < a1:
                raise LaminationError("uniform pieces overlap")
        if self.mass.sign() <= 0:
            raise LaminationError("measure must have positive total mass")

    @property
    def mass(self):
        """Total mass delta."""
        total = FE(0)
        for _, m in self.atoms:
            total = total + m
        for t0, t1, rho in self.uniform:
            total = total + rho * (t1 - t0)
        return total

    def max_position(self):
        top = FE(0)
        for t, _ in self.atoms:
            top = max(top, t)
        for _, t1, _ in self.uniform:
            top = max(top, t1)
        return top

    def discretized(self, n):
        """Uniform pieces replaced by n equal midpoint atoms each."""
        atoms = {t: m for t, m in self.atoms}
        for t0, t1, rho in self.uniform:
            step = (t1 - t0) / FE(n)
            m = rho * step
            for j in range(n):
                t = t0 + step * FE(j) + step / FE(2)
                atoms[t] = atoms.get(t, FE(0)) + m
        return CylinderMeasure(sorted(atoms.items(), key=lambda a: float(a[0])))

    def __eq__(self, other):
        return (self.atoms == other.atoms and self.uniform == other.uniform)


def atom(t, mass=1):
    """One-atom measure, the common case."""
    return CylinderMeasure(atoms=[(t, mass)])


class LaminationComponent:
    """One weighted cylinder: primitive class, maximal cylinder, measure."""

    def __init__(self, curve, cylinder, measure, geodesic):
        self.curve = curve
        self.cylinder = cylinder
        self.measure = measure
        self.geodesic = geodesic      # interior representative for crossings
        self.height = cylinder.height

    @property
    def name(self):
        return _name_of(self.curve)

    @property
    def mass(self):
        return self.measure.mass


class MeasuredFlatLamination:
    """Finite list of pairwise non-interlaced weighted cylinder components."""

    def __init__(self, surface, components):
        self.surface = surface
        self.components = list(components)
        if not self.components:
            raise LaminationError("lamination needs at least one component")

    def component(self, key):
        if isinstance(key, int):
            return self.components[key]
        for c in self.components:
            if c.name == key:
                return c
        raise LaminationError("no component named %r" % key)

    def discretize(self, n):
        return discretize(self, n)


class MeasuredMulticurve:
    """Weighted disjoint primitive classes: the image of a lamination."""

    def __init__(self, surface, entries):
        self.surface = surface
        self.entries = []
        seen = set()
        for curve, w in entries:
            w = FE(w, d=surface.d)
            if w.sign() <= 0:
                raise LaminationError("multicurve weight must be positive")
            key = curve.canonical_key()
            if key in seen:
                raise LaminationError("duplicate class %s" % _name_of(curve))
            seen.add(key)
            self.entries.append((curve, w))

    def weights(self):
        return {_name_of(c): w for c, w in self.entries}


def _component_of(surface, curve, measure):
    if curve.power() > 1:
        raise LaminationError("curve %s is not primitive" % _name_of(curve))
    try:
        geo, is_cyl = straighten(surface, curve)
    except NullHomotopicError:
        raise LaminationError("curve %s is null-homotopic" % _name_of(curve))
    cyl = maximal_cylinder(surface, geo)
    height = cyl.height
    if cyl.height2 == 0:
        if measure.uniform or len(measure.atoms) != 1 or measure.atoms[0][0] != 0:
            raise LaminationError(
                "height-0 component %s needs a single atom at t = 0"
                % _name_of(curve))
        rep = geo
    else:
        mp = measure.max_position()
        # the height may be a square root outside the field; compare squares
        if mp * mp > cyl.height2:
            if height is not None:
                raise LaminationError(
                    "position exceeds height for %s (t = %s > L = %s)"
                    % (_name_of(curve), format_exact(mp),
                       format_exact(height)))
            raise LaminationError(
                "position exceeds height for %s (t^2 = %s > L^2 = %s)"
                % (_name_of(curve), format_exact(mp * mp),
                   format_exact(cyl.height2)))
        rep = cyl.middle_leaf()
    if count_crossings(rep, rep) > 0:
        raise LaminationError("curve %s is self-interlaced" % _name_of(curve))
    return LaminationComponent(curve, cyl, measure, rep)


def make_lamination(surface, parts):
    """Validate and assemble components; rejects interlaced supports."""
    comps = []
    keys = set()
    for curve, measure in parts:
        comp = _component_of(surface, curve, measure)
        key = curve.canonical_key()
        if key in keys:
            raise LaminationError("duplicate class %s" % comp.name)
        keys.add(key)
        comps.append(comp)
    for i in range(len(comps)):
        for j in range(i + 1, len(comps)):
            if count_crossings(comps[i].geodesic, comps[j].geodesic) > 0:
                raise LaminationError("interlaced pair (%s,%s)"
                                      % (comps[i].name, comps[j].name))
    return MeasuredFlatLamination(surface, comps)


def project_psi(lam):
    """Collapse each cylinder family to its class with weight = total mass."""
    return MeasuredMulticurve(lam.surface,
                              [(c.curve, c.mass) for c in lam.components])


def section_s(mc, surface=None):
    """Right inverse of project_psi: one atom on each middle leaf."""
    surface = surface or mc.surface
    parts = []
    for curve, w in mc.entries:
        geo, _ = straighten(surface, curve)
        cyl = maximal_cylinder(surface, geo)
        if cyl.height2 > 0:
            height = cyl.height
            # irrational height: any interior position works, use t = 0
            pos = height / FE(2) if height is not None else 0
            parts.append((curve, atom(pos, w)))
        else:
            parts.append((curve, atom(0, w)))
    # make_lamination re-checks interlacing, which cannot fire for a valid
    # multicurve but is reported defensively
    return make_lamination(surface, parts)


def fiber_description(mc, surface=None):
    """Per class the (height L, mass delta) parameters of the psi-fiber."""
    surface = surface or mc.surface
    out = []
    for curve, w in mc.entries:
        geo, _ = straighten(surface, curve)
        height = maximal_cylinder(surface, geo).height
        out.append((_name_of(curve), height, w))
    return out


def discretize(lam, n):
    """Each uniform piece replaced by n equal midpoint atoms; mass kept."""
    if n < 1:
        raise LaminationError("discretization count must be >= 1")
    comps = [LaminationComponent(c.curve, c.cylinder, c.measure.discretized(n),
                                 c.geodesic)
             for c in lam.components]
    return MeasuredFlatLamination(lam.surface, comps)


# -- documents ---------------------------------------------------------------

def lamination_to_json(lam):
    curves = {}
    comps = []
    for c in lam.components:
        curves[c.name] = c.curve.tokens()
        comps.append({
            "curve": c.name,
            "atoms": [[format_exact(t), format_exact(m)]
                      for t, m in c.measure.atoms],
            "uniform": [[format_exact(a), format_exact(b), format_exact(r)]
                        for a, b, r in c.measure.uniform],
        })
    return {"curves": curves, "components": comps}


def lamination_from_json(surface, doc):
    curves = {name: parse_curve_line(surface, "curve %s: %s" % (name, word))
              for name, word in doc.get("curves", {}).items()}
    parts = []
    for comp in doc["components"]:
        name = comp["curve"]
        if name not in curves:
            raise LaminationError("component references unknown curve %r" % name)
        d = surface.d
        measure = CylinderMeasure(
            atoms=[(parse_exact(t, d), parse_exact(m, d))
                   for t, m in comp.get("atoms", [])],
            uniform=[(parse_exact(a, d), parse_exact(b, d), parse_exact(r, d))
                     for a, b, r in comp.get("uniform", [])],
            d=d)
        parts.append((curves[name], measure))
    return make_lamination(surface, parts)


def multicurve_to_json(mc):
    curves = {}
    entries = []
    for curve, w in mc.entries:
        curves[_name_of(curve)] = curve.tokens()
        entries.append({"curve": _name_of(curve), "weight": format_exact(w)})
    return {"curves": curves, "entries": entries}


def multicurve_from_json(surface, doc):
    curves = {name: parse_curve_line(surface, "curve %s: %s" % (name, word))
              for name, word in doc.get("curves", {}).items()}
    entries = []
    for ent in doc["entries"]:
        name = ent["curve"]
        if name not in curves:
            raise LaminationError("entry references unknown curve %r" % name)
        entries.append((curves[name], parse_exact(ent["weight"], surface.d)))
    return MeasuredMulticurve(surface, entries)


def dump_document(doc):
    """Deterministic JSON text for any lamina document."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"
