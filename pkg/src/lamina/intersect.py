"""Intersection numbers with two independent backends that must agree.

The flat backend counts exact transverse crossings of straightened
representatives; the hyperbolic backend counts axis lifts crossing a
fundamental window in the Fuchsian model.  Every class-level query runs
both and aborts on disagreement, carrying both certificates.
"""

from .field import FE, format_exact
from .crossings import count_crossings, flat_representative
from .crossings import interlaced_flat  # re-export, geodesic-level test
from .fuchsian import (UncertainLinking, axis, fuchsian_for_surface,
                       intersection_linking)

__all__ = ["BackendDisagreement", "BSetWindow", "geometric_intersection",
           "intersection_number", "enumerate_Bset", "interlaced_flat"]


class BackendDisagreement(RuntimeError):
    """Flat and hyperbolic counts differ; both certificates attached."""

    def __init__(self, message, flat_certificate, hyperbolic_certificate):
        super().__init__(message)
        self.flat_certificate = flat_certificate
        self.hyperbolic_certificate = hyperbolic_certificate


def _rep_cache(surface):
    cache = getattr(surface, "_lamina_reps", None)
    if cache is None:
        cache = surface._lamina_reps = {}
    return cache


def _representative(surface, curve):
    cache = _rep_cache(surface)
    key = curve.canonical_key()
    if key not in cache:
        cache[key] = flat_representative(surface, curve)
    return cache[key]


def geometric_intersection(surface, a, b, certificates=False):
    """Geometric intersection number of two primitive classes.

    Counts flat crossings and hyperbolic axis linkings; the two exact
    integers must agree or a BackendDisagreement is raised.
    """
    if a.power() > 1 or b.power() > 1:
        raise ValueError("geometric_intersection needs primitive classes")
    cache = getattr(surface, "_lamina_icache", None)
    if cache is None:
        cache = surface._lamina_icache = {}
    pair = tuple(sorted((a.canonical_key(), b.canonical_key())))
    if pair in cache:
        n_flat, flat_cert, hyp_cert = cache[pair]
        if certificates:
            return n_flat, flat_cert, hyp_cert
        return n_flat
    ga = _representative(surface, a)
    gb = _representative(surface, b)
    n_flat = count_crossings(ga, gb)
    flat_cert = {
        "backend": "flat",
        "count": n_flat,
        "word_a": a.tokens(),
        "word_b": b.tokens(),
    }
    model = fuchsian_for_surface(surface)
    wa = model.word_for_curve(a)
    wb = model.word_for_curve(b)
    n_hyp, hyp_cert = intersection_linking(wa, wb, certificate=True)
    hyp_cert = dict(hyp_cert)
    hyp_cert["backend"] = "hyperbolic"
    if n_flat != n_hyp:
        raise BackendDisagreement(
            "backend disagreement for (%s, %s): flat %d, hyperbolic %d"
            % (a.tokens(), b.tokens(), n_flat, n_hyp), flat_cert, hyp_cert)
    cache[pair] = (n_flat, flat_cert, hyp_cert)
    if certificates:
        return n_flat, flat_cert, hyp_cert
    return n_flat


def intersection_number(lam, alpha):
    """i(lamination, class): sum of delta_i * i(c_i, alpha0) * k."""
    k = alpha.power()
    if k == 0:
        raise ValueError("alpha is non-trivial by assumption")
    a0 = alpha.primitive_root()
    total = FE(0, d=lam.surface.d)
    for comp in lam.components:
        n = geometric_intersection(lam.surface, comp.curve, a0)
        total = total + comp.mass * FE(n * k)
    return total


# -- B-sets ------------------------------------------------------------------

class BSetWindow:
    """Ordered lifts of lamination leaves between a base lift and its
    gamma-translate, each carrying its component's measure symbolically.

    members are (position along axis(gamma), component name, mass) in the
    separation order; position floats are diagnostics, masses exact.  The
    base lift sits at the window start, the target gamma-translate at the
    end; both extremes belong to the window, the subtraction removes the
    target copy.
    """

    def __init__(self, base_name, gamma_name, members, base_mass, counts):
        self.base = base_name
        self.gamma = gamma_name
        self.members = members
        self.base_mass = base_mass        # delta of the base component
        self.counts = counts              # component name -> lifts per window

    def __len__(self):
        return len(self.members)

    @property
    def empty(self):
        return not self.members

    def nu_mass(self):
        """Doubled (orientation-counting) mass of the whole window."""
        total = FE(0)
        for _, _, m in self.members:
            total = total + m
        return FE(2) * total

    def nu_mass_minus_target(self):
        """nu(B - gamma * base lift): the closing endpoint removed."""
        if self.empty:
            return FE(0)
        return self.nu_mass() - FE(2) * self.base_mass

    def half_nu_minus_target(self):
        """The paper's intersection formula: half the subtracted mass."""
        return self.nu_mass_minus_target() / FE(2)

    def to_json(self):
        return {
            "base": self.base,
            "gamma": self.gamma,
            "counts": dict(sorted(self.counts.items())),
            "members": [[round(p, 9), name, format_exact(m)]
                        for p, name, m in self.members],
            "half_nu_minus_target": format_exact(self.half_nu_minus_target()),
        }


_EDGE_TOL = 1e-7


def enumerate_Bset(lam, base, gamma):
    """Lifts of leaves of the lamination separating a base lift from its
    gamma-translate, ordered along the axis of gamma.

    base names a component whose leaf provides the base lift; when that
    leaf is not interlaced with the axis the window is empty.
    """
    surface = lam.surface
    comp = base if hasattr(base, "curve") else lam.component(base)
    model = fuchsian_for_surface(surface)
    k = gamma.power()
    if k == 0:
        raise ValueError("gamma is non-trivial by assumption")
    g0 = gamma.primitive_root()
    wg = model.word_for_curve(g0)
    gname = gamma.name if gamma.name else gamma.tokens()

    per_comp = []
    for c in lam.components:
        # lifts of the component crossing one primitive window of gamma
        n, cert = intersection_linking(wg, model.word_for_curve(c.curve),
                                       certificate=True)
        n_flat = geometric_intersection(surface, c.curve, g0)
        if n != n_flat:
            raise BackendDisagreement(
                "backend disagreement inside enumerate_Bset for (%s, %s)"
                % (c.name, gname),
                {"backend": "flat", "count": n_flat}, cert)
        per_comp.append((c, n, cert))

    ell = None
    base_positions = []
    for c, n, cert in per_comp:
        if c is comp:
            ell = cert["translation_length"]
            s0 = cert["window"][0]
            base_positions = [r["crossing_log_height"] - s0
                              for r in cert["lifts"]]
    if not base_positions:
        return BSetWindow(comp.name, gname, [], comp.mass,
                          {c.name: 0 for c, _, _ in per_comp})

    width = k * ell
    p_star = min(base_positions)
    members = []
    counts = {}
    for c, n, cert in per_comp:
        counts[c.name] = n * k
        s0 = cert["window"][0]
        for rec in cert["lifts"]:
            p = rec["crossing_log_height"] - s0 - p_star
            for j in range(k):
                q = (p + j * ell) % width
                if c is not comp and min(q, width - q) < _EDGE_TOL:
                    raise UncertainLinking(
                        "lift of %s lands on the window frontier; raise "
                        "precision" % c.name)
                members.append((q, c.name, c.mass))
    # the closing endpoint: the gamma-translate of the base lift
    members.append((width, comp.name, comp.mass))
    members.sort(key=lambda r: r[0])
    return BSetWindow(comp.name, gname, members, comp.mass, counts)
