"""Developing map: lay out a chain of glued polygons in the plane.

A placement is an affine map x -> s*x + t with s in {+1,-1} and exact t,
taking a polygon's own chart into the plane.  Developing a curve for k turns
produces one placement per crossing; the final placement relative to the
first is the holonomy of the curve's deck transformation.
"""

from .field import FE, format_exact
from .surface import smul, vadd, vsub


class Placement:
    """x -> s*x + t, s = +1 or -1, t an exact 2-vector."""

    __slots__ = ("s", "t")

    def __init__(self, s, t):
        self.s = s
        self.t = t

    def apply(self, p):
        return vadd(smul(FE(self.s), p), self.t)

    def compose(self, other):
        # self after other fails order: (self o other)(x) = self(other(x))
        return Placement(self.s * other.s,
                         vadd(smul(FE(self.s), other.t), self.t))

    def inverse(self):
        return Placement(self.s, smul(FE(-self.s), self.t))

    def __eq__(self, other):
        return self.s == other.s and self.t[0] == other.t[0] and self.t[1] == other.t[1]

    def __repr__(self):
        return "Placement(%+d, (%s, %s))" % (self.s, format_exact(self.t[0]),
                                             format_exact(self.t[1]))


def identity_placement(d=1):
    return Placement(1, (FE(0, d=d), FE(0, d=d)))


class DevelopedChain:
    """Sequence of placed polygons along a developed curve.

    steps[i] = (polygon id, placement); portals[i] is the placed shared edge
    between steps i and i+1, as ((point, point), exit edge).  holonomy is the
    deck transformation carrying the chain one period forward (only set when
    the chain covers whole turns).
    """

    def __init__(self, surface, steps, portals, holonomy=None):
        self.surface = surface
        self.steps = steps
        self.portals = portals
        self.holonomy = holonomy

    def __len__(self):
        return len(self.steps)

    def placed_polygon(self, i):
        pid, g = self.steps[i]
        poly = self.surface.polygons[pid]
        return [g.apply(v) for v in poly.vertices]


def develop(surface, curve, turns=1):
    """Develop `turns` periods of the curve starting from the identity.

    Returns a DevelopedChain of turns*len(curve) placements; with turns >= 1
    the holonomy field holds the period deck transformation.
    """
    d = surface.d
    if turns == 0:
        return DevelopedChain(surface, [], [], None)
    g = identity_placement(d)
    steps = []
    portals = []
    n = len(curve.exits)
    for k in range(turns * n):
        e = curve.exits[k % n]
        steps.append((e[0], g))
        a, b = surface.edge_endpoints(e)
        portals.append(((g.apply(a), g.apply(b)), e))
        # place the next polygon across e: partner edge maps its chart here
        s, t = surface.gluing_map(surface.partner(e))
        g = g.compose(Placement(s, t))
    holonomy = g if turns * n > 0 else None
    return DevelopedChain(surface, steps, portals, holonomy)


def chain_svg(chain, width=800):
    """Plain SVG rendering of a developed chain (documentation aid)."""
    polys = [chain.placed_polygon(i) for i in range(len(chain))]
    if not polys:
        return '<svg xmlns="http://www.w3.org/2000/svg" width="10" height="10"/>'
    xs = [float(p[0]) for poly in polys for p in poly]
    ys = [float(p[1]) for poly in polys for p in poly]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    span = max(x1 - x0, y1 - y0, 1e-9)
    scale = (width - 20) / span
    height = int((y1 - y0) * scale) + 20

    def pt(p):
        return "%.3f,%.3f" % (10 + (float(p[0]) - x0) * scale,
                              height - 10 - (float(p[1]) - y0) * scale)

    parts = ['<svg xmlns="http://www.w3.org/2000/svg" width="%d" height="%d">'
             % (width, height)]
    for poly in polys:
        parts.append('<polygon points="%s" fill="none" stroke="black" stroke-width="1"/>'
                     % " ".join(pt(p) for p in poly))
    for (a, b), _ in chain.portals:
        parts.append('<line x1="%s" y1="%s" x2="%s" y2="%s" stroke="red" stroke-width="1"/>'
                     % tuple(pt(a).split(",") + pt(b).split(",")))
    parts.append("</svg>")
    return "\n".join(parts)
