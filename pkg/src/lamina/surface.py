"""Compact half-translation surfaces from glued Euclidean polygons.

A surface is a list of simple polygons with coordinates in Q(sqrt(d)) and a
perfect pairing of their edges by isometries with derivative +Id or -Id.
Edge e_i of a polygon runs from vertex i to vertex i+1 (cyclic).  A gluing
(eA, eB, s) identifies eA with eB by x -> s*x + t, matching the start of eA
with the end of eB; its vectors satisfy vec(eB) = -s * vec(eA) exactly.
"""

import math
import re
from fractions import Fraction

from .field import FE, FieldElement, format_exact, parse_exact


class SurfaceError(ValueError):
    """Raised for malformed or invalid surface documents."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


# -- exact 2-vector helpers ------------------------------------------------

def vadd(u, v):
    return (u[0] + v[0], u[1] + v[1])


def vsub(u, v):
    return (u[0] - v[0], u[1] - v[1])


def vneg(u):
    return (-u[0], -u[1])


def smul(s, u):
    return (u[0] * s, u[1] * s)


def cross(u, v):
    return u[0] * v[1] - u[1] * v[0]


def dot(u, v):
    return u[0] * v[0] + u[1] * v[1]


def veq(u, v):
    return u[0] == v[0] and u[1] == v[1]


class Polygon:
    """Simple polygon, vertices counterclockwise, coordinates exact."""

    def __init__(self, pid, vertices):
        self.id = pid
        self.vertices = list(vertices)
        if len(self.vertices) < 3:
            raise SurfaceError("polygon %s has fewer than 3 vertices" % pid)

    @property
    def n(self):
        return len(self.vertices)

    def vertex(self, i):
        return self.vertices[i % self.n]

    def edge_vector(self, i):
        return vsub(self.vertex(i + 1), self.vertex(i))

    def signed_area2(self):
        s = FE(0)
        for i in range(self.n):
            s = s + cross(self.vertex(i), self.vertex(i + 1))
        return s


class EdgeGluing:
    """Identification of two edges with derivative sign * Id."""

    def __init__(self, edge_a, edge_b, sign):
        self.edge_a = edge_a  # (polygon id, edge index)
        self.edge_b = edge_b
        if sign not in (1, -1):
            raise SurfaceError("gluing sign must be +1 or -1")
        self.sign = sign


def _corner_angle_complex(poly, i):
    """Rotation from the outgoing to the incoming edge at vertex i.

    Returned as an exact complex number (re, im) = (dot, cross); its argument
    is the interior angle in (0, 2pi).
    """
    u = poly.edge_vector(i)
    w = vneg(poly.edge_vector(i - 1))
    return (dot(u, w), cross(u, w))


def _corner_angle_float(poly, i):
    re, im = _corner_angle_complex(poly, i)
    a = math.atan2(float(im), float(re))
    if a <= 0:
        a += 2 * math.pi
    return a


class HalfTranslationSurface:
    """Immutable glued-polygon surface with derived cone-point data."""

    def __init__(self, d, polygons, gluings):
        self.d = d
        self.polygons = {p.id: p for p in polygons}
        if len(self.polygons) != len(polygons):
            raise SurfaceError("duplicate polygon id")
        self.polygon_order = [p.id for p in polygons]
        self.gluings = list(gluings)
        self._index_edges()
        self._check_gluings()
        self._vertex_classes()

    # ---- structure -------------------------------------------------

    def _index_edges(self):
        # global edge ids in document order
        self.edge_list = []           # gid -> (pid, i)
        self.edge_gid = {}            # (pid, i) -> gid
        for pid in self.polygon_order:
            p = self.polygons[pid]
            for i in range(p.n):
                self.edge_gid[(pid, i)] = len(self.edge_list)
                self.edge_list.append((pid, i))
        self.pair_of_edge = {}        # (pid, i) -> gluing index
        for k, g in enumerate(self.gluings):
            for e in (g.edge_a, g.edge_b):
                if e not in self.edge_gid:
                    raise SurfaceError("gluing names unknown edge %s.e%d" % e)
                if e in self.pair_of_edge:
                    raise SurfaceError("edge %s.e%d glued twice" % e)
                self.pair_of_edge[e] = k
            if g.edge_a == g.edge_b:
                raise SurfaceError("edge %s.e%d glued to itself" % g.edge_a)
        for e in self.edge_list:
            if e not in self.pair_of_edge:
                raise SurfaceError("unglued edge %s.e%d" % e)

    def partner(self, edge):
        g = self.gluings[self.pair_of_edge[edge]]
        return g.edge_b if edge == g.edge_a else g.edge_a

    def gluing_sign(self, edge):
        return self.gluings[self.pair_of_edge[edge]].sign

    def edge_endpoints(self, edge):
        pid, i = edge
        p = self.polygons[pid]
        return p.vertex(i), p.vertex(i + 1)

    def gluing_map(self, edge):
        """(s, t) with x -> s*x + t sending chart of edge's polygon into the
        partner polygon's chart across this edge."""
        other = self.partner(edge)
        s = self.gluing_sign(edge)
        a0, _ = self.edge_endpoints(edge)
        _, b1 = self.edge_endpoints(other)
        # start of edge corresponds to end of partner edge
        t = vsub(b1, smul(FE(s, d=self.d), a0))
        return s, t

    def _check_gluings(self):
        for g in self.gluings:
            va = vsub(*reversed(self.edge_endpoints(g.edge_a)))
            vb = vsub(*reversed(self.edge_endpoints(g.edge_b)))
            want = smul(FE(-g.sign, d=self.d), va)
            if not veq(vb, want):
                la, lb = dot(va, va), dot(vb, vb)
                if la != lb:
                    raise SurfaceError("gluing length mismatch: %s.e%d vs %s.e%d"
                                       % (g.edge_a + g.edge_b))
                raise SurfaceError("gluing direction mismatch: %s.e%d vs %s.e%d"
                                   % (g.edge_a + g.edge_b))
        # connectivity of the polygon adjacency graph
        if self.polygon_order:
            seen = {self.polygon_order[0]}
            stack = [self.polygon_order[0]]
            while stack:
                pid = stack.pop()
                p = self.polygons[pid]
                for i in range(p.n):
                    q = self.partner((pid, i))[0]
                    if q not in seen:
                        seen.add(q)
                        stack.append(q)
            if len(seen) != len(self.polygon_order):
                raise SurfaceError("surface is not connected")

    # ---- vertex classes --------------------------------------------

    def next_corner_ccw(self, corner):
        """Next corner counterclockwise around the same surface vertex.

        The corner (pid, i) sweeps from its outgoing edge e_i to its incoming
        edge e_{i-1}; crossing e_{i-1} lands at the start corner of the
        partner edge.
        """
        pid, i = corner
        n = self.polygons[pid].n
        e = (pid, (i - 1) % n)
        q, j = self.partner(e)
        return (q, j)

    def _vertex_classes(self):
        corners = [(pid, i) for pid in self.polygon_order
                   for i in range(self.polygons[pid].n)]
        seen = set()
        classes = []
        for c in corners:
            if c in seen:
                continue
            cyc = []
            cur = c
            while cur not in seen:
                seen.add(cur)
                cyc.append(cur)
                cur = self.next_corner_ccw(cur)
            if cur != c:
                raise SurfaceError("inconsistent corner cycle at %s" % (c,))
            classes.append(cyc)
        self.corner_cycles = classes
        self.corner_class = {}
        for k, cyc in enumerate(classes):
            for c in cyc:
                self.corner_class[c] = k

    def vertex_angle_multiple(self, class_index):
        """Total angle of a vertex class as k (angle = k*pi), or None.

        The integer k is read off a float sum and certified exactly: the
        product of the corner rotation complexes must be real with sign
        (-1)^k.
        """
        cyc = self.corner_cycles[class_index]
        total = 0.0
        re, im = FE(1, d=self.d), FE(0, d=self.d)
        for (pid, i) in cyc:
            p = self.polygons[pid]
            total += _corner_angle_float(p, i)
            cre, cim = _corner_angle_complex(p, i)
            re, im = re * cre - im * cim, re * cim + im * cre
        k = round(total / math.pi)
        if abs(total - k * math.pi) > 1e-7:
            return None
        if im != 0:
            return None
        if re.sign() != (1 if k % 2 == 0 else -1):
            return None
        return k

    def euler_characteristic(self):
        v = len(self.corner_cycles)
        e = len(self.gluings)
        f = len(self.polygon_order)
        return v - e + f

    def cone_points(self):
        """[(class index, k)] for singular classes (angle k*pi, k >= 3)."""
        out = []
        for ci in range(len(self.corner_cycles)):
            k = self.vertex_angle_multiple(ci)
            if k is not None and k >= 3:
                out.append((ci, k))
        return out

    def is_cone_class(self, class_index):
        k = self.vertex_angle_multiple(class_index)
        return k is not None and k != 2


class ValidationReport:
    """Outcome of the full validity check; failures are entries, not errors."""

    def __init__(self):
        self.checks = []          # (name, ok, detail)
        self.cone_points = []     # (class index, k)
        self.chi = None

    def add(self, name, ok, detail=""):
        self.checks.append((name, bool(ok), detail))

    @property
    def passed(self):
        return all(ok for _, ok, _ in self.checks)

    def lines(self):
        out = []
        for name, ok, detail in self.checks:
            mark = "pass" if ok else "FAIL"
            out.append("%s  %s%s" % (mark, name, (": " + detail) if detail else ""))
        return out


def validate(surface):
    """Check polygon geometry, cone angles, Gauss-Bonnet, and chi < 0."""
    rep = ValidationReport()
    for pid in surface.polygon_order:
        p = surface.polygons[pid]
        rep.add("polygon %s counterclockwise" % pid, p.signed_area2().sign() > 0)
        rep.add("polygon %s simple" % pid, _is_simple(p))
    ks = []
    for ci, cyc in enumerate(surface.corner_cycles):
        k = surface.vertex_angle_multiple(ci)
        label = "vertex class %d (%s)" % (ci, _cycle_label(cyc))
        if k is None:
            rep.add(label, False, "angle not an integer multiple of pi")
            ks.append(None)
            continue
        ks.append(k)
        if k < 2:
            rep.add(label, False, "angle %d*pi below 2*pi" % k)
        else:
            rep.add(label, True, "angle %d*pi" % k)
        if k >= 3:
            rep.cone_points.append((ci, k))
    chi = surface.euler_characteristic()
    rep.chi = chi
    if all(k is not None for k in ks):
        gb = sum(2 - k for k in ks)
        rep.add("Gauss-Bonnet", gb == 2 * chi,
                "sum(2-k) = %d, 2*chi = %d" % (gb, 2 * chi))
    rep.add("chi(S) < 0", chi < 0, "chi = %d" % chi)
    return rep


def _cycle_label(cyc):
    pid, i = cyc[0]
    return "%s.v%d" % (pid, i)


def _segments_properly_cross(a0, a1, b0, b1):
    d1 = cross(vsub(a1, a0), vsub(b0, a0)).sign()
    d2 = cross(vsub(a1, a0), vsub(b1, a0)).sign()
    d3 = cross(vsub(b1, b0), vsub(a0, b0)).sign()
    d4 = cross(vsub(b1, b0), vsub(a1, b0)).sign()
    return d1 * d2 < 0 and d3 * d4 < 0


def _is_simple(p):
    n = p.n
    for i in range(n):
        if veq(p.vertex(i), p.vertex(i + 1)):
            return False
        for j in range(i + 1, n):
            a0, a1 = p.vertex(i), p.vertex(i + 1)
            b0, b1 = p.vertex(j), p.vertex(j + 1)
            if _segments_properly_cross(a0, a1, b0, b1):
                return False
            # non-adjacent edges may not touch at all
            adjacent = j == i + 1 or (i == 0 and j == n - 1)
            if not adjacent and (_on_segment(a0, a1, b0) or _on_segment(a0, a1, b1)
                                 or _on_segment(b0, b1, a0) or _on_segment(b0, b1, a1)):
                return False
    return True


def _on_segment(a, b, p):
    if cross(vsub(b, a), vsub(p, a)) != 0:
        return False
    t = dot(vsub(p, a), vsub(b, a))
    return FE(0) <= t <= dot(vsub(b, a), vsub(b, a))


# -- document parsing ------------------------------------------------------

_POLY_RE = re.compile(r"polygon\s+(\S+)\s*:\s*(.*)$")
_PAIR_RE = re.compile(r"\(([^()]*),([^()]*)\)")
_GLUE_RE = re.compile(r"glue\s+(\S+)\.e(\d+)\s+(\S+)\.e(\d+)\s+sign=([+-]1)\s*$")
_FIELD_RE = re.compile(r"field\s+d=(\d+)\s*$")


def parse_surface(text, check=True):
    """Parse a surface document; raises SurfaceError on invalid input.

    With check=True (default) the full validation must pass; check=False
    returns the structurally sound surface so callers can inspect the report.
    """
    d = None
    polygons = []
    gluings = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _FIELD_RE.match(line)
        if m:
            if d is not None:
                raise SurfaceError("duplicate field line", ln)
            d = int(m.group(1))
            if d < 1:
                raise SurfaceError("d must be >= 1", ln)
            continue
        m = _POLY_RE.match(line)
        if m:
            if d is None:
                raise SurfaceError("field line must come first", ln)
            pid, rest = m.group(1), m.group(2)
            pairs = _PAIR_RE.findall(rest)
            leftover = _PAIR_RE.sub("", rest).strip()
            if leftover:
                raise SurfaceError("bad vertex list near %r" % leftover, ln)
            if len(pairs) < 3:
                raise SurfaceError("polygon needs at least 3 vertices", ln)
            try:
                verts = [(parse_exact(x, d), parse_exact(y, d)) for x, y in pairs]
            except ValueError as exc:
                raise SurfaceError(str(exc), ln)
            polygons.append(Polygon(pid, verts))
            continue
        m = _GLUE_RE.match(line)
        if m:
            gluings.append(EdgeGluing((m.group(1), int(m.group(2))),
                                      (m.group(3), int(m.group(4))),
                                      int(m.group(5))))
            continue
        raise SurfaceError("unrecognized line %r" % line, ln)
    if d is None:
        raise SurfaceError("missing field line")
    if not polygons:
        raise SurfaceError("no polygons")
    surf = HalfTranslationSurface(d, polygons, gluings)
    if check:
        rep = validate(surf)
        if not rep.passed:
            first = next(detail or name for name, ok, detail in rep.checks if not ok)
            if rep.chi is not None and rep.chi >= 0 and \
                    all(ok for name, ok, _ in rep.checks if "chi" not in name):
                raise SurfaceError("chi(S) < 0 required (chi = %d)" % rep.chi)
            raise SurfaceError("invalid surface: %s" % first)
    return surf


def serialize_surface(surface):
    """Canonical document form; parse_surface(serialize_surface(s)) == s."""
    lines = ["field d=%d" % surface.d]
    for pid in surface.polygon_order:
        p = surface.polygons[pid]
        pts = " ".join("(%s,%s)" % (format_exact(x), format_exact(y))
                       for x, y in p.vertices)
        lines.append("polygon %s: %s" % (pid, pts))
    for g in surface.gluings:
        lines.append("glue %s.e%d %s.e%d sign=%+d"
                     % (g.edge_a + g.edge_b + (g.sign,)))
    return "\n".join(lines) + "\n"
