"""Internal triangulation of a surface's polygons.

Straightening needs convex corridor faces: a chord between two crossing
points stays inside a triangle but not inside an L-shaped polygon.  The
refinement cuts every polygon into triangles along diagonals (exact ear
clipping, no new vertices) and presents the result as an ordinary surface
whose extra gluings are identity maps (sign +1, translation 0) between the
two sides of each diagonal.  Crossing words translate back and forth; the
triangle charts reuse the parent polygon's coordinates unchanged.
"""

from .surface import (EdgeGluing, HalfTranslationSurface, Polygon,
                      SurfaceError, cross, vsub)


def _in_closed_triangle(a, b, c, p):
    s1 = cross(vsub(b, a), vsub(p, a))
    s2 = cross(vsub(c, b), vsub(p, b))
    s3 = cross(vsub(a, c), vsub(p, c))
    return s1.sign() >= 0 and s2.sign() >= 0 and s3.sign() >= 0


def _clip_ears(poly, order_offset):
    idx = list(range(poly.n))
    idx = idx[order_offset:] + idx[:order_offset]
    tris = []
    while len(idx) > 3:
        for pos in range(len(idx)):
            i0 = idx[pos - 1]
            i1 = idx[pos]
            i2 = idx[(pos + 1) % len(idx)]
            a, b, c = poly.vertex(i0), poly.vertex(i1), poly.vertex(i2)
            if cross(vsub(b, a), vsub(c, a)).sign() <= 0:
                continue  # reflex or flat corner, not an ear
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                if _in_closed_triangle(a, b, c, poly.vertex(j)):
                    ok = False  # another vertex inside or on the ear
                    break
            if ok:
                tris.append((i0, i1, i2))
                idx.pop(pos)
                break
        else:
            return None
    i0, i1, i2 = idx
    a, b, c = poly.vertex(i0), poly.vertex(i1), poly.vertex(i2)
    if cross(vsub(b, a), vsub(c, a)).sign() <= 0:
        return None
    tris.append((i0, i1, i2))
    return tris


def triangulate_polygon(poly):
    """Fan-free exact triangulation as CCW vertex index triples."""
    for off in range(poly.n):
        tris = _clip_ears(poly, off)
        if tris is not None:
            return tris
    raise SurfaceError("cannot triangulate polygon %s" % poly.id)


class Refinement:
    """Triangulated copy of a surface with edge/word translation tables."""

    def __init__(self, parent):
        self.parent = parent
        polys = []
        gluings = []
        self.to_refined = {}      # parent edge -> refined edge
        self.to_parent = {}       # refined boundary edge -> parent edge
        self.parent_of_tri = {}   # refined pid -> parent pid
        for pid in parent.polygon_order:
            poly = parent.polygons[pid]
            tris = triangulate_polygon(poly)
            chords = {}
            for k, tri in enumerate(tris):
                tid = "%s~%d" % (pid, k)
                self.parent_of_tri[tid] = pid
                polys.append(Polygon(tid, [poly.vertex(i) for i in tri]))
                for e in range(3):
                    a, b = tri[e], tri[(e + 1) % 3]
                    if (b - a) % poly.n == 1:
                        pe = (pid, a % poly.n)
                        self.to_refined[pe] = (tid, e)
                        self.to_parent[(tid, e)] = pe
                    else:
                        chords[(a, b)] = (tid, e)
            for (a, b), edge in chords.items():
                if a < b:
                    gluings.append(EdgeGluing(edge, chords[(b, a)], 1))
        for g in parent.gluings:
            gluings.append(EdgeGluing(self.to_refined[g.edge_a],
                                      self.to_refined[g.edge_b], g.sign))
        self.surface = HalfTranslationSurface(parent.d, polys, gluings)
        self.surface.refinement = self

    def _tri_neighbors(self, tid):
        out = []
        p = self.surface.polygons[tid]
        for e in range(3):
            edge = (tid, e)
            if edge in self.to_parent:
                continue
            out.append((edge, self.surface.partner(edge)[0]))
        return out

    def sleeve(self, entry, exit_edge):
        """Chord crossings from the triangle of `entry` to `exit_edge`'s
        triangle inside one parent polygon, ending with exit_edge."""
        start, goal = entry[0], exit_edge[0]
        prev = {start: None}
        queue = [start]
        while queue:
            tid = queue.pop(0)
            if tid == goal:
                break
            for edge, nxt in self._tri_neighbors(tid):
                if nxt not in prev:
                    prev[nxt] = (tid, edge)
                    queue.append(nxt)
        if goal not in prev:
            raise SurfaceError("disconnected triangulation of a polygon")
        path = []
        tid = goal
        while prev[tid] is not None:
            tid, edge = prev[tid]
            path.append(edge)
        path.reverse()
        return path + [exit_edge]

    def refine_word(self, exits):
        """Refined crossing word of a parent crossing word."""
        out = []
        n = len(exits)
        for k in range(n):
            entry = self.to_refined[self.parent.partner(exits[k - 1])]
            out.extend(self.sleeve(entry, self.to_refined[exits[k]]))
        return out

    def parent_word(self, exits):
        """Parent crossing word of a refined one (chords drop out)."""
        return [self.to_parent[e] for e in exits if e in self.to_parent]


def refinement_of(surface):
    ref = getattr(surface, "_lamina_refinement", None)
    if ref is None:
        ref = Refinement(surface)
        surface._lamina_refinement = ref
    return ref
