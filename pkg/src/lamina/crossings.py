"""Exact crossing counts between flat geodesics on one surface.

Both geodesics live on the triangulated surface, so every bend sits at a
triangulation vertex and a segment meets a triangle boundary only at its
endpoints unless it runs along an edge.  Contacts between the two curves
then fall into four kinds, each decided exactly:

  * transverse crossings strictly inside a triangle: one each;
  * contacts at an edge point where both curves pass straight through:
    one each (they cannot be parallel there without overlapping);
  * passages through a common vertex: the two direction chords either
    interlace in the cyclic order of the vertex link or they do not;
  * shared subpaths: both curves traverse the same run of segments, which
    counts as a single crossing exactly when they leave the run on
    opposite sides.  A run that closes up cyclically means the curves
    coincide and contributes nothing.

Crossing a class pair uses the interior cylinder leaf at half height when
the class fills a positive-height cylinder, so only rigid representatives
ever touch cone points.
"""

from .field import FE
from .straighten import Rot, straighten
from .surface import cross, dot, smul, vadd, vneg, vsub, veq


class CrossingError(RuntimeError):
    pass


# -- link-circle positions --------------------------------------------------
#
# A position on the link circle of a vertex is (corner index in the CCW
# corner cycle, rotation from the corner's first boundary ray), with the
# rotation None meaning angle 0.  Triangle wedges are convexly < pi, so two
# in-wedge rotations compare by the sign of one cross product.

def _vertex_index(surface, tid, p):
    poly = surface.polygons[tid]
    for i in range(poly.n):
        if veq(poly.vertex(i), p):
            return i
    return None


def _vertex_pos(surface, corner, vec):
    ci = surface.corner_class[corner]
    cyc = surface.corner_cycles[ci]
    idx = cyc.index(corner)
    pid, vi = corner
    poly = surface.polygons[pid]
    start = poly.edge_vector(vi)
    end = vneg(poly.edge_vector(vi - 1))
    if cross(end, vec) == 0 and dot(end, vec).sign() > 0:
        return ((idx + 1) % len(cyc), None)
    if cross(start, vec) == 0 and dot(start, vec).sign() > 0:
        return (idx, None)
    if cross(start, vec).sign() <= 0 or cross(vec, end).sign() <= 0:
        raise CrossingError("direction outside its corner wedge")
    return (idx, Rot.between(start, vec))


def _pos_cmp(p, q):
    if p[0] != q[0]:
        return -1 if p[0] < q[0] else 1
    if p[1] is None and q[1] is None:
        return 0
    if p[1] is None:
        return -1
    if q[1] is None:
        return 1
    # both rots lie in one wedge of angle < pi: p precedes q exactly when
    # the cross product of their rotation complexes is positive
    c = p[1].im * q[1].re - p[1].re * q[1].im
    return c.sign()


def _strictly_between(x, a, b):
    """x lies strictly inside the CCW arc from a to b on the link circle."""
    if _pos_cmp(a, b) == 0:
        return False
    if _pos_cmp(a, b) < 0:
        return _pos_cmp(a, x) < 0 and _pos_cmp(x, b) < 0
    return _pos_cmp(a, x) < 0 or _pos_cmp(x, b) < 0


def _chords_interlace(a_in, a_out, b_in, b_out):
    return (_strictly_between(b_in, a_in, a_out) !=
            _strictly_between(b_out, a_in, a_out))


# -- traversal traces -------------------------------------------------------

def _canonical_seg(surface, seg):
    """Map a segment running along a glued edge into the smaller-gid chart."""
    tid, a, b = seg
    poly = surface.polygons[tid]
    d = vsub(b, a)
    for e in range(poly.n):
        va = poly.vertex(e)
        ev = poly.edge_vector(e)
        if cross(d, ev) == 0 and cross(ev, vsub(a, va)) == 0:
            edge = (tid, e)
            part = surface.partner(edge)
            if surface.edge_gid[edge] > surface.edge_gid[part]:
                s, t = surface.gluing_map(edge)
                fs = FE(s, d=surface.d)
                return (part[0], vadd(smul(fs, a), t), vadd(smul(fs, b), t))
            return seg
    return seg


class _Trace:
    """Cyclic segment list of a geodesic with per-node branch data."""

    def __init__(self, geo):
        self.surface = geo.surface
        self.segs = [_canonical_seg(self.surface, s)
                     for s in geo.local_segments()]
        self.n = len(self.segs)
        if self.n == 0:
            raise CrossingError("geodesic with no segments")
        self.nodes = []
        for i in range(self.n):
            tid0, a0, b0 = self.segs[i]
            tid1, a1, b1 = self.segs[(i + 1) % self.n]
            rec = {
                "in": (tid0, b0, vsub(a0, b0)),    # ray back along seg i
                "out": (tid1, a1, vsub(b1, a1)),   # ray out along seg i+1
            }
            vi = _vertex_index(self.surface, tid0, b0)
            if vi is not None:
                rec["vclass"] = self.surface.corner_class[(tid0, vi)]
            self.nodes.append(rec)

    def branch_pos(self, node_id, which):
        """Link-circle position of a node's in or out ray (vertex nodes)."""
        tid, p, vec = self.nodes[node_id % self.n][which]
        vi = _vertex_index(self.surface, tid, p)
        if vi is None:
            raise CrossingError("branch ray at a non-vertex point")
        return _vertex_pos(self.surface, (tid, vi), vec)


def _ray_pos(surface, tid, p, vec):
    vi = _vertex_index(surface, tid, p)
    if vi is None:
        raise CrossingError("ray base is not a vertex")
    return _vertex_pos(surface, (tid, vi), vec)


# -- main counter -----------------------------------------------------------

def _collect_matches_and_contacts(A, B):
    """Scan same-chart segment pairs.

    Returns (matches, contacts): matches is a set of (i, j, dir) with
    segment i of A equal to segment j of B (dir -1 when reversed); contacts
    is a set of ((akey, bkey)) point contacts away from vertices, keys
    ("n", node id) or ("s", segment id).
    """
    byA = {}
    for i, s in enumerate(A.segs):
        byA.setdefault(s[0], []).append(i)
    matches = set()
    contacts = set()
    one = FE(1)
    for j, (tid, aB, bB) in enumerate(B.segs):
        dB = vsub(bB, aB)
        for i in byA.get(tid, ()):
            _, aA, bA = A.segs[i]
            dA = vsub(bA, aA)
            den = cross(dA, dB)
            w = vsub(aB, aA)
            if den == 0:
                if cross(dA, w) != 0:
                    continue  # parallel, different lines
                if veq(aA, aB) and veq(bA, bB):
                    matches.add((i, j, 1))
                elif veq(aA, bB) and veq(bA, aB):
                    matches.add((i, j, -1))
                # collinear end-to-end touches happen at vertices only and
                # are picked up by the passage pairing
                continue
            t = cross(w, dB) / den
            if t < 0 or t > one:
                continue
            u = cross(w, dA) / den
            if u < 0 or u > one:
                continue
            p = vadd(aA, smul(t, dA))
            if _vertex_index(A.surface, tid, p) is not None:
                continue  # decided on the vertex link
            if t == 0:
                akey = ("n", (i - 1) % A.n)
            elif t == one:
                akey = ("n", i)
            else:
                akey = ("s", i)
            if u == 0:
                bkey = ("n", (j - 1) % B.n)
            elif u == one:
                bkey = ("n", j)
            else:
                bkey = ("s", j)
            contacts.add((akey, bkey))
    return matches, contacts


def _runs(A, B, matches):
    """Group matches into maximal shared runs.

    Returns (runs, consumed): each run is (pieces, dir) with pieces a list
    of (i, j); consumed is the set of (A node, B node) pairs interior to or
    bounding a run.  A run that closes up cyclically means the two
    traversals follow the same geodesic; it is dropped (no crossing), while
    any remaining contacts still count, so a class against itself yields
    twice its self-crossing number.
    """
    def succ(m):
        i, j, d = m
        return ((i + 1) % A.n, (j + d) % B.n, d)

    def pred(m):
        i, j, d = m
        return ((i - 1) % A.n, (j - d) % B.n, d)

    runs = []
    consumed = set()
    visited = set()
    for m0 in sorted(matches):
        if m0 in visited:
            continue
        start = m0
        closed = False
        while pred(start) in matches:
            start = pred(start)
            if start == m0:
                closed = True
                break
        pieces = [start]
        visited.add(start)
        if closed:
            # the traversals follow one geodesic along the whole cycle:
            # every node pair on it is shared and none is a crossing
            cur = start
            while True:
                visited.add(cur)
                _mark(consumed, A, B, cur)
                cur = succ(cur)
                if cur == start:
                    break
            continue
        while succ(pieces[-1]) in matches:
            pieces.append(succ(pieces[-1]))
            visited.add(pieces[-1])
        for m in pieces:
            _mark(consumed, A, B, m)
        runs.append(([(i, j) for (i, j, _) in pieces], start[2]))
    return runs, consumed


def _mark(consumed, A, B, match):
    i, j, d = match
    if d == 1:
        consumed.add(((i - 1) % A.n, (j - 1) % B.n))
        consumed.add((i % A.n, j % B.n))
    else:
        consumed.add(((i - 1) % A.n, j % B.n))
        consumed.add((i % A.n, (j - 1) % B.n))


def _run_crosses(A, B, pieces, d):
    """Whether a maximal shared run is a crossing (opposite exit sides)."""
    S = A.surface
    i0, j0 = pieces[0]
    i1, j1 = pieces[-1]
    # entry end: point aA_i0; sigma points into the run, alpha along A's
    # branch away from it, beta along B's
    tid, aA, bA = A.segs[i0]
    sigma0 = _ray_pos(S, tid, aA, vsub(bA, aA))
    alpha0 = A.branch_pos(i0 - 1, "in")
    if d == 1:
        beta0 = B.branch_pos(j0 - 1, "in")
    else:
        beta0 = B.branch_pos(j0, "out")
    s0 = _strictly_between(beta0, sigma0, alpha0)
    # exit end: point bA_i1
    tid, aA, bA = A.segs[i1]
    sigma1 = _ray_pos(S, tid, bA, vsub(aA, bA))
    alpha1 = A.branch_pos(i1, "out")
    if d == 1:
        beta1 = B.branch_pos(j1, "out")
    else:
        beta1 = B.branch_pos(j1 - 1, "in")
    s1 = _strictly_between(beta1, sigma1, alpha1)
    return s0 == s1


def count_crossings(ga, gb):
    """Exact number of transverse crossings between two flat geodesics.

    Both geodesics must come from straighten on the same surface.  Two
    traversals of the same unoriented geodesic count 0; otherwise shared
    subpaths count once when the curves swap sides along them.
    """
    if ga.surface is not gb.surface:
        raise CrossingError("geodesics live on different surfaces")
    A, B = _Trace(ga), _Trace(gb)
    matches, contacts = _collect_matches_and_contacts(A, B)
    runs, consumed = _runs(A, B, matches)
    total = 0
    for pieces, d in runs:
        if _run_crosses(A, B, pieces, d):
            total += 1
    for akey, bkey in contacts:
        if akey[0] == "n" and bkey[0] == "n" and (akey[1], bkey[1]) in consumed:
            continue
        total += 1
    # passages through a common vertex
    for i, na in enumerate(A.nodes):
        if "vclass" not in na:
            continue
        a_in = A.branch_pos(i, "in")
        a_out = A.branch_pos(i, "out")
        for j, nb in enumerate(B.nodes):
            if nb.get("vclass") != na["vclass"]:
                continue
            if (i, j) in consumed:
                continue
            b_in = B.branch_pos(j, "in")
            b_out = B.branch_pos(j, "out")
            if _chords_interlace(a_in, a_out, b_in, b_out):
                total += 1
    return total


# -- class-level interface --------------------------------------------------

def flat_representative(surface, curve):
    """Geodesic used for crossing counts: the interior leaf at half height
    for a cylinder class, the rigid representative otherwise."""
    geo, is_cyl = straighten(surface, curve)
    if is_cyl:
        return geo.cylinder.middle_leaf()
    return geo


def interlaced_flat(surface, a, b):
    """Whether two flat geodesics cross essentially (flat certificate)."""
    return count_crossings(a, b) > 0


def geometric_intersection_flat(surface, a, b):
    """Geometric intersection number of two primitive classes, flat side."""
    ga = flat_representative(surface, a)
    gb = flat_representative(surface, b)
    return count_crossings(ga, gb)
