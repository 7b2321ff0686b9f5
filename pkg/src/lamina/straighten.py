"""Straighten closed curves to flat geodesics; maximal flat cylinders.

The straightening loop develops one period of the (cyclically reduced)
crossing word, looks for a straight representative (a line in the corridor,
giving a flat cylinder), and otherwise pulls the curve taut with an exact
funnel pass over several developed periods.  Corner certificates at cone
points are exact: an angle is compared with multiples of pi through the
product of exact rotation complexes, floats only count full turns.  A corner
with a side angle below pi re-routes the word around the cone point and the
loop repeats; each rewrite strictly shortens the representative or shortens
the word, so the loop terminates.
"""

import math
from fractions import Fraction

from .field import FE, FieldElement
from .surface import cross, dot, smul, vadd, vneg, vsub, veq
from .develop import Placement, develop, identity_placement
from .curves import CombinatorialCurve
from .refine import refinement_of


class NullHomotopicError(ValueError):
    pass


class StraightenError(RuntimeError):
    pass


TWO_PI = 2 * math.pi


def reduce_word(surface, exits):
    """Cyclic free reduction: cancel immediate backtracks (e, partner(e))."""
    w = list(exits)
    changed = True
    while changed and w:
        changed = False
        n = len(w)
        for i in range(n):
            j = (i + 1) % n
            if j != i and w[j] == surface.partner(w[i]):
                for idx in sorted((i, j), reverse=True):
                    w.pop(idx)
                changed = True
                break
    return w


# -- exact angle bookkeeping ----------------------------------------------

class Rot:
    """A rotation by the CCW angle from vector u to vector v, in [0, 2pi).

    Carries the exact complex (re, im) = (dot, cross) and a float angle.
    """

    __slots__ = ("re", "im", "angle")

    def __init__(self, re, im):
        self.re = re
        self.im = im
        a = math.atan2(float(im), float(re))
        if a < 0:
            a += TWO_PI
        self.angle = a

    @classmethod
    def between(cls, u, v):
        return cls(dot(u, v), cross(u, v))


def compare_angle_sum(pieces, m):
    """Exact sign of (sum of piece angles) - m*pi.

    Floats determine the number of full turns; the exact product of the
    rotation complexes settles the residue.
    """
    total = sum(p.angle for p in pieces)
    re, im = FE(1), FE(0)
    for p in pieces:
        re, im = re * p.re - im * p.im, re * p.im + im * p.re
    arg = math.atan2(float(im), float(re))
    if arg < 0:
        arg += TWO_PI
    wraps = round((total - arg) / TWO_PI)
    # theta = 2*pi*wraps + arg(z) with arg in [0, 2pi)
    if 2 * wraps > m:
        return 1
    if 2 * wraps + 2 < m:
        return -1
    r = m - 2 * wraps  # 0, 1 or 2
    s = im.sign()
    if r == 0:
        # compare arg with 0
        if s == 0 and re.sign() > 0:
            return 0
        return 1
    if r == 1:
        # compare arg with pi
        if s > 0:
            return -1
        if s < 0:
            return 1
        return 0 if re.sign() < 0 else (-1 if re.sign() > 0 else 0)
    # r == 2: arg < 2*pi always, equality impossible
    return -1


# -- taut paths through a portal chain ------------------------------------
#
# The corridor of a developed word may be immersed rather than embedded (a
# -Id holonomy folds it onto itself), so a planar funnel is unreliable.
# Instead the crossing points are relaxed locally (each node moves to the
# straightest position on its portal, clamped to the portal's ends); the
# clamp pattern stabilizes quickly and the exact crossing points are then
# reconstructed from the clamped cone points alone.

_CLAMP_EPS = 1e-9


def _relax_states(portals_float, start, end, sweeps=1500, tol=1e-13):
    """Float relaxation of a transversal path; returns clamp states.

    portals_float: [(ax, ay, bx, by)]; returns a list with 'A', 'B' or 'I'
    per portal, or None if the pattern never settles.
    """
    m = len(portals_float)
    xs = []
    for k, (ax, ay, bx, by) in enumerate(portals_float):
        xs.append(((ax + bx) / 2.0, (ay + by) / 2.0))
    prev_states = None
    stable = 0
    for _ in range(sweeps):
        moved = 0.0
        for k in range(m):
            p = xs[k - 1] if k > 0 else start
            q = xs[k + 1] if k + 1 < m else end
            ax, ay, bx, by = portals_float[k]
            ex, ey = bx - ax, by - ay
            dx, dy = q[0] - p[0], q[1] - p[1]
            den = dx * ey - dy * ex
            if abs(den) < 1e-15:
                # degenerate: project the midpoint of pq onto the portal
                mx, my = (p[0] + q[0]) / 2.0, (p[1] + q[1]) / 2.0
                ee = ex * ex + ey * ey
                t = ((mx - ax) * ex + (my - ay) * ey) / ee if ee else 0.0
            else:
                t = ((ax - p[0]) * dy - (ay - p[1]) * dx) / -den
            if t < 0.0:
                t = 0.0
            elif t > 1.0:
                t = 1.0
            nx, ny = ax + t * ex, ay + t * ey
            moved = max(moved, abs(nx - xs[k][0]) + abs(ny - xs[k][1]))
            xs[k] = (nx, ny)
        states = []
        for k, (ax, ay, bx, by) in enumerate(portals_float):
            ee = max(abs(bx - ax) + abs(by - ay), 1e-15)
            da = abs(xs[k][0] - ax) + abs(xs[k][1] - ay)
            db = abs(xs[k][0] - bx) + abs(xs[k][1] - by)
            if da / ee < _CLAMP_EPS:
                states.append("A")
            elif db / ee < _CLAMP_EPS:
                states.append("B")
            else:
                states.append("I")
        if states == prev_states and moved < tol:
            stable += 1
            if stable >= 3:
                return states
        else:
            stable = 0
        prev_states = states
    return None


def _reconstruct_nodes(segs, start, end, states):
    """Exact crossing points for a clamp pattern, or the first violation.

    Returns (nodes, None) on success or (None, (k, side)) when portal k's
    crossing point escapes the portal toward `side` and must be clamped.
    """
    m = len(segs)
    anchors = [(-1, start)]
    for k, st in enumerate(states):
        if st == "A":
            anchors.append((k, segs[k][0]))
        elif st == "B":
            anchors.append((k, segs[k][1]))
    anchors.append((m, end))
    nodes = [None] * m
    for (i, p), (j, q) in zip(anchors, anchors[1:]):
        if 0 <= i < m:
            nodes[i] = p
        chunk = vsub(q, p)
        last_t = None
        for k in range(i + 1, j):
            a, b = segs[k]
            e = vsub(b, a)
            den = cross(chunk, e)
            if den == 0:
                # chunk parallel to the portal: clamp to the nearer end
                da = abs(cross(chunk, vsub(a, p)))
                db = abs(cross(chunk, vsub(b, p)))
                if da == db:
                    # collinear: nearer means along the chord, not across it
                    cc = dot(chunk, chunk)
                    def gap(pt):
                        if cc == 0:
                            return dot(vsub(pt, p), vsub(pt, p))
                        s = dot(vsub(pt, p), chunk)
                        if s < 0:
                            return -s
                        if s > cc:
                            return s - cc
                        return FE(0)
                    return None, (k, "A" if gap(a) <= gap(b) else "B")
                return None, (k, "A" if da < db else "B")
            t = cross(vsub(a, p), e) / den
            u = cross(vsub(a, p), chunk) / den
            if u < 0:
                return None, (k, "A")
            if u > FE(1):
                return None, (k, "B")
            if t < 0 or t > FE(1) or (last_t is not None and t < last_t):
                side = "A" if float(u) < 0.5 else "B"
                return None, (k, side)
            last_t = t
            nodes[k] = vadd(p, smul(t, chunk))
    return nodes, None


def _clamped_runs(segs, states):
    """Maximal runs of consecutive clamped portals sharing one point."""
    runs = []
    k = 0
    m = len(segs)
    while k < m:
        if states[k] == "I":
            k += 1
            continue
        v = segs[k][0] if states[k] == "A" else segs[k][1]
        side = "R" if states[k] == "A" else "L"
        b = k
        while b + 1 < m and states[b + 1] != "I":
            w = segs[b + 1][0] if states[b + 1] == "A" else segs[b + 1][1]
            if not veq(w, v):
                break
            b += 1
        runs.append((k, b, v, side))
        k = b + 1
    return runs


def _taut_corridor(surface, multi, segs, start, end, states, cap=500):
    """Exact active-set tautening of an anchored transversal.

    segs[k] is portal k+1 of the multi chain.  Clamps portals whose exact
    crossing escapes, unclamps cone points whose corridor-side angle drops
    below pi; the exact angle certificates drive both decisions.
    """
    states = list(states)
    m = len(segs)
    for _ in range(cap):
        nodes, viol = _reconstruct_nodes(segs, start, end, states)
        if viol is not None:
            k, side = viol
            if states[k] == side:
                return None, None  # no progress possible
            states[k] = side
            continue
        bad = None
        for (a, b, v, side) in _clamped_runs(segs, states):
            u_in = _dir_from_nodes(nodes, start, end, a, -1, v)
            u_out = _dir_from_nodes(nodes, start, end, b, +1, v)
            if u_in is None or u_out is None:
                return None, None
            try:
                pieces, _ = _sector_pieces(surface, multi, a + 1, b + 1, v,
                                           side, u_in, u_out)
            except StraightenError:
                return None, None
            if compare_angle_sum(pieces, 1) < 0:
                bad = (a, b)
                break
        if bad is None:
            return nodes, states
        for k in range(bad[0], bad[1] + 1):
            states[k] = "I"
    return None, None


def _dir_from_nodes(nodes, start, end, k, step, v):
    """Direction of the path piece next to node k, skipping repeats of v."""
    m = len(nodes)
    i = k
    while True:
        i += step
        if i < 0:
            p = start
        elif i >= m:
            p = end
        else:
            p = nodes[i]
        if not veq(p, v):
            return vsub(v, p) if step < 0 else vsub(p, v)
        if i < 0 or i >= m:
            return None


# -- geodesics and cylinders ----------------------------------------------

class PeriodicFlatGeodesic:
    """A closed flat geodesic as one developed period plus its deck closure.

    nodes[j] is the crossing point of portal j (exact, developed chart);
    pivot runs mark where the path passes through a placed cone point.
    """

    def __init__(self, surface, word, chain, nodes, pivots, holonomy):
        self.surface = surface
        self.word = tuple(word)
        self.chain = chain
        self.nodes = list(nodes)
        self.pivots = pivots      # list of dicts (see _certify_pivots)
        self.holonomy = holonomy
        self.cylinder = None      # set by straighten for straight families

    # ---- measurements ----------------------------------------------

    def segment_vectors(self):
        """Displacement of each nonzero straight piece, in chain order."""
        n = len(self.nodes)
        out = []
        for j in range(n):
            a = self.nodes[j]
            b = self.nodes[(j + 1) % n] if j + 1 < n else None
            if b is None:
                b = self.holonomy.apply(self.nodes[0])
            v = vsub(b, a)
            if v[0] != 0 or v[1] != 0:
                out.append(v)
        return out

    def length_float(self):
        return sum(math.hypot(float(v[0]), float(v[1]))
                   for v in self.segment_vectors())

    def length2(self):
        """Exact squared length when the total length lies in the field."""
        total = FE(0, d=self.surface.d)
        for v in self.segment_vectors():
            l2 = dot(v, v)
            root = l2.sqrt()
            if root is None:
                return None
            total = total + root
        return total * total

    def local_segments(self):
        """[(polygon id, local start, local end)] of the nonzero pieces.

        The piece after portal j lies in the polygon of chain step j+1 (the
        step after the crossing); the closing piece wraps through step 0.
        """
        n = len(self.nodes)
        out = []
        for j in range(n):
            a = self.nodes[j]
            if j + 1 < n:
                b = self.nodes[j + 1]
                pid, g = self.chain.steps[j + 1]
            else:
                b = self.holonomy.apply(self.nodes[0])
                pid, g0 = self.chain.steps[0]
                g = self.holonomy.compose(g0)
            if veq(a, b):
                continue
            inv = g.inverse()
            out.append((pid, inv.apply(a), inv.apply(b)))
        return out

    def is_point(self):
        return not self.segment_vectors()

    @property
    def refinement(self):
        return getattr(self.surface, "refinement", None)

    def parent_word(self):
        """Crossing word through the original (untriangulated) polygons."""
        ref = self.refinement
        return tuple(ref.parent_word(self.word)) if ref else self.word

    def parent_segments(self):
        """Local segments in original polygon charts, collinear runs merged.

        Triangle charts coincide with their parent polygon's chart, so
        pieces that continue straight across a chord concatenate exactly.
        """
        segs = self.local_segments()
        ref = self.refinement
        if ref is None:
            return segs
        out = []
        for tid, a, b in segs:
            pid = ref.parent_of_tri[tid]
            if out and out[-1][0] == pid and veq(out[-1][2], a):
                d0 = vsub(out[-1][2], out[-1][1])
                d1 = vsub(b, a)
                if cross(d0, d1) == 0 and dot(d0, d1).sign() > 0:
                    out[-1] = (pid, out[-1][1], b)
                    continue
            out.append((pid, a, b))
        if len(out) > 1 and out[0][0] == out[-1][0] and veq(out[-1][2], out[0][1]):
            d0 = vsub(out[-1][2], out[-1][1])
            d1 = vsub(out[0][2], out[0][1])
            if cross(d0, d1) == 0 and dot(d0, d1).sign() > 0:
                out[0] = (out[0][0], out[-1][1], out[0][2])
                out.pop()
        return out

    def canonical_marking(self):
        """Key for comparing leaves: multiset of local pieces, unoriented."""
        fwd = []
        for pid, a, b in self.parent_segments():
            fwd.append((pid, _pt_key(a), _pt_key(b)))
            fwd.append((pid, _pt_key(b), _pt_key(a)))
        return tuple(sorted(fwd))


def _pt_key(p):
    return (p[0].a, p[0].b, p[1].a, p[1].b)


class FlatCylinder:
    """Maximal family of parallel closed geodesics in one free homotopy class.

    height L = 0 means the class has a unique flat representative.  For
    L > 0 the anchor boundary leaf (t = 0) is the one with the smaller
    saddle-connection key; leaf_at(t) develops the leaf at transverse
    distance t from the anchor.
    """

    def __init__(self, surface, core, height2, circumference2, boundary,
                 straight_data=None):
        self.surface = surface
        self.core = core
        self.height2 = height2                # exact squared height
        self.circumference2 = circumference2  # exact squared circumference
        self.boundary = boundary              # list of boundary-leaf geodesics
        self._straight = straight_data        # (word, chain, T, o_anchor, o_far, |T| or None)

    @property
    def height(self):
        """Exact height when it lies in the coordinate field, else None."""
        return self.height2.sqrt()

    @property
    def height_float(self):
        return math.sqrt(float(self.height2))

    @property
    def circumference_float(self):
        return math.sqrt(float(self.circumference2))

    def leaf_at_fraction(self, f):
        """Straight leaf at exact transverse fraction f in [0, 1] of the
        height, measured from the anchor boundary leaf."""
        f = FE(f, d=self.surface.d)
        if self._straight is None:
            if f != 0:
                raise ValueError("height-0 cylinder has a single leaf")
            return self.core
        if f < 0 or f > FE(1):
            raise ValueError("leaf fraction outside [0, 1]")
        word, chain, T, o_anchor, o_far, _ = self._straight
        offset = o_anchor + f * (o_far - o_anchor)
        return _straight_leaf(self.surface, word, chain, T, offset)

    def leaf_at(self, t):
        """Straight leaf at exact transverse distance t from the anchor."""
        if self._straight is None:
            if t != 0:
                raise ValueError("height-0 cylinder has a single leaf")
            return self.core
        h = self.height
        if h is None:
            raise StraightenError(
                "cylinder height is not expressible in the field; "
                "use leaf_at_fraction")
        if h == 0:
            raise ValueError("height-0 cylinder has a single leaf")
        return self.leaf_at_fraction(FE(t, d=self.surface.d) / h)

    def middle_leaf(self):
        return self.leaf_at_fraction(FE(1) / FE(2))


def _line_portal_point(T, offset, a, b):
    """Point on segment [a,b] where cross(T, p) == offset, or None."""
    oa, ob = cross(T, a), cross(T, b)
    if oa == ob:
        return None if oa != offset else a
    t = (offset - oa) / (ob - oa)
    if t < 0 or t > FE(1):
        return None
    return vadd(a, smul(t, vsub(b, a)))


def _straight_leaf(surface, word, chain, T, offset):
    nodes = []
    for (a, b), _ in chain.portals:
        p = _line_portal_point(T, offset, a, b)
        if p is None:
            raise StraightenError("leaf offset misses a portal")
        nodes.append(p)
    geo = PeriodicFlatGeodesic(surface, word, chain, nodes, [], chain.holonomy)
    return geo


def _portal_offsets(chain, T):
    los, his = [], []
    for (a, b), _ in chain.portals:
        oa, ob = cross(T, a), cross(T, b)
        los.append(min(oa, ob))
        his.append(max(oa, ob))
    return max(los), min(his)


def _straight_window(surface, word):
    """Try the straight-line case; returns (chain, T, W_lo, W_hi) or None."""
    curve = CombinatorialCurve(surface, word)
    chain = develop(surface, curve, 1)
    hol = chain.holonomy
    if hol.s != 1:
        return None
    T = hol.t
    if T[0] == 0 and T[1] == 0:
        return None
    w_lo, w_hi = _portal_offsets(chain, T)
    if w_lo > w_hi:
        return None
    # crossing parameters must increase strictly along the line
    offset = (w_lo + w_hi) / FE(2)
    params = []
    for (a, b), _ in chain.portals:
        p = _line_portal_point(T, offset, a, b)
        if p is None:
            return None
        params.append(dot(T, p))
    for i in range(1, len(params)):
        if not params[i] > params[i - 1]:
            return None
    return chain, T, w_lo, w_hi


# -- pivot analysis --------------------------------------------------------

def _hol_power(chain, q):
    g = identity_placement(chain.surface.d)
    step = chain.holonomy if q >= 0 else chain.holonomy.inverse()
    for _ in range(abs(q)):
        g = g.compose(step)
    return g


def _wrapped_step(chain, k):
    """Chain step k extended periodically by the holonomy."""
    n = len(chain.steps)
    q, r = divmod(k, n)
    pid, g = chain.steps[r]
    if q == 0:
        return pid, g
    return pid, _hol_power(chain, q).compose(g)


def _wrapped_portal(chain, k):
    n = len(chain.steps)
    q, r = divmod(k, n)
    (a, b), e = chain.portals[r]
    if q == 0:
        return (a, b), e
    h = _hol_power(chain, q)
    return (h.apply(a), h.apply(b)), e


def _corner_at(surface, chain, step_index, v):
    """(vertex index, placement) of the placed corner of a chain step at v."""
    pid, g = _wrapped_step(chain, step_index)
    inv = g.inverse()
    local = inv.apply(v)
    poly = surface.polygons[pid]
    for i in range(poly.n):
        if veq(poly.vertex(i), local):
            return i, g
    return None


def _corner_rays(surface, chain, step_index, vi):
    """Directions from the corner vertex along its two edges, placed."""
    pid, g = _wrapped_step(chain, step_index)
    poly = surface.polygons[pid]
    s = FE(g.s)
    ray_out = smul(s, poly.edge_vector(vi))          # along outgoing edge
    ray_in = smul(s, vneg(poly.edge_vector(vi - 1)))  # toward previous vertex
    return ray_out, ray_in


def _pivot_run(surface, chain, j, v, nodes, n_total):
    """Maximal contiguous portal range [a, b] around j whose crossing point
    is v and whose placed portal has v as an endpoint (extended periodically
    by the holonomy)."""
    hol = chain.holonomy
    def touches(k):
        if not veq(_node_at(nodes, hol, k, n_total), v):
            return False
        (pa, pb), _ = _wrapped_portal(chain, k)
        return veq(pa, v) or veq(pb, v)
    a = j
    while a > j - n_total and touches(a - 1):
        a -= 1
    b = j
    while b < j + n_total and touches(b + 1):
        b += 1
    return a, b


def _sector_pieces(surface, chain, a, b, v, side, u_in, u_out):
    """Rotation pieces of the corridor-side angle at pivot v.

    The sector is swept from the backward direction -u_in through the shared
    portal rays at v to the outgoing direction u_out.  side 'R' winds
    clockwise (sector on the traveler's left), side 'L' counterclockwise.
    """
    corners = []
    for step in range(a, b + 2):
        hit = _corner_at(surface, chain, step, v)
        if hit is None:
            raise StraightenError("pivot is not a polygon vertex")
        vi, _ = hit
        corners.append((step, vi))
    rays = [_corner_rays(surface, chain, step, vi) for step, vi in corners]
    back = vneg(u_in)
    pieces = []
    if side == "L":
        # CCW: corner j is left through its incoming-edge ray
        for k in range(len(rays) - 1):
            shared_a = rays[k][1]
            shared_b = rays[k + 1][0]
            if cross(shared_a, shared_b) != 0 or dot(shared_a, shared_b).sign() <= 0:
                raise StraightenError("inconsistent pivot rays")
        pieces.append(Rot.between(back, rays[0][1]))
        for k in range(1, len(rays) - 1):
            pieces.append(Rot.between(rays[k][0], rays[k][1]))
        pieces.append(Rot.between(rays[-1][0], u_out))
    else:
        # CW: corner j is left through its outgoing-edge ray
        for k in range(len(rays) - 1):
            shared_a = rays[k][0]
            shared_b = rays[k + 1][1]
            if cross(shared_a, shared_b) != 0 or dot(shared_a, shared_b).sign() <= 0:
                raise StraightenError("inconsistent pivot rays")
        pieces.append(Rot.between(rays[0][0], back))
        for k in range(1, len(rays) - 1):
            pieces.append(Rot.between(rays[k][0], rays[k][1]))
        pieces.append(Rot.between(u_out, rays[-1][1]))
    return pieces, corners


def _vertex_multiple(surface, pid, vi):
    ci = surface.corner_class[(pid, vi % surface.polygons[pid].n)]
    k = surface.vertex_angle_multiple(ci)
    if k is None:
        raise StraightenError("vertex with non-integer cone angle")
    return k, ci


def _complementary_arc_word(surface, chain, corners, side):
    """Exit-edge word re-routing the passage around the pivot vertex.

    corners are the chain corners (step, vertex index) of the current
    passage; the rewrite walks the complementary arc of the vertex's corner
    cycle from the entry corner to the exit corner.
    """
    first_step, first_vi = corners[0]
    last_step, last_vi = corners[-1]
    c_first = (_wrapped_step(chain, first_step)[0], first_vi)
    c_last = (_wrapped_step(chain, last_step)[0], last_vi)
    # current passage walks CCW through the cycle for side 'L', CW for 'R';
    # the complementary arc walks the other way
    word = []
    if side == "L":
        # walk CW from c_first to c_last: cross outgoing edges
        cur = c_first
        guard = 0
        while cur != c_last:
            pid, vi = cur
            word.append((pid, vi % surface.polygons[pid].n))
            # previous corner CCW = the corner across the outgoing edge
            cur = _prev_corner_ccw(surface, cur)
            guard += 1
            if guard > 10000:
                raise StraightenError("corner cycle walk diverged")
    else:
        # walk CCW from c_first to c_last: cross incoming edges
        cur = c_first
        guard = 0
        while cur != c_last:
            pid, vi = cur
            n = surface.polygons[pid].n
            word.append((pid, (vi - 1) % n))
            cur = surface.next_corner_ccw(cur)
            guard += 1
            if guard > 10000:
                raise StraightenError("corner cycle walk diverged")
    return word


def _prev_corner_ccw(surface, corner):
    pid, vi = corner
    n = surface.polygons[pid].n
    e = (pid, vi % n)
    q, j = surface.partner(e)
    return (q, (j + 1) % surface.polygons[q].n)


def _certify_pivots(surface, chain, nodes, n):
    """Check the geodesic angle condition at every pivot of a node cycle.

    Returns (ok, pivots, rewrite) where pivots is the certificate list and
    rewrite, when ok is False, describes the word surgery for the first
    violated corner: (word_start, word_len, replacement exits).
    """
    hol = chain.holonomy
    pivots = []
    covered = set()
    j = 0
    while j < n:
        if j in covered:
            j += 1
            continue
        v = nodes[j]
        (pa, pb), _ = chain.portals[j]
        at_a, at_b = veq(v, pa), veq(v, pb)
        if not (at_a or at_b):
            j += 1
            continue
        side = "R" if at_a else "L"
        a, b = _pivot_run(surface, chain, j, v, nodes, n)
        covered.update(k % n for k in range(a, b + 1))
        # incoming direction: from the previous distinct node
        u_in = _dir_to(nodes, hol, a, -1, v, n)
        u_out = _dir_to(nodes, hol, b, +1, v, n)
        if u_in is None or u_out is None:
            raise StraightenError("degenerate pivot context")
        pieces, corners = _sector_pieces(surface, chain, a, b, v, side, u_in, u_out)
        pid0, vi0 = chain.steps[corners[0][0]][0], corners[0][1]
        k, ci = _vertex_multiple(surface, pid0, vi0)
        sec_vs_pi = compare_angle_sum(pieces, 1)
        out_vs_pi = -compare_angle_sum(pieces, k - 1)  # other side = k*pi - sector
        if sec_vs_pi < 0:
            # the extracted period was not taut; the caller retries with a
            # longer corridor
            return False, None, None
        if out_vs_pi < 0:
            # the path overwinds the cone point: re-route the passage along
            # the complementary arc of the vertex link
            repl = _complementary_arc_word(surface, chain, corners, side)
            return False, None, (a, b - a + 1, repl)
        pivots.append({
            "portal_range": (a, b),
            "side": side,
            "point": v,
            "vertex_class": ci,
            "k": k,
            "sector_vs_pi": sec_vs_pi,
            "outer_vs_pi": out_vs_pi,
            "corners": corners,
        })
        j += 1
    return True, pivots, None


def _dir_to(nodes, hol, j, step, v, n):
    """Direction of the path piece adjacent to the pivot run at portal j."""
    k = j
    for _ in range(2 * n + 2):
        k += step
        p = _node_at(nodes, hol, k, n)
        if not veq(p, v):
            return vsub(v, p) if step < 0 else vsub(p, v)
        if abs(k - j) > 2 * n:
            break
    return None


def _node_at(nodes, hol, k, n):
    if 0 <= k < n:
        return nodes[k]
    if k >= n:
        p = _node_at(nodes, hol, k - n, n)
        return hol.apply(p)
    p = _node_at(nodes, hol, k + n, n)
    return hol.inverse().apply(p)


# -- main entry points -----------------------------------------------------

def _taut_period(surface, word, copies):
    """Tighten an anchored transversal over `copies` developed periods and
    return the middle period as (single chain, node list), or None if the
    middle period is not yet deck-consistent."""
    curve = CombinatorialCurve(surface, word)
    n = len(word)
    multi = develop(surface, curve, copies)
    gamma = develop(surface, curve, 1).holonomy
    (a0, b0), _ = multi.portals[0]
    start = vadd(a0, smul(FE(Fraction(1, 2)), vsub(b0, a0)))
    end = start
    for _ in range(copies):
        end = gamma.apply(end)
    # transversal crosses portals 1 .. copies*n-1 between the anchors
    segs = [multi.portals[k][0] for k in range(1, copies * n)]
    portals_f = [(float(a[0]), float(a[1]), float(b[0]), float(b[1]))
                 for a, b in segs]
    states = _relax_states(portals_f, (float(start[0]), float(start[1])),
                           (float(end[0]), float(end[1])))
    if states is None:
        states = ["I"] * len(segs)
    nodes_all, _ = _taut_corridor(surface, multi, segs, start, end, states)
    if nodes_all is None:
        return None
    # nodes_all[i] is the crossing of portal i+1
    def node(k):
        return nodes_all[k - 1]
    mid = copies // 2
    for j in range(n):
        p, q = node(mid * n + j), node((mid + 1) * n + j)
        if not veq(gamma.apply(p), q):
            return None
    invp = identity_placement(surface.d)
    ginv = gamma.inverse()
    for _ in range(mid):
        invp = invp.compose(ginv)
    single = develop(surface, curve, 1)
    nodes = [invp.apply(node(mid * n + j)) for j in range(n)]
    return single, nodes


def _segment_portal_point(p, q, a, b):
    """Intersection of segment pq with closed segment ab, or None."""
    d1 = vsub(q, p)
    d2 = vsub(b, a)
    den = cross(d1, d2)
    if den == 0:
        # parallel: accept an endpoint lying on pq
        for cand in (a, b):
            if cross(d1, vsub(cand, p)) == 0:
                t = dot(vsub(cand, p), d1)
                if FE(0) <= t <= dot(d1, d1):
                    return cand
        return None
    t = cross(vsub(a, p), d2) / den
    u = cross(vsub(a, p), d1) / den
    if FE(0) <= t <= FE(1) and FE(0) <= u <= FE(1):
        return vadd(p, smul(t, d1))
    return None


def _boundary_leaf(surface, word, chain, T, offset):
    geo = _straight_leaf(surface, word, chain, T, offset)
    n = len(geo.nodes)
    ok, pivots, _ = _certify_pivots(surface, chain, geo.nodes, n)
    if ok:
        geo.pivots = pivots
    return geo


def _saddle_key(geo):
    """Lexicographic key of a boundary leaf from its exact pieces."""
    return geo.canonical_marking()


def _build_cylinder(surface, word, chain, T, w_lo, w_hi):
    t2 = dot(T, T)
    normT = t2.sqrt()
    width = w_hi - w_lo
    height2 = width * width / t2
    lo_leaf = _boundary_leaf(surface, word, chain, T, w_lo)
    hi_leaf = _boundary_leaf(surface, word, chain, T, w_hi)
    if _saddle_key(lo_leaf) <= _saddle_key(hi_leaf):
        anchor, far = lo_leaf, hi_leaf
        o_anchor, o_far = w_lo, w_hi
    else:
        anchor, far = hi_leaf, lo_leaf
        o_anchor, o_far = w_hi, w_lo
    cyl = FlatCylinder(surface, anchor, height2, t2, [anchor, far],
                       straight_data=(tuple(word), chain, T, o_anchor, o_far, normT))
    anchor.cylinder = cyl
    far.cylinder = cyl
    return cyl


def straighten(surface, curve):
    """Tighten a closed curve to a flat geodesic representative.

    Returns (geodesic, cylinder_flag).  The geodesic is the canonical anchor
    boundary leaf when the class fills a positive-height cylinder (flag
    True); query maximal_cylinder for the full family.
    """
    word = reduce_word(surface, curve.exits)
    if not word:
        raise NullHomotopicError("curve is null-homotopic")
    # work on the triangulated surface: corridor faces must be convex
    ref = refinement_of(surface)
    surface = ref.surface
    word = reduce_word(surface, ref.refine_word(word))
    if not word:
        raise NullHomotopicError("curve is null-homotopic")
    for _ in range(200):
        sw = _straight_window(surface, word)
        if sw is not None:
            chain, T, w_lo, w_hi = sw
            if w_lo < w_hi:
                cyl = _build_cylinder(surface, word, chain, T, w_lo, w_hi)
                return cyl.core, True
            # unique straight representative through cone points
            geo = _boundary_leaf(surface, word, chain, T, w_lo)
            geo.cylinder = FlatCylinder(surface, geo, FE(0, d=surface.d),
                                        dot(T, T), [geo])
            return geo, False
        verdict = None
        for copies in (3, 5, 7, 9, 11):
            got = _taut_period(surface, word, copies)
            if got is None:
                continue
            chain, nodes = got
            n = len(word)
            if all(veq(nodes[j], nodes[0]) for j in range(n)) and \
                    veq(chain.holonomy.apply(nodes[0]), nodes[0]):
                raise NullHomotopicError("curve is null-homotopic")
            verdict = _certify_pivots(surface, chain, nodes, n)
            if verdict == (False, None, None):
                verdict = None  # not taut at this corridor length; go longer
                continue
            break
        if verdict is None:
            raise StraightenError("periodic tightening did not stabilize")
        ok, pivots, rewrite = verdict
        if ok:
            geo = PeriodicFlatGeodesic(surface, word, chain, nodes, pivots,
                                       chain.holonomy)
            cyl_side = _uniform_pi_side(geo)
            if cyl_side is not None:
                interior = _interior_word(surface, geo, cyl_side)
                if interior is not None:
                    sw2 = _straight_window(surface, interior)
                    if sw2 is not None and sw2[2] < sw2[3]:
                        cyl = _build_cylinder(surface, interior, *sw2)
                        return cyl.core, True
            return geo, False
        a, span, repl = rewrite
        if span > n:
            raise StraightenError("pivot run longer than the period")
        rot = a % n
        rotated = word[rot:] + word[:rot]
        word = list(repl) + rotated[span:]
        word = reduce_word(surface, word)
        if not word:
            raise NullHomotopicError("curve is null-homotopic")
    raise StraightenError("straightening did not terminate")


def _uniform_pi_side(geo):
    """'L' or 'R' when every pivot has angle exactly pi on that travel side.

    The sector side lies to the traveler's left at an 'R' pivot and to the
    right at an 'L' pivot.
    """
    if not geo.pivots:
        return None
    sides = set()
    for p in geo.pivots:
        sec_left = p["side"] == "R"
        if p["sector_vs_pi"] == 0:
            sides.add("L" if sec_left else "R")
        elif p["outer_vs_pi"] == 0:
            sides.add("R" if sec_left else "L")
        else:
            return None
    if len(sides) == 1:
        return sides.pop()
    return None


def _interior_word(surface, geo, side):
    """Crossing word of a parallel leaf pushed off to the given travel side."""
    n = len(geo.nodes)
    word = list(geo.word)
    # pivot runs are disjoint mod n; splice each in place on the cyclic word
    repl_at = {}
    deleted = set()
    for p in geo.pivots:
        a, b = p["portal_range"]
        sec_left = p["side"] == "R"
        push_sector = (side == "L") == sec_left
        if push_sector:
            continue  # crossing word unchanged through the sector portals
        repl = _complementary_arc_word(surface, geo.chain, p["corners"], p["side"])
        repl_at[a % n] = repl
        for k in range(a, b + 1):
            deleted.add(k % n)
    out = []
    for i in range(n):
        if i in repl_at:
            out.extend(repl_at[i])
        elif i not in deleted:
            out.append(word[i])
    out = reduce_word(surface, out)
    return out or None


def maximal_cylinder(surface, geodesic):
    """Maximal flat cylinder around a periodic geodesic.

    Geodesics produced by straighten carry their cylinder; for a pivot
    geodesic with a strictly blocking cone point on each side the height
    is 0.
    """
    if geodesic.cylinder is not None:
        return geodesic.cylinder
    surface = geodesic.surface  # geodesics live on the triangulated surface
    side = _uniform_pi_side(geodesic)
    if side is not None:
        interior = _interior_word(surface, geodesic, side)
        if interior is not None:
            sw = _straight_window(surface, interior)
            if sw is not None and sw[2] < sw[3]:
                chain, T, w_lo, w_hi = sw
                cyl = _build_cylinder(surface, interior, chain, T, w_lo, w_hi)
                geodesic.cylinder = cyl
                return cyl
    seg = geodesic.segment_vectors()
    c2 = FE(0, d=surface.d)
    if seg:
        total = FE(0, d=surface.d)
        allpar = all(cross(seg[0], v) == 0 for v in seg)
        if allpar:
            s = vsub(geodesic.holonomy.apply(geodesic.nodes[0]), geodesic.nodes[0])
            c2 = dot(s, s)
        else:
            c2 = None
    cyl = FlatCylinder(surface, geodesic, FE(0, d=surface.d), c2, [geodesic])
    geodesic.cylinder = cyl
    return cyl
