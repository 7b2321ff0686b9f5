"""Dual tree of a measured flat lamination.

Strip replacement widens every atom into an interval of its mass, making
the leaf measure atomless; the pseudo-distance between two lifts is the
mass of the leaves separating them (half the doubled orientation-counting
mass).  Separating lifts are found geometrically: walk the Fuchsian
tessellation along a segment joining the two axes and test every nearby
leaf lift for endpoint separation on the boundary circle.  The quotient
tree itself is presented finitely: cutting the surface along the component
leaves gives the vertex regions, each component an edge of length delta.
"""

import itertools
import math
import random
from fractions import Fraction

import numpy as np

from .field import FE, format_exact
from .surface import cross, dot, vsub
from .refine import refinement_of
from .crossings import count_crossings
from .lamination import LaminationError, project_psi
from .intersect import geometric_intersection, intersection_number
from .fuchsian import (AxisEndpoints, FuchsianError, UncertainLinking,
                       _MAX_STEPS, _Walk,
                       _adj, _angle_err, _angle_gap, _axis_chart,
                       _circle_angle,
                       _find_exit, _itinerary, _klein, _mob, _sign_key,
                       _translation_length, _walk_to_point, axis,
                       fuchsian_for_surface)

PAD_RINGS = 1     # extra tessellation rings around walked segments


# -- strip replacement -------------------------------------------------------

class StripComponent:
    """One component in cumulative-mass coordinates [0, delta].

    pieces are (x0, x1, kind, data): an atom of mass m at height t becomes
    ("atom", t) over an interval of length m; a uniform piece keeps its
    chart ("uniform", (t0, t1, rho)).
    """

    def __init__(self, name, pieces, total):
        self.name = name
        self.pieces = pieces
        self.total = total

    def chart_back(self, x):
        """Original height t of the leaf at strip coordinate x."""
        for x0, x1, kind, data in self.pieces:
            if x0 <= x <= x1:
                if kind == "atom":
                    return data
                t0, t1, rho = data
                return t0 + (x - x0) / rho
        raise LaminationError("strip coordinate outside [0, %s]"
                              % format_exact(self.total))

    def coordinate_of(self, t):
        """Some strip coordinate of the leaf at height t (atom: midpoint)."""
        for x0, x1, kind, data in self.pieces:
            if kind == "atom" and data == t:
                return (x0 + x1) / FE(2)
            if kind == "uniform":
                t0, t1, rho = data
                if t0 <= t <= t1:
                    return x0 + (t - t0) * rho
        raise LaminationError("height %s carries no mass" % format_exact(t))


class StripReplacedMeasure:
    def __init__(self, lam, components):
        self.lamination = lam
        self.components = components

    def component(self, key):
        if isinstance(key, int):
            return self.components[key]
        for c in self.components:
            if c.name == key:
                return c
        raise LaminationError("no component named %r" % key)


def strip_replace(lam):
    """Atomless description: atoms widened to intervals of their mass."""
    comps = []
    for c in lam.components:
        marks = [(t, "atom", (t, m)) for t, m in c.measure.atoms]
        marks += [(t0, "uniform", (t0, t1, rho))
                  for t0, t1, rho in c.measure.uniform]
        marks.sort(key=lambda r: float(r[0]))
        x = FE(0)
        pieces = []
        for _, kind, data in marks:
            if kind == "atom":
                t, m = data
                pieces.append((x, x + m, "atom", t))
                x = x + m
            else:
                t0, t1, rho = data
                width = rho * (t1 - t0)
                pieces.append((x, x + width, "uniform", data))
                x = x + width
        comps.append(StripComponent(c.name, pieces, x))
    return StripReplacedMeasure(lam, comps)


# -- lifts and the pseudo-distance ------------------------------------------

class _TreeContext:
    """Cached per-lamination hyperbolic data driving lift separation."""

    def __init__(self, lam):
        self.lam = lam
        self.model = fuchsian_for_surface(lam.surface)
        self.strips = strip_replace(lam)
        self.letters = []       # core generator word per component
        self.G = []             # core matrices
        self.anchor_left = []   # is the t = 0 boundary left of the core?
        self.crossers = []      # per component: tid -> conjugates through it
        self.base_axis = []
        self.pair_cache = {}    # unordered axis pair -> (full mass, sides)
        for comp in lam.components:
            cyl = comp.cylinder
            if cyl._straight is not None:
                word = cyl._straight[0]
                t_dir = cyl._straight[2]
                o_anchor, o_far = cyl._straight[3], cyl._straight[4]
                left = o_anchor > o_far
            else:
                word = comp.geodesic.word
                left = False    # width-0 strip: fixed abstract orientation
            letters = [self.model.letter_of[e] for e in word
                       if e in self.model.letter_of]
            G = self.model.matrix(letters)
            self.letters.append(tuple(letters))
            self.G.append(G)
            self.base_axis.append(axis(G))
            self.anchor_left.append(left)
            self.crossers.append(_axis_crossers(self.model, G))


def tree_context(lam):
    ctx = getattr(lam, "_lamina_tree_ctx", None)
    if ctx is None:
        ctx = lam._lamina_tree_ctx = _TreeContext(lam)
    return ctx


def _axis_crossers(model, G):
    """tid -> conjugators P^-1 with P^-1 G P crossing the base copy of tid.

    Only the conjugator is kept: the candidate axis is later obtained by a
    single Mobius push of the wide base axis of G, which stays accurate
    where re-extracting eigenvectors of the conjugated matrix does not.
    """
    ax = axis(G)
    ell = _translation_length(G)
    copies = _itinerary(model, ax, -0.35, ell + 0.35, None)
    Qi = _adj(_axis_chart(ax.repelling, ax.attracting))
    out = {}
    for tid, _, Z in copies:
        P = Qi @ Z
        Pinv = _adj(P)
        Pinv = Pinv / np.abs(Pinv).max()
        axP = _pushed_axis(Pinv, ax)
        if any(_axes_match(axP, prev) for _, prev in out.get(tid, ())):
            continue
        out.setdefault(tid, []).append((Pinv, axP))
    return out


class Lift:
    """A lift of a leaf: component, strip coordinate, deck conjugator."""

    def __init__(self, lam, comp, x, letters=()):
        ctx = tree_context(lam)
        self.lam = lam
        self.comp = comp if isinstance(comp, int) else \
            [c.name for c in lam.components].index(comp)
        strip = ctx.strips.components[self.comp]
        self.x = FE(x, d=lam.surface.d)
        if self.x < 0 or self.x > strip.total:
            raise LaminationError("strip coordinate outside [0, delta]")
        self.letters = tuple(letters)
        U = ctx.model.matrix(self.letters)
        M = U @ ctx.G[self.comp] @ _adj(U)
        self.matrix = M / np.abs(M).max()
        self.axis = _pushed_axis(U, ctx.base_axis[self.comp]) \
            if self.letters else ctx.base_axis[self.comp]

    def translated(self, letters):
        return Lift(self.lam, self.comp, self.x,
                    tuple(letters) + self.letters)


def _pushed_axis(U, ax):
    """Axis of U G U^-1 from the axis of G: endpoints pushed through the
    Mobius map of U with first-order error propagation.  More stable than
    re-extracting eigenvectors when U moves the axis far away."""
    det = abs(float(U[0, 0] * U[1, 1] - U[0, 1] * U[1, 0]))
    # matrix entries carry accumulated long-double noise; relative scale
    _ENTRY_EPS = 1e-15

    def img(x):
        if math.isinf(x):
            num = float(U[0, 0])
            den = float(U[1, 0])
            ax_in = 1.0
        else:
            xl = np.longdouble(x)
            num = float(U[0, 0] * xl + U[0, 1])
            den = float(U[1, 0] * xl + U[1, 1])
            ax_in = abs(x) + 1.0
        if abs(den) < 1e-12 * (abs(num) + 1.0):
            return math.inf, 1.0, 0.0
        z = num / den
        # first-order error: input radius through the Mobius derivative,
        # entry noise, and output rounding
        e = _ENTRY_EPS * ax_in * (1.0 + abs(z)) / abs(den) + \
            2.3e-16 * (1.0 + abs(z))
        return z, det / (den * den), e

    a, da, ea = img(ax.attracting)
    r, dr, er = img(ax.repelling)
    err = ax.error_radius * max(da, dr) + max(ea, er) + 1e-17
    return AxisEndpoints(a, r, err)


def _angles(ax):
    """Circle angles of both endpoints with per-point angle error radii.

    The error radius lives in boundary coordinates; converting it through
    the Cayley derivative keeps far-away axes (tiny subtended arcs) sharp.
    """
    err = max(ax.error_radius, 1e-16)
    return ((_circle_angle(ax.attracting), _circle_angle(ax.repelling)),
            (max(_angle_err(ax.attracting, err), 1e-15),
             max(_angle_err(ax.repelling, err), 1e-15)))


# safety factor on propagated first-order error radii
_ERR_SAFETY = 8.0

# axes closer than this (chordal) are the same leaf lift: same-element float
# routes agree to ~1e-10 while distinct enumerated leaves stay >= ~1e-6 apart
_DEDUP_TOL = 1e-7

# angle margins below this are beyond float resolution
_SEP_FLOOR = 1e-12


def _chordal(x, y):
    """Chordal distance of two boundary points on the circle."""
    if math.isinf(x) or math.isinf(y):
        if math.isinf(x) and math.isinf(y):
            return 0.0
        z = y if math.isinf(x) else x
        return 2.0 / math.hypot(1.0, z)
    return 2.0 * abs(x - y) / (math.hypot(1.0, x) * math.hypot(1.0, y))


def _axes_match(p, q):
    """Same unoriented axis up to float noise.

    Matrix-level identity is useless here: deep conjugates normalize toward
    rank-one projectors, so distinct elements can agree entrywise to 1e-6
    while their axes stay far apart.  Endpoint proximity is the reliable
    signature of equality.
    """
    direct = max(_chordal(p.attracting, q.attracting),
                 _chordal(p.repelling, q.repelling))
    swapped = max(_chordal(p.attracting, q.repelling),
                  _chordal(p.repelling, q.attracting))
    return min(direct, swapped) < _DEDUP_TOL


def _separates(mid, p, q):
    """Does the axis `mid` separate axes p and q (all pairwise disjoint)?"""
    ma, me = _angles(mid)
    arc = (ma[1] - ma[0]) % (2 * math.pi)

    def side(x_angle, x_err):
        for m_angle, m_err in zip(ma, me):
            tol = max(_ERR_SAFETY * (x_err + m_err), _SEP_FLOOR)
            if _angle_gap(x_angle, m_angle) < tol:
                raise UncertainLinking("lift endpoints too close to resolve")
        return ((x_angle - ma[0]) % (2 * math.pi)) < arc

    (pa, pe), (qa, qe) = _angles(p), _angles(q)
    sp = {side(pa[0], pe[0]), side(pa[1], pe[1])}
    sq = {side(qa[0], qe[0]), side(qa[1], qe[1])}
    if len(sp) > 1 or len(sq) > 1:
        raise UncertainLinking("unexpected interlaced leaf lifts")
    return sp != sq


def _boundary_image(Q, x):
    if math.isinf(x):
        num, den = float(Q[0, 0]), float(Q[1, 0])
    else:
        num = float(Q[0, 0]) * x + float(Q[0, 1])
        den = float(Q[1, 0]) * x + float(Q[1, 1])
    if abs(den) < 1e-300:
        return math.inf if num > 0 else -math.inf
    return num / den


def _side_left(ax_ref, other):
    """Is `other` on the left of the oriented axis `ax_ref`?

    The axis chart sends rep -> 0 and att -> inf with positive determinant,
    so a boundary point is on the left (w < 0) iff it lies outside the
    interval [rep, att] when rep < att, and inside it when rep > att.
    Working with endpoint differences directly stays sharp when the
    reference axis subtends a tiny interval.
    """
    rep, att = ax_ref.repelling, ax_ref.attracting
    tol = _ERR_SAFETY * (max(ax_ref.error_radius, 1e-14) +
                         max(other.error_radius, 1e-14))

    def side(x):
        if math.isinf(x):
            if math.isinf(rep) or math.isinf(att):
                raise UncertainLinking("cannot certify the side of a lift")
            return rep < att
        for ref in (rep, att):
            if math.isinf(ref):
                continue
            if abs(x - ref) < tol or _chordal(x, ref) < _SEP_FLOOR:
                raise UncertainLinking("cannot certify the side of a lift")
        if math.isinf(att):     # w = x - rep
            return x < rep
        if math.isinf(rep):     # w = -1 / (x - att)
            return x > att
        inside = min(rep, att) < x < max(rep, att)
        return inside if rep > att else not inside

    s0, s1 = side(other.attracting), side(other.repelling)
    if s0 != s1:
        raise UncertainLinking("cannot certify the side of a lift")
    return s0


def _axis_point(ax):
    Q = _axis_chart(ax.repelling, ax.attracting)
    return _mob(_adj(Q), np.clongdouble(1j))


def _walk_record(walk, z_target, record):
    z_loc = np.clongdouble(z_target)
    record(walk)
    for _ in range(_MAX_STEPS):
        verts = walk.klein_verts()
        k_t = _klein(z_loc)
        hit = _find_exit(verts, walk.k, k_t, walk.entry)
        if hit is None or hit[1] >= 1.0:
            walk.k = k_t
            walk.entry = None
            return
        j, t = hit
        walk.k = walk.k + t * (k_t - walk.k)
        walk.cross(j)
        record(walk)
        if abs(walk.k) > 0.93:
            ma = walk.recenter()
            z_loc = (ma[0, 0] * z_loc + ma[0, 1]) / \
                (ma[1, 0] * z_loc + ma[1, 1])
    raise FuchsianError("segment walk did not terminate")


def _segment_tiles(model, z1, z2):
    """Tiles met by the segment z1 -> z2 (base-chart points), padded."""
    walk = _Walk(model, np.eye(2, dtype=np.longdouble))
    try:
        _walk_to_point(walk, z1)
    except Exception as exc:
        raise FuchsianError("walk to segment start failed: %s" % exc)
    z2_loc = _mob(_adj(walk.chart), np.clongdouble(z2))
    out = []

    def record(w):
        m = w.placement()
        out.append((w.tid, 0.0, m / np.abs(m).max()))
    _walk_record(walk, z2_loc, record)
    # pad: one tessellation ring around the walked tiles, repeated.
    # tile copies are deduplicated by where they place the base point: two
    # distinct deck placements keep a definite hyperbolic distance, while
    # matrix keys collapse for deep (near rank-one) placements
    seen = {}
    order = []

    def add(tid, m):
        z = complex(_mob(m, np.clongdouble(1j)))
        for w in seen.get(tid, ()):
            if abs(z - w) ** 2 < 1e-6 * (2.0 * z.imag * w.imag):
                return
        seen.setdefault(tid, []).append(z)
        order.append((tid, m))

    for tid, _, m in out:
        add(tid, m)
    for _ in range(max(PAD_RINGS, 0)):
        for tid, m in list(order):
            for e in range(3):
                f = model.partner[(tid, e)]
                m2 = m @ model.trans[f]
                add(f[0], m2 / np.abs(m2).max())
    return order


def pseudo_distance(lam, l1, l2):
    """Half the doubled separating mass between two leaf lifts (exact)."""
    ctx = tree_context(lam)
    # within a component a leaf lift is determined by its axis, so axis
    # coincidence means the same deck element
    if l1.comp == l2.comp and _axes_match(l1.axis, l2.axis):
        return abs(l1.x - l2.x)
    k1 = (l1.comp, l1.letters)
    k2 = (l2.comp, l2.letters)
    key = (min(k1, k2), max(k1, k2))
    hit = ctx.pair_cache.get(key)
    if hit is None:
        tiles = _segment_tiles(ctx.model, _axis_point(l1.axis),
                               _axis_point(l2.axis))
        full = FE(0, d=lam.surface.d)
        for ci, comp in enumerate(lam.components):
            crossers = ctx.crossers[ci]
            base = ctx.base_axis[ci]
            kept = []
            for tid, M in tiles:
                for Pinv, _ in crossers.get(tid, ()):
                    W = M @ Pinv
                    ax = _pushed_axis(W / np.abs(W).max(), base)
                    if any(_axes_match(ax, p) for p in kept):
                        continue
                    # the boundary lifts themselves never count: their mass
                    # is handled by the strip-interior partial terms
                    if (ci == l1.comp and _axes_match(ax, l1.axis)) or \
                            (ci == l2.comp and _axes_match(ax, l2.axis)):
                        continue
                    kept.append(ax)
                    if _separates(ax, l1.axis, l2.axis):
                        full = full + comp.mass
        sides = {k1: _side_left(l1.axis, l2.axis),
                 k2: _side_left(l2.axis, l1.axis)}
        hit = ctx.pair_cache[key] = (full, sides)
    full, sides = hit
    total = full
    # partial mass inside the two strips themselves
    for a, kk in ((l1, k1), (l2, k2)):
        strip = ctx.strips.components[a.comp]
        if sides[kk] == ctx.anchor_left[a.comp]:
            total = total + a.x
        else:
            total = total + (strip.total - a.x)
    return total


def random_lifts(lam, n, seed=0, max_len=4, pool=None):
    """Deterministic sample of leaf lifts; conjugators drawn from a small
    pool so distance queries reuse the cached strip pairs."""
    ctx = tree_context(lam)
    rng = random.Random(seed)
    ngen = len(ctx.model.generators)
    alphabet = [k for k in range(-ngen, ngen + 1) if k != 0]
    if pool is None:
        pool = max(4, n // 5)
    conjs = [()]
    seen = {()}
    guard = 0
    while len(conjs) < pool and guard < 100 * pool:
        guard += 1
        letters = []
        for _ in range(rng.randint(1, max_len)):
            t = rng.choice(alphabet)
            if letters and letters[-1] == -t:
                continue
            letters.append(t)
        w = tuple(letters)
        if w not in seen:
            seen.add(w)
            conjs.append(w)
    lifts = []
    for _ in range(n):
        ci = rng.randrange(len(lam.components))
        total = ctx.strips.components[ci].total
        x = total * FE(Fraction(rng.randint(0, 16), 16))
        lifts.append(Lift(lam, ci, x, rng.choice(conjs)))
    return lifts


# -- quotient tree -----------------------------------------------------------

class TranslationLengthResult:
    def __init__(self, value, hyperbolic_action):
        self.value = value
        self.hyperbolic_action = hyperbolic_action

    def __repr__(self):
        return "TranslationLengthResult(%s, %s)" % (
            format_exact(self.value), self.hyperbolic_action)


def translation_length(lam, gamma):
    """ell_T of a deck word: equals the intersection number with gamma."""
    value = intersection_number(lam, gamma)
    return TranslationLengthResult(value, value.sign() > 0)


class TreeModel:
    """Finite metric-graph presentation of the dual tree quotient."""

    def __init__(self, lam, vertices, edges):
        self.lamination = lam
        self.vertices = vertices    # ["v0", ...]
        self.edges = edges          # {"from", "to", "length", "component"}

    def translation_length(self, gamma):
        return translation_length(self.lamination, gamma)

    def lengths(self, words):
        out = {}
        for w in words:
            name = w.name if w.name else w.tokens()
            out[name] = self.translation_length(w).value
        return out

    def edge_lengths(self):
        return sorted(format_exact(e["length"]) for e in self.edges)

    def to_json(self, words=()):
        return {
            "vertices": list(self.vertices),
            "edges": [{"from": e["from"], "to": e["to"],
                       "length": format_exact(e["length"]),
                       "component": e["component"]} for e in self.edges],
            "lengths": {k: format_exact(v)
                        for k, v in self.lengths(words).items()},
        }


def _half(v):
    s = v[1].sign()
    if s > 0 or (s == 0 and v[0].sign() > 0):
        return 0
    return 1


def _dir_before(u, v):
    """Strict CCW order from angle 0 at +x; True when u comes before v."""
    hu, hv = _half(u), _half(v)
    if hu != hv:
        return hu < hv
    return cross(u, v).sign() > 0


class _TileGraph:
    """Planar subdivision of one triangle by disjoint chords."""

    def __init__(self, poly, extra_points, chords):
        # nodes on the boundary, ordered along the CCW perimeter
        self.poly = poly
        pts = {}

        def key(p):
            return (p[0].a, p[0].b, p[1].a, p[1].b)

        def boundary_pos(p):
            for e in range(3):
                a = poly.vertex(e)
                ev = poly.edge_vector(e)
                rel = vsub(p, a)
                if cross(ev, rel) == 0:
                    t = dot(rel, ev) / dot(ev, ev)
                    if FE(0) <= t < FE(1):
                        return (e, t)
            return None

        def add(p):
            k = key(p)
            if k not in pts:
                pos = boundary_pos(p)
                if pos is None:
                    raise LaminationError("cut point off the tile boundary")
                pts[k] = (pos, p)
            return k

        for i in range(3):
            add(poly.vertex(i))
        for p in extra_points:
            add(p)
        for a, b in chords:
            add(a)
            add(b)
        order = sorted(pts.values(), key=lambda r: (r[0][0], float(r[0][1])))
        self.nodes = [p for _, p in order]
        self.node_pos = [pos for pos, _ in order]
        self.index = {key(p): i for i, p in enumerate(self.nodes)}
        n = len(self.nodes)
        # darts: (node, node, tag); boundary arcs tagged by their edge index
        self.darts = []
        for i in range(n):
            j = (i + 1) % n
            self.darts.append((i, j, ("b", self.node_pos[i][0])))
            self.darts.append((j, i, ("b", self.node_pos[i][0])))
        for a, b in chords:
            ia, ib = self.index[key(a)], self.index[key(b)]
            self.darts.append((ia, ib, ("c",)))
            self.darts.append((ib, ia, ("c",)))
        self._faces()

    def _dart_dir(self, d):
        u, v, _ = d
        return vsub(self.nodes[v], self.nodes[u])

    def _faces(self):
        # CCW rotation at each node, then left-face orbits
        at = {}
        for k, d in enumerate(self.darts):
            at.setdefault(d[0], []).append(k)
        for node, ks in at.items():
            def ins_sort(ks):
                out = []
                for k in ks:
                    dk = self._dart_dir(self.darts[k])
                    lo = 0
                    while lo < len(out) and \
                            _dir_before(self._dart_dir(self.darts[out[lo]]), dk):
                        lo += 1
                    out.insert(lo, k)
                return out
            at[node] = ins_sort(ks)
        def reverse_of(k):
            u, v, tag = self.darts[k]
            for j, (a, b, t2) in enumerate(self.darts):
                if a == v and b == u and t2 == tag and j != k:
                    return j
            raise LaminationError("unpaired dart")
        self._rev = [reverse_of(k) for k in range(len(self.darts))]
        nxt = [None] * len(self.darts)
        for k in range(len(self.darts)):
            r = self._rev[k]
            ring = at[self.darts[r][0]]
            i = ring.index(r)
            nxt[k] = ring[(i - 1) % len(ring)]   # clockwise step: left faces
        self.face_of = [None] * len(self.darts)
        nf = 0
        for k in range(len(self.darts)):
            if self.face_of[k] is not None:
                continue
            cur = k
            while self.face_of[cur] is None:
                self.face_of[cur] = nf
                cur = nxt[cur]
            nf += 1
        self.n_faces = nf
        # the outer face contains the clockwise perimeter darts
        first_back = 1    # dart 1 is the reverse of perimeter dart 0
        self.outer = self.face_of[first_back]

    def chord_faces(self, a, b):
        """(left face, right face) of the chord a -> b."""
        def key(p):
            return (p[0].a, p[0].b, p[1].a, p[1].b)
        ia, ib = self.index[key(a)], self.index[key(b)]
        for k, (u, v, tag) in enumerate(self.darts):
            if tag == ("c",) and u == ia and v == ib:
                return self.face_of[k], self.face_of[self._rev[k]]
        raise LaminationError("chord not found in tile graph")

    def arc_face(self, i):
        """Face inside the tile along the boundary arc nodes[i]->nodes[i+1]."""
        return self.face_of[2 * i]

    def arc_nodes(self):
        """Boundary arcs as ((edge index, t0, t1), arc index) records."""
        n = len(self.nodes)
        out = []
        for i in range(n):
            j = (i + 1) % n
            e0, t0 = self.node_pos[i]
            e1, t1 = self.node_pos[j]
            if j == 0:
                t1 = FE(1)
                e1 = 2
            if e0 != e1 and not (e1 == e0 + 1 and t1 == 0) and j != 0:
                raise LaminationError("inconsistent boundary arc")
            out.append((i, e0, t0, FE(1) if (j == 0 or e1 != e0) else t1))
        return out


def _on_edge(poly, e, p):
    a = poly.vertex(e)
    ev = poly.edge_vector(e)
    rel = vsub(p, a)
    if cross(ev, rel) != 0:
        return None
    t = dot(rel, ev) / dot(ev, ev)
    if FE(0) <= t <= FE(1):
        return t
    return None


def quotient_tree(lam, surface=None):
    """Metric graph from cutting the surface along the component leaves."""
    surface = surface or lam.surface
    ref = refinement_of(surface)
    rs = ref.surface
    # classify the leaves' local segments into chords and edge runs
    chords = {}       # tid -> [(a, b, comp index, seg index)]
    runs = []         # (tid, edge, t0, t1, comp index, forward)
    for ci, comp in enumerate(lam.components):
        for si, (tid, a, b) in enumerate(comp.geodesic.local_segments()):
            poly = rs.polygons[tid]
            run = None
            for e in range(3):
                ta, tb = _on_edge(poly, e, a), _on_edge(poly, e, b)
                if ta is not None and tb is not None:
                    # travel direction along the edge decides the sides
                    run = (e, min(ta, tb), max(ta, tb), tb > ta)
                    break
            if run is not None:
                runs.append((tid, run[0], run[1], run[2], ci, run[3]))
            else:
                chords.setdefault(tid, []).append((a, b, ci, si))
    # cut points per (tile, edge), including the partner side's points
    cuts = {}

    def note(tid, p):
        poly = rs.polygons[tid]
        for e in range(3):
            t = _on_edge(poly, e, p)
            if t is not None:
                cuts.setdefault((tid, e), set()).add(
                    (p[0].a, p[0].b, p[1].a, p[1].b))

    for tid, segs in chords.items():
        for a, b, _, _ in segs:
            note(tid, a)
            note(tid, b)
    for tid, e, t0, t1, _, _ in runs:
        poly = rs.polygons[tid]
        a = poly.vertex(e)
        ev = poly.edge_vector(e)
        for t in (t0, t1):
            note(tid, (a[0] + ev[0] * t, a[1] + ev[1] * t))
    from .field import FieldElement

    def unkey(k, d):
        return (FieldElement(k[0], k[1], d), FieldElement(k[2], k[3], d))

    changed = True
    while changed:
        changed = False
        for (tid, e), ks in list(cuts.items()):
            s, t = rs.gluing_map((tid, e))
            ptid, pe = rs.partner((tid, e))
            for k in list(ks):
                p = unkey(k, rs.d)
                q = (FE(s) * p[0] + t[0], FE(s) * p[1] + t[1])
                qk = (q[0].a, q[0].b, q[1].a, q[1].b)
                tgt = cuts.setdefault((ptid, pe), set())
                if qk not in tgt:
                    tgt.add(qk)
                    changed = True
    # build per-tile planar graphs
    graphs = {}
    offsets = {}
    nfaces = 0
    for tid in rs.polygon_order:
        poly = rs.polygons[tid]
        extra = []
        for e in range(3):
            for k in cuts.get((tid, e), ()):
                extra.append(unkey(k, rs.d))
        g = _TileGraph(poly, extra,
                       [(a, b) for a, b, _, _ in chords.get(tid, ())])
        graphs[tid] = g
        offsets[tid] = nfaces
        nfaces += g.n_faces
    parent = list(range(nfaces))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    severed = set()
    for tid, e, t0, t1, ci, _ in runs:
        severed.add((tid, e, (t0.a, t0.b), (t1.a, t1.b)))
    # glue faces across unsevered boundary arc pairs
    for tid in rs.polygon_order:
        g = graphs[tid]
        poly = rs.polygons[tid]
        for i, e, t0, t1 in g.arc_nodes():
            face = g.arc_face(i)
            if face == g.outer:
                continue
            # is this arc inside a severed run on either side?
            def arc_severed(tid2, e2, u0, u1):
                for (rt, re, r0, r1) in severed:
                    if rt == tid2 and re == e2:
                        lo = FieldElement(r0[0], r0[1], rs.d)
                        hi = FieldElement(r1[0], r1[1], rs.d)
                        if lo <= u0 and u1 <= hi:
                            return True
                return False
            if arc_severed(tid, e, t0, t1):
                continue
            ptid, pe = rs.partner((tid, e))
            s, tr = rs.gluing_map((tid, e))
            a = poly.vertex(e)
            ev = poly.edge_vector(e)
            p0 = (a[0] + ev[0] * t0, a[1] + ev[1] * t0)
            q0 = (FE(s) * p0[0] + tr[0], FE(s) * p0[1] + tr[1])
            # partner parameter of our arc start
            u0 = _on_edge(rs.polygons[ptid], pe, q0)
            if u0 is None:
                raise LaminationError("gluing map missed the partner edge")
            pg = graphs[ptid]
            # our arc [t0, t1] maps to partner arc ending at u0
            span = t1 - t0
            u_lo = u0 - span
            if arc_severed(ptid, pe, u_lo, u0):
                continue
            # find the partner arc starting at u_lo on edge pe
            hit = None
            for j, e2, v0, v1 in pg.arc_nodes():
                if e2 == pe and v0 == u_lo and v1 == u0:
                    hit = j
                    break
            if hit is None:
                raise LaminationError("boundary arcs do not match across "
                                      "the gluing")
            union(offsets[tid] + face, offsets[ptid] + pg.arc_face(hit))
    # sides of each component's leaf
    left_of = [None] * len(lam.components)
    right_of = [None] * len(lam.components)

    def meld(slot, ci, face):
        cur = slot[ci]
        if cur is None:
            slot[ci] = find(face)
        else:
            union(cur, face)
            slot[ci] = find(face)

    for tid, segs in chords.items():
        g = graphs[tid]
        for a, b, ci, _ in segs:
            lf, rf = g.chord_faces(a, b)
            meld(left_of, ci, offsets[tid] + lf)
            meld(right_of, ci, offsets[tid] + rf)
    for tid, e, t0, t1, ci, forward in runs:
        g = graphs[tid]
        ptid, pe = rs.partner((tid, e))
        pg = graphs[ptid]
        s, tr = rs.gluing_map((tid, e))
        # a CCW polygon keeps its interior on the left of +edge travel
        own_side, partner_side = (left_of, right_of) if forward \
            else (right_of, left_of)
        for j, e2, v0, v1 in g.arc_nodes():
            if e2 == e and t0 <= v0 and v1 <= t1:
                meld(own_side, ci, offsets[tid] + g.arc_face(j))
        poly = rs.polygons[tid]
        a = poly.vertex(e)
        ev = poly.edge_vector(e)
        p0 = (a[0] + ev[0] * t0, a[1] + ev[1] * t0)
        p1 = (a[0] + ev[0] * t1, a[1] + ev[1] * t1)
        q0 = (FE(s) * p0[0] + tr[0], FE(s) * p0[1] + tr[1])
        q1 = (FE(s) * p1[0] + tr[0], FE(s) * p1[1] + tr[1])
        u0 = _on_edge(rs.polygons[ptid], pe, q0)
        u1 = _on_edge(rs.polygons[ptid], pe, q1)
        lo, hi = min(u0, u1), max(u0, u1)
        for j, e2, v0, v1 in pg.arc_nodes():
            if e2 == pe and lo <= v0 and v1 <= hi:
                meld(partner_side, ci, offsets[ptid] + pg.arc_face(j))
    # regions: union-find classes over interior faces
    reps = {}
    for tid in rs.polygon_order:
        g = graphs[tid]
        for f in range(g.n_faces):
            if f == g.outer:
                continue
            reps.setdefault(find(offsets[tid] + f), len(reps))
    vertices = ["v%d" % i for i in range(len(reps))]
    edges = []
    for ci, comp in enumerate(lam.components):
        lf, rf = left_of[ci], right_of[ci]
        if lf is None or rf is None:
            raise LaminationError("component %s has no recorded sides"
                                  % comp.name)
        edges.append({"from": "v%d" % reps[find(lf)],
                      "to": "v%d" % reps[find(rf)],
                      "length": comp.mass,
                      "component": comp.name})
    # connectivity of the quotient graph
    if vertices:
        adj = {v: set() for v in vertices}
        for e in edges:
            adj[e["from"]].add(e["to"])
            adj[e["to"]].add(e["from"])
        seen = {vertices[0]}
        stack = [vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(vertices):
            raise LaminationError("quotient graph is disconnected")
    return TreeModel(lam, vertices, edges)


# -- comparisons and checks --------------------------------------------------

def compare_with_hyperbolic(lam, words):
    """Per-word equality of the lamination tree lengths with the dual tree
    of the hyperbolic image (weighted multicurve)."""
    mc = project_psi(lam)
    report = []
    for w in words:
        lhs = translation_length(lam, w).value
        k = w.power()
        w0 = w.primitive_root()
        rhs = FE(0, d=lam.surface.d)
        for curve, weight in mc.entries:
            n = geometric_intersection(lam.surface, curve, w0)
            rhs = rhs + weight * FE(n * k)
        report.append({"word": w.name if w.name else w.tokens(),
                       "flat_tree": lhs, "hyperbolic_tree": rhs,
                       "equal": lhs == rhs})
    return report


def _distance_matrix(lam, sample):
    cache = {}
    n = len(sample)
    D = [[FE(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            d = pseudo_distance(lam, sample[i], sample[j])
            D[i][j] = D[j][i] = d
    return D


def four_point_check(lam, sample):
    """Exact triangle inequality and the 0-hyperbolic 4-point condition."""
    n = len(sample)
    D = _distance_matrix(lam, sample)
    fracs = []
    rational = True
    for row in D:
        out = []
        for v in row:
            fe = FE(v)
            if fe.b != 0:
                rational = False
            out.append(fe)
        fracs.append(out)
    if rational and n > 12:
        return _four_point_fast(fracs)
    for i, j, k in itertools.combinations(range(n), 3):
        if D[i][j] > D[i][k] + D[k][j] or D[i][k] > D[i][j] + D[j][k] or \
                D[j][k] > D[j][i] + D[i][k]:
            return False
    for a, b, c, d in itertools.combinations(range(n), 4):
        s1 = D[a][b] + D[c][d]
        s2 = D[a][c] + D[b][d]
        s3 = D[a][d] + D[b][c]
        top = max(s1, s2, s3)
        if sum(1 for s in (s1, s2, s3) if s == top) < 2:
            return False
    return True


def _four_point_fast(fracs):
    n = len(fracs)
    den = 1
    for row in fracs:
        for v in row:
            den = den * v.a.denominator // math.gcd(den, v.a.denominator)
    A = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(n):
            q = fracs[i][j].a * den
            if abs(q.numerator) > 2 ** 60:
                raise LaminationError("distance denominators too large for "
                                      "the fast four-point check")
            A[i, j] = int(q)
    # triangle inequality: D[i,j] <= D[i,k] + D[k,j] for all k
    for k in range(n):
        if (A > A[:, k][:, None] + A[k, :][None, :]).any():
            return False
    # 4-point: for each subset the two largest pairings agree
    for a in range(n - 3):
        for b in range(a + 1, n - 2):
            idx = np.arange(b + 1, n)
            m = len(idx)
            if m < 2:
                continue
            cu, du = np.triu_indices(m, 1)
            c, d = idx[cu], idx[du]
            s1 = A[a, b] + A[c, d]
            s2 = A[a, c] + A[b, d]
            s3 = A[a, d] + A[b, c]
            top = np.maximum(np.maximum(s1, s2), s3)
            hits = (s1 == top).astype(np.int8) + (s2 == top) + (s3 == top)
            if (hits < 2).any():
                return False
    return True
