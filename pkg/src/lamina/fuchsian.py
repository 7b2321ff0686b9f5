"""Hyperbolic backend: the surface group as 2x2 real matrices.

The flat surface is given a hyperbolic metric by a discrete conformal
change of its triangulated edge lengths (Newton solve for angle sum 2*pi
at every vertex class).  Each triangle is then embedded in the upper half
plane and every edge gluing becomes an isometry between the two charts,
mirroring the flat gluing maps exactly.  A spanning tree of the dual graph
turns the remaining gluings into group generators; crossing words rewrite
to words in those generators, and vertex links become relators checked to
evaluate to plus or minus the identity.

Axes live on the boundary circle (real line plus infinity).  Two classes
are crossed by counting lifts of one axis that link a fundamental window
of the other; candidate lifts come from walking the triangle tessellation
along both axes in the Klein disk, where geodesics are straight chords.
"""

import math

import mpmath
import numpy as np

from .refine import refinement_of

TAU_REL = 1e-9
_H0_OFFSETS = (0.1234567, 0.4321, 0.7777)
_MARGIN = 1e-6
_TOUCH_LOG = 30.0
_MAX_STEPS = 200000


class FuchsianError(RuntimeError):
    pass


class UncertainLinking(FuchsianError):
    pass


class _Retry(Exception):
    pass


# -- generic 2x2 helpers (tuples of any scalar type) ------------------------

def mmul(m, n):
    return (m[0] * n[0] + m[1] * n[2], m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2], m[2] * n[1] + m[3] * n[3])


def madj(m):
    return (m[3], -m[1], -m[2], m[0])


def mapply(m, z):
    return (m[0] * z + m[1]) / (m[2] * z + m[3])


# -- exact-build helpers in mpmath ------------------------------------------

def _fe_mp(x):
    return (mpmath.mpf(x.a.numerator) / x.a.denominator +
            mpmath.mpf(x.b.numerator) / x.b.denominator * mpmath.sqrt(x.d))


def _move_to(z):
    # i -> z, det 1
    y = mpmath.sqrt(z.imag)
    return (y, z.real / y, mpmath.mpf(0), 1 / y)


def _rot(psi):
    # rotation of tangent directions at i by +psi (counterclockwise)
    c, s = mpmath.cos(psi / 2), mpmath.sin(psi / 2)
    return (c, s, -s, c)


def _dir_at_i(z):
    # direction at i toward z; 0 is straight up, counterclockwise positive
    return mpmath.arg((z - 1j) / (z + 1j))


def _iso_pair(p, q):
    """Isometry sending i -> p and i*exp(dist(p,q)) -> q."""
    m = _move_to(p)
    return mmul(m, _rot(_dir_at_i(mapply(madj(m), q))))


def _hdist(z, w):
    return mpmath.acosh(1 + abs(z - w) ** 2 / (2 * z.imag * w.imag))


def _ld(x):
    return np.longdouble(mpmath.nstr(x, 25))


def _cld(z):
    return np.clongdouble(_ld(z.real)) + 1j * np.clongdouble(_ld(z.imag))


def _mat_ld(m):
    return np.array([[_ld(m[0]), _ld(m[1])], [_ld(m[2]), _ld(m[3])]],
                    dtype=np.longdouble)


# -- metric solve ------------------------------------------------------------

def _edge_key(rs, edge):
    return min(edge, rs.partner(edge))


def _solve_lengths(rs):
    """Hyperbolic length per glued edge pair making every vertex smooth.

    Scales each flat length by a conformal factor per vertex class,
    sinh(l/2) = exp((u_a+u_b)/2) * sinh(l0/2), and Newton-solves for angle
    sum 2*pi at every class.  Works at high precision; the solve is the
    standard convex discrete-uniformization problem.
    """
    ncls = len(rs.corner_cycles)
    l0 = {}
    ends = {}
    for tid in rs.polygon_order:
        poly = rs.polygons[tid]
        for e in range(poly.n):
            k = _edge_key(rs, (tid, e))
            if k not in l0:
                v = poly.edge_vector(e)
                l0[k] = mpmath.sqrt(_fe_mp(v[0]) ** 2 + _fe_mp(v[1]) ** 2)
                ends[k] = (rs.corner_class[(tid, e)],
                           rs.corner_class[(tid, (e + 1) % poly.n)])

    def lengths(u):
        out = {}
        for k, base in l0.items():
            ca, cb = ends[k]
            out[k] = 2 * mpmath.asinh(mpmath.exp((u[ca] + u[cb]) / 2) *
                                      mpmath.sinh(base / 2))
        return out

    def angle_sums(u):
        l = lengths(u)
        th = [mpmath.mpf(0)] * ncls
        for tid in rs.polygon_order:
            sides = [l[_edge_key(rs, (tid, e))] for e in range(3)]
            for i in range(3):
                lp, ln, lo = sides[(i - 1) % 3], sides[i], sides[(i + 1) % 3]
                co = ((mpmath.cosh(lp) * mpmath.cosh(ln) - mpmath.cosh(lo)) /
                      (mpmath.sinh(lp) * mpmath.sinh(ln)))
                if not -1 < co < 1:
                    return None
                th[rs.corner_class[(tid, i)]] += mpmath.acos(co)
        return th

    def residual(u):
        th = angle_sums(u)
        if th is None:
            return None
        return [t - 2 * mpmath.pi for t in th]

    u = [mpmath.mpf(0)] * ncls
    F = residual(u)
    if F is None:
        raise FuchsianError("degenerate triangle at the flat lengths")
    h = mpmath.mpf(10) ** -20
    for _ in range(200):
        nf = max(abs(f) for f in F)
        if nf < mpmath.mpf(10) ** -35:
            break
        J = mpmath.zeros(ncls, ncls)
        for j in range(ncls):
            up = list(u)
            up[j] += h
            Fp = residual(up)
            if Fp is None:
                raise FuchsianError("metric solve left the feasible region")
            for i in range(ncls):
                J[i, j] = (Fp[i] - F[i]) / h
        step = mpmath.lu_solve(J, mpmath.matrix(F))
        t = mpmath.mpf(1)
        while t > mpmath.mpf(10) ** -12:
            ut = [u[i] - t * step[i] for i in range(ncls)]
            Ft = residual(ut)
            if Ft is not None and max(abs(f) for f in Ft) < nf:
                u, F = ut, Ft
                break
            t /= 2
        else:
            raise FuchsianError("metric solve stalled")
    else:
        raise FuchsianError("metric solve did not converge")
    return lengths(u)


def _embed_triangles(rs, l):
    """Upper-half-plane embedding of each triangle, first vertex at i."""
    emb = {}
    for tid in rs.polygon_order:
        L0 = l[_edge_key(rs, (tid, 0))]
        L1 = l[_edge_key(rs, (tid, 1))]
        L2 = l[_edge_key(rs, (tid, 2))]
        co = ((mpmath.cosh(L0) * mpmath.cosh(L2) - mpmath.cosh(L1)) /
              (mpmath.sinh(L0) * mpmath.sinh(L2)))
        a0 = mpmath.acos(co)
        v0 = mpmath.mpc(0, 1)
        v1 = mpmath.mpc(0, mpmath.exp(L0))
        v2 = mapply(_rot(a0), mpmath.mpc(0, mpmath.exp(L2)))
        if abs(_hdist(v1, v2) - L1) > mpmath.mpf(10) ** -25:
            raise FuchsianError("inconsistent triangle embedding %s" % tid)
        emb[tid] = (v0, v1, v2)
    return emb


def _edge_isometries(rs, emb):
    """Matrix per oriented edge mapping its chart into the partner chart,
    start of the edge onto the end of the partner (the flat convention)."""
    trans = {}
    for g in rs.gluings:
        for f, e in ((g.edge_a, g.edge_b), (g.edge_b, g.edge_a)):
            te, ie = e
            tf, jf = f
            A, B = emb[te][ie], emb[te][(ie + 1) % 3]
            C, D = emb[tf][jf], emb[tf][(jf + 1) % 3]
            trans[f] = mmul(_iso_pair(B, A), madj(_iso_pair(C, D)))
    return trans


# -- model -------------------------------------------------------------------

def _normalize_det(m):
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    if det <= 0:
        raise FuchsianError("matrix is not orientation preserving")
    return m / np.sqrt(det)


class AxisEndpoints:
    """Fixed points on the boundary circle, attracting first.

    Values are floats; math.inf stands for the point at infinity.  The
    error radius is a first-order bound on both endpoints.
    """

    __slots__ = ("attracting", "repelling", "error_radius")

    def __init__(self, attracting, repelling, error_radius):
        self.attracting = attracting
        self.repelling = repelling
        self.error_radius = error_radius
        a0 = _circle_angle(attracting)
        a1 = _circle_angle(repelling)
        if _angle_gap(a0, a1) <= (_angle_err(attracting, error_radius) +
                                  _angle_err(repelling, error_radius)):
            raise FuchsianError("axis endpoints not distinct beyond the "
                               "error radius")

    def __repr__(self):
        return "AxisEndpoints(%r, %r, err=%g)" % (
            self.attracting, self.repelling, self.error_radius)


class GroupWord:
    """Word in model generators with its cyclically reduced form.

    Letters are nonzero integers, +k and -k for generator k (1-based) and
    its inverse.  letters is freely reduced (same group element); cyclic
    is the cyclically reduced form (same conjugacy class) and drives the
    primitivity bookkeeping.
    """

    def __init__(self, model, letters, name=None):
        self.model = model
        self.name = name
        for t in letters:
            if t == 0 or abs(t) > len(model.generators):
                raise FuchsianError("bad generator letter %r" % (t,))
        self.letters = _free_reduce(letters)
        self.cyclic = _cyclic_reduce(self.letters)
        self._mat = None

    def matrix(self):
        if self._mat is None:
            self._mat = self.model.matrix(self.letters)
        return self._mat

    def _period(self):
        w = self.cyclic
        n = len(w)
        for p in range(1, n + 1):
            if n % p == 0 and w == w[p:] + w[:p]:
                return p
        return max(n, 1)

    def power(self):
        if not self.cyclic:
            return 0
        return len(self.cyclic) // self._period()

    @property
    def primitive(self):
        return bool(self.cyclic) and self._period() == len(self.cyclic)

    def primitive_root(self):
        return GroupWord(self.model, self.cyclic[:self._period()],
                         name=self.name)

    def inverse(self):
        return GroupWord(self.model, [-t for t in reversed(self.letters)],
                         name=self.name)

    def repeat(self, k):
        return GroupWord(self.model, list(self.letters) * k, name=self.name)

    def conjugated(self, u):
        return GroupWord(self.model,
                         list(u) + list(self.letters) +
                         [-t for t in reversed(u)], name=self.name)

    def __repr__(self):
        return "GroupWord(%s)" % (list(self.letters),)


def _free_reduce(letters):
    out = []
    for t in letters:
        if out and out[-1] == -t:
            out.pop()
        else:
            out.append(t)
    return tuple(out)


def _cyclic_reduce(letters):
    out = list(letters)
    while len(out) >= 2 and out[0] == -out[-1]:
        out = out[1:-1]
    return tuple(out)


class FuchsianModel:
    """Discrete group of half-plane isometries with a tessellation.

    generators are unit-determinant 2x2 matrices; relators are letter
    words evaluating to plus or minus the identity within TAU_REL.  The
    tessellation data (tiles, partner, trans, base) drives the linking
    counter; surface-backed models also translate crossing words.
    """

    def __init__(self, generators, relators, tiles, partner, trans, base,
                 letter_of=None, surface=None, refinement=None, genus=None):
        self._gens = [_normalize_det(np.array(g, dtype=np.longdouble))
                      for g in generators]
        self.generators = [((float(g[0, 0]), float(g[0, 1])),
                            (float(g[1, 0]), float(g[1, 1])))
                           for g in self._gens]
        self.relators = [tuple(r) for r in relators]
        self.relator = self.relators[0] if self.relators else None
        self.tiles = tiles            # tid -> 3 Klein-free half-plane vertices
        self.partner = partner        # oriented tile edge -> its partner
        self.trans = trans            # oriented tile edge -> chart isometry
        self.base = base
        self.letter_of = letter_of or {}
        self.surface = surface
        self.refinement = refinement
        self.genus = genus
        res = self.relator_residual()
        if res >= TAU_REL:
            raise FuchsianError("relator residual %g exceeds %g"
                                % (res, TAU_REL))

    def matrix(self, letters):
        m = np.eye(2, dtype=np.longdouble)
        for t in letters:
            g = self._gens[abs(t) - 1]
            m = m @ (g if t > 0 else _adj(g))
        return _normalize_det(m)

    def relator_residual(self):
        worst = 0.0
        for r in self.relators:
            m = self.matrix(r)
            res = min(float(np.abs(m - np.eye(2)).max()),
                      float(np.abs(m + np.eye(2)).max()))
            worst = max(worst, res)
        return worst

    def word(self, letters, name=None):
        return GroupWord(self, letters, name=name)

    def word_for_curve(self, curve):
        """Generator word of a combinatorial curve's deck element."""
        if self.surface is None:
            raise FuchsianError("model has no backing surface")
        if curve.surface is not self.surface:
            raise FuchsianError("curve lives on a different surface")
        exits = self.refinement.refine_word(curve.exits)
        letters = [self.letter_of[e] for e in exits if e in self.letter_of]
        return GroupWord(self, letters, name=curve.name)


def _adj(m):
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]],
                    dtype=np.longdouble)


def fuchsian_for_surface(surface):
    """Hyperbolic realization of the surface group, cached on the surface."""
    model = getattr(surface, "_lamina_fuchsian", None)
    if model is not None:
        return model
    ref = refinement_of(surface)
    rs = ref.surface
    with mpmath.workdps(60):
        l = _solve_lengths(rs)
        emb = _embed_triangles(rs, l)
        trans_mp = _edge_isometries(rs, emb)
        # dual spanning tree with placements in a common chart
        base = rs.polygon_order[0]
        place = {base: (mpmath.mpf(1), mpmath.mpf(0),
                        mpmath.mpf(0), mpmath.mpf(1))}
        tree = set()
        queue = [base]
        while queue:
            tid = queue.pop(0)
            for e in range(3):
                f = (tid, e)
                fp = rs.partner(f)
                if fp[0] not in place:
                    place[fp[0]] = mmul(place[tid], trans_mp[fp])
                    tree.add(frozenset((f, fp)))
                    queue.append(fp[0])
        letter_of = {}
        gens = []
        for g in rs.gluings:
            if frozenset((g.edge_a, g.edge_b)) in tree:
                continue
            idx = len(gens) + 1
            letter_of[g.edge_a] = idx
            letter_of[g.edge_b] = -idx
            gen = mmul(mmul(place[g.edge_a[0]], trans_mp[g.edge_b]),
                       madj(place[g.edge_b[0]]))
            gens.append(_mat_ld(gen))
        relators = []
        for cyc in rs.corner_cycles:
            exits = [(pid, (i - 1) % 3) for (pid, i) in cyc]
            relators.append(tuple(letter_of[e] for e in exits
                                  if e in letter_of))
        tiles = {tid: tuple(_cld(z) for z in emb[tid])
                 for tid in rs.polygon_order}
        partner = {}
        trans = {}
        for g in rs.gluings:
            partner[g.edge_a] = g.edge_b
            partner[g.edge_b] = g.edge_a
            trans[g.edge_a] = _mat_ld(trans_mp[g.edge_a])
            trans[g.edge_b] = _mat_ld(trans_mp[g.edge_b])
    model = FuchsianModel(gens, relators, tiles, partner, trans, base,
                          letter_of=letter_of, surface=surface,
                          refinement=ref)
    surface._lamina_fuchsian = model
    return model


def fuchsian_from_genus(g):
    """Canonical genus-g model from a regular 4g-gon with right pairing."""
    if not isinstance(g, int) or g < 2:
        raise FuchsianError("genus >= 2 required")
    n = 4 * g
    with mpmath.workdps(60):
        # circumradius giving corner angle 2*pi/n
        central = 2 * mpmath.pi / n

        def corner(R):
            cs = mpmath.cosh(R) ** 2 - mpmath.sinh(R) ** 2 * mpmath.cos(central)
            s = mpmath.acosh(cs)
            co = ((mpmath.cosh(s) * mpmath.cosh(R) - mpmath.cosh(R)) /
                  (mpmath.sinh(s) * mpmath.sinh(R)))
            return 2 * mpmath.acos(co) - central

        R = mpmath.findroot(corner, mpmath.mpf(2))
        verts = [mapply(_rot(2 * mpmath.pi * j / n),
                        mpmath.mpc(0, mpmath.exp(R))) for j in range(n)]
        # pairing: edge 4k <-> 4k+2, 4k+1 <-> 4k+3
        sigma = {}
        for k in range(g):
            sigma[4 * k] = 4 * k + 2
            sigma[4 * k + 2] = 4 * k
            sigma[4 * k + 1] = 4 * k + 3
            sigma[4 * k + 3] = 4 * k + 1
        pairmat = {}
        for j in range(n):
            sj = sigma[j]
            pairmat[j] = mmul(_iso_pair(verts[(sj + 1) % n], verts[sj]),
                              madj(_iso_pair(verts[j], verts[(j + 1) % n])))
        # fan tessellation in the shared chart
        tiles = {}
        tri_edge_of_poly_edge = {}
        for k in range(n - 2):
            tid = "t%d" % k
            tiles[tid] = (_cld(verts[0]), _cld(verts[k + 1]),
                          _cld(verts[k + 2]))
        tri_edge_of_poly_edge[0] = ("t0", 0)
        for j in range(1, n - 1):
            tri_edge_of_poly_edge[j] = ("t%d" % (j - 1), 1)
        tri_edge_of_poly_edge[n - 1] = ("t%d" % (n - 3), 2)
        partner = {}
        trans = {}
        ident = np.eye(2, dtype=np.longdouble)
        for k in range(1, n - 2):
            a = ("t%d" % k, 0)
            b = ("t%d" % (k - 1), 2)
            partner[a], partner[b] = b, a
            trans[a] = ident.copy()
            trans[b] = ident.copy()
        for j in range(n):
            sj = sigma[j]
            if j > sj:
                continue
            fa = tri_edge_of_poly_edge[j]
            fb = tri_edge_of_poly_edge[sj]
            partner[fa], partner[fb] = fb, fa
            trans[fa] = _mat_ld(pairmat[j])
            trans[fb] = _mat_ld(pairmat[sj])
        # crossing out through edge j acts by the pairing of sigma(j);
        # a_k = pairing of edge 4k+2 and b_k = pairing of edge 4k+1 satisfy
        # the canonical commutator relator
        letter_of = {}
        gens = []
        for k in range(g):
            gens.append(_mat_ld(pairmat[4 * k + 2]))
            letter_of[tri_edge_of_poly_edge[4 * k]] = 2 * k + 1
            letter_of[tri_edge_of_poly_edge[4 * k + 2]] = -(2 * k + 1)
            gens.append(_mat_ld(pairmat[4 * k + 1]))
            letter_of[tri_edge_of_poly_edge[4 * k + 3]] = 2 * k + 2
            letter_of[tri_edge_of_poly_edge[4 * k + 1]] = -(2 * k + 2)
        relator = []
        for k in range(g):
            relator.extend([2 * k + 1, 2 * k + 2, -(2 * k + 1), -(2 * k + 2)])
    return FuchsianModel(gens, [tuple(relator)], tiles, partner, trans, "t0",
                         letter_of=letter_of, genus=g)


# -- axes and linking --------------------------------------------------------

def _circle_angle(x):
    if math.isinf(x):
        return 0.0
    return math.atan2(-2.0 * x, x * x - 1.0)


def _angle_err(x, r):
    if math.isinf(x):
        return 2.0 * r
    return 2.0 * r / (1.0 + x * x)


def _angle_gap(a, b):
    d = abs(a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def axis(word, model=None):
    """Axis endpoints of a hyperbolic word or matrix, attracting first."""
    if isinstance(word, GroupWord):
        m = word.matrix()
    else:
        m = _normalize_det(np.array(word, dtype=np.longdouble))
    a, b = float(m[0, 0]), float(m[0, 1])
    c, d = float(m[1, 0]), float(m[1, 1])
    tr = a + d
    if abs(tr) <= 2.0 + 1e-12:
        raise FuchsianError("matrix is not hyperbolic (trace %.6f)" % tr)
    disc = tr * tr - 4.0
    sq = math.sqrt(disc)
    scale = abs(a) + abs(b) + abs(c) + abs(d)
    err = 1e-13 * (1.0 + scale / sq)
    if abs(c) * (1.0 + abs(a) + abs(d)) < 1e-300:
        fin = b / (d - a)
        if abs(a) > abs(d):
            return AxisEndpoints(math.inf, fin, err)
        return AxisEndpoints(fin, math.inf, err)
    q = -0.5 * ((d - a) + math.copysign(sq, d - a))
    r1, r2 = q / c, -b / q
    if abs(c * r1 + d) >= abs(c * r2 + d):
        att, rep = r1, r2
    else:
        att, rep = r2, r1
    return AxisEndpoints(att, rep, err * (1.0 + max(abs(att), abs(rep))))


def linked(p, q):
    """Do two boundary endpoint pairs separate each other on the circle?

    Returns "yes", "no", "touching", or "uncertain".
    """
    pa = (_circle_angle(p.attracting), _circle_angle(p.repelling))
    qa = (_circle_angle(q.attracting), _circle_angle(q.repelling))
    pr = (_angle_err(p.attracting, p.error_radius),
          _angle_err(p.repelling, p.error_radius))
    qr = (_angle_err(q.attracting, q.error_radius),
          _angle_err(q.repelling, q.error_radius))
    close = touch = False
    for i in range(2):
        for j in range(2):
            gap = _angle_gap(pa[i], qa[j])
            if gap <= pr[i] + qr[j] + 1e-15:
                close = True
                if gap <= 1e-12:
                    touch = True
    if close:
        return "touching" if touch else "uncertain"
    arc = (pa[1] - pa[0]) % (2 * math.pi)
    n_in = sum(1 for x in qa if ((x - pa[0]) % (2 * math.pi)) < arc)
    return "yes" if n_in == 1 else "no"


# -- tessellation walking ----------------------------------------------------

def _klein(z):
    w = (z - 1j) / (z + 1j)
    return 2.0 * w / (1.0 + abs(w) ** 2)


def _from_klein(k):
    r = abs(k)
    if r >= 1.0:
        r = np.longdouble(1) - np.finfo(np.longdouble).eps
        k = k * (r / abs(k))
    w = k / (1.0 + np.sqrt(1.0 - abs(k) ** 2))
    return 1j * (1.0 + w) / (1.0 - w)


def _cr(u, v):
    return u.real * v.imag - u.imag * v.real


def _axis_chart(x_rep, x_att):
    """Matrix sending the repelling point to 0 and the attracting to inf."""
    if math.isinf(x_att):
        m = np.array([[1.0, -x_rep], [0.0, 1.0]], dtype=np.longdouble)
    elif math.isinf(x_rep):
        m = np.array([[0.0, -1.0], [1.0, -x_att]], dtype=np.longdouble)
    elif x_rep < x_att:
        m = np.array([[1.0, -x_rep], [-1.0, x_att]], dtype=np.longdouble)
    else:
        m = np.array([[1.0, -x_rep], [1.0, -x_att]], dtype=np.longdouble)
    return _normalize_det(m)


def _mob(m, z):
    return (m[0, 0] * z + m[0, 1]) / (m[1, 0] * z + m[1, 1])


def _s_of(QC, k):
    z = _from_klein(k)
    w0 = QC[0, 0] * z + QC[0, 1]
    w1 = QC[1, 0] * z + QC[1, 1]
    return float(np.log(np.abs(w0)) - np.log(np.abs(w1)))


class _Walk:
    """Mutable walking state: tile, its chart placement, marching chart."""

    def __init__(self, model, Q):
        self.model = model
        self.tid = model.base
        self.L = np.eye(2, dtype=np.longdouble)
        self.chart = np.eye(2, dtype=np.longdouble)
        self.QC = Q.copy()
        self.carry = None
        self.entry = None
        ks = self.klein_verts()
        self.k = (ks[0] + ks[1] + ks[2]) / 3.0

    def klein_verts(self):
        vs = self.model.tiles[self.tid]
        out = []
        for v in vs:
            z = (self.L[0, 0] * v + self.L[0, 1]) / \
                (self.L[1, 0] * v + self.L[1, 1])
            out.append(_klein(z))
        return out

    def cross(self, eidx):
        f = self.model.partner[(self.tid, eidx)]
        M = self.model.trans[f]
        self.L = self.L @ M
        sc = np.abs(self.L).max()
        if sc > 1e6 or sc < 1e-6:
            self.L = self.L / sc
        if self.carry is not None:
            self.carry = _adj(M) @ self.carry @ M
            self.carry = self.carry / np.abs(self.carry).max()
        self.tid = f[0]
        self.entry = f[1]

    def recenter(self):
        z = _from_klein(self.k)
        y = np.sqrt(z.imag)
        m = np.array([[y, z.real / y], [0.0, 1.0 / y]], dtype=np.longdouble)
        ma = _adj(m)
        self.chart = self.chart @ m
        self.QC = self.QC @ m
        self.L = ma @ self.L
        self.k = _klein((ma[0, 0] * z + ma[0, 1]) / (ma[1, 0] * z + ma[1, 1]))
        return ma

    def placement(self):
        return self.QC @ self.L


def _find_exit(verts, k_cur, k_tgt, entry):
    """Edge index and parameter where the segment k_cur -> k_tgt leaves the
    triangle, or None when the target is inside.  Edges the segment runs
    along are ignored; the entry edge is never re-crossed."""
    best = None
    for j in range(3):
        if j == entry:
            continue
        u, v = verts[j], verts[(j + 1) % 3]
        ev = v - u
        elen = abs(ev)
        s_cur = _cr(ev, k_cur - u)
        s_tgt = _cr(ev, k_tgt - u)
        if abs(s_cur) < 1e-12 * elen and abs(s_tgt) < 1e-12 * elen:
            continue  # running along this edge
        if s_tgt >= s_cur or s_tgt >= -1e-18 * elen:
            continue
        t = s_cur / (s_cur - s_tgt)
        if t < -1e-6:
            continue
        t = max(t, np.longdouble(0))
        if best is None or t < best[1]:
            best = (j, t)
    return best


def _walk_to_point(walk, z_target):
    """Advance the walk to the tile containing a half-plane point (given in
    the walk's current local chart)."""
    z_loc = np.clongdouble(z_target)
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
        if abs(walk.k) > 0.93:
            ma = walk.recenter()
            z_loc = (ma[0, 0] * z_loc + ma[0, 1]) / \
                (ma[1, 0] * z_loc + ma[1, 1])
    raise _Retry("point walk did not terminate")


def _walk_axis(walk, x_att_local_vec, s_hi, record):
    """March toward the attracting endpoint, recording every tile entered,
    until the crossing height passes exp(s_hi)."""
    E = np.array(x_att_local_vec, dtype=np.longdouble)
    E = E / np.abs(E).max()
    record(walk, _s_of(walk.QC, walk.k))
    for _ in range(_MAX_STEPS):
        verts = walk.klein_verts()
        w = np.clongdouble(E[0]) - 1j * np.clongdouble(E[1])
        wb = np.clongdouble(E[0]) + 1j * np.clongdouble(E[1])
        kb = w / wb
        kb = kb / abs(kb)
        hit = _find_exit(verts, walk.k, kb, walk.entry)
        if hit is None:
            raise _Retry("axis walk lost the boundary target")
        j, t = hit
        k_x = walk.k + t * (kb - walk.k)
        s_x = _s_of(walk.QC, k_x)
        if s_x >= s_hi:
            return
        walk.k = k_x
        walk.cross(j)
        record(walk, s_x)
        if abs(walk.k) > 0.93:
            ma = walk.recenter()
            E = ma @ E
            E = E / np.abs(E).max()
    raise _Retry("axis walk did not terminate")


def _sign_key(m):
    f = m / np.abs(m).max()
    flat = [float(f[0, 0]), float(f[0, 1]), float(f[1, 0]), float(f[1, 1])]
    lead = max(range(4), key=lambda i: abs(flat[i]))
    if flat[lead] < 0:
        flat = [-x for x in flat]
    return tuple(round(x, 6) for x in flat)


def _itinerary(model, ax, s_lo, s_hi, carry):
    """Tile copies met by the geodesic with the given axis endpoints between
    heights exp(s_lo) and exp(s_hi) in the axis chart, padded one ring.

    With carry=None each copy is (tid, s_entry, placement); otherwise each
    copy is (tid, conjugated carry matrix).
    """
    Q = _axis_chart(ax.repelling, ax.attracting)
    walk = _Walk(model, Q)
    if carry is not None:
        walk.carry = np.array(carry, dtype=np.longdouble)
        walk.carry = walk.carry / np.abs(walk.carry).max()
    Qi = _adj(Q)
    z_t = _mob(Qi, np.clongdouble(1j * np.exp(np.longdouble(s_lo))))
    _walk_to_point(walk, z_t)
    if math.isinf(ax.attracting):
        Eg = np.array([1.0, 0.0], dtype=np.longdouble)
    else:
        Eg = np.array([ax.attracting, 1.0], dtype=np.longdouble)
    E_loc = _adj(walk.chart) @ Eg
    out = []

    if carry is None:
        def record(w, s):
            out.append((w.tid, s, w.placement()))
    else:
        def record(w, s):
            out.append((w.tid, s, w.carry.copy()))
    _walk_axis(walk, E_loc, s_hi, record)
    return _pad(model, out, carry is None)


def _pad(model, copies, placements):
    seen = {}
    order = []
    for tid, s, m in copies:
        key = (tid, _sign_key(m))
        if key not in seen:
            seen[key] = True
            order.append((tid, s, m))
    base = list(order)
    for tid, s, m in base:
        for e in range(3):
            f = model.partner[(tid, e)]
            M = model.trans[f]
            if placements:
                m2 = m @ M
            else:
                m2 = _adj(M) @ m @ M
                m2 = m2 / np.abs(m2).max()
            key = (f[0], _sign_key(m2))
            if key not in seen:
                seen[key] = True
                order.append((f[0], s, m2))
    return order


# -- the linking counter -----------------------------------------------------

def _translation_length(m):
    tr = abs(float(m[0, 0] + m[1, 1]))
    if tr <= 2.0 + 1e-12:
        raise FuchsianError("matrix is not hyperbolic (trace %.6f)" % tr)
    return 2.0 * math.acosh(tr / 2.0)


def _fixed_logs(K):
    """Fixed points of a 2x2 map as (sign, log magnitude) pairs with the
    attracting one first, or None when degenerate."""
    a, b = K[0, 0], K[0, 1]
    c, d = K[1, 0], K[1, 1]
    scale = float(np.abs(K).max())
    if abs(float(c)) < 1e-30 * scale:
        return None
    tr = a + d
    disc = tr * tr - 4.0 * (a * d - b * c)
    if disc <= 0:
        return None
    sq = np.sqrt(disc)
    B = d - a
    q = -0.5 * (B + (sq if B >= 0 else -sq))
    if abs(float(q)) < 1e-300:
        return None
    r1 = q / c
    r2 = -b / q
    if abs(float(r1)) < 1e-300 or abs(float(r2)) < 1e-300:
        return None
    if np.abs(c * r1 + d) < np.abs(c * r2 + d):
        r1, r2 = r2, r1
    return ((1 if float(r1) > 0 else -1, float(np.log(np.abs(r1)))),
            (1 if float(r2) > 0 else -1, float(np.log(np.abs(r2)))))


def _count_once(model, Ga, Gb, off, want_certificate=False):
    axa = axis(Ga)
    la = _translation_length(Ga)
    axb = axis(Gb)
    lb = _translation_length(Gb)
    s0 = off
    acopies = _itinerary(model, axa, s0 - 0.35, s0 + la + 0.35, None)
    bcopies = _itinerary(model, axb, -0.35, lb + 0.35, Gb)
    amap = {}
    for tid, s, Z in acopies:
        # factor the height out of the placement so everything stays small
        e = np.exp(np.longdouble(s) / 2)
        U = np.array([Z[0] / e, Z[1] * e])
        U = U / np.abs(U).max()
        amap.setdefault(tid, []).append((s, U))
    found = {}
    for tid, _, N in bcopies:
        for s, U in amap.get(tid, ()):
            K = U @ N @ _adj(U)
            logs = _fixed_logs(K)
            if logs is None:
                continue
            (sg_a, l_a), (sg_r, l_r) = logs
            l_a += s
            l_r += s
            if max(abs(l_a), abs(l_r)) > _TOUCH_LOG:
                continue
            if sg_a == sg_r:
                continue
            logh = 0.5 * (l_a + l_r)
            lo, hi = logh - s0, s0 + la - logh
            if min(abs(lo), abs(hi)) < _MARGIN:
                raise _Retry("crossing height too close to the window edge")
            if lo < 0 or hi < 0:
                continue
            key = (sg_a, round(l_a, 5), sg_r, round(l_r, 5))
            if key not in found:
                found[key] = {"attracting_sign": sg_a,
                              "attracting_log": round(l_a, 9),
                              "repelling_sign": sg_r,
                              "repelling_log": round(l_r, 9),
                              "crossing_log_height": round(logh, 9)}
    if want_certificate:
        return len(found), {
            "window": [round(s0, 9), round(s0 + la, 9)],
            "translation_length": round(la, 9),
            "lifts": sorted(found.values(),
                            key=lambda r: r["crossing_log_height"]),
        }
    return len(found)


def intersection_linking(a, b, model=None, certificate=False):
    """Geometric intersection number of two classes by counting lifts of
    one axis that cross a fundamental window of the other."""
    if model is None:
        model = a.model
    if a.model is not model or b.model is not model:
        raise FuchsianError("words come from a different model")
    if not a.cyclic or not b.cyclic:
        return (0, {"lifts": []}) if certificate else 0
    ka, kb = a.power(), b.power()
    Ga = a.primitive_root().matrix()
    Gb = b.primitive_root().matrix()
    last = None
    for off in _H0_OFFSETS:
        try:
            if certificate:
                n, cert = _count_once(model, Ga, Gb, off,
                                      want_certificate=True)
                cert["count"] = n * ka * kb
                cert["power_factors"] = [ka, kb]
                return n * ka * kb, cert
            return ka * kb * _count_once(model, Ga, Gb, off)
        except _Retry as exc:
            last = exc
    raise UncertainLinking("linking count stayed uncertain after retries: %s"
                           % last)
