"""Combinatorial curves: cyclic words of oriented edge crossings.

A crossing is stored as the edge through which the curve exits its current
polygon.  The text form is `curve <name>: +e3 -e7 ...` with global edge
numbers (document order across polygons); +e means exiting through that
edge's side, -e means entering through it, i.e. exiting through its partner.
"""

import re

from .surface import SurfaceError


class CurveError(ValueError):
    pass


class CombinatorialCurve:
    """Cyclic sequence of exit edges; consecutive crossings share a polygon."""

    def __init__(self, surface, exits, name=None):
        self.surface = surface
        self.exits = tuple(exits)
        self.name = name
        if not self.exits:
            raise CurveError("empty crossing word")
        for i, e in enumerate(self.exits):
            if e not in surface.pair_of_edge:
                raise CurveError("unknown edge %r" % (e,))
            nxt = self.exits[(i + 1) % len(self.exits)]
            if surface.partner(e)[0] != nxt[0]:
                raise CurveError(
                    "inconsistent crossing sequence: %s.e%d does not lead into "
                    "the polygon of %s.e%d" % (e + nxt))

    def __len__(self):
        return len(self.exits)

    def polygon_before(self, i):
        return self.exits[i % len(self.exits)][0]

    def reversed(self):
        s = self.surface
        rev = [s.partner(e) for e in reversed(self.exits)]
        rev = rev[-1:] + rev[:-1]
        return CombinatorialCurve(s, rev, name=self.name)

    def _gid_word(self):
        return tuple(self.surface.edge_gid[e] for e in self.exits)

    def canonical_key(self):
        """Class key invariant under rotation and orientation reversal."""
        def best(word):
            return min(word[i:] + word[:i] for i in range(len(word)))
        w = self._gid_word()
        r = self.reversed()._gid_word()
        return min(best(w), best(r))

    def cyclic_period(self):
        """Smallest p with the word equal to its rotation by p (p divides n)."""
        w = self._gid_word()
        n = len(w)
        for p in range(1, n + 1):
            if n % p == 0 and w == w[p:] + w[:p]:
                return p
        return n

    def power(self):
        return len(self.exits) // self.cyclic_period()

    def primitive_root(self):
        p = self.cyclic_period()
        return CombinatorialCurve(self.surface, self.exits[:p], name=self.name)

    def repeat(self, k):
        return CombinatorialCurve(self.surface, self.exits * k, name=self.name)

    def tokens(self):
        return " ".join("+e%d" % self.surface.edge_gid[e] for e in self.exits)

    def __repr__(self):
        return "CombinatorialCurve(%s)" % self.tokens()


_CURVE_RE = re.compile(r"curve\s+(\S+)\s*:\s*(.*)$")
_TOKEN_RE = re.compile(r"([+-])e(\d+)$")


def parse_curve_line(surface, line):
    """Parse one `curve name: +e3 -e7 ...` line."""
    m = _CURVE_RE.match(line.strip())
    if not m:
        raise CurveError("bad curve line %r" % line)
    name, rest = m.group(1), m.group(2)
    exits = []
    for tok in rest.split():
        tm = _TOKEN_RE.match(tok)
        if not tm:
            raise CurveError("bad crossing token %r" % tok)
        gid = int(tm.group(2))
        if gid >= len(surface.edge_list):
            raise CurveError("edge e%d out of range" % gid)
        e = surface.edge_list[gid]
        if tm.group(1) == "-":
            e = surface.partner(e)
        exits.append(e)
    return CombinatorialCurve(surface, exits, name=name)


def parse_curves(surface, text):
    """Parse a curve document into a name -> curve dict."""
    out = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            c = parse_curve_line(surface, line)
        except CurveError as exc:
            raise CurveError("line %d: %s" % (ln, exc))
        if c.name in out:
            raise CurveError("line %d: duplicate curve %s" % (ln, c.name))
        out[c.name] = c
    return out
