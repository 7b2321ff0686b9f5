import pathlib
import random

import pytest

from lamina.surface import parse_surface
from lamina.curves import CombinatorialCurve, parse_curves
from lamina.straighten import NullHomotopicError, straighten

ROOT = pathlib.Path(__file__).resolve().parent.parent
SURFACES = ROOT / "surfaces"


def load_surface(name):
    return parse_surface((SURFACES / name).read_text())


# session-scoped: refinement, Fuchsian model and intersection caches live on
# the surface object, so sharing the instance shares all of them
@pytest.fixture(scope="session")
def L():
    return load_surface("L.surf")


@pytest.fixture(scope="session")
def L3():
    return load_surface("L3.surf")


@pytest.fixture(scope="session")
def octagon():
    return load_surface("octagon.surf")


@pytest.fixture(scope="session")
def octagon2():
    return load_surface("octagon2.surf")


@pytest.fixture(scope="session")
def plus():
    return load_surface("plus.surf")


L_CURVES = """
curve v1: +e0
curve v2: +e1
curve h1: +e2
curve h2: +e4
curve diag: +e2 +e3
"""


@pytest.fixture(scope="session")
def lcurves(L):
    return parse_curves(L, L_CURVES)


def random_closed_words(surface, count, seed, max_len=8, min_len=1):
    """Random essential primitive classes, deduped by canonical key."""
    rng = random.Random(seed)
    edges = sorted(surface.pair_of_edge)
    out = []
    seen = set()
    guard = 0
    while len(out) < count and guard < 4000 * count:
        guard += 1
        length = rng.randint(min_len, max_len)
        word = [rng.choice(edges)]
        ok = True
        for _ in range(length - 1):
            pid = surface.partner(word[-1])[0]
            nxt = [e for e in edges if e[0] == pid]
            if not nxt:
                ok = False
                break
            word.append(rng.choice(nxt))
        if not ok or surface.partner(word[-1])[0] != word[0][0]:
            continue
        try:
            curve = CombinatorialCurve(surface, word)
        except Exception:
            continue
        if curve.power() != 1:
            continue
        key = curve.canonical_key()
        if key in seen:
            continue
        try:
            straighten(surface, curve)
        except NullHomotopicError:
            continue
        seen.add(key)
        out.append(CombinatorialCurve(surface, word, name="w%d" % len(out)))
    if len(out) < count:
        raise RuntimeError("could not sample %d essential classes" % count)
    return out
