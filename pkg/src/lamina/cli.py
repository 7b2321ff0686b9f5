"""Command-line front end: lamina <subcommand> ...

Exit codes: 0 success, 1 domain error (invalid surface, curve, lamination,
or a failed check), 2 usage error.  All results are exact-number strings;
floating point appears only in clearly labeled hyperbolic diagnostics.
Output is deterministic byte for byte for identical inputs.
"""

import argparse
import json
import sys

from .field import FE, format_exact
from .surface import SurfaceError, parse_surface, validate
from .curves import (CombinatorialCurve, CurveError, parse_curve_line,
                     parse_curves)
from .develop import chain_svg
from .straighten import (NullHomotopicError, StraightenError,
                         maximal_cylinder, straighten)
from .fuchsian import FuchsianError, UncertainLinking
from .lamination import (LaminationError, discretize, dump_document,
                         fiber_description, lamination_from_json,
                         multicurve_from_json, multicurve_to_json,
                         project_psi, section_s)
from .intersect import (BackendDisagreement, enumerate_Bset,
                        geometric_intersection, intersection_number)
from . import tree as tree_mod
from .tree import (compare_with_hyperbolic, four_point_check, quotient_tree,
                   random_lifts, translation_length)

DOMAIN_ERRORS = (SurfaceError, CurveError, LaminationError, StraightenError,
                 NullHomotopicError, FuchsianError, UncertainLinking,
                 BackendDisagreement, ValueError, OSError,
                 json.JSONDecodeError)


class CliError(Exception):
    pass


def _read(path):
    with open(path) as fh:
        return fh.read()


def _load_surface(path):
    return parse_surface(_read(path))


def _load_lamination(surface, path):
    return lamination_from_json(surface, json.loads(_read(path)))


def _load_multicurve(surface, path):
    return multicurve_from_json(surface, json.loads(_read(path)))


def _resolve_curve(surface, spec, named=None):
    """A curve argument: a name from the loaded documents, a name from a
    --curves file, or a crossing word like "+e2 +e3"."""
    if named and spec in named:
        return named[spec]
    if spec[:1] in "+-":
        c = parse_curve_line(surface, "curve w: %s" % spec)
        return CombinatorialCurve(surface, c.exits, name=spec)
    raise CliError("unknown curve %r; give a defined name or a word like "
                   "'+e0 -e3'" % spec)


def _named_curves(surface, args, lam=None, mc=None):
    named = {}
    if getattr(args, "curves", None):
        named.update(parse_curves(surface, _read(args.curves)))
    if lam is not None:
        for c in lam.components:
            named.setdefault(c.name, c.curve)
    if mc is not None:
        for curve, _ in mc.entries:
            if curve.name:
                named.setdefault(curve.name, curve)
    return named


def _emit(args, doc, text_lines):
    if args.format == "json":
        sys.stdout.write(dump_document(doc))
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


# -- subcommands -------------------------------------------------------------

def cmd_validate(args):
    surface = parse_surface(_read(args.surface), check=False)
    rep = validate(surface)
    doc = {
        "passed": rep.passed,
        "chi": rep.chi,
        "cone_points": [{"class": ci, "k": k} for ci, k in rep.cone_points],
        "checks": [{"name": n, "ok": ok, "detail": d}
                   for n, ok, d in rep.checks],
    }
    _emit(args, doc, rep.lines() + ["surface is %s" %
                                    ("valid" if rep.passed else "invalid")])
    return 0 if rep.passed else 1


def cmd_straighten(args):
    surface = _load_surface(args.surface)
    curve = _resolve_curve(surface, args.curve, _named_curves(surface, args))
    geo, is_cyl = straighten(surface, curve)
    if args.format == "svg":
        sys.stdout.write(chain_svg(geo.chain))
        return 0
    l2 = geo.length2()
    doc = {
        "curve": args.curve,
        "refined_word_length": len(geo.word),
        "segments": len(geo.segment_vectors()),
        "length2": format_exact(l2) if l2 is not None else None,
        "length_float_diagnostic": round(geo.length_float(), 12),
        "cylinder_family": bool(is_cyl),
    }
    lines = ["curve %s: %d straight segments" % (args.curve, doc["segments"]),
             "length^2 = %s" % doc["length2"],
             "cylinder family: %s" % ("yes" if is_cyl else "no")]
    _emit(args, doc, lines)
    return 0


def cmd_cylinders(args):
    surface = _load_surface(args.surface)
    curve = _resolve_curve(surface, args.curve, _named_curves(surface, args))
    geo, _ = straighten(surface, curve)
    cyl = maximal_cylinder(surface, geo)
    height = cyl.height
    doc = {
        "curve": args.curve,
        "height2": format_exact(cyl.height2),
        "height": format_exact(height) if height is not None else None,
        "circumference2": format_exact(cyl.circumference2),
    }
    lines = ["curve %s:" % args.curve,
             "  height^2 = %s" % doc["height2"],
             "  height = %s" % doc["height"],
             "  circumference^2 = %s" % doc["circumference2"]]
    _emit(args, doc, lines)
    return 0


def cmd_intersect(args):
    surface = _load_surface(args.surface)
    lam = _load_lamination(surface, args.lamination)
    named = _named_curves(surface, args, lam=lam)
    gamma = _resolve_curve(surface, args.curve, named)
    value = intersection_number(lam, gamma)
    certs = []
    g0 = gamma.primitive_root()
    for comp in lam.components:
        n, flat_cert, hyp_cert = geometric_intersection(
            surface, comp.curve, g0, certificates=True)
        certs.append({"component": comp.name, "count": n,
                      "flat_certificate": flat_cert,
                      "hyperbolic_certificate_diagnostic": hyp_cert})
    doc = {"value": format_exact(value), "gamma": args.curve,
           "certificates": certs}
    _emit(args, doc, [format_exact(value)])
    return 0


def cmd_project(args):
    surface = _load_surface(args.surface)
    lam = _load_lamination(surface, args.lamination)
    mc = project_psi(lam)
    doc = multicurve_to_json(mc)
    lines = ["%s: %s" % (name, format_exact(w))
             for name, w in sorted(mc.weights().items())]
    _emit(args, doc, lines)
    return 0


def cmd_fiber(args):
    surface = _load_surface(args.surface)
    mc = _load_multicurve(surface, args.multicurve)
    rows = fiber_description(mc, surface)
    doc = {"fiber": [{"curve": name,
                      "height": format_exact(h) if h is not None else None,
                      "mass": format_exact(w)} for name, h, w in rows]}
    lines = ["%s: L = %s, delta = %s"
             % (name, format_exact(h) if h is not None else "?",
                format_exact(w)) for name, h, w in rows]
    _emit(args, doc, lines)
    return 0


def cmd_tree(args):
    surface = _load_surface(args.surface)
    lam = _load_lamination(surface, args.lamination)
    tm = quotient_tree(lam)
    named = _named_curves(surface, args, lam=lam)
    words = [_resolve_curve(surface, w, named) for w in args.words]
    doc = tm.to_json(words)
    lines = ["vertices: %s" % " ".join(tm.vertices)]
    for e in doc["edges"]:
        lines.append("edge %s -> %s  length %s  (%s)"
                     % (e["from"], e["to"], e["length"], e["component"]))
    for name in sorted(doc["lengths"]):
        lines.append("length %s = %s" % (name, doc["lengths"][name]))
    _emit(args, doc, lines)
    return 0


def cmd_lengths(args):
    surface = _load_surface(args.surface)
    lam = _load_lamination(surface, args.lamination)
    named = _named_curves(surface, args, lam=lam)
    words = [_resolve_curve(surface, w, named) for w in args.words]
    report = compare_with_hyperbolic(lam, words)
    rows = []
    lines = []
    all_equal = True
    for spec, r in zip(args.words, report):
        rows.append({"word": spec, "flat_tree": format_exact(r["flat_tree"]),
                     "hyperbolic_tree": format_exact(r["hyperbolic_tree"]),
                     "equal": r["equal"]})
        lines.append("%s: flat %s, hyperbolic %s, %s"
                     % (spec, rows[-1]["flat_tree"],
                        rows[-1]["hyperbolic_tree"],
                        "equal" if r["equal"] else "DIFFER"))
        all_equal = all_equal and r["equal"]
    _emit(args, {"spectrum": rows, "all_equal": all_equal}, lines)
    return 0 if all_equal else 1


def cmd_check(args):
    surface = _load_surface(args.surface)
    lam = _load_lamination(surface, args.lamination)
    results = []

    def run(name, fn):
        try:
            ok, detail = fn()
        except DOMAIN_ERRORS as exc:
            ok, detail = False, str(exc)
        results.append({"name": name, "ok": bool(ok), "detail": detail})

    def check_section():
        lam2 = section_s(project_psi(lam), surface)
        mc1 = project_psi(lam).weights()
        mc2 = project_psi(lam2).weights()
        return mc1 == mc2, "psi o s = id on the projection"

    def check_homogeneity():
        gamma = lam.components[0].curve
        base = intersection_number(lam, gamma)
        for k in (1, 2, 3):
            if intersection_number(lam, gamma.repeat(k)) != base * FE(k):
                return False, "failed at k = %d" % k
        return True, "i(lam, gamma^k) = k i(lam, gamma) for k in {1,2,3}"

    def check_discretize():
        for n in (1, 2, 8):
            lam_n = discretize(lam, n)
            if project_psi(lam_n).weights() != project_psi(lam).weights():
                return False, "mass profile changed at n = %d" % n
        return True, "discretize preserves the mass profile for n in {1,2,8}"

    def check_four_point():
        sample = random_lifts(lam, args.lifts, seed=args.seed, max_len=4)
        ok = four_point_check(lam, sample)
        return ok, "%d sampled lifts" % len(sample)

    def check_tree_lengths():
        tm = quotient_tree(lam)
        masses = sorted(format_exact(c.mass) for c in lam.components)
        return tm.edge_lengths() == masses, \
            "edge lengths match the component masses"

    run("section", check_section)
    run("homogeneity", check_homogeneity)
    run("discretize", check_discretize)
    run("tree_edges", check_tree_lengths)
    run("four_point", check_four_point)
    passed = all(r["ok"] for r in results)
    doc = {"passed": passed, "checks": results,
           "seed": args.seed, "lifts": args.lifts}
    lines = ["%s  %s: %s" % ("pass" if r["ok"] else "FAIL",
                             r["name"], r["detail"]) for r in results]
    lines.append("check %s" % ("passed" if passed else "FAILED"))
    _emit(args, doc, lines)
    return 0 if passed else 1


# -- argument plumbing -------------------------------------------------------

def _common(sub, lamination=False, multicurve=False, curve=False,
            words=False):
    sub.add_argument("surface", help="surface document (.surf)")
    if lamination:
        sub.add_argument("lamination", help="lamination document (.json)")
    if multicurve:
        sub.add_argument("multicurve", help="multicurve document (.json)")
    if curve:
        sub.add_argument("curve", help="curve name or crossing word")
    if words:
        sub.add_argument("words", nargs="*", help="curve names or words")
    sub.add_argument("--curves", help="file of named curves")
    sub.add_argument("--format", choices=["json", "text", "svg"],
                     default="text")
    sub.add_argument("--precision", type=int, default=None, metavar="BITS",
                     help="working precision of the hyperbolic backend")
    sub.add_argument("--radius", type=int, default=None, metavar="R",
                     help="tessellation enumeration padding")
    sub.add_argument("--seed", type=int, default=0, metavar="N",
                     help="sampling seed (check)")


def build_parser():
    p = argparse.ArgumentParser(
        prog="lamina",
        description="Measured flat laminations on half-translation surfaces")
    sub = p.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("validate", help="validate a surface document"))
    _common(sub.add_parser("straighten", help="straighten a curve"),
            curve=True)
    _common(sub.add_parser("cylinders", help="maximal cylinder of a curve"),
            curve=True)
    _common(sub.add_parser("intersect",
                           help="intersection number of a lamination"),
            lamination=True, curve=True)
    _common(sub.add_parser("project", help="hyperbolic image multicurve"),
            lamination=True)
    _common(sub.add_parser("fiber", help="psi-fiber parameters"),
            multicurve=True)
    _common(sub.add_parser("tree", help="dual tree quotient graph"),
            lamination=True, words=True)
    _common(sub.add_parser("lengths", help="translation length spectrum"),
            lamination=True, words=True)
    c = sub.add_parser("check", help="four-point and invariant suite")
    _common(c, lamination=True)
    c.add_argument("--lifts", type=int, default=40,
                   help="sampled lifts for the four-point check")
    return p


COMMANDS = {
    "validate": cmd_validate,
    "straighten": cmd_straighten,
    "cylinders": cmd_cylinders,
    "intersect": cmd_intersect,
    "project": cmd_project,
    "fiber": cmd_fiber,
    "tree": cmd_tree,
    "lengths": cmd_lengths,
    "check": cmd_check,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.precision is not None:
        import mpmath
        mpmath.mp.prec = max(args.precision, 53)
    if args.radius is not None:
        tree_mod.PAD_RINGS = max(args.radius, 0)
    try:
        return COMMANDS[args.command](args)
    except (CliError,) + DOMAIN_ERRORS as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
