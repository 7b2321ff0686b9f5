"""Measured flat laminations on compact half-translation surfaces."""

from .field import FE, FieldElement, format_exact, parse_exact
from .surface import (HalfTranslationSurface, Polygon, EdgeGluing,
                      SurfaceError, parse_surface, serialize_surface, validate)
from .curves import (CombinatorialCurve, CurveError, parse_curve_line,
                     parse_curves)
from .develop import DevelopedChain, Placement, chain_svg, develop
from .straighten import (FlatCylinder, NullHomotopicError,
                         PeriodicFlatGeodesic, StraightenError,
                         maximal_cylinder, straighten)
from .crossings import (count_crossings, flat_representative,
                        geometric_intersection_flat, interlaced_flat)
from .fuchsian import (AxisEndpoints, FuchsianError, FuchsianModel, GroupWord,
                       UncertainLinking, axis, fuchsian_for_surface,
                       fuchsian_from_genus, intersection_linking, linked)
from .lamination import (CylinderMeasure, LaminationComponent,
                         LaminationError, MeasuredFlatLamination,
                         MeasuredMulticurve, atom, discretize,
                         dump_document, fiber_description,
                         lamination_from_json, lamination_to_json,
                         make_lamination, multicurve_from_json,
                         multicurve_to_json, project_psi, section_s)
from .intersect import (BSetWindow, BackendDisagreement, enumerate_Bset,
                        geometric_intersection, intersection_number)
from .tree import (Lift, StripReplacedMeasure, TreeModel,
                   TranslationLengthResult, compare_with_hyperbolic,
                   four_point_check, pseudo_distance, quotient_tree,
                   random_lifts, strip_replace, translation_length,
                   tree_context)

__all__ = [
    "FE", "FieldElement", "format_exact", "parse_exact",
    "HalfTranslationSurface", "Polygon", "EdgeGluing", "SurfaceError",
    "parse_surface", "serialize_surface", "validate",
    "CombinatorialCurve", "CurveError", "parse_curve_line", "parse_curves",
    "DevelopedChain", "Placement", "chain_svg", "develop",
    "FlatCylinder", "NullHomotopicError", "PeriodicFlatGeodesic",
    "StraightenError", "maximal_cylinder", "straighten",
    "count_crossings", "flat_representative", "geometric_intersection_flat",
    "interlaced_flat",
    "AxisEndpoints", "FuchsianError", "FuchsianModel", "GroupWord",
    "UncertainLinking", "axis", "fuchsian_for_surface", "fuchsian_from_genus",
    "intersection_linking", "linked",
    "CylinderMeasure", "LaminationComponent", "LaminationError",
    "MeasuredFlatLamination", "MeasuredMulticurve", "atom", "discretize",
    "dump_document", "fiber_description", "lamination_from_json",
    "lamination_to_json", "make_lamination", "multicurve_from_json",
    "multicurve_to_json", "project_psi", "section_s",
    "BSetWindow", "BackendDisagreement", "enumerate_Bset",
    "geometric_intersection", "intersection_number",
    "Lift", "StripReplacedMeasure", "TreeModel", "TranslationLengthResult",
    "compare_with_hyperbolic", "four_point_check", "pseudo_distance",
    "quotient_tree", "random_lifts", "strip_replace", "translation_length",
    "tree_context",
]
