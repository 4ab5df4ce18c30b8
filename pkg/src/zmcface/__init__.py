"""Zero-mean-curvature faces in isotropic 3-space.

Construction, validation, classification and meshing of ZMC-faces from
Weierstrass data, with executable checks of the Osserman-type degree
inequalities and their equality conditions.
"""

__version__ = "0.1.0"

from .cxpoly import INFINITY, CPoly, GaussRat, RationalFn
from .localanalysis import DomainSpec, LaurentJet, MeroFn
from .wdata import WeierstrassData, dual_data, validate
from .ends import classify_all_ends, classify_end, verify_o1
from .sing import singular_points, whitney_check
from .osserman import omitted_values, osserman_report
from .surface import SurfaceEvaluator, evaluate, evaluate_dual, mesh
from .fixtures import catalogue

__all__ = [
    "__version__",
    "INFINITY",
    "CPoly",
    "GaussRat",
    "RationalFn",
    "DomainSpec",
    "LaurentJet",
    "MeroFn",
    "WeierstrassData",
    "dual_data",
    "validate",
    "classify_all_ends",
    "classify_end",
    "verify_o1",
    "singular_points",
    "whitney_check",
    "omitted_values",
    "osserman_report",
    "SurfaceEvaluator",
    "evaluate",
    "evaluate_dual",
    "mesh",
    "catalogue",
]
