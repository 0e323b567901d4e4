"""fglcalc: formal group laws, BP operations and numerical checks on cellular spaces.

Subpackages are plain modules::

    series      truncated multivariate series over graded coefficient rings
    rings       coefficient rings, ring maps, invariant ideals
    fgl         formal group laws and their morphisms
    bp          p-typical theory, Landweber-Novikov operations
    cellular    cohomology of iterated projective bundles, push-forwards
"""
from .errors import FGLCalcError
from .rings import (
    QQ,
    ZZ,
    CoefRing,
    Fp,
    InvariantIdeal,
    RingMap,
    Zp,
    ideal_membership,
    landweber_ideal,
    lazard_rational_ring,
)
from .series import GradedSeries, compose, make_vars, revert
from .fgl import (
    FGLMorphism,
    FormalGroupLaw,
    check_fgl_axioms,
    compose_morphisms,
    fgl_from_logarithm,
    invert_morphism,
    logarithm,
    n_series,
    reorient,
    solve_phi,
)
from .bp import get_context, hazewinkel, mischenko_log, p_typify, rho, total_ln_bp
from .theories import make_theory
from .cellular import (
    CohomologyRing,
    complete_intersection,
    descent_check,
    numerical_kernel,
    parse_space,
    riemann_roch_check,
    todd_genus,
)
from .report import VerificationReport

__version__ = "0.1.0"
