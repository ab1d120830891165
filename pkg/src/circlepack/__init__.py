"""One-vertex circle packings and their cross-ratio parameters.

Cross-ratio words and their admissibility, side-pairing patterns of the
(12g-6)-gon, the dependent-triple solve, holonomy traces and developed
packings.
"""

from .combinatorics import (
    EdgeLayout,
    SidePairingPattern,
    VertexTriple,
    build_pattern,
    classify_triple,
    enumerate_patterns,
    select_dependent_triple,
)
from .develop import PackingScene, develop, render_svg, tangency_audit
from .holonomy import (
    HolonomyElement,
    Move,
    MoveWord,
    commuting_check,
    holonomy_of,
    move_matrix,
    rigidity_compare,
    torus_traces,
)
from .moebius import INF, GeneralizedCircle, Moebius, apply, cross_ratio, tangency_point, transform_circle
from .solver import (
    DependentSolveResult,
    ParameterPoint,
    VerificationReport,
    dependent_thresholds,
    jacobian_dependent,
    solve_dependent_triple,
    torus_dependent,
    triple_identity_check,
    verify_point,
)
from .words import (
    Admissibility,
    AdmissibilityClass,
    CrossRatioWord,
    associated_matrix,
    classify_admissibility,
    extension_threshold,
    tangency_points,
    word_product,
)

__version__ = "0.1.0"
