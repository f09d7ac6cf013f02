"""Deformation coefficients of 2D and 3D linear operators.

The deformation coefficient of a non-degenerate operator is the ratio of the
smallest to the largest semi-axis of the image of the unit circle (sphere),
i.e. the reciprocal condition number ``sigma_min / sigma_max``.
"""

from .core2d import (
    PolarForm,
    SingularPair,
    column_bound2,
    from_polar,
    k2,
    k2_polar,
    singular_pair,
    to_polar,
)
from .core3d import (
    CubicCoeffs,
    EigenTriple,
    GramInvariants,
    InterlaceVerdict,
    char_poly3,
    column_bound3,
    eig3,
    eig3_matrix,
    gram_invariants,
    interlace_check,
    k3,
)
from .errors import (
    ComplexRoots,
    DeformlabError,
    DimensionMismatch,
    DomainError,
    NonConvergence,
    ToleranceNotMet,
    ZeroColumn,
    ZeroMatrix,
)
from .estimate import (
    EXACT_MEAN_K2,
    ROTATION_INVARIANT_MEAN_K2,
    Estimate,
    bound_mean_quadrature,
    inner_antiderivative,
    mean_k2_angular_quadrature,
    mean_k2_exact,
    mean_k2_quadrature,
    mean_monte_carlo,
)
from .sampling import (
    GaussianIID,
    OrderedSimplexColumns,
    SampleStream,
    UniformBall4,
    UniformBidisk,
    sample_matrix,
)
from .verify import CampaignReport, eig_oracle3, equivalence_campaign, interlacing_campaign, svd_oracle2

__version__ = "0.1.0"
