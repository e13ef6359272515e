"""Newton-Okounkov bodies of divisor and curve classes on projective bundles
over curves, Blaschke sums via surface area measures, and exact polytope
arithmetic to verify the relations between them.
"""

from .errors import (
    DegenerateBody,
    DimensionMismatch,
    EmptyInput,
    IndexOutOfRange,
    LengthMismatch,
    MNotPositive,
    NoConvergence,
    NokError,
    NotCentered,
    NotEffective,
    NotMovable,
    NotNef,
    NotSpanning,
    RankTooSmall,
    UnboundedBody,
    UnknownSuite,
)
from .polytope import (
    APPROX,
    EXACT,
    Polytope,
    canonical_position,
    from_halfspaces,
    hausdorff_distance,
    hull_from_vertices,
    minkowski_sum,
    scale,
    slab_intersection,
    to_off,
    translate,
)

__version__ = "0.1.0"
