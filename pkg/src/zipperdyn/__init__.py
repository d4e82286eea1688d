"""Exact-arithmetic dynamics of zipper interval maps."""

from .core import AffineMap1D, DerivedQuantities, Parameter, Rect, derived, locate, tile, tiling
from .enclosures import RealEnclosure, exp_enclosure, log_enclosure, pow_enclosure
from .errors import (
    BudgetExceededError,
    DepthInsufficientError,
    DomainError,
    EpsilonTooLargeError,
    PreconditionError,
    PrecisionError,
    SearchFailedError,
    ZipperDynError,
)
from .horseshoe import (
    CoverageProfile,
    HorseshoeCertificate,
    LineWitness,
    brute_search,
    coverage_count,
    cover_params,
    disjointify,
    region_b_search,
    symmetric_search,
    transverse_search,
    verify,
)
from .intervals import Interval
from .regularity import RegularityReport, hoelder, hypersensitivity, tile_hypersensitivity_check
from .symbolic import (
    EmbeddingCertificate,
    Itinerary,
    OrderRealization,
    RealizationCertificate,
    check_embedding,
    check_order_realization,
    check_realization,
    disjoint_horseshoe,
    embed,
    realize_itinerary,
    realize_order,
    refine_into,
)
from .zipper import ImageBound, PiecewiseLinear, approximant, eval_point, image, phi_apply

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
