"""Continuous surjections of the line with unbounded fibers.

Submodules: ``curve_core`` (Hilbert and Peano curves), ``line_tiling``
(tiled line maps), ``entire_orders`` (orders of entire functions),
``algebra_family``, ``linear_family``, ``sequence_maps`` and ``verify``.
"""
from .algebra_family import AlgebraElement, GeneratorSpec, element_eval, element_order, surjectivity_scan
from .curve_core import (
    CellAddress,
    CurvePoint,
    DyadicParam,
    cell_of,
    hilbert_eval,
    iter_cells,
    peano_eval,
    preimage_of_cell,
)
from .entire_orders import (
    OrderEstimate,
    PolySpec,
    TruncatedSeries,
    compose_poly,
    index_set,
    max_modulus,
    order_from_coeffs,
    order_from_growth,
    prescribed_order_series,
)
from .errors import *  # noqa: F401,F403
from .line_tiling import (
    PAIRING,
    TargetSpace,
    TiledLineMap,
    block_map_eval,
    composite_eval,
    fiber_witnesses,
    projection_lift,
    tile_lookup,
)
from .linear_family import (
    AdSet,
    Combination,
    FamilyMember,
    RationalEnumeration,
    Seed,
    ad_set,
    combo_eval,
    independence_test,
    member_eval,
)
from .sequence_maps import (
    Box,
    FiniteSeq,
    IndexMap,
    PhiComposite,
    RateVector,
    big_phi,
    big_phi_inverse,
    box_cover,
    equicontinuity_bound,
    index_surjection,
    phi_r,
    phi_r_inverse,
    product_metric,
    uniform_metric,
)
from .verify import CoverageReport, SuiteResult, coverage_scan, run_suite, unboundedness_scan

__version__ = "0.1.0"
