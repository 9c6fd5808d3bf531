"""S-parameter similarity (SPS) scores from the modified Hausdorff distance
between sweeps mapped to real/imaginary/normalized-frequency space."""

from .geometry import (
    RifPointCloud,
    nearest_distance_brute,
    nearest_distance_fast,
    nearest_distance_polyline,
    nearest_distances,
    to_rif,
)
from .metrics import (
    ComparisonConfig,
    ComparisonError,
    Direction,
    ElementReport,
    NNMode,
    SimilarityReport,
    Tier,
    TierThresholds,
    classify_tier,
    compare,
    d_abs,
    d_mh,
    d_mh_directed,
    d_rms,
    effective_band,
    element_sweep,
)
from .touchstone import (
    NetworkData,
    OptionsLine,
    TouchstoneError,
    parse_touchstone,
    read_touchstone,
    write_touchstone,
)

__version__ = "0.1.0"
