"""Linear projections that drop distractor directions from grouped data.

Pipeline: accumulate per-set sufficient statistics, form the weighted
within-set and all-set scatter estimates, solve the symmetric-definite
generalized eigenproblem between them, bucket the spectrum, and project
test data onto the complement of the removed directions.
"""

from .detect import ScoreReport, ScorerSpec, evaluate, score
from .errors import (
    ConfigError,
    DegenerateModelError,
    DimensionError,
    EmptySetError,
    FocusError,
    IndefiniteDenominatorError,
    MetricError,
    ModelCorruptError,
    ModelVersionError,
    NumericInputError,
    ScorerError,
)
from .geneig import (
    FocusSpectrum,
    PartitionLabel,
    SpectrumPartition,
    partition,
    relative_epsilon,
    solve,
)
from .projection import FocusModel, apply, backproject, build_mapping, load, save
from .scatter import (
    ScatterSummary,
    SetCollection,
    SufficientStats,
    WeightingScheme,
    summarize,
)
from .synth import (
    AnalyticSpec,
    IlluminationSpec,
    ImageCorpus,
    gen_analytic,
    gen_images,
    illumination_plane_basis,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyticSpec",
    "ConfigError",
    "DegenerateModelError",
    "DimensionError",
    "EmptySetError",
    "FocusError",
    "FocusModel",
    "FocusSpectrum",
    "IlluminationSpec",
    "ImageCorpus",
    "IndefiniteDenominatorError",
    "MetricError",
    "ModelCorruptError",
    "ModelVersionError",
    "NumericInputError",
    "PartitionLabel",
    "ScatterSummary",
    "ScoreReport",
    "ScorerError",
    "ScorerSpec",
    "SetCollection",
    "SpectrumPartition",
    "SufficientStats",
    "WeightingScheme",
    "apply",
    "backproject",
    "build_mapping",
    "evaluate",
    "gen_analytic",
    "gen_images",
    "illumination_plane_basis",
    "load",
    "partition",
    "relative_epsilon",
    "save",
    "score",
    "solve",
    "summarize",
    "__version__",
]
