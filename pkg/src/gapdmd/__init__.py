"""Dynamic mode decomposition with gap-metric model-order selection.

The typical pipeline is: compute innovation parameters (gaps between the
spans of adjacent snapshot windows), locate the dimple that marks an
(almost) invariant window span, then fit a companion-form DMD model with the
recommended window size.
"""
__version__ = "0.1.0"

from .datagen import GeneratorSpec, generate
from .dmd import CompanionModel, ModeSet, fit, fit_window, modes, stack_lagged
from .errors import (
    BoundsError,
    DegenerateInputError,
    GapDMDError,
    MatrixIOError,
    ParseError,
    ShapeError,
    SizeError,
    ValidationError,
)
from .innovation import (
    GapSpectrogram,
    GramKernel,
    InnovationProfile,
    gram_kernel,
    ip_profile,
    ip_profile_recursive,
    ip_profile_svd,
    spectrogram,
)
from .matstore import SnapshotMatrix, WindowSpec, load_matrix, save_matrix, window
from .select import ConditioningReport, OrderRecommendation, conditioning_report, recommend_order
from .subspace import GapValue, OrthonormalBasis, gap, gap_oracle, orthonormalize, sensitivity_check

__all__ = [
    "BoundsError",
    "CompanionModel",
    "ConditioningReport",
    "DegenerateInputError",
    "GapDMDError",
    "GapSpectrogram",
    "GapValue",
    "GeneratorSpec",
    "GramKernel",
    "InnovationProfile",
    "MatrixIOError",
    "ModeSet",
    "OrderRecommendation",
    "OrthonormalBasis",
    "ParseError",
    "ShapeError",
    "SizeError",
    "SnapshotMatrix",
    "ValidationError",
    "WindowSpec",
    "conditioning_report",
    "fit",
    "fit_window",
    "gap",
    "gap_oracle",
    "generate",
    "gram_kernel",
    "ip_profile",
    "ip_profile_recursive",
    "ip_profile_svd",
    "load_matrix",
    "modes",
    "orthonormalize",
    "recommend_order",
    "save_matrix",
    "sensitivity_check",
    "spectrogram",
    "stack_lagged",
    "window",
]
