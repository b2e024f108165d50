"""Controlled frames and controlled fusion frames in finite dimensions."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .numerics import (  # noqa: F401
    hermitian_spectrum,
    operator_norm,
    orthonormalize,
    pinv,
    psd_sqrt,
    subspace_intersection,
    svd,
    trace_norm,
)
from .vector_frames import (  # noqa: F401
    Classification,
    ControlledPair,
    FrameBounds,
    VectorFrame,
    controlled_frame_bounds,
    controlled_frame_operator,
    eigensum_identity,
)
from .fusion import (  # noqa: F401
    ControlledFusionSystem,
    Subspace,
    WeightedSubspace,
    analysis_apply,
    analysis_matrix,
    build_system,
    fusion_frame_bounds,
    fusion_frame_operator,
    projection,
    synthesis_apply,
    synthesis_characterization,
)
from .erasure import (  # noqa: F401
    ErasureCase,
    erasure_analysis,
    erasure_operator_norm,
    fixed_point_subspace,
    reconstruction_error,
)
from .approx import (  # noqa: F401
    approximation_analysis,
    approximation_operator,
    cross_operator,
    trace_class_check,
)
from .config import generate_system, load_system  # noqa: F401
