"""Streaming subspace tracking with sparse thresholding.

The package tracks the span of the top-d covariance eigenvectors from a
stream of observations. `CPAST` is the dense tracker (an online orthogonal
iteration); `SCPAST` adds a per-column thresholding step that exploits
sparsity of the leading eigenvectors. Supporting modules supply the
spiked-covariance generator, subspace geometry, threshold schedules,
an orthogonal wavelet transform, rate-bound evaluators, and a CLI
(`subtrack simulate|track|sweep`).
"""

__version__ = "0.1.0"

from .diagnostics import (
    BoundInputs,
    dense_error_bound,
    dense_warmup_floor,
    noise_envelope,
    noise_envelope_unnormalized,
    sparse_error_bound,
    sparse_warmup_floor,
)
from .linalg import (
    Eigenpairs,
    PrincipalAngle,
    frame_deviation,
    largest_principal_angle,
    subspace_distance,
    symmetric_orthogonalize,
    top_eigenpairs,
    validate_frame,
)
from .model import (
    CovarianceAccumulator,
    SpikeModel,
    make_rng,
    observation_stream,
    sample_batch,
    sample_observation,
    spectral_gap_ok,
    true_covariance,
)
from .sparsity import (
    SparsityProfile,
    ThresholdRule,
    apply_threshold,
    coordinate_noise_scale,
    default_signal_constant,
    effective_dimension,
    in_weak_lr_ball,
    schedule_constant_floor,
    signal_index_set,
    threshold_columns,
    threshold_schedule,
)
from .trackers import CPAST, SCPAST, cpast_update, scpast_update, shrink_columns, track_stream
from .wavelets import WaveletFilter, default_levels, dwt, idwt, transform_matrix, wavelet_filter

__all__ = [
    "BoundInputs",
    "CPAST",
    "CovarianceAccumulator",
    "Eigenpairs",
    "PrincipalAngle",
    "SCPAST",
    "SparsityProfile",
    "SpikeModel",
    "ThresholdRule",
    "WaveletFilter",
    "apply_threshold",
    "coordinate_noise_scale",
    "cpast_update",
    "default_levels",
    "default_signal_constant",
    "dense_error_bound",
    "dense_warmup_floor",
    "dwt",
    "effective_dimension",
    "frame_deviation",
    "idwt",
    "in_weak_lr_ball",
    "largest_principal_angle",
    "make_rng",
    "noise_envelope",
    "noise_envelope_unnormalized",
    "observation_stream",
    "sample_batch",
    "sample_observation",
    "schedule_constant_floor",
    "scpast_update",
    "shrink_columns",
    "signal_index_set",
    "sparse_error_bound",
    "sparse_warmup_floor",
    "spectral_gap_ok",
    "subspace_distance",
    "symmetric_orthogonalize",
    "threshold_columns",
    "threshold_schedule",
    "top_eigenpairs",
    "track_stream",
    "transform_matrix",
    "true_covariance",
    "validate_frame",
    "wavelet_filter",
]
