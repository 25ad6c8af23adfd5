"""Thresholding rules, the per-column threshold schedule, and sparsity descriptors.

The threshold contract, for any rule g and level beta >= 0:

    x - beta <= g(x, beta) <= x + beta      and      g(x, beta) = 0 when |x| <= beta

Both built-in rules satisfy it: hard keeps entries strictly above the level,
soft additionally shrinks the survivors by the level. The boundary |x| = beta
maps to zero for both. All logarithms are natural.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NegativeThreshold

RULES = ("hard", "soft")


@dataclass(frozen=True)
class ThresholdRule:
    """A thresholding family and its schedule constant a >= 0."""

    kind: str = "hard"
    a: float = 1.5

    def __post_init__(self):
        if self.kind not in RULES:
            raise ValueError(f"unknown threshold rule {self.kind!r}, expected one of {RULES}")
        if not self.a >= 0:
            raise ValueError(f"schedule constant a must be >= 0, got {self.a}")


def apply_threshold(x, beta, kind: str = "hard"):
    """Apply a thresholding rule entrywise; scalar in, scalar out.

    hard: x * 1{|x| > beta};  soft: sign(x) * (|x| - beta)_+.

    The contract |g - x| <= beta holds exactly on the computed values: the
    soft rule saturates it with equality, so after the one rounding in
    |x| - beta the shrunk value is nudged single ulps toward x until the
    recomputed gap is within the level.
    """
    if kind not in RULES:
        raise ValueError(f"unknown threshold rule {kind!r}, expected one of {RULES}")
    beta_arr = np.asarray(beta, dtype=float)
    if np.any(beta_arr < 0):
        raise NegativeThreshold(f"threshold level must be >= 0, got {beta}")
    x_arr = np.asarray(x, dtype=float)
    if kind == "hard":
        out = np.where(np.abs(x_arr) > beta_arr, x_arr, 0.0)
    else:
        out = np.sign(x_arr) * np.maximum(np.abs(x_arr) - beta_arr, 0.0)
        out, x_b, beta_b = np.broadcast_arrays(out, x_arr, beta_arr)
        out = np.array(out)
        overshoot = np.abs(out - x_b) > beta_b
        while np.any(overshoot):
            out[overshoot] = np.nextafter(out[overshoot], x_b[overshoot])
            overshoot = np.abs(out - x_b) > beta_b
    if np.isscalar(x) or x_arr.ndim == 0:
        return float(out)
    return out


def threshold_columns(M: np.ndarray, betas: np.ndarray, kind: str = "hard") -> np.ndarray:
    """Threshold column i of an n x d matrix at level betas[i]."""
    M = np.asarray(M, dtype=float)
    betas = np.asarray(betas, dtype=float)
    if M.ndim != 2 or betas.shape != (M.shape[1],):
        raise ValueError(f"need one level per column: matrix {M.shape}, levels {betas.shape}")
    return apply_threshold(M, betas[None, :], kind)


def threshold_schedule(t: int, lambdas, n: int, a: float) -> np.ndarray:
    """Per-column levels beta_i(t) = a * sqrt((lambda_i + 1) * log(max(n, t)) / t)."""
    if t < 1:
        raise ValueError(f"sample count t must be >= 1, got {t}")
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    return a * np.sqrt((lam + 1.0) * math.log(max(n, t)) / t)


def schedule_constant_floor(n: int, horizon: int, warmup: int) -> float:
    """Lower bound 3*sqrt(2)*log(max(n, T))/log(max(n, t0)) for a and gamma0."""
    return 3.0 * math.sqrt(2.0) * math.log(max(n, horizon)) / math.log(max(n, warmup))


def coordinate_noise_scale(lambdas) -> np.ndarray:
    """Per-spike scale h_i = sqrt(lambda_i + 1) / lambda_i of eigenvector entry noise."""
    lam = np.atleast_1d(np.asarray(lambdas, dtype=float))
    return np.sqrt(lam + 1.0) / lam


def default_signal_constant(a: float, tau: float, d: int) -> float:
    """Default signal-set constant b = 0.1 * a / (sqrt(tau) * sqrt(d))."""
    return 0.1 * a / (math.sqrt(tau) * math.sqrt(d))


@dataclass(frozen=True)
class SparsityProfile:
    """Weak-l_r sparsity description of the leading eigenvectors.

    r is the weak-l_r exponent in (0, 2); radii holds one radius s_i per
    eigenvector; b is the signal-set constant (use default_signal_constant
    for the standard choice).
    """

    r: float
    radii: tuple
    b: float

    def __post_init__(self):
        if not 0 < self.r < 2:
            raise ValueError(f"weak-l_r exponent must lie in (0, 2), got {self.r}")
        radii = tuple(float(s) for s in np.atleast_1d(self.radii))
        if any(s <= 0 for s in radii):
            raise ValueError("all radii must be positive")
        if not self.b > 0:
            raise ValueError(f"signal constant b must be positive, got {self.b}")
        object.__setattr__(self, "radii", radii)


def signal_index_set(V: np.ndarray, t: int, lambdas, b: float) -> np.ndarray:
    """Indices j with |v_ij| >= b * h_i * sqrt(log(max(n, t)) / t) for some i.

    Diagnostic on the ground-truth eigenvectors: the coordinates whose entries
    rise above the per-spike noise floor after t samples.
    """
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    h = coordinate_noise_scale(lambdas)
    floor = b * h * math.sqrt(math.log(max(n, t)) / t)
    mask = np.any(np.abs(V) >= floor[None, :], axis=1)
    return np.flatnonzero(mask)


def effective_dimension(t: int, n: int, lambdas, profile: SparsityProfile) -> float:
    """Effective coordinate count M(t), capped at the ambient dimension n.

    M(t) = min(n, sum_j (s_j / h_j)^r * (log(max(n, t)) / t)^(-r/2)); the size
    of the signal index set is of this order (d <= card <= C * M(t), with C
    unknown), which makes it the effort scale of a sparse tracker step.
    """
    if t < 1:
        raise ValueError(f"sample count t must be >= 1, got {t}")
    h = coordinate_noise_scale(lambdas)
    s = np.asarray(profile.radii, dtype=float)
    if s.shape != h.shape:
        raise ValueError(f"{s.size} radii for {h.size} eigenvalues")
    ratio = math.log(max(n, t)) / t
    total = float(np.sum((s / h) ** profile.r) * ratio ** (-profile.r / 2.0))
    return min(float(n), total)


def in_weak_lr_ball(v: np.ndarray, s: float, r: float) -> bool:
    """Whether the k-th largest |entry| of v is <= s * k^(-1/r) for every k."""
    if not 0 < r < 2:
        raise ValueError(f"weak-l_r exponent must lie in (0, 2), got {r}")
    if not s > 0:
        raise ValueError(f"radius must be positive, got {s}")
    mags = np.sort(np.abs(np.asarray(v, dtype=float)))[::-1]
    k = np.arange(1, mags.size + 1, dtype=float)
    return bool(np.all(mags <= s * k ** (-1.0 / r)))
