"""Spiked-covariance ground truth, Gaussian observation sampling, covariance accumulation.

Randomness contract: streams are generated by numpy's PCG64 generator with its
ziggurat Gaussian transform (``np.random.default_rng(seed)``), seeded with a
64-bit unsigned integer. Each observation consumes exactly d + n standard
normal variates, the d spike coefficients first, then the n noise coordinates.
Batched and one-at-a-time sampling produce bit-identical streams.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg.blas import dsymm, dsyr

from .exceptions import DimensionMismatch, EmptyAccumulator
from .linalg import validate_frame


def make_rng(seed: int) -> np.random.Generator:
    """The package-wide seeded generator (PCG64, ziggurat normals)."""
    return np.random.default_rng(int(seed))


@dataclass(frozen=True)
class SpikeModel:
    """Low-rank-plus-noise ground truth: covariance V diag(lambdas) V' + sigma^2 I.

    eigenvalues must be positive and non-increasing; eigenvectors is an n x d
    orthonormal frame. sigma = 0 is admitted (noiseless spikes) even though
    typical use has sigma = 1.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sigma: float = 1.0

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=float))
        V = validate_frame(self.eigenvectors)
        if lam.ndim != 1 or lam.size != V.shape[1]:
            raise DimensionMismatch(
                f"{lam.size} eigenvalues for {V.shape[1]} eigenvector columns"
            )
        if not np.all(lam > 0):
            raise ValueError("spike eigenvalues must be strictly positive")
        if np.any(np.diff(lam) > 0):
            raise ValueError("spike eigenvalues must be non-increasing")
        if V.shape[1] >= V.shape[0]:
            raise ValueError("spike count d must be smaller than the ambient dimension n")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError("sigma must be a finite nonnegative number")
        lam = lam.copy()
        V = V.copy()
        lam.setflags(write=False)
        V.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)
        object.__setattr__(self, "eigenvectors", V)
        object.__setattr__(self, "sigma", float(self.sigma))

    @property
    def n(self) -> int:
        return self.eigenvectors.shape[0]

    @property
    def d(self) -> int:
        return self.eigenvectors.shape[1]


def spectral_gap_ok(eigenvalues, tau: float) -> bool:
    """Whether tau * lambda_d >= lambda_1, the subspace identifiability condition."""
    lam = np.atleast_1d(np.asarray(eigenvalues, dtype=float))
    if tau < 1:
        raise ValueError("tau must be >= 1")
    return bool(tau * lam[-1] >= lam[0])


def true_covariance(model: SpikeModel) -> np.ndarray:
    """V diag(lambdas) V' + sigma^2 I; eigenvalues lambda_i + sigma^2 and sigma^2."""
    V = model.eigenvectors
    cov = (V * model.eigenvalues) @ V.T
    cov[np.diag_indices_from(cov)] += model.sigma**2
    return cov


def _assemble(model: SpikeModel, coeffs: np.ndarray, noise: np.ndarray) -> np.ndarray:
    # Accumulated column by column so the batched and per-sample paths run the
    # same elementwise float operations (bit-identical streams).
    out = model.sigma * noise
    scale = np.sqrt(model.eigenvalues)
    V = model.eigenvectors
    if coeffs.ndim == 1:
        for i in range(model.d):
            out += (scale[i] * coeffs[i]) * V[:, i]
    else:
        for i in range(model.d):
            out += (scale[i] * coeffs[:, i])[:, None] * V[:, i]
    return out


def sample_observation(model: SpikeModel, rng: np.random.Generator) -> np.ndarray:
    """One draw sum_i sqrt(lambda_i) u_i v_i + sigma xi.

    Consumes exactly d + n standard normal variates from rng, the spike
    coefficients u first, then the noise vector xi.
    """
    z = rng.standard_normal(model.d + model.n)
    return _assemble(model, z[: model.d], z[model.d :])


def sample_batch(model: SpikeModel, seed: int, count: int) -> np.ndarray:
    """count observations as rows; identical to count sequential draws from seed."""
    rng = make_rng(seed)
    z = rng.standard_normal((count, model.d + model.n))
    return _assemble(model, z[:, : model.d], z[:, model.d :])


def observation_stream(model: SpikeModel, seed: int):
    """Endless iterator of observations for the given seed."""
    rng = make_rng(seed)
    while True:
        yield sample_observation(model, rng)


class CovarianceAccumulator:
    """Running sum S(t) = sum_i gamma^(t-i) x(i) x(i)', updated one sample at a time.

    gamma in (0, 1] is the forgetting factor; gamma = 1 keeps every sample with
    equal weight (the stationary case). Only the upper triangle is stored and
    updated (BLAS dsyr), so an update costs one triangular rank-one pass; the
    ``matrix`` property materializes the exactly-symmetric full matrix.
    """

    def __init__(self, n: int, gamma: float = 1.0):
        if not 0 < gamma <= 1:
            raise ValueError(f"forgetting factor must be in (0, 1], got {gamma}")
        self.n = int(n)
        self.gamma = float(gamma)
        self.t = 0
        self._upper = np.zeros((self.n, self.n), order="F")

    def update(self, x: np.ndarray) -> "CovarianceAccumulator":
        """S <- gamma * S + x x'; t <- t + 1."""
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected a vector of length {self.n}, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValueError("observation contains non-finite entries")
        if self.gamma != 1.0:
            self._upper *= self.gamma
        self._upper = dsyr(1.0, x, a=self._upper, lower=0, overwrite_a=1)
        self.t += 1
        return self

    @property
    def matrix(self) -> np.ndarray:
        """The full symmetric sum matrix (lower triangle mirrored from the upper)."""
        upper = np.triu(self._upper)
        return upper + np.triu(self._upper, 1).T

    def normalized(self) -> np.ndarray:
        """S / t for gamma = 1; the raw sum matrix for gamma < 1."""
        if self.t == 0:
            raise EmptyAccumulator("no samples accumulated yet")
        if self.gamma == 1.0:
            return self.matrix / self.t
        return self.matrix

    def weight_sum(self) -> float:
        """Total sample weight: t for gamma = 1, else (1 - gamma^t) / (1 - gamma)."""
        if self.gamma == 1.0:
            return float(self.t)
        return (1.0 - self.gamma**self.t) / (1.0 - self.gamma)

    def dot(self, V: np.ndarray) -> np.ndarray:
        """S @ V straight from the triangular storage (BLAS dsymm)."""
        V = np.asfortranarray(V, dtype=float)
        squeeze = V.ndim == 1
        if squeeze:
            V = V[:, None]
        out = dsymm(1.0, self._upper, V, side=0, lower=0)
        return out[:, 0] if squeeze else out
