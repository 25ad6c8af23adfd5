"""Evaluators for the theoretical error envelopes and rate bounds.

These are overlay/sanity quantities, never correctness oracles: the absolute
constants in the rate bounds are unknown, so callers supply them (default 1)
and the evaluators gate nothing. What is testable is the shape: how the
bounds scale with t, n and the spike strengths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import spectral_gap_ok
from .sparsity import SparsityProfile, coordinate_noise_scale, effective_dimension


def noise_envelope(n: int, d: int, t: int) -> float:
    """Spectral-norm scale of the covariance estimation noise after t samples:

    5 sqrt((n - d)/t) + 5 sqrt(6) sqrt(log(max(n, t))/t).
    """
    if t < 1:
        raise ValueError(f"sample count t must be >= 1, got {t}")
    if not 0 < d < n:
        raise ValueError(f"need 0 < d < n, got d={d}, n={n}")
    return 5.0 * math.sqrt((n - d) / t) + 5.0 * math.sqrt(6.0) * math.sqrt(
        math.log(max(n, t)) / t
    )


def noise_envelope_unnormalized(n: int, d: int, t: int) -> float:
    """sqrt(t) times ``noise_envelope``: 5 sqrt(n-d) + 5 sqrt(6) sqrt(log(max(n, t)))."""
    if not 0 < d < n:
        raise ValueError(f"need 0 < d < n, got d={d}, n={n}")
    return 5.0 * math.sqrt(n - d) + 5.0 * math.sqrt(6.0) * math.sqrt(math.log(max(n, t)))


@dataclass(frozen=True)
class BoundInputs:
    """Problem parameters shared by the rate-bound evaluators.

    The spectral gap condition tau * lambda_d >= lambda_1 is validated at
    construction; profile is only needed for the sparse bound.
    """

    n: int
    d: int
    lambdas: tuple
    tau: float
    t0: int = 1
    horizon: int = 1
    profile: SparsityProfile | None = None

    def __post_init__(self):
        lam = tuple(float(v) for v in np.atleast_1d(self.lambdas))
        if len(lam) != self.d or not 0 < self.d < self.n:
            raise ValueError(f"need {self.d} eigenvalues with 0 < d < n={self.n}")
        if any(v <= 0 for v in lam) or any(a < b for a, b in zip(lam, lam[1:])):
            raise ValueError("eigenvalues must be positive and non-increasing")
        if not spectral_gap_ok(lam, self.tau):
            raise ValueError(
                f"spectral gap violated: tau*lambda_d = {self.tau * lam[-1]:.4g} "
                f"< lambda_1 = {lam[0]:.4g}"
            )
        object.__setattr__(self, "lambdas", lam)


def _separation_term(inputs: BoundInputs, t: int) -> float:
    lam1, lamd = inputs.lambdas[0], inputs.lambdas[-1]
    return (lam1 + 1.0) / lamd**2 * math.log(max(inputs.n, t)) / t


def dense_error_bound(inputs: BoundInputs, t: int, c1: float = 1.0, c2: float = 1.0) -> float:
    """Dense-tracker rate shape:

    c1 (lambda_d+1)/lambda_d^2 (n-d)/t + c2 (lambda_1+1)/lambda_d^2 log(max(n,t))/t.
    """
    if t < 1:
        raise ValueError(f"sample count t must be >= 1, got {t}")
    lamd = inputs.lambdas[-1]
    first = (lamd + 1.0) / lamd**2 * (inputs.n - inputs.d) / t
    return c1 * first + c2 * _separation_term(inputs, t)


def sparse_error_bound(inputs: BoundInputs, t: int, c1: float = 1.0, c2: float = 1.0) -> float:
    """Sparse-tracker rate shape, with the ambient count n replaced by the
    effective dimension M(t):

    c1 h_d^2 M(t) log(max(n,t))/t + c2 (lambda_1+1)/lambda_d^2 log(max(n,t))/t.
    """
    if inputs.profile is None:
        raise ValueError("sparse bound needs a SparsityProfile")
    if t < 1:
        raise ValueError(f"sample count t must be >= 1, got {t}")
    h_d = float(coordinate_noise_scale(inputs.lambdas)[-1])
    m_t = effective_dimension(t, inputs.n, inputs.lambdas, inputs.profile)
    first = h_d**2 * m_t * math.log(max(inputs.n, t)) / t
    return c1 * first + c2 * _separation_term(inputs, t)


def dense_warmup_floor(inputs: BoundInputs) -> float:
    """Smallest warm-up count t0 satisfying sqrt(t0) >= 4 sqrt(2) R (lambda_1+1)/lambda_d,

    with R the unnormalized noise envelope at the horizon.
    """
    lam1, lamd = inputs.lambdas[0], inputs.lambdas[-1]
    r_max = noise_envelope_unnormalized(inputs.n, inputs.d, max(inputs.horizon, 1))
    root = 4.0 * math.sqrt(2.0) * r_max * (lam1 + 1.0) / lamd
    return root**2


def sparse_warmup_floor(inputs: BoundInputs, c1: float = 1.0, c2: float = 1.0) -> float:
    """Sparse analogue of ``dense_warmup_floor``:

    sqrt(t0) >= (c1 h_d sqrt(M(T)) + c2) (lambda_1+1)/lambda_d sqrt(log(max(n, T))).
    """
    if inputs.profile is None:
        raise ValueError("sparse warm-up floor needs a SparsityProfile")
    lam1, lamd = inputs.lambdas[0], inputs.lambdas[-1]
    horizon = max(inputs.horizon, 1)
    h_d = float(coordinate_noise_scale(inputs.lambdas)[-1])
    m_T = effective_dimension(horizon, inputs.n, inputs.lambdas, inputs.profile)
    root = (
        (c1 * h_d * math.sqrt(m_T) + c2)
        * (lam1 + 1.0)
        / lamd
        * math.sqrt(math.log(max(inputs.n, horizon)))
    )
    return root**2
