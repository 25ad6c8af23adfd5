"""Test eigenvectors: planted sparse frames and synthetic 1-d profiles.

The profile generators sample a closed-form function on the grid
u_j = j / n, j = 0..n-1, and normalize to unit length:

  step:       +1 on [0, breakpoint), -1 on [breakpoint, 1)
  one_peak:   (1 + |u - c| / w)^(-4), a single sharp bump
  three_peak: sum of three such bumps with distinct centers and heights

A narrower bump has sparser wavelet coefficients, which is exactly what a
sparse tracker exploits.
"""
from __future__ import annotations

import numpy as np


def _normalize(v: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ValueError("profile is identically zero")
    return v / norm


def step_profile(n: int, breakpoint: float = 0.5) -> np.ndarray:
    u = np.arange(n) / n
    return _normalize(np.where(u < breakpoint, 1.0, -1.0))


def _bump(u: np.ndarray, center: float, width: float) -> np.ndarray:
    return (1.0 + np.abs(u - center) / width) ** -4.0


def one_peak_profile(n: int, center: float = 0.5, width: float = 0.01) -> np.ndarray:
    u = np.arange(n) / n
    return _normalize(_bump(u, center, width))


def three_peak_profile(
    n: int,
    centers=(0.2, 0.45, 0.75),
    width: float = 0.01,
    heights=(1.0, 0.7, 1.2),
) -> np.ndarray:
    u = np.arange(n) / n
    v = sum(h * _bump(u, c, width) for c, h in zip(centers, heights))
    return _normalize(v)


PROFILES = {
    "step": step_profile,
    "one_peak": one_peak_profile,
    "three_peak": three_peak_profile,
}


def canonical_frame(n: int, d: int) -> np.ndarray:
    """The first d coordinate directions as an n x d frame."""
    return np.eye(n)[:, :d].copy()


def sparse_uniform_frame(n: int, d: int, support: int) -> np.ndarray:
    """Orthonormal n x d frame with disjoint equal-weight supports of the given size.

    Column j is 1/sqrt(support) on coordinates j*support .. (j+1)*support - 1
    and zero elsewhere.
    """
    if support < 1 or d * support > n:
        raise ValueError(f"need 1 <= d * support <= n, got d={d}, support={support}, n={n}")
    V = np.zeros((n, d))
    for j in range(d):
        V[j * support : (j + 1) * support, j] = 1.0 / np.sqrt(support)
    return V
