"""Periodized orthogonal discrete wavelet transform (Haar and Symmlet-8).

The transform is a cascade of two-channel filter-bank stages with circular
(periodized) boundary handling, which keeps it exactly orthogonal: energy and
inner products are preserved and ``idwt`` inverts ``dwt`` to round-off.
Coefficients are laid out coarsest-first: [a_J | d_J | d_{J-1} | ... | d_1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import BadLength

# Scaling-filter tap tables (WaveLab convention, normalized to unit energy below).
_HAAR = [1.0, 1.0]
_SYMMLET8 = [
    0.002672793393, -0.000428394300, -0.021145686528, 0.005386388754,
    0.069490465911, -0.038493521263, -0.073462508761, 0.515398670374,
    1.099106630537, 0.680745347190, -0.086653615406, -0.202648655286,
    0.010758611751, 0.044823623042, -0.000766690896, -0.004783458512,
]


@dataclass(frozen=True)
class WaveletFilter:
    """An orthonormal scaling filter and its quadrature-mirror highpass."""

    name: str
    lowpass: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.lowpass, dtype=float)
        if h.ndim != 1 or h.size % 2:
            raise ValueError("lowpass filter must be a 1-d array of even length")
        if abs(h @ h - 1.0) > 1e-12:
            raise ValueError(f"filter {self.name!r} does not have unit energy")
        for m in range(1, h.size // 2):
            if abs(h[: -2 * m] @ h[2 * m :]) > 1e-12:
                raise ValueError(f"filter {self.name!r} violates double-shift orthogonality")
        h = h.copy()
        h.setflags(write=False)
        object.__setattr__(self, "lowpass", h)

    @property
    def highpass(self) -> np.ndarray:
        h = self.lowpass
        g = ((-1.0) ** np.arange(h.size)) * h[::-1]
        return g


_REGISTRY = {
    "haar": np.asarray(_HAAR) / np.linalg.norm(_HAAR),
    "symmlet8": np.asarray(_SYMMLET8) / np.linalg.norm(_SYMMLET8),
}


def wavelet_filter(name: str) -> WaveletFilter:
    """Look up a built-in filter by name ('haar' or 'symmlet8')."""
    if isinstance(name, WaveletFilter):
        return name
    try:
        taps = _REGISTRY[name]
    except KeyError:
        raise ValueError(f"unknown wavelet {name!r}; available: {sorted(_REGISTRY)}") from None
    return WaveletFilter(name=name, lowpass=taps)


def default_levels(length: int) -> int:
    """Default decomposition depth J - 3 for signals of length 2^J (at least 1)."""
    return max(1, int(math.log2(length)) - 3)


def _check_length(length: int, levels: int) -> None:
    if levels < 1:
        raise BadLength(f"levels must be >= 1, got {levels}")
    if length < 2**levels or length % 2**levels:
        raise BadLength(
            f"signal length {length} is not divisible by 2^levels = {2**levels}"
        )


def _gather(size: int, taps: int) -> np.ndarray:
    return (2 * np.arange(size // 2)[:, None] + np.arange(taps)[None, :]) % size


def dwt(x: np.ndarray, filt="symmlet8", levels: int | None = None) -> np.ndarray:
    """Analysis transform of a vector whose length is divisible by 2^levels."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise BadLength(f"expected a vector, got shape {x.shape}")
    f = wavelet_filter(filt)
    if levels is None:
        levels = default_levels(x.size)
    _check_length(x.size, levels)
    h, g = f.lowpass, f.highpass
    out = x.copy()
    size = x.size
    for _ in range(levels):
        seg = out[_gather(size, h.size)]
        approx = seg @ h
        detail = seg @ g
        out[: size // 2] = approx
        out[size // 2 : size] = detail
        size //= 2
    return out


def idwt(c: np.ndarray, filt="symmlet8", levels: int | None = None) -> np.ndarray:
    """Exact inverse of ``dwt`` (the transform is orthogonal, so this is its adjoint)."""
    c = np.asarray(c, dtype=float)
    if c.ndim != 1:
        raise BadLength(f"expected a vector, got shape {c.shape}")
    f = wavelet_filter(filt)
    if levels is None:
        levels = default_levels(c.size)
    _check_length(c.size, levels)
    h, g = f.lowpass, f.highpass
    out = c.copy()
    size = c.size >> levels
    for _ in range(levels):
        doubled = 2 * size
        idx = _gather(doubled, h.size)
        stage = np.zeros(doubled)
        np.add.at(stage, idx, out[:size, None] * h + out[size:doubled, None] * g)
        out[:doubled] = stage
        size = doubled
    return out


def transform_matrix(length: int, filt="symmlet8", levels: int | None = None) -> np.ndarray:
    """The orthogonal matrix W with dwt(x) = W @ x, built column by column.

    Handy for transforming many observations at once: rows of a data matrix X
    map to the wavelet domain as X @ W.T.
    """
    W = np.empty((length, length))
    basis = np.zeros(length)
    for j in range(length):
        basis[j] = 1.0
        W[:, j] = dwt(basis, filt, levels)
        basis[j] = 0.0
    return W
