"""Dense subspace geometry: orthogonalization, eigenpairs, distances, principal angles.

All functions are pure and operate on plain float64 ndarrays. A "frame" is an
n x d matrix with orthonormal columns; orthonormality is always checked against
the max norm of V'V - I with tolerance 1e-10.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .exceptions import (
    DegenerateSubspace,
    DimensionMismatch,
    NotSymmetric,
    SubspacesOrthogonal,
)

FRAME_TOL = 1e-10

# relative singular-value floor below which a matrix no longer spans d dimensions
RANK_RTOL = 1e-12


class Eigenpairs(NamedTuple):
    values: np.ndarray   # descending
    vectors: np.ndarray  # n x d, orthonormal columns


class PrincipalAngle(NamedTuple):
    cos: float
    tan: float


def frame_deviation(V: np.ndarray) -> float:
    """Max-norm departure of V'V from the identity."""
    V = np.asarray(V, dtype=float)
    G = V.T @ V
    return float(np.max(np.abs(G - np.eye(G.shape[0]))))


def validate_frame(V: np.ndarray, tol: float = FRAME_TOL) -> np.ndarray:
    """Return V as a float64 n x d array, raising if it is not an orthonormal frame."""
    V = np.asarray(V, dtype=float)
    if V.ndim != 2 or V.shape[0] < V.shape[1]:
        raise DimensionMismatch(f"expected an n x d frame with d <= n, got shape {V.shape}")
    if not np.all(np.isfinite(V)):
        raise ValueError("frame contains non-finite entries")
    dev = frame_deviation(V)
    if dev > tol:
        raise ValueError(f"columns are not orthonormal: max|V'V - I| = {dev:.3e} > {tol:.1e}")
    return V


def symmetric_orthogonalize(M: np.ndarray, rank_rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormalize the columns of M as M (M'M)^(-1/2).

    The inverse square root is taken through the eigendecomposition of the
    d x d Gram matrix, so the cost is O(nd^2 + d^3). The result spans the
    column space of M exactly and is invariant to scaling M by any c > 0.

    Raises DegenerateSubspace when the smallest singular value of M is at or
    below rank_rtol times the largest (M does not span d dimensions).
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d array, got shape {M.shape}")
    V = _gram_orthogonalize(M, rank_rtol)
    # A single pass loses orthonormality when M is badly conditioned; one
    # refinement restores it to working precision without leaving span(M).
    if frame_deviation(V) > 1e-13:
        V = _gram_orthogonalize(V, rank_rtol)
    dev = frame_deviation(V)
    if dev > FRAME_TOL:
        raise DegenerateSubspace(
            f"orthogonalization failed to produce a frame (deviation {dev:.3e})"
        )
    return V


def _gram_orthogonalize(M: np.ndarray, rank_rtol: float) -> np.ndarray:
    G = M.T @ M
    w, U = np.linalg.eigh(G)
    w = np.maximum(w, 0.0)
    smallest, largest = np.sqrt(w[0]), np.sqrt(w[-1])
    if smallest <= rank_rtol * largest or largest == 0.0:
        raise DegenerateSubspace(
            f"smallest singular value {smallest:.3e} <= {rank_rtol:.1e} * {largest:.3e}"
        )
    inv_root = (U / np.sqrt(w)) @ U.T
    return M @ inv_root


def _check_same_shape(W: np.ndarray, Q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    W = np.asarray(W, dtype=float)
    Q = np.asarray(Q, dtype=float)
    if W.shape != Q.shape or W.ndim != 2:
        raise DimensionMismatch(f"frame shapes differ: {W.shape} vs {Q.shape}")
    return W, Q


def subspace_distance(W: np.ndarray, Q: np.ndarray) -> float:
    """Squared spectral norm of the projector difference, ||WW' - QQ'||^2.

    Equals sin^2 of the largest principal angle between the two column spans,
    so the value lies in [0, 1]; it is invariant to right-multiplying either
    frame by an orthogonal d x d matrix.

    For equal-dimension subspaces the singular values of the projector
    difference are the principal-angle sines, and those are the singular
    values of the residual of one frame projected off the other. The largest
    one is therefore read off the n x d residual Q - W(W'Q) instead of the
    n x n difference, which is both O(nd^2) and numerically stable down to
    zero distance. Arguments are ordered by a deterministic byte key first so
    the result is exactly symmetric in (W, Q).
    """
    W, Q = _check_same_shape(W, Q)
    w_key, q_key = W.tobytes(), Q.tobytes()
    if w_key == q_key:
        return 0.0
    if w_key > q_key:
        W, Q = Q, W
    residual = Q - W @ (W.T @ Q)
    if residual.shape[1] == 1:
        gap = float(np.linalg.norm(residual[:, 0]))
    else:
        gap = float(np.linalg.svd(residual, compute_uv=False)[0])
    return min(gap * gap, 1.0)


def largest_principal_angle(W: np.ndarray, Q: np.ndarray) -> PrincipalAngle:
    """Cosine and tangent of the largest principal angle between two frames.

    cos = smallest singular value of W'Q; tan is computed from the definition
    through the orthogonal complement of W, as ||(Wbar'Q)(W'Q)^(-1)||.

    Raises SubspacesOrthogonal when cos <= 1e-14 (tangent undefined).
    """
    W, Q = _check_same_shape(W, Q)
    d = W.shape[1]
    C = W.T @ Q
    cos = float(np.linalg.svd(C, compute_uv=False)[-1])
    if cos <= 1e-14:
        raise SubspacesOrthogonal(f"cos of the largest principal angle is {cos:.3e}")
    full, _ = np.linalg.qr(W, mode="complete")
    W_bar = full[:, d:]
    if W_bar.shape[1] == 0:
        return PrincipalAngle(cos=min(cos, 1.0), tan=0.0)
    ratio = (W_bar.T @ Q) @ np.linalg.inv(C)
    tan = float(np.linalg.norm(ratio, 2))
    return PrincipalAngle(cos=min(cos, 1.0), tan=tan)


def top_eigenpairs(A: np.ndarray, d: int, sym_rtol: float = 1e-10) -> Eigenpairs:
    """Leading d eigenpairs of a symmetric matrix, eigenvalues descending.

    Symmetry is required up to sym_rtol relative to max(1, ||A||_max). Each
    eigenvector is sign-fixed so that its largest-magnitude entry is
    nonnegative, which makes results deterministic for testing; subspace
    metrics ignore the signs anyway.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if not 1 <= d <= n:
        raise DimensionMismatch(f"need 1 <= d <= {n}, got d={d}")
    scale = max(1.0, float(np.max(np.abs(A))))
    asym = float(np.max(np.abs(A - A.T)))
    if asym > sym_rtol * scale:
        raise NotSymmetric(f"max|A - A'| = {asym:.3e} exceeds {sym_rtol:.1e} * {scale:.3e}")
    w, U = np.linalg.eigh((A + A.T) / 2.0)
    values = w[::-1][:d].copy()
    vectors = U[:, ::-1][:, :d].copy()
    for j in range(d):
        k = int(np.argmax(np.abs(vectors[:, j])))
        if vectors[k, j] < 0:
            vectors[:, j] = -vectors[:, j]
    return Eigenpairs(values=values, vectors=vectors)
