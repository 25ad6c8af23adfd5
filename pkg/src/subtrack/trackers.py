"""Streaming subspace trackers: CPAST and its sparse variant SCPAST.

Both trackers maintain an orthonormal n x d frame estimating the span of the
top-d covariance eigenvectors from a stream of observations. Each step
updates the running covariance, multiplies it into the previous frame, and
re-orthonormalizes (an online orthogonal iteration):

    ups(t) = Sigma_hat(t) @ V(t-1)
    V(t)   = ups(t) [ups(t)' ups(t)]^(-1/2)

SCPAST inserts a per-column thresholding step between the multiplication and
the orthogonalization, with levels beta_i(t) from the schedule in
``sparsity.threshold_schedule``; this zeroes coordinates that noise alone can
explain and keeps the estimate sparse.

The estimators follow the scikit-learn API (partial_fit / fit / transform,
``components_``), so they drop into pipelines next to IncrementalPCA.
"""
from __future__ import annotations

import math
from collections import deque

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError
from sklearn.utils.validation import check_array, check_is_fitted

from .exceptions import DimensionMismatch, EmptySelection, RankDeficientWarmup
from .linalg import subspace_distance, symmetric_orthogonalize, top_eigenpairs
from .model import CovarianceAccumulator
from .sparsity import RULES, threshold_columns, threshold_schedule

GAMMA0_DEFAULT = 3.0 * math.sqrt(2.0)


def cpast_update(covariance: np.ndarray, frame: np.ndarray) -> np.ndarray:
    """One multiply-and-orthogonalize step against a fixed covariance matrix.

    Iterating this map with a frozen matrix is classical orthogonal iteration
    and converges to the top-d eigenspace.
    """
    cov = np.asarray(covariance, dtype=float)
    return symmetric_orthogonalize(cov @ frame)


def shrink_columns(ups, betas, kind="hard", keep_column_max=True):
    """Threshold each column at its level, never zeroing a column's largest entry.

    Returns the shrunk matrix and the number of protected entries that had to
    be restored. The protection guarantees generic full column rank so the
    inverse square root in the orthogonalization exists.
    """
    ups = np.asarray(ups, dtype=float)
    out = threshold_columns(ups, betas, kind)
    restored = 0
    if keep_column_max:
        rows = np.argmax(np.abs(ups), axis=0)
        cols = np.arange(ups.shape[1])
        hit = (out[rows, cols] == 0.0) & (ups[rows, cols] != 0.0)
        out[rows[hit], cols[hit]] = ups[rows[hit], cols[hit]]
        restored = int(np.count_nonzero(hit))
    return out, restored


def scpast_update(
    covariance: np.ndarray,
    frame: np.ndarray,
    betas,
    kind: str = "hard",
    keep_column_max: bool = True,
) -> np.ndarray:
    """One sparse step: multiply, threshold column i at betas[i], orthogonalize."""
    cov = np.asarray(covariance, dtype=float)
    shrunk, _ = shrink_columns(cov @ frame, betas, kind, keep_column_max)
    return symmetric_orthogonalize(shrunk)


class _SubspaceTracker(BaseEstimator, TransformerMixin):
    """Shared streaming machinery; subclasses provide the init and the shrink hook."""

    def _setup(self, n_features: int) -> None:
        self._validate_params(n_features)
        self.n_features_in_ = int(n_features)
        self.accumulator_ = CovarianceAccumulator(n_features, gamma=self.gamma)
        self.warmup_ = self._resolved_warmup()
        self.warnings_ = []
        self.safeguard_hits_ = 0
        self._frame = None
        self._frame_prev = None

    def _validate_params(self, n_features: int) -> None:
        d = self.n_components
        if not 1 <= d < n_features:
            raise ValueError(f"need 1 <= n_components < n, got {d} with n = {n_features}")
        warmup = self._resolved_warmup()
        if warmup < d:
            raise ValueError(f"warmup must be at least n_components, got {warmup} < {d}")

    def _resolved_warmup(self) -> int:
        if self.warmup is not None:
            return int(self.warmup)
        return max(10, 2 * self.n_components)

    @property
    def n_samples_seen_(self) -> int:
        check_is_fitted(self, "accumulator_")
        return self.accumulator_.t

    @property
    def basis_(self) -> np.ndarray:
        """Current estimate as an n x d orthonormal frame."""
        check_is_fitted(self, "accumulator_")
        if self._frame is None:
            raise NotFittedError(
                f"tracker not initialized: {self.accumulator_.t} of "
                f"{self.warmup_} warm-up samples seen"
            )
        return np.array(self._frame)

    @property
    def components_(self) -> np.ndarray:
        """sklearn-convention view of the estimate: one component per row, shape (d, n)."""
        return self.basis_.T

    def _clear(self) -> None:
        for attr in ("accumulator_", "n_features_in_", "warmup_", "warnings_"):
            if hasattr(self, attr):
                delattr(self, attr)
        self._frame = None
        self._frame_prev = None

    def fit(self, X, y=None):
        """Reset, then consume the rows of X as a stream."""
        self._clear()
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        """Consume one observation (shape (n,)) or a block of rows (shape (m, n))."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None, :]
        X = check_array(X, dtype=np.float64)
        if not hasattr(self, "accumulator_"):
            self._setup(X.shape[1])
        elif X.shape[1] != self.n_features_in_:
            raise DimensionMismatch(
                f"expected {self.n_features_in_} features, got {X.shape[1]}"
            )
        for row in X:
            self._observe(row)
        return self

    def transform(self, X):
        """Coordinates of the rows of X in the estimated subspace."""
        frame = self.basis_
        X = check_array(np.asarray(X, dtype=float), dtype=np.float64)
        return X @ frame

    def inverse_transform(self, Y):
        """Map subspace coordinates back to the ambient space."""
        frame = self.basis_
        Y = np.asarray(Y, dtype=float)
        return Y @ frame.T

    # -- streaming internals -------------------------------------------------

    def _observe(self, x: np.ndarray) -> None:
        acc = self.accumulator_
        acc.update(x)
        if self._frame is None:
            if acc.t == self.warmup_:
                self._initialize()
            return
        self._step(x)

    def _initialize(self) -> None:
        acc = self.accumulator_
        cov = acc.matrix / acc.weight_sum()
        frame = self._initial_frame(cov)
        self._frame = np.asfortranarray(frame)
        self._frame_prev = self._frame

    def _dense_initial_frame(self, cov: np.ndarray) -> np.ndarray:
        pairs = top_eigenpairs(cov, self.n_components)
        if pairs.values[-1] <= 1e-12 * max(pairs.values[0], np.finfo(float).tiny):
            raise RankDeficientWarmup(
                f"warm-up covariance has numerical rank below {self.n_components}"
            )
        return pairs.vectors

    def _multiply(self, x: np.ndarray) -> np.ndarray:
        ups = self.accumulator_.dot(self._frame)
        ups /= self.accumulator_.weight_sum()
        return ups

    def _step(self, x: np.ndarray) -> None:
        ups = self._multiply(x)
        ups = self._shrink(ups)
        frame = symmetric_orthogonalize(ups)
        self._frame_prev = self._frame
        self._frame = np.asfortranarray(frame)

    def _initial_frame(self, cov: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _shrink(self, ups: np.ndarray) -> np.ndarray:
        return ups


class CPAST(_SubspaceTracker):
    """Constrained projection approximation subspace tracker.

    Parameters
    ----------
    n_components : target subspace dimension d.
    gamma : forgetting factor in (0, 1]; 1 keeps all samples equally weighted.
    warmup : number of initial samples folded into the eigendecomposition that
        seeds the frame; defaults to max(10, 2 * n_components).
    fast_multiply : start in the O(nd^2) projection-approximation mode instead
        of the exact O(n^2 d) product (see ``set_fast_multiply``).

    After ``warmup`` samples the frame is the top-d eigenbasis of the
    accumulated covariance; every further sample performs one multiply +
    orthogonalize step.
    """

    def __init__(
        self,
        n_components: int = 1,
        *,
        gamma: float = 1.0,
        warmup: int | None = None,
        fast_multiply: bool = False,
    ):
        self.n_components = n_components
        self.gamma = gamma
        self.warmup = warmup
        self.fast_multiply = fast_multiply

    def _setup(self, n_features: int) -> None:
        super()._setup(n_features)
        self.fast_multiply_ = bool(self.fast_multiply)
        self._ups = None

    def _initial_frame(self, cov: np.ndarray) -> np.ndarray:
        return self._dense_initial_frame(cov)

    def set_fast_multiply(self, enabled: bool) -> "CPAST":
        """Toggle the projection-approximation product at runtime.

        The update ups(t) = gamma * ups(t-1) @ C + x (x'V(t-1)), with
        C = V(t-2)'V(t-1), replaces the full covariance-frame product under
        the approximation V(t-1) ~ V(t-2). The first step after enabling is
        seeded with the exact product, so it matches exact mode.
        """
        check_is_fitted(self, "accumulator_")
        self.fast_multiply_ = bool(enabled)
        self._ups = None
        return self

    def _multiply(self, x: np.ndarray) -> np.ndarray:
        if not self.fast_multiply_:
            self._ups = None
            return super()._multiply(x)
        if self._ups is None:
            ups = self.accumulator_.dot(self._frame)
        else:
            mixing = self._frame_prev.T @ self._frame
            coords = x @ self._frame
            ups = self.accumulator_.gamma * (self._ups @ mixing) + x[:, None] * coords
        self._ups = ups
        return ups / self.accumulator_.weight_sum()


class SCPAST(_SubspaceTracker):
    """Sparse CPAST: thresholds each column of the multiplied frame before
    re-orthonormalizing, exploiting sparsity of the leading eigenvectors.

    Parameters
    ----------
    n_components : target subspace dimension d.
    eigenvalues : the d known spike strengths lambda_1 >= ... >= lambda_d > 0,
        in units of the noise variance; they set the threshold levels.
    threshold_a : schedule constant a in beta_i(t) = a sqrt((lambda_i+1) log(max(n,t))/t).
    threshold_rule : 'hard' or 'soft'.
    gamma : forgetting factor in (0, 1].
    warmup : warm-up sample count t0.
    gamma0 : diagonal-selection constant of the sparse initializer; defaults
        to 3*sqrt(2).
    init : 'sparse' for the diagonal-thresholding initializer, 'svd' for the
        dense eigendecomposition (the CPAST initializer).
    diag_power : exponent on log(max(n,t0))/t0 in the diagonal selection
        threshold (1.0 for the plain ratio, 0.5 for its square root).
    keep_column_max : protect each column's largest-magnitude entry from
        being zeroed, which guarantees full column rank.
    empty_selection : 'fallback' admits the d largest diagonal entries when
        the selection comes up short (recorded in ``warnings_``); 'error'
        raises EmptySelection instead.

    With threshold_a = 0 every step reduces to the CPAST step.
    """

    def __init__(
        self,
        n_components: int = 1,
        *,
        eigenvalues=None,
        threshold_a: float = 1.5,
        threshold_rule: str = "hard",
        gamma: float = 1.0,
        warmup: int | None = None,
        gamma0: float | None = None,
        init: str = "sparse",
        diag_power: float = 1.0,
        keep_column_max: bool = True,
        empty_selection: str = "fallback",
    ):
        self.n_components = n_components
        self.eigenvalues = eigenvalues
        self.threshold_a = threshold_a
        self.threshold_rule = threshold_rule
        self.gamma = gamma
        self.warmup = warmup
        self.gamma0 = gamma0
        self.init = init
        self.diag_power = diag_power
        self.keep_column_max = keep_column_max
        self.empty_selection = empty_selection

    def _validate_params(self, n_features: int) -> None:
        super()._validate_params(n_features)
        if self.eigenvalues is None:
            raise ValueError("SCPAST needs the known spike eigenvalues")
        lam = np.atleast_1d(np.asarray(self.eigenvalues, dtype=float))
        if lam.size != self.n_components:
            raise ValueError(
                f"{lam.size} eigenvalues for n_components = {self.n_components}"
            )
        if not np.all(lam > 0) or np.any(np.diff(lam) > 0):
            raise ValueError("eigenvalues must be positive and non-increasing")
        if not self.threshold_a >= 0:
            raise ValueError(f"threshold_a must be >= 0, got {self.threshold_a}")
        if self.threshold_rule not in RULES:
            raise ValueError(f"threshold_rule must be one of {RULES}")
        if self.init not in ("sparse", "svd"):
            raise ValueError(f"init must be 'sparse' or 'svd', got {self.init!r}")
        if self.empty_selection not in ("fallback", "error"):
            raise ValueError("empty_selection must be 'fallback' or 'error'")

    def _setup(self, n_features: int) -> None:
        super()._setup(n_features)
        self._lambdas = np.atleast_1d(np.asarray(self.eigenvalues, dtype=float))
        self.gamma0_ = GAMMA0_DEFAULT if self.gamma0 is None else float(self.gamma0)
        self.init_fallback_ = False
        self.selected_support_ = None

    def _initial_frame(self, cov: np.ndarray) -> np.ndarray:
        if self.init == "svd":
            return self._dense_initial_frame(cov)
        n, d = self.n_features_in_, self.n_components
        t0 = self.accumulator_.t
        diag = np.diag(cov)
        level = 1.0 + self.gamma0_ * (math.log(max(n, t0)) / t0) ** self.diag_power
        selected = np.flatnonzero(diag > level)
        if selected.size < d:
            if self.empty_selection == "error":
                raise EmptySelection(
                    f"diagonal selection kept {selected.size} < {d} coordinates"
                )
            selected = np.sort(np.argsort(-diag, kind="stable")[:d])
            self.init_fallback_ = True
            self.warnings_.append(
                f"diagonal selection below {level:.4g} kept too few coordinates; "
                f"fell back to the {d} largest diagonal entries"
            )
        sub = cov[np.ix_(selected, selected)]
        pairs = top_eigenpairs(sub, d)
        if pairs.values[-1] <= 1e-12 * max(pairs.values[0], np.finfo(float).tiny):
            raise RankDeficientWarmup(
                f"selected {selected.size}x{selected.size} submatrix has rank below {d}"
            )
        frame = np.zeros((n, d))
        frame[selected, :] = pairs.vectors
        self.selected_support_ = selected
        return frame

    def _shrink(self, ups: np.ndarray) -> np.ndarray:
        betas = threshold_schedule(
            self.accumulator_.t, self._lambdas, self.n_features_in_, self.threshold_a
        )
        shrunk, restored = shrink_columns(
            ups, betas, self.threshold_rule, self.keep_column_max
        )
        if restored:
            self.safeguard_hits_ += restored
        return shrunk


def track_stream(tracker, X, truth=None, drift_lag=None):
    """Feed the rows of X through a fresh tracker and record subspace errors.

    With ground truth: one record (t, l(truth, V(t))) per time step from the
    warm-up point t0 through the last row, t0 record included (the
    initializer's error), so the trace has exactly T - t0 + 1 entries.

    Without ground truth the error is the self-drift l(V(t - lag), V(t)),
    recorded once both frames exist (t >= t0 + lag).

    Returns (times, values) as integer and float arrays.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise DimensionMismatch(f"expected rows of observations, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("observations contain non-finite entries")
    if truth is None and drift_lag is None:
        raise ValueError("provide ground truth or a drift lag")
    if truth is not None:
        truth = np.asarray(truth, dtype=float)

    tracker._clear()
    tracker._setup(X.shape[1])
    history: deque = deque(maxlen=(drift_lag or 0) + 1)
    times, values = [], []
    for i in range(X.shape[0]):
        tracker._observe(X[i])
        if tracker._frame is None:
            continue
        t = tracker.accumulator_.t
        if truth is not None:
            times.append(t)
            values.append(subspace_distance(truth, tracker._frame))
        else:
            history.append(np.array(tracker._frame))
            if len(history) == drift_lag + 1:
                times.append(t)
                values.append(subspace_distance(history[0], history[-1]))
    return np.asarray(times, dtype=int), np.asarray(values, dtype=float)
