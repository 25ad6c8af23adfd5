"""Experiment orchestration: seeded runs, error traces, CSV I/O, aggregation.

All CSV output is RFC-4180-style with a mandatory header row, '.' decimal
separator, '\n' line endings, and floats rendered with repr (shortest
round-trip), so a run's outputs are byte-reproducible. Wall-clock timing and
warnings go to a sidecar ``<output>.meta`` key-value file, never into the
data files.
"""
from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field

import numpy as np

from .config import ExperimentConfig
from .exceptions import ConfigError, MalformedCSV
from .diagnostics import BoundInputs, dense_error_bound, sparse_error_bound
from .model import SpikeModel, sample_batch
from .sparsity import SparsityProfile, default_signal_constant
from .trackers import CPAST, SCPAST, track_stream
from .wavelets import default_levels, transform_matrix


@dataclass
class ErrorTrace:
    """Per-step subspace errors for a set of (mode, seed) runs.

    records are (seed, mode, t, value) tuples, canonically ordered by
    (mode, seed, t); metadata carries the config hash, validation warnings,
    and wall-clock seconds.
    """

    records: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def canonical(self) -> "ErrorTrace":
        self.records.sort(key=lambda r: (r[1], r[0], r[2]))
        return self

    def values(self, mode: str, t: int) -> np.ndarray:
        return np.array([r[3] for r in self.records if r[1] == mode and r[2] == t])


def _make_tracker(config: ExperimentConfig, mode: str, eigenvalues, fast: bool):
    if mode == "cpast":
        return CPAST(
            n_components=config.d,
            gamma=config.gamma,
            warmup=config.t0,
            fast_multiply=fast,
        )
    return SCPAST(
        n_components=config.d,
        eigenvalues=eigenvalues,
        threshold_a=config.threshold_a,
        threshold_rule=config.threshold_rule,
        gamma=config.gamma,
        warmup=config.t0,
        gamma0=config.resolved_gamma0(),
        diag_power=config.diag_power,
    )


def _prepared_truth_and_basis(config: ExperimentConfig, model: SpikeModel):
    """Ground-truth frame in the tracking domain, plus the change-of-basis matrix."""
    if config.eigenvectors == "synth":
        levels = config.wavelet_levels or default_levels(config.n)
        W = transform_matrix(config.n, config.wavelet, levels)
        return W @ model.eigenvectors, W
    return model.eigenvectors, None


def run_simulated(config: ExperimentConfig, fast: bool | None = None) -> ErrorTrace:
    """Run the configured tracker(s) over freshly sampled streams, one per seed."""
    warnings = config.validate()
    model = config.build_model()
    truth, basis_change = _prepared_truth_and_basis(config, model)
    # Trackers see unit-noise data: rescale observations and spike strengths
    # when sigma is neither 0 nor 1 (subspace errors are scale-invariant).
    sigma_scale = config.sigma if config.sigma not in (0.0, 1.0) else 1.0
    lambdas = np.asarray(config.lambdas, dtype=float) / sigma_scale**2
    use_fast = config.fast_multiply if fast is None else fast

    started = time.perf_counter()
    trace = ErrorTrace(metadata={"config_hash": config.config_hash()})
    tracker_warnings = []
    for mode in config.modes():
        for seed in config.seeds:
            X = sample_batch(model, seed, config.T)
            if sigma_scale != 1.0:
                X = X / sigma_scale
            if basis_change is not None:
                X = X @ basis_change.T
            tracker = _make_tracker(config, mode, lambdas, use_fast)
            times, values = track_stream(tracker, X, truth=truth)
            trace.records.extend(
                (seed, mode, int(t), float(v)) for t, v in zip(times, values)
            )
            for w in tracker.warnings_:
                tracker_warnings.append(f"{mode} seed {seed}: {w}")
            if getattr(tracker, "safeguard_hits_", 0):
                tracker_warnings.append(
                    f"{mode} seed {seed}: threshold safeguard restored "
                    f"{tracker.safeguard_hits_} column-max entries"
                )
    trace.metadata["warnings"] = warnings + tracker_warnings
    trace.metadata["wall_clock_s"] = time.perf_counter() - started
    return trace.canonical()


def run_ingested(config: ExperimentConfig, X: np.ndarray) -> tuple[ErrorTrace, dict]:
    """Track an ingested stream (no ground truth): self-drift errors.

    gamma falls back to 0.9 when the config does not set it explicitly.
    Returns the trace and a dict of final estimates, one n x d frame per mode.
    """
    warnings = config.validate(for_input=True)
    if config.d >= X.shape[1]:
        raise ConfigError("d", f"input has {X.shape[1]} columns, need d < that")
    gamma = config.gamma if "gamma" in config.explicit else 0.9
    config_eff = ExperimentConfig(
        **{
            **{f: getattr(config, f) for f in config.__dataclass_fields__ if f != "explicit"},
            "gamma": gamma,
            "n": X.shape[1],
            "T": X.shape[0],
        },
        explicit=config.explicit,
    )
    if X.shape[0] <= config_eff.t0:
        raise ConfigError("t0", f"input has {X.shape[0]} rows, needs more than t0")
    lambdas = np.asarray(config.lambdas, dtype=float)

    started = time.perf_counter()
    trace = ErrorTrace(metadata={"config_hash": config_eff.config_hash()})
    estimates = {}
    for mode in config.modes():
        tracker = _make_tracker(config_eff, mode, lambdas, fast=False)
        times, values = track_stream(tracker, X, drift_lag=config.drift_lag)
        trace.records.extend((0, mode, int(t), float(v)) for t, v in zip(times, values))
        estimates[mode] = tracker.basis_
        for w in tracker.warnings_:
            warnings.append(f"{mode}: {w}")
    trace.metadata["warnings"] = warnings
    trace.metadata["wall_clock_s"] = time.perf_counter() - started
    return trace.canonical(), estimates


def aggregate(traces: list[ErrorTrace]) -> list[tuple]:
    """Per-(mode, t) median and quartiles across seeds.

    Refuses to mix traces with different config hashes. Returns rows
    (mode, t, median, q1, q3, n_seeds) ordered by (mode, t).
    """
    hashes = {tr.metadata.get("config_hash") for tr in traces}
    if len(hashes) > 1:
        raise ConfigError("config_hash", f"refusing to aggregate across {sorted(hashes)}")
    buckets: dict = {}
    for tr in traces:
        for seed, mode, t, value in tr.records:
            buckets.setdefault((mode, t), []).append(value)
    rows = []
    for (mode, t) in sorted(buckets):
        vals = np.array(buckets[(mode, t)])
        rows.append(
            (
                mode,
                t,
                float(np.median(vals)),
                float(np.quantile(vals, 0.25)),
                float(np.quantile(vals, 0.75)),
                vals.size,
            )
        )
    return rows


def overlay_bound(config: ExperimentConfig, mode: str, t: int) -> float:
    """Rate-bound overlay value for a sweep row, using the configured constants."""
    lam = np.asarray(config.lambdas, dtype=float)
    profile = SparsityProfile(
        r=config.sparsity_r,
        radii=config.sparsity_s * config.d if len(config.sparsity_s) == 1 else config.sparsity_s,
        b=default_signal_constant(max(config.threshold_a, 1e-12), config.resolved_tau(), config.d),
    )
    inputs = BoundInputs(
        n=config.n,
        d=config.d,
        lambdas=tuple(lam),
        tau=config.resolved_tau(),
        t0=config.t0,
        horizon=config.T,
        profile=profile,
    )
    if mode == "cpast":
        return dense_error_bound(inputs, t, config.bound_c1, config.bound_c2)
    return sparse_error_bound(inputs, t, config.bound_c1, config.bound_c2)


# -- CSV I/O -----------------------------------------------------------------


def _open_write(path):
    return open(path, "w", encoding="utf-8", newline="")


def write_observations(X: np.ndarray, path) -> None:
    """T x n observation matrix, one time step per row, header x0..x{n-1}."""
    X = np.asarray(X, dtype=float)
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{j}" for j in range(X.shape[1])])
        for row in X:
            writer.writerow([repr(float(v)) for v in row])


def read_observations(path) -> np.ndarray:
    """Parse an observations CSV: header line, then uniform finite float rows.

    Raises MalformedCSV with the offending 1-based line number.
    """
    rows = []
    width = None
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if lineno == 1:
                width = len(cells)
                continue  # header
            if not cells:
                continue
            if len(cells) != width:
                raise MalformedCSV(lineno, f"expected {width} columns, got {len(cells)}")
            try:
                row = [float(c) for c in cells]
            except ValueError:
                raise MalformedCSV(lineno, "non-numeric entry") from None
            if not all(np.isfinite(row)):
                raise MalformedCSV(lineno, "non-finite entry")
            rows.append(row)
    if not rows:
        raise MalformedCSV(1, "no data rows")
    return np.asarray(rows, dtype=float)


def write_trace(trace: ErrorTrace, path) -> None:
    """Trace CSV: seed,mode,t,l_value,config_hash in canonical order."""
    config_hash = trace.metadata.get("config_hash", "")
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["seed", "mode", "t", "l_value", "config_hash"])
        for seed, mode, t, value in trace.canonical().records:
            writer.writerow([seed, mode, t, repr(value), config_hash])


def read_trace(path) -> ErrorTrace:
    trace = ErrorTrace()
    hashes = set()
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        for lineno, cells in enumerate(reader, start=1):
            if lineno == 1 or not cells:
                continue
            if len(cells) != 5:
                raise MalformedCSV(lineno, f"expected 5 columns, got {len(cells)}")
            seed, mode, t, value, config_hash = cells
            trace.records.append((int(seed), mode, int(t), float(value)))
            hashes.add(config_hash)
    if len(hashes) == 1:
        trace.metadata["config_hash"] = hashes.pop()
    elif hashes:
        raise MalformedCSV(1, f"mixed config hashes in one trace: {sorted(hashes)}")
    return trace.canonical()


def write_sweep(rows: list[tuple], config: ExperimentConfig, path, with_bounds: bool) -> None:
    """Aggregated CSV: mode,t,median,q1,q3,n_seeds,config_hash[,rate_bound]."""
    header = ["mode", "t", "median", "q1", "q3", "n_seeds", "config_hash"]
    if with_bounds:
        header.append("rate_bound")
    config_hash = config.config_hash()
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for mode, t, med, q1, q3, count in rows:
            out = [mode, t, repr(med), repr(q1), repr(q3), count, config_hash]
            if with_bounds:
                out.append(repr(overlay_bound(config, mode, t)))
            writer.writerow(out)


def write_estimate(frame: np.ndarray, path) -> None:
    """Final n x d estimate as CSV with header v0..v{d-1}."""
    frame = np.asarray(frame, dtype=float)
    with _open_write(path) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"v{j}" for j in range(frame.shape[1])])
        for row in frame:
            writer.writerow([repr(float(v)) for v in row])


def write_meta(trace: ErrorTrace, path) -> None:
    """Sidecar key-value metadata: hash, warnings, wall clock, record count."""
    meta = trace.metadata
    with _open_write(path) as fh:
        fh.write(f"config_hash = {meta.get('config_hash', '')}\n")
        fh.write(f"records = {len(trace.records)}\n")
        fh.write(f"wall_clock_s = {meta.get('wall_clock_s', 0.0):.3f}\n")
        for warning in meta.get("warnings", []):
            fh.write(f"warning = {warning}\n")
