"""Experiment configuration: a flat key-value file, validated field by field.

File format: one ``key = value`` pair per line; blank lines and ``#`` comments
are ignored. Lists are comma-separated. Recognized keys:

  model     n, d, lambdas, sigma, eigenvectors (identity|sparse|file|synth),
            support, eigenvector_file, synth_function (step|one_peak|three_peak),
            synth_center, synth_width, synth_breakpoint, wavelet (haar|symmlet8),
            wavelet_levels
  tracker   mode (cpast|scpast|both), gamma, threshold_a, threshold_rule
            (hard|soft), t0, gamma0, diag_power, fast_multiply, strict_bounds
  run       T, seeds, output, drift_lag
  overlay   bound_c1, bound_c2, tau, sparsity_r, sparsity_s

``gamma0`` defaults to the schedule floor 3*sqrt(2)*log(max(n,T))/log(max(n,t0)).
``gamma`` defaults to 1.0 for simulated runs and 0.9 when tracking an ingested
CSV without an explicit setting. The config hash covers every resolved field
except seeds, mode, and output, so traces from runs that differ only in those
can be aggregated together.
"""
from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, field, fields

import numpy as np

from .exceptions import ConfigError
from .linalg import validate_frame
from .model import SpikeModel
from .signals import PROFILES, canonical_frame, sparse_uniform_frame
from .sparsity import schedule_constant_floor
from .wavelets import default_levels

MODES = ("cpast", "scpast", "both")
EIGENVECTOR_KINDS = ("identity", "sparse", "file", "synth")

_DEFAULTS = {
    "n": None,
    "d": 1,
    "lambdas": None,
    "sigma": 1.0,
    "eigenvectors": "identity",
    "support": None,
    "eigenvector_file": None,
    "synth_function": "one_peak",
    "synth_center": 0.5,
    "synth_width": 0.01,
    "synth_breakpoint": 0.5,
    "wavelet": "symmlet8",
    "wavelet_levels": None,
    "mode": "both",
    "gamma": 1.0,
    "threshold_a": 1.5,
    "threshold_rule": "hard",
    "t0": 100,
    "gamma0": None,
    "diag_power": 1.0,
    "fast_multiply": False,
    "strict_bounds": False,
    "T": 2000,
    "seeds": (0,),
    "output": None,
    "drift_lag": 50,
    "bound_c1": None,
    "bound_c2": None,
    "tau": None,
    "sparsity_r": 1.0,
    "sparsity_s": (1.0,),
}

_INT_KEYS = {"n", "d", "support", "wavelet_levels", "t0", "T", "drift_lag"}
_FLOAT_KEYS = {
    "sigma", "synth_center", "synth_width", "synth_breakpoint", "gamma",
    "threshold_a", "gamma0", "diag_power", "bound_c1", "bound_c2", "tau",
    "sparsity_r",
}
_BOOL_KEYS = {"fast_multiply", "strict_bounds"}
_FLOAT_LIST_KEYS = {"lambdas", "sparsity_s"}
_INT_LIST_KEYS = {"seeds"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _BOOL_KEYS:
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if key in _FLOAT_LIST_KEYS:
            return tuple(float(v) for v in raw.split(","))
        if key in _INT_LIST_KEYS:
            return tuple(int(v) for v in raw.split(","))
    except ValueError as exc:
        raise ConfigError(key, f"cannot parse {raw!r}: {exc}") from None
    return raw


@dataclass
class ExperimentConfig:
    """Resolved experiment settings; see the module docstring for the schema."""

    n: int = None
    d: int = 1
    lambdas: tuple = None
    sigma: float = 1.0
    eigenvectors: str = "identity"
    support: int = None
    eigenvector_file: str = None
    synth_function: str = "one_peak"
    synth_center: float = 0.5
    synth_width: float = 0.01
    synth_breakpoint: float = 0.5
    wavelet: str = "symmlet8"
    wavelet_levels: int = None
    mode: str = "both"
    gamma: float = 1.0
    threshold_a: float = 1.5
    threshold_rule: str = "hard"
    t0: int = 100
    gamma0: float = None
    diag_power: float = 1.0
    fast_multiply: bool = False
    strict_bounds: bool = False
    T: int = 2000
    seeds: tuple = (0,)
    output: str = None
    drift_lag: int = 50
    bound_c1: float = None
    bound_c2: float = None
    tau: float = None
    sparsity_r: float = 1.0
    sparsity_s: tuple = (1.0,)
    explicit: frozenset = field(default_factory=frozenset, repr=False)

    def modes(self) -> tuple:
        return ("cpast", "scpast") if self.mode == "both" else (self.mode,)

    def resolved_gamma0(self) -> float:
        if self.gamma0 is not None:
            return self.gamma0
        return schedule_constant_floor(self.n, self.T, self.t0)

    def resolved_tau(self) -> float:
        if self.tau is not None:
            return self.tau
        return max(1.0, self.lambdas[0] / self.lambdas[-1])

    def validate(self, for_input: bool = False) -> list:
        """Cross-field validation; returns advisory warnings.

        Raises ConfigError on the first hard failure. With strict_bounds the
        schedule-constant warnings become hard failures too.
        """
        if self.lambdas is None:
            raise ConfigError("lambdas", "required")
        if any(v <= 0 for v in self.lambdas):
            raise ConfigError("lambdas", "spike eigenvalues must be positive")
        if any(a < b for a, b in zip(self.lambdas, self.lambdas[1:])):
            raise ConfigError("lambdas", "spike eigenvalues must be non-increasing")
        if len(self.lambdas) != self.d:
            raise ConfigError("lambdas", f"expected {self.d} values, got {len(self.lambdas)}")
        if not for_input:
            if self.n is None:
                raise ConfigError("n", "required for simulated runs")
            if not 1 <= self.d < self.n:
                raise ConfigError("d", f"need 1 <= d < n, got d={self.d}, n={self.n}")
            if self.sigma < 0 or not math.isfinite(self.sigma):
                raise ConfigError("sigma", "must be a finite nonnegative number")
            self._validate_eigenvectors()
        if self.mode not in MODES:
            raise ConfigError("mode", f"must be one of {MODES}")
        if not 0 < self.gamma <= 1:
            raise ConfigError("gamma", "forgetting factor must lie in (0, 1]")
        if self.threshold_a < 0:
            raise ConfigError("threshold_a", "must be >= 0")
        if self.threshold_rule not in ("hard", "soft"):
            raise ConfigError("threshold_rule", "must be 'hard' or 'soft'")
        if self.t0 < max(self.d, 1):
            raise ConfigError("t0", f"warm-up must be at least d = {self.d}")
        if not for_input and self.T <= self.t0:
            raise ConfigError("T", f"horizon must exceed t0 = {self.t0}")
        if not self.seeds:
            raise ConfigError("seeds", "at least one seed is required")
        if self.drift_lag < 1:
            raise ConfigError("drift_lag", "must be >= 1")
        if self.diag_power <= 0:
            raise ConfigError("diag_power", "must be positive")
        if (self.bound_c1 is None) != (self.bound_c2 is None):
            raise ConfigError("bound_c1", "bound_c1 and bound_c2 go together")
        if not 0 < self.sparsity_r < 2:
            raise ConfigError("sparsity_r", "weak-l_r exponent must lie in (0, 2)")
        if self.tau is not None and self.tau < 1:
            raise ConfigError("tau", "must be >= 1")

        warnings = []
        if "scpast" in self.modes() and self.n is not None:
            floor = schedule_constant_floor(self.n, self.T, self.t0)
            if self.threshold_a < floor:
                warnings.append(
                    f"threshold_a = {self.threshold_a:.4g} is below the schedule "
                    f"floor {floor:.4g}; the sparse error guarantee does not apply"
                )
            if self.gamma0 is not None and self.gamma0 < floor:
                warnings.append(
                    f"gamma0 = {self.gamma0:.4g} is below the schedule floor {floor:.4g}"
                )
        if self.strict_bounds and warnings:
            raise ConfigError("strict_bounds", "; ".join(warnings))
        return warnings

    def _validate_eigenvectors(self) -> None:
        kind = self.eigenvectors
        if kind not in EIGENVECTOR_KINDS:
            raise ConfigError("eigenvectors", f"must be one of {EIGENVECTOR_KINDS}")
        if kind == "sparse":
            if self.support is None:
                raise ConfigError("support", "required for sparse eigenvectors")
            if self.support < 1 or self.support * self.d > self.n:
                raise ConfigError("support", f"need 1 <= support*d <= n = {self.n}")
        if kind == "file" and not self.eigenvector_file:
            raise ConfigError("eigenvector_file", "required for file eigenvectors")
        if kind == "synth":
            if self.d != 1:
                raise ConfigError("d", "synth eigenvectors support d = 1 only")
            if self.synth_function not in PROFILES:
                raise ConfigError(
                    "synth_function", f"must be one of {tuple(PROFILES)}"
                )
            levels = self.wavelet_levels or default_levels(self.n)
            if self.n % 2**levels:
                raise ConfigError(
                    "wavelet_levels", f"n = {self.n} is not divisible by 2^{levels}"
                )

    def build_eigenvectors(self) -> np.ndarray:
        kind = self.eigenvectors
        if kind == "identity":
            return canonical_frame(self.n, self.d)
        if kind == "sparse":
            return sparse_uniform_frame(self.n, self.d, self.support)
        if kind == "file":
            try:
                V = np.loadtxt(self.eigenvector_file, delimiter=",", ndmin=2)
            except OSError:
                raise
            except ValueError as exc:
                raise ConfigError("eigenvector_file", f"unreadable CSV: {exc}") from None
            if V.shape != (self.n, self.d):
                raise ConfigError(
                    "eigenvector_file",
                    f"expected shape ({self.n}, {self.d}), got {V.shape}",
                )
            try:
                return validate_frame(V)
            except ValueError as exc:
                raise ConfigError("eigenvector_file", str(exc)) from None
        profile = PROFILES[self.synth_function]
        if self.synth_function == "step":
            v = profile(self.n, breakpoint=self.synth_breakpoint)
        elif self.synth_function == "one_peak":
            v = profile(self.n, center=self.synth_center, width=self.synth_width)
        else:
            v = profile(self.n, width=self.synth_width)
        return v[:, None]

    def build_model(self) -> SpikeModel:
        return SpikeModel(
            eigenvalues=np.asarray(self.lambdas, dtype=float),
            eigenvectors=self.build_eigenvectors(),
            sigma=self.sigma,
        )

    def config_hash(self) -> str:
        """Hash of every resolved field except seeds, mode, and output."""
        skip = {"seeds", "mode", "output", "explicit"}
        parts = []
        for f in sorted(fields(self), key=lambda f: f.name):
            if f.name in skip:
                continue
            parts.append(f"{f.name}={getattr(self, f.name)!r}")
        digest = hashlib.sha256("\n".join(parts).encode()).hexdigest()
        return digest[:12]


def parse_config_text(text: str) -> ExperimentConfig:
    """Parse key-value lines into an ExperimentConfig (no cross-field validation)."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, raw = body.split("=", 1)
        key = key.strip()
        if key not in _DEFAULTS:
            raise ConfigError(key, f"unknown key (line {lineno})")
        if key in values:
            raise ConfigError(key, f"duplicate key (line {lineno})")
        values[key] = _coerce(key, raw)
    return ExperimentConfig(**values, explicit=frozenset(values))


def load_config(path) -> ExperimentConfig:
    """Read and parse a config file; I/O errors propagate as OSError."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())
