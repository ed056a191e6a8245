"""Fractional Gaussian noise synthesis and weighted independent mixtures."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError, KindError, SynthesisError
from .rng import MASK64, derive_seed, standard_normals

INCREMENTS = "increments"
CUMULATIVE = "cumulative"
MARGINALS = ("gaussian", "chi-squared")

# Relative size of a negative embedding eigenvalue tolerated as round-off.
EIGEN_TOL = 1e-8
MIN_LENGTH = 2 ** 8


def _check_hurst(hurst):
    if not 0.0 < hurst < 1.0:
        raise DomainError(f"Hurst exponent must lie in (0, 1), got {hurst!r}")


def _is_power_of_two(n):
    return n >= 1 and n & (n - 1) == 0


@dataclass(frozen=True)
class HurstComponent:
    """One self-similar constituent of a mixed flow.

    ``seed`` overrides the sub-seed that :func:`compose_mixture` would
    otherwise derive from the flow seed and the component's position.
    """

    hurst: float
    weight: float = 1.0
    seed: Optional[int] = None

    def __post_init__(self):
        _check_hurst(self.hurst)
        if not self.weight > 0:
            raise DomainError(f"component weight must be positive, got {self.weight!r}")
        if self.seed is not None and not 0 <= self.seed <= MASK64:
            raise DomainError("component seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class FlowSpec:
    components: tuple
    length: int
    seed: int = 0
    marginal: str = "gaussian"

    def __post_init__(self):
        comps = tuple(
            c if isinstance(c, HurstComponent) else HurstComponent(**c)
            for c in self.components
        )
        object.__setattr__(self, "components", comps)
        if not comps:
            raise DomainError("a flow needs at least one component")
        hursts = [c.hurst for c in comps]
        if any(b <= a for a, b in zip(hursts, hursts[1:])):
            raise DomainError(
                f"component Hurst exponents must be strictly increasing, got {hursts}"
            )
        if not _is_power_of_two(self.length) or self.length < MIN_LENGTH:
            raise DomainError(
                f"length must be a power of two >= {MIN_LENGTH}, got {self.length}"
            )
        if self.marginal not in MARGINALS:
            raise DomainError(f"marginal must be one of {MARGINALS}, got {self.marginal!r}")
        if not 0 <= self.seed <= MASK64:
            raise DomainError("seed must be an unsigned 64-bit integer")

    def to_dict(self):
        return {
            "components": [
                {"hurst": c.hurst, "weight": c.weight, "seed": c.seed}
                for c in self.components
            ],
            "length": self.length,
            "seed": self.seed,
            "marginal": self.marginal,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            components=tuple(HurstComponent(**c) for c in d["components"]),
            length=int(d["length"]),
            seed=int(d.get("seed", 0)),
            marginal=d.get("marginal", "gaussian"),
        )

    def digest(self):
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def with_seed(self, seed):
        return FlowSpec(self.components, self.length, seed, self.marginal)


@dataclass(frozen=True, eq=False)
class TraceSeries:
    values: np.ndarray
    kind: str = INCREMENTS
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise DomainError("a trace must be a non-empty one-dimensional series")
        if not np.all(np.isfinite(values)):
            raise DomainError("trace values must all be finite")
        if self.kind not in (INCREMENTS, CUMULATIVE):
            raise KindError(f"unknown series kind {self.kind!r}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


def fgn_autocovariance(hurst, lag):
    """Autocovariance of unit-variance fractional Gaussian noise.

    ``lag`` may be an integer or an integer array.
    """
    _check_hurst(hurst)
    k = np.abs(np.asarray(lag, dtype=np.float64))
    h2 = 2.0 * hurst
    gamma = 0.5 * (np.abs(k + 1) ** h2 - 2.0 * k ** h2 + np.abs(k - 1) ** h2)
    return float(gamma) if gamma.ndim == 0 else gamma


def circulant_eigenvalues(hurst, length):
    """Eigenvalues of the size ``2 * length`` circulant embedding."""
    gamma = fgn_autocovariance(hurst, np.arange(length + 1))
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    return np.fft.fft(row).real


def synthesize_fgn(hurst, length, seed):
    """Exact-covariance fGn of ``length`` samples by circulant embedding.

    Parameters
    ----------
    hurst : float
        Hurst exponent in (0, 1).
    length : int
        Number of samples, a power of two.
    seed : int
        Unsigned 64-bit seed; the output is a pure function of the arguments.

    Returns
    -------
    TraceSeries
        Increments with mean 0, variance 1 and autocovariance
        :func:`fgn_autocovariance`.
    """
    _check_hurst(hurst)
    if not _is_power_of_two(length):
        raise DomainError(f"length must be a power of two, got {length}")
    m = 2 * length
    eig = circulant_eigenvalues(hurst, length)
    worst = eig.min()
    if worst < 0:
        if worst < -EIGEN_TOL * eig.max():
            raise SynthesisError(
                f"circulant embedding eigenvalue {worst:.6g} is negative "
                f"(H={hurst}, length={length})"
            )
        eig = np.clip(eig, 0.0, None)
    z = standard_normals(seed, 2 * m)
    w = np.sqrt(eig / m) * (z[:m] + 1j * z[m:])
    # real part of the transform has exactly the embedded covariance
    values = np.fft.fft(w).real[:length]
    return TraceSeries(
        values,
        INCREMENTS,
        {"generator": "fgn-circulant", "hurst": hurst, "seed": seed},
    )


def _chi_squared(values):
    return (values * values - 1.0) / np.sqrt(2.0)


def component_seed(spec, index):
    comp = spec.components[index]
    return comp.seed if comp.seed is not None else derive_seed(spec.seed, index)


def compose_mixture(spec):
    """Weighted sum of independent fGn components described by ``spec``.

    In ``chi-squared`` mode every component is squared and recentred to
    unit variance before weighting. That keeps the marginal skewed so
    cumulants above order 2 do not vanish, but it only approximately
    preserves self-similarity.
    """
    total = np.zeros(spec.length)
    seeds = []
    for i, comp in enumerate(spec.components):
        sub = component_seed(spec, i)
        seeds.append(sub)
        x = synthesize_fgn(comp.hurst, spec.length, sub).values
        if spec.marginal == "chi-squared":
            x = _chi_squared(x)
        total += comp.weight * x
    return TraceSeries(
        total,
        INCREMENTS,
        {
            "generator": "mixture",
            "seed": spec.seed,
            "component_seeds": seeds,
            "spec_hash": spec.digest(),
        },
    )


def cumulate(series):
    """Running sum of an increment series."""
    if series.kind != INCREMENTS:
        raise KindError(f"cumulate expects increments, got {series.kind}")
    return TraceSeries(np.cumsum(series.values), CUMULATIVE, dict(series.meta))


def difference(series):
    """First differences of a cumulative series; one sample shorter."""
    if series.kind != CUMULATIVE:
        raise KindError(f"difference expects a cumulative series, got {series.kind}")
    if len(series) < 2:
        raise DomainError("differencing needs at least two samples")
    return TraceSeries(np.diff(series.values), INCREMENTS, dict(series.meta))
