"""Periodic orthonormal DWT, per-octave detail variance and logscale diagrams."""

from __future__ import annotations

from dataclasses import dataclass
import warnings

import numpy as np

from .diagram import ScalingDiagram
from .errors import DomainError, HurstRangeWarning, InsufficientDataError, KindError, SizeError
from .synthesis import CUMULATIVE, INCREMENTS, TraceSeries, fgn_autocovariance

_S3 = np.sqrt(3.0)
FILTERS = {
    "haar": np.array([1.0, 1.0]) / np.sqrt(2.0),
    "d4": np.array([1 + _S3, 3 + _S3, 3 - _S3, 1 - _S3]) / (4 * np.sqrt(2.0)),
}
MIN_COEFFICIENTS = 8
# detail variance below this fraction of the input mean square is treated as 0
ZERO_FRACTION = 1e-24


def filters(wavelet):
    """Low-pass and high-pass analysis filters of ``wavelet``."""
    try:
        h = FILTERS[wavelet]
    except KeyError:
        raise DomainError(f"unknown wavelet {wavelet!r}; choose from {sorted(FILTERS)}") from None
    g = h[::-1] * (-1.0) ** np.arange(h.size)
    return h, g


def dwt_step(x, h, g):
    """One periodic analysis step: ``a[k] = sum_i h[i] x[(2k + i) mod N]``."""
    a = np.zeros(x.size // 2)
    d = np.zeros(x.size // 2)
    for i in range(h.size):
        shifted = np.roll(x, -i)[0::2]
        a += h[i] * shifted
        d += g[i] * shifted
    return a, d


def dwt(values, wavelet="haar", levels=1):
    """Pyramid transform; returns ``(details, approximation)``.

    ``details[j - 1]`` holds the octave-j coefficients. ``len(values)`` must
    be divisible by ``2**levels``.
    """
    x = np.asarray(values, dtype=np.float64)
    if x.size % (2 ** levels):
        raise SizeError(f"length {x.size} is not divisible by 2**{levels}")
    h, g = filters(wavelet)
    details = []
    for _ in range(levels):
        x, d = dwt_step(x, h, g)
        details.append(d)
    return details, x


@dataclass(frozen=True)
class OctaveVariance:
    octave: int
    variance: float
    coefficient_count: int
    excluded: bool = False
    reason: str = None


def default_max_octave(length, min_coefficients=MIN_COEFFICIENTS):
    return (length // min_coefficients).bit_length() - 1


def dwt_detail_variances(series, wavelet="haar", max_octave=None, min_coefficients=MIN_COEFFICIENTS):
    """Mean squared detail coefficient at each octave 1..max_octave.

    The series is truncated to its leading ``2**max_octave``-divisible part.
    A cumulative path first has the straight line through its end points
    removed, so the periodic extension has no jump at the wrap-around.
    Octaves with fewer than ``min_coefficients`` coefficients, or with a
    variance that is zero up to round-off, are returned but flagged excluded.
    """
    if not isinstance(series, TraceSeries):
        series = TraceSeries(series)
    n = len(series)
    if max_octave is None:
        max_octave = default_max_octave(n, min_coefficients)
    if max_octave < 1 or n < 2 ** (max_octave + 2):
        raise SizeError(f"series of length {n} is too short for {max_octave} octaves")
    x = series.values[: n - n % 2 ** max_octave]
    if series.kind == CUMULATIVE and x.size > 1:
        x = x - (x[-1] - x[0]) * np.arange(x.size) / (x.size - 1)
    floor = ZERO_FRACTION * float(np.mean(x * x))
    details, _ = dwt(x, wavelet, max_octave)
    out = []
    for j, d in enumerate(details, start=1):
        var = float(np.mean(d * d))
        reason = None
        if d.size < min_coefficients:
            reason = "too-few-coefficients"
        elif var <= floor:
            reason = "zero-variance"
        out.append(OctaveVariance(j, var, d.size, reason is not None, reason))
    return out


def logscale_diagram(variances, series_kind=INCREMENTS):
    """log2 detail variance against octave, weighted by coefficient count."""
    kept = [v for v in variances if not v.excluded and v.variance > 0]
    if len(kept) < 3:
        raise InsufficientDataError(
            f"logscale diagram needs at least 3 usable octaves, got {len(kept)}"
        )
    return ScalingDiagram(
        [v.octave for v in kept],
        [np.log2(v.variance) for v in kept],
        [v.coefficient_count for v in kept],
        statistic="wavelet",
        order=2,
        series_kind=series_kind,
    )


def hurst_from_slope(slope, kind=INCREMENTS):
    """Hurst exponent from a logscale-diagram slope.

    The slope is ``2H - 1`` for increments and ``2H + 1`` for a cumulative
    path. A :class:`HurstRangeWarning` is issued for results outside (0, 1).
    """
    if kind == INCREMENTS:
        h = (slope + 1.0) / 2.0
    elif kind == CUMULATIVE:
        h = (slope - 1.0) / 2.0
    else:
        raise KindError(f"unknown series kind {kind!r}")
    if not 0.0 < h < 1.0:
        warnings.warn(f"wavelet Hurst estimate {h:.4g} outside (0, 1)", HurstRangeWarning)
    return h


def detail_filter(wavelet, octave):
    """Equivalent filter mapping the input to octave-``octave`` details."""
    h, g = filters(wavelet)
    approx = np.ones(1)
    for level in range(1, octave + 1):
        step = 2 ** (level - 1)
        up_g = np.zeros((g.size - 1) * step + 1)
        up_g[::step] = g
        if level == octave:
            return np.convolve(approx, up_g)
        up_h = np.zeros((h.size - 1) * step + 1)
        up_h[::step] = h
        approx = np.convolve(approx, up_h)
    raise DomainError("octave must be >= 1")


def expected_detail_variance(hurst, octave, wavelet="haar", kind=INCREMENTS):
    """Exact detail variance of unit fGn (or its fBm path) at ``octave``."""
    psi = detail_filter(wavelet, octave)
    r = np.correlate(psi, psi, mode="full")
    lags = np.arange(-(psi.size - 1), psi.size)
    if kind == INCREMENTS:
        return float(np.sum(r * fgn_autocovariance(hurst, lags)))
    if kind == CUMULATIVE:
        # wavelet with a vanishing moment: only the |t - s|^{2H} part survives
        return float(-0.5 * np.sum(r * np.abs(lags) ** (2.0 * hurst)))
    raise KindError(f"unknown series kind {kind!r}")


def detail_variance_prefactor(hurst, wavelet="haar", kind=INCREMENTS, octave=4):
    """``C`` in ``Var(d_j) ~ C * 2**(slope * j)`` for unit fGn, read at ``octave``."""
    slope = 2.0 * hurst - 1.0 if kind == INCREMENTS else 2.0 * hurst + 1.0
    return expected_detail_variance(hurst, octave, wavelet, kind) / 2.0 ** (slope * octave)
