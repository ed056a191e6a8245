"""Analytic crossover prediction and two-segment breakpoint detection."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional
import math
import warnings

import numpy as np

from .cumulants import hurst_from_cumulant_slope
from .diagram import weighted_line
from .errors import DomainError, HurstRangeWarning, InsufficientDataError, NoCrossoverError, OrderingError
from .synthesis import INCREMENTS
from .wavelet import hurst_from_slope

# segmented SSE must drop below this fraction of the single-line SSE
SIGNIFICANCE_RATIO = 0.5
# ... and the SSE drop must exceed this many units of point noise
MIN_GAIN = 25.0
# variance of log2 of a mean of n squared Gaussians, times n (large n)
LOG2_VARIANCE_UNIT = 2.0 / math.log(2.0) ** 2
MIN_SEGMENT_POINTS = 2
# dominance regimes sit this many octaves away from the predicted break
REGIME_MARGIN = 2.0


@dataclass(frozen=True)
class CrossoverPrediction:
    log2_break: float
    small_scale_slope: float
    large_scale_slope: float

    def to_dict(self):
        return asdict(self)


def _check_prefactors(big, small, h1, h2):
    if not small > 0:
        raise DomainError("prefactors must be positive")
    if not big > small:
        raise NoCrossoverError(
            f"small-scale prefactor {big!r} must exceed large-scale prefactor {small!r}"
        )
    if not h1 < h2:
        raise OrderingError(f"need H1 < H2, got H1={h1!r}, H2={h2!r}")


def predict_crossover_cumulant(c1, c2, H1, H2, m=2):
    """Block size where ``c1 n^(m+2(H1-1))`` meets ``c2 n^(m+2(H2-1))``.

    ``log2_break`` is log2 of that block size.
    """
    _check_prefactors(c1, c2, H1, H2)
    log2_n = math.log2(c1 / c2) / (2.0 * (H2 - H1))
    return CrossoverPrediction(log2_n, m + 2.0 * (H1 - 1.0), m + 2.0 * (H2 - 1.0))


def predict_crossover_wavelet(c3, c4, H1, H2, kind=INCREMENTS):
    """Octave where the two detail-variance power laws are equal."""
    _check_prefactors(c3, c4, H1, H2)
    j = math.log2(c3 / c4) / (2.0 * (H2 - H1))
    offset = -1.0 if kind == INCREMENTS else 1.0
    return CrossoverPrediction(j, 2.0 * H1 + offset, 2.0 * H2 + offset)


def mixture_curve(prefactors, slopes, log2_scale):
    """log2 of ``sum_i c_i 2^(s_i x)``, the noiseless sum of power laws."""
    x = np.asarray(log2_scale, dtype=np.float64)
    total = sum(c * 2.0 ** (s * x) for c, s in zip(prefactors, slopes))
    return np.log2(total)


@dataclass(frozen=True)
class SegmentedFit:
    """Best two-segment fit.

    ``break_index`` is the position of the first point of the large-scale
    segment. ``log2_break`` is where the two fitted lines intersect, clamped
    to the gap between the last low point and the first high point.
    """

    break_index: int
    log2_break: float
    slope_low: float
    intercept_low: float
    slope_high: float
    intercept_high: float
    sse: float
    single_line_sse: float

    @property
    def sse_ratio(self):
        if self.single_line_sse <= 0:
            return 1.0
        return self.sse / self.single_line_sse

    def to_dict(self):
        d = asdict(self)
        d["sse_ratio"] = self.sse_ratio
        return d


def fit_segmented(diagram, min_points=MIN_SEGMENT_POINTS):
    """Exhaustive two-segment weighted least squares over diagram points.

    Every split leaving ``min_points`` on each side is tried; ties go to the
    smaller break index.
    """
    x, y, w = diagram.log2_scale, diagram.log2_statistic, diagram.weight
    n = x.size
    if n < 5:
        raise InsufficientDataError(f"segmented fit needs at least 5 points, got {n}")
    single = weighted_line(x, y, w)
    # SSE differences below this are round-off, so the earlier split is kept
    tie = 1e-12 * max(single.sse, np.finfo(float).tiny)
    best = None
    for b in range(min_points, n - min_points + 1):
        low = weighted_line(x[:b], y[:b], w[:b])
        high = weighted_line(x[b:], y[b:], w[b:])
        sse = low.sse + high.sse
        if best is None or sse < best[0] - tie:
            best = (sse, b, low, high)
    sse, b, low, high = best
    lo_x, hi_x = x[b - 1], x[b]
    if high.slope != low.slope:
        cross = (low.intercept - high.intercept) / (high.slope - low.slope)
        log2_break = float(min(max(cross, lo_x), hi_x))
    else:
        log2_break = float(hi_x)
    return SegmentedFit(
        b,
        log2_break,
        low.slope,
        low.intercept,
        high.slope,
        high.intercept,
        min(sse, single.sse),
        single.sse,
    )


def slope_to_hurst(slope, diagram):
    if diagram.statistic == "cumulant":
        return hurst_from_cumulant_slope(slope, diagram.order)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HurstRangeWarning)
        return hurst_from_slope(slope, diagram.series_kind)


def default_noise_scale(diagram):
    """Per-unit-weight variance of a diagram's log2 statistic, if known.

    Points of order-2 cumulant and wavelet diagrams are log2 variance
    estimates weighted by their sample count; for Gaussian data their
    variance is close to ``LOG2_VARIANCE_UNIT / weight``. Higher-order
    cumulants have no such closed form and return None.
    """
    if diagram.statistic == "wavelet" or diagram.order == 2:
        return LOG2_VARIANCE_UNIT / diagram.replicas
    return None


def _regime_slope(diagram, lo=None, hi=None):
    d = diagram.restrict(lo, hi)
    if len(d) < 2:
        return None
    return weighted_line(d.log2_scale, d.log2_statistic, d.weight).slope


@dataclass(frozen=True)
class CrossoverReport:
    fit: SegmentedFit
    hurst_low: float
    hurst_high: float
    sse_ratio: float
    gain: Optional[float]
    significant: bool
    threshold: float
    min_gain: float
    prediction: Optional[CrossoverPrediction] = None
    deviation: Optional[float] = None
    regime_slopes: Optional[dict] = None

    @property
    def message(self):
        head = "significant crossover" if self.significant else "no significant crossover"
        return (
            f"{head} at log2 scale {self.fit.log2_break:.2f}: H {self.hurst_low:.3f} -> {self.hurst_high:.3f}, "
            f"SSE ratio {self.sse_ratio:.3f}"
        )

    def to_dict(self):
        return {
            "segmented_fit": self.fit.to_dict(),
            "hurst_low": self.hurst_low,
            "hurst_high": self.hurst_high,
            "sse_ratio": self.sse_ratio,
            "gain": self.gain,
            "significant": self.significant,
            "threshold": self.threshold,
            "min_gain": self.min_gain,
            "message": self.message,
            "prediction": None if self.prediction is None else self.prediction.to_dict(),
            "deviation": self.deviation,
            "regime_slopes": self.regime_slopes,
        }


def crossover_report(
    diagram,
    prediction=None,
    threshold=SIGNIFICANCE_RATIO,
    min_gain=MIN_GAIN,
    noise_scale=None,
):
    """Segmented fit plus per-regime Hurst estimates and a significance verdict.

    A crossover is significant when all of these hold:

    * the two-segment SSE is below ``threshold`` times the single-line SSE;
    * the slope steepens from the small-scale to the large-scale segment;
    * the SSE drop, divided by ``noise_scale`` (per-unit-weight variance of
      the log2 statistic), exceeds ``min_gain``. When no noise scale is given
      or known (see :func:`default_noise_scale`) this check is skipped and
      ``gain`` is None.

    With a ``prediction``, ``deviation`` is the distance between empirical
    and analytic log2 breaks, and ``regime_slopes`` holds straight-line
    slopes over the points at least ``REGIME_MARGIN`` octaves below and above
    the analytic break (None where fewer than 2 points remain).
    """
    fit = fit_segmented(diagram)
    ratio = fit.sse_ratio
    if noise_scale is None:
        noise_scale = default_noise_scale(diagram)
    gain = None
    if noise_scale is not None and noise_scale > 0:
        gain = (fit.single_line_sse - fit.sse) / noise_scale
    significant = (
        ratio < threshold
        and fit.slope_high > fit.slope_low
        and (gain is None or gain > min_gain)
    )
    deviation = regimes = None
    if prediction is not None:
        deviation = abs(fit.log2_break - prediction.log2_break)
        regimes = {
            "small_scale": _regime_slope(diagram, hi=prediction.log2_break - REGIME_MARGIN),
            "large_scale": _regime_slope(diagram, lo=prediction.log2_break + REGIME_MARGIN),
        }
    return CrossoverReport(
        fit,
        slope_to_hurst(fit.slope_low, diagram),
        slope_to_hurst(fit.slope_high, diagram),
        ratio,
        gain,
        bool(significant),
        threshold,
        min_gain,
        prediction,
        deviation,
        regimes,
    )
