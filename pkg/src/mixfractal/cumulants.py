"""k-statistic cumulant estimates across aggregation scales and fractal fits."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional
import warnings

import numpy as np

from .aggregation import DEFAULT_MIN_BLOCKS, aggregate, dyadic_ladder
from .diagram import ScalingDiagram, weighted_line
from .errors import HurstRangeWarning, InsufficientDataError, KindError, UnsupportedOrderError
from .synthesis import INCREMENTS, TraceSeries

ORDERS = (2, 3, 4)
ZERO_THRESHOLD = 1e-12
# |k_m| below this many Gaussian-null standard errors counts as zero (m >= 3).
ZERO_Z = 3.0


def _values(series):
    if isinstance(series, TraceSeries):
        return series.values
    return np.asarray(series, dtype=np.float64)


def _check_order(order):
    if order not in ORDERS:
        raise UnsupportedOrderError(f"cumulant order must be one of {ORDERS}, got {order!r}")


def sample_cumulant(series, order):
    """Unbiased k-statistic of order 2, 3 or 4.

    Computed from central moments, which keeps the estimate invariant to a
    constant shift of the data up to round-off.
    """
    _check_order(order)
    x = _values(series)
    n = x.size
    if n < order:
        raise InsufficientDataError(f"order-{order} k-statistic needs at least {order} samples, got {n}")
    d = x - x.mean()
    d2 = d * d
    m2 = d2.mean()
    if order == 2:
        return float(n * m2 / (n - 1))
    if order == 3:
        m3 = (d2 * d).mean()
        return float(n * n * m3 / ((n - 1) * (n - 2)))
    m4 = (d2 * d2).mean()
    return float(
        n * n * ((n + 1) * m4 - 3 * (n - 1) * m2 * m2) / ((n - 1) * (n - 2) * (n - 3))
    )


def gaussian_null_stderr(k2, n, order):
    """Standard error of k_3 or k_4 for an iid Gaussian sample of size ``n``."""
    if order == 3:
        var = 6.0 * k2 ** 3 * n / ((n - 1) * (n - 2))
    elif order == 4:
        var = 24.0 * k2 ** 4 * n * (n + 1) / ((n - 1) * (n - 2) * (n - 3))
    else:
        raise UnsupportedOrderError("null standard error is defined for orders 3 and 4")
    return float(np.sqrt(var))


@dataclass(frozen=True)
class CumulantRow:
    order: int
    block: int
    blocks: int
    value: float
    excluded: bool = False
    reason: Optional[str] = None

    @property
    def magnitude(self):
        return abs(self.value)

    @property
    def sign(self):
        return int(np.sign(self.value))


@dataclass(frozen=True)
class CumulantScalingTable:
    orders: tuple
    rows: tuple
    series_kind: str = INCREMENTS

    def rows_for(self, order):
        return [r for r in self.rows if r.order == order]

    def diagram(self, order):
        """Admitted rows of one order as a log2-log2 diagram weighted by block count."""
        rows = [r for r in self.rows_for(order) if not r.excluded]
        return ScalingDiagram(
            [np.log2(r.block) for r in rows],
            [np.log2(r.magnitude) for r in rows],
            [r.blocks for r in rows],
            statistic="cumulant",
            order=order,
            series_kind=self.series_kind,
        )

    def to_records(self):
        return [
            {
                "order": r.order,
                "block": r.block,
                "blocks": r.blocks,
                "value": r.value,
                "sign": r.sign,
                "excluded": r.excluded,
                "reason": r.reason,
            }
            for r in self.rows
        ]


def cumulant_scan(
    series,
    ladder=None,
    orders=ORDERS,
    min_blocks=DEFAULT_MIN_BLOCKS,
    zero_threshold=ZERO_THRESHOLD,
    zero_z=ZERO_Z,
):
    """k-statistics of every requested order at every block size.

    Rows are flagged excluded (never dropped) when fewer than ``min_blocks``
    blocks remain, when ``|k_m| < zero_threshold``, or, for orders 3 and 4,
    when ``|k_m|`` is within ``zero_z`` Gaussian-null standard errors of 0.
    """
    if series.kind != INCREMENTS:
        raise KindError(f"cumulant_scan expects increments, got {series.kind}")
    for m in orders:
        _check_order(m)
    if ladder is None:
        ladder = dyadic_ladder(len(series), min_blocks)
    rows = []
    for n in ladder:
        agg = aggregate(series, n).values
        count = agg.size
        k2 = sample_cumulant(agg, 2) if count >= 2 else float("nan")
        for m in orders:
            if count < m:
                rows.append(CumulantRow(m, n, count, float("nan"), True, "too-few-blocks"))
                continue
            k = k2 if m == 2 else sample_cumulant(agg, m)
            reason = None
            if count < min_blocks:
                reason = "too-few-blocks"
            elif abs(k) < zero_threshold:
                reason = "near-zero"
            elif m > 2 and abs(k) < zero_z * gaussian_null_stderr(k2, count, m):
                reason = "indistinguishable-from-zero"
            rows.append(CumulantRow(m, n, count, k, reason is not None, reason))
    return CumulantScalingTable(tuple(orders), tuple(rows), series.kind)


def hurst_from_cumulant_slope(slope, order):
    """Invert ``slope = m + 2(H - 1)``."""
    return (slope - order) / 2.0 + 1.0


@dataclass(frozen=True)
class UnifractalFit:
    hurst: float
    intercept: float
    residual: float
    slope: float
    out_of_range: bool

    def __iter__(self):
        return iter((self.hurst, self.intercept, self.residual))


def fit_unifractal(diagram):
    """Weighted line through a cumulant diagram, read as a uni-fractal H.

    Iterating the result yields ``(hurst, intercept, residual)``.
    """
    if len(diagram) < 3:
        raise InsufficientDataError(
            f"uni-fractal fit needs at least 3 admitted points, got {len(diagram)}"
        )
    line = weighted_line(diagram.log2_scale, diagram.log2_statistic, diagram.weight)
    h = hurst_from_cumulant_slope(line.slope, diagram.order)
    out = not 0.0 < h < 1.0
    if out:
        warnings.warn(f"uni-fractal Hurst estimate {h:.4g} outside (0, 1)", HurstRangeWarning)
    return UnifractalFit(h, line.intercept, line.sse, line.slope, out)


@dataclass(frozen=True)
class LinearFractalFit:
    A: float
    B: float
    residual: float

    def __iter__(self):
        return iter((self.A, self.B, self.residual))


def fit_linear_fractal(slopes):
    """Least-squares ``slope(m) = A*m + B`` over the supplied orders."""
    if len(slopes) < 2:
        raise InsufficientDataError(f"linear-fractal fit needs at least 2 orders, got {len(slopes)}")
    m = np.array(sorted(slopes), dtype=np.float64)
    s = np.array([slopes[k] for k in sorted(slopes)], dtype=np.float64)
    line = weighted_line(m, s)
    return LinearFractalFit(line.slope, line.intercept, line.sse)


@dataclass(frozen=True)
class FractalFitReport:
    slopes: dict
    per_order_hurst: dict
    unifractal_H: Optional[float]
    linear_A: Optional[float]
    linear_B: Optional[float]
    residuals: dict
    consistent: bool
    skipped_orders: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "slopes": {str(k): v for k, v in self.slopes.items()},
            "per_order_hurst": {str(k): v for k, v in self.per_order_hurst.items()},
            "unifractal_H": self.unifractal_H,
            "linear_A": self.linear_A,
            "linear_B": self.linear_B,
            "residuals": self.residuals,
            "consistent": self.consistent,
            "skipped_orders": {str(k): v for k, v in self.skipped_orders.items()},
        }


def fractal_fit_report(diagrams, lo=None, hi=None, tolerance=0.1):
    """Uni-fractal and linear-fractal fits over several cumulant orders.

    ``diagrams`` maps order to :class:`ScalingDiagram` (or is a
    :class:`CumulantScalingTable`). ``lo``/``hi`` restrict every fit to a
    log2-scale range, e.g. one side of a crossover. Orders with fewer than 3
    admitted points are listed in ``skipped_orders``. The common uni-fractal
    H is the least-squares value over all fitted orders; the report is marked
    inconsistent when any per-order H deviates from it by more than
    ``tolerance``.
    """
    if isinstance(diagrams, CumulantScalingTable):
        diagrams = {m: diagrams.diagram(m) for m in diagrams.orders}
    slopes, hursts, skipped, sse = {}, {}, {}, {}
    for m in sorted(diagrams):
        d = diagrams[m].restrict(lo, hi)
        if len(d) < 3:
            skipped[m] = f"{len(d)} admitted points"
            continue
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", HurstRangeWarning)
            fit = fit_unifractal(d)
        slopes[m] = fit.slope
        hursts[m] = fit.hurst
        sse[m] = fit.residual
    residuals = {"per_order_line_sse": {str(k): v for k, v in sse.items()}}
    if not slopes:
        return FractalFitReport({}, {}, None, None, None, residuals, False, skipped)
    h = float(np.mean(list(hursts.values())))
    residuals["unifractal"] = float(
        sum((s - m - 2.0 * (h - 1.0)) ** 2 for m, s in slopes.items())
    )
    a = b = None
    if len(slopes) >= 2:
        a, b, residuals["linear"] = fit_linear_fractal(slopes)
    consistent = max(abs(v - h) for v in hursts.values()) <= tolerance
    return FractalFitReport(slopes, hursts, h, a, b, residuals, consistent, skipped)
