"""Scaling diagrams and the weighted straight-line fit used on them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InsufficientDataError


@dataclass(frozen=True, eq=False)
class ScalingDiagram:
    """Log-log points of one scaling statistic.

    ``statistic`` is ``"cumulant"`` (x = log2 block size, y = log2 |cum_m|)
    or ``"wavelet"`` (x = octave, y = log2 detail variance). ``order`` is the
    cumulant order, 2 for the wavelet variance. ``series_kind`` records
    whether the analysed series held increments or a cumulative path, which
    decides how slopes convert to Hurst exponents. ``replicas`` counts the
    independent series averaged into each point (1 for a single series).
    """

    log2_scale: np.ndarray
    log2_statistic: np.ndarray
    weight: np.ndarray
    statistic: str = "cumulant"
    order: int = 2
    series_kind: str = "increments"
    replicas: int = 1

    def __post_init__(self):
        arrays = []
        for name in ("log2_scale", "log2_statistic", "weight"):
            a = np.array(getattr(self, name), dtype=np.float64).reshape(-1)
            a.setflags(write=False)
            arrays.append(a)
            object.__setattr__(self, name, a)
        x, y, w = arrays
        if not (x.size == y.size == w.size):
            raise DomainError("diagram columns differ in length")
        if np.any(np.diff(x) <= 0):
            raise DomainError("diagram scales must be strictly increasing")
        if not (np.all(np.isfinite(y)) and np.all(w > 0)):
            raise DomainError("diagram points need finite statistics and positive weights")

    def __len__(self):
        return self.log2_scale.size

    @property
    def points(self):
        return list(zip(self.log2_scale.tolist(), self.log2_statistic.tolist(), self.weight.tolist()))

    def restrict(self, lo=None, hi=None):
        """Sub-diagram with ``lo <= log2_scale <= hi``."""
        keep = np.ones(len(self), dtype=bool)
        if lo is not None:
            keep &= self.log2_scale >= lo
        if hi is not None:
            keep &= self.log2_scale <= hi
        return ScalingDiagram(
            self.log2_scale[keep],
            self.log2_statistic[keep],
            self.weight[keep],
            self.statistic,
            self.order,
            self.series_kind,
            self.replicas,
        )

    def with_statistic(self, log2_statistic, replicas=None):
        return ScalingDiagram(
            self.log2_scale,
            log2_statistic,
            self.weight,
            self.statistic,
            self.order,
            self.series_kind,
            self.replicas if replicas is None else replicas,
        )


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    sse: float


def weighted_line(x, y, w: Optional[np.ndarray] = None):
    """Weighted least-squares line; ``sse`` is the weighted residual sum."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    w = np.ones_like(x) if w is None else np.asarray(w, dtype=np.float64)
    if x.size < 2:
        raise InsufficientDataError("a line fit needs at least two points")
    sw = w.sum()
    xm = (w * x).sum() / sw
    ym = (w * y).sum() / sw
    dx = x - xm
    sxx = (w * dx * dx).sum()
    if sxx <= 0:
        raise InsufficientDataError("a line fit needs two distinct abscissae")
    slope = (w * dx * (y - ym)).sum() / sxx
    intercept = ym - slope * xm
    resid = y - (intercept + slope * x)
    return LineFit(float(slope), float(intercept), float((w * resid * resid).sum()))
