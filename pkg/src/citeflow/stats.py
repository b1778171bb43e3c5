"""Descriptive statistics matching the report table columns."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np


@dataclass(frozen=True)
class StatsRow:
    """Summary of one variable: count, location, spread and maximum.

    ``sd`` is the sample standard deviation (n-1 denominator, 0 for a
    single value); ``cv`` is sd/mean, absent when the mean is zero.
    Percentiles use linear interpolation of order statistics
    (h = (n-1)q + 1).
    """

    n: int
    mean: float
    p25: float
    p50: float
    p75: float
    sd: float
    cv: Optional[float]
    max: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.sd < 0:
            raise ValueError("sd must be >= 0")
        if not (self.p25 <= self.p50 <= self.p75 <= self.max):
            raise ValueError("percentile chain p25 <= p50 <= p75 <= max violated")


def summarize(values: Sequence[float]) -> StatsRow:
    """Summarize a non-empty list of reals."""
    if len(values) == 0:
        raise ValueError("cannot summarize an empty list")
    arr = np.asarray(values, dtype=float)
    n = arr.size
    mean = float(arr.mean())
    sd = 0.0 if n == 1 else float(arr.std(ddof=1))
    p25, p50, p75 = (float(p) for p in np.percentile(arr, [25.0, 50.0, 75.0]))
    cv = None if mean == 0.0 else sd / mean
    return StatsRow(n=n, mean=mean, p25=p25, p50=p50, p75=p75, sd=sd, cv=cv, max=float(arr.max()))
