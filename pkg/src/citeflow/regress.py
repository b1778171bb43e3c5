"""Log-log gravity model estimation.

ln C = ln k + alpha ln M_i + beta ln M_j + g ln d + noise

OLS via QR decomposition (never raw normal equations), with
heteroskedasticity-consistent standard errors and two-sided t
p-values on n-4 degrees of freedom.

Sign convention: the distance coefficient is reported as the raw
coefficient of ln d.  A negative value therefore means flows decay
with distance; no extra negation is applied anywhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg
from scipy import stats as sps

COEFFICIENT_NAMES = ("const", "ln_m_i", "ln_m_j", "ln_d")
N_COEFFICIENTS = len(COEFFICIENT_NAMES)
MIN_OBSERVATIONS_FOR_FIT = 5

MARK_STRINGS = ("***", "**", "*")
NOT_SIGNIFICANT = "ns"

DEFAULT_THRESHOLDS = (0.01, 0.05, 0.1)


class CollinearityError(ValueError):
    """Design matrix is rank deficient."""

    def __init__(self, columns: Sequence[str]):
        self.columns = list(columns)
        super().__init__(
            "design matrix is rank deficient; collinear columns: " + ", ".join(self.columns)
        )


@dataclass(frozen=True)
class DesignRow:
    """One regression row in natural logs."""

    y: float  # ln C
    x1: float  # ln M_i
    x2: float  # ln M_j
    x3: float  # ln d

    def __post_init__(self) -> None:
        for value in (self.y, self.x1, self.x2, self.x3):
            if not math.isfinite(value):
                raise ValueError(f"non-finite design row {(self.y, self.x1, self.x2, self.x3)}")


@dataclass(frozen=True)
class GravityFit:
    """Estimated gravity model for one category and context.

    Coefficient order is (const, ln_m_i, ln_m_j, ln_d); the last entry
    of each per-coefficient tuple belongs to the distance term.
    """

    n: int
    coefficients: tuple[float, float, float, float]
    robust_se: tuple[float, float, float, float]
    p_values: tuple[float, float, float, float]
    marks: tuple[str, str, str, str]
    r2: float
    se_variant: str = "HC1"

    def __post_init__(self) -> None:
        if not -1e-12 <= self.r2 <= 1.0 + 1e-12:
            raise ValueError(f"R^2 {self.r2} outside [0, 1]")

    @property
    def ln_k(self) -> float:
        return self.coefficients[0]

    @property
    def alpha(self) -> float:
        return self.coefficients[1]

    @property
    def beta(self) -> float:
        return self.coefficients[2]

    @property
    def gamma(self) -> float:
        """Coefficient of ln d (signed as estimated)."""
        return self.coefficients[3]

    @property
    def gamma_se(self) -> float:
        return self.robust_se[3]

    @property
    def gamma_p(self) -> float:
        return self.p_values[3]

    @property
    def gamma_mark(self) -> str:
        return self.marks[3]


def classify(p: float, thresholds: Sequence[float] = DEFAULT_THRESHOLDS) -> str:
    """Significance mark for a p-value; thresholds compared strictly."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p-value {p} outside [0, 1]")
    for threshold, mark in zip(thresholds, MARK_STRINGS):
        if p < threshold:
            return mark
    return NOT_SIGNIFICANT


def log_transform(observations: Iterable) -> list[DesignRow]:
    """Natural-log transform of flow observations, order preserved."""
    rows = []
    for obs in observations:
        values = (obs.cites, obs.m_i, obs.m_j, obs.d_km)
        if any(v <= 0 for v in values):
            raise ValueError(
                f"observation {obs.i.code}->{obs.j.code} in {obs.category!r} "
                f"has non-positive fields {values}"
            )
        rows.append(
            DesignRow(
                y=math.log(obs.cites),
                x1=math.log(obs.m_i),
                x2=math.log(obs.m_j),
                x3=math.log(obs.d_km),
            )
        )
    return rows


def _collinear_columns(X: np.ndarray) -> list[str]:
    """Name the dependent columns via QR with column pivoting."""
    _, r, pivots = scipy.linalg.qr(X, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    tol = max(X.shape) * np.finfo(float).eps * (diag.max() if diag.size else 0.0)
    rank = int((diag > tol).sum())
    return [COEFFICIENT_NAMES[p] for p in sorted(pivots[rank:])]


def fit_ols(
    rows: Sequence[DesignRow],
    thresholds: Sequence[float] = DEFAULT_THRESHOLDS,
    se_variant: str = "HC1",
) -> GravityFit:
    """Fit the log-log model by OLS with robust standard errors.

    Rows are internally sorted into a canonical order first, so the fit
    is bit-identical under any permutation of the input.
    """
    n = len(rows)
    if n < MIN_OBSERVATIONS_FOR_FIT:
        raise ValueError(f"need at least {MIN_OBSERVATIONS_FOR_FIT} observations, got {n}")
    if se_variant not in ("HC0", "HC1"):
        raise ValueError(f"unknown robust SE variant {se_variant!r}")

    ordered = sorted(rows, key=lambda r: (r.y, r.x1, r.x2, r.x3))
    y = np.array([r.y for r in ordered], dtype=float)
    X = np.empty((n, N_COEFFICIENTS), dtype=float)
    X[:, 0] = 1.0
    X[:, 1] = [r.x1 for r in ordered]
    X[:, 2] = [r.x2 for r in ordered]
    X[:, 3] = [r.x3 for r in ordered]

    q, r = np.linalg.qr(X)
    diag = np.abs(np.diag(r))
    if diag.min() <= max(X.shape) * np.finfo(float).eps * diag.max():
        raise CollinearityError(_collinear_columns(X))

    beta = scipy.linalg.solve_triangular(r, q.T @ y)
    residuals = y - X @ beta
    ssr = float(residuals @ residuals)
    centered = y - y.mean()
    sst = float(centered @ centered)
    if sst == 0.0:
        r2 = 1.0 if ssr <= 1e-24 else 0.0
    else:
        r2 = 1.0 - ssr / sst
    r2 = min(1.0, max(0.0, r2))

    # HC sandwich: (X'X)^-1 X' diag(e^2) X (X'X)^-1, via the triangular factor
    r_inv = scipy.linalg.solve_triangular(r, np.eye(N_COEFFICIENTS))
    bread = r_inv @ r_inv.T
    scaled = X * residuals[:, None]
    meat = scaled.T @ scaled
    cov = bread @ meat @ bread
    df = n - N_COEFFICIENTS
    if se_variant == "HC1":
        cov = cov * (n / df)
    se = np.sqrt(np.diag(cov))

    with np.errstate(divide="ignore"):
        t_stats = np.where(se > 0, beta / se, np.inf)
    p_values = 2.0 * sps.t.sf(np.abs(t_stats), df)
    marks = tuple(classify(float(p), thresholds) for p in p_values)

    return GravityFit(
        n=n,
        coefficients=tuple(float(b) for b in beta),
        robust_se=tuple(float(s) for s in se),
        p_values=tuple(float(p) for p in p_values),
        marks=marks,  # type: ignore[arg-type]
        r2=r2,
        se_variant=se_variant,
    )
