"""Table assembly and rendering.

All numeric rounding happens here, at render time: coefficients and
their standard errors to three decimals, descriptive statistics to one.
Output bytes are locale-independent (ASCII minus, dot decimal) and
byte-identical for identical inputs.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .model import CategoryMap, Context, SchemeKind
from .regress import GravityFit
from .stats import StatsRow, summarize

logger = logging.getLogger(__name__)

CONTEXT_ORDER = (Context.NATIONAL, Context.CONTINENTAL, Context.INTERCONTINENTAL)
TOTAL_LABEL = "Total"


@dataclass(frozen=True)
class Table:
    """A rendered table: named grid of already-formatted cells."""

    name: str
    columns: tuple[str, ...]
    rows: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class GammaDistributionRow:
    """Distance-coefficient spread across one area's qualifying categories."""

    area: str
    context: Context
    min: float
    max: float
    sd: float

    def __post_init__(self) -> None:
        if self.min > self.max:
            raise ValueError(f"min {self.min} exceeds max {self.max}")


@dataclass(frozen=True)
class GammaCountRow:
    """Counts of significant / negative distance coefficients for one area."""

    area: str
    context: Context
    n_significant: int
    n_negative: int

    def __post_init__(self) -> None:
        if not 0 <= self.n_negative <= self.n_significant:
            raise ValueError(
                f"n_negative {self.n_negative} outside [0, {self.n_significant}]"
            )


def _coef(value: float) -> str:
    return f"{value:.3f}"


def _stat(value: Optional[float]) -> str:
    return "" if value is None else f"{value:.1f}"


def _coef_cell(value: float, mark: str) -> str:
    return f"{_coef(value)} {mark}"


def fit_table(fits: Mapping[str, GravityFit], kind: SchemeKind, name: str = "fits") -> Table:
    """One row per category, in code order.

    At the fine (SC) level the distance cell carries the robust standard
    error in brackets.
    """
    columns = ("category", "n", "m_i", "m_j", "d_ij", "const", "r2")
    rows = []
    for category in sorted(fits):
        fit = fits[category]
        d_cell = _coef_cell(fit.gamma, fit.gamma_mark)
        if kind is SchemeKind.SC:
            d_cell += f" ({_coef(fit.gamma_se)})"
        rows.append(
            (
                category,
                str(fit.n),
                _coef_cell(fit.alpha, fit.marks[1]),
                _coef_cell(fit.beta, fit.marks[2]),
                d_cell,
                _coef_cell(fit.ln_k, fit.marks[0]),
                _coef(fit.r2),
            )
        )
    return Table(name=name, columns=columns, rows=tuple(rows))


def descriptives_table(
    summaries: Mapping[str, Sequence[tuple[str, StatsRow]]], name: str = "descriptives"
) -> Table:
    """Per-category descriptive statistics of the model variables."""
    columns = ("category", "var", "n", "mean", "p25", "p50", "p75", "sd", "cv", "max")
    rows = []
    for category in sorted(summaries):
        for variable, s in summaries[category]:
            rows.append(
                (
                    category,
                    variable,
                    str(s.n),
                    _stat(s.mean),
                    _stat(s.p25),
                    _stat(s.p50),
                    _stat(s.p75),
                    _stat(s.sd),
                    _stat(s.cv),
                    _stat(s.max),
                )
            )
    return Table(name=name, columns=columns, rows=tuple(rows))


def _significant(fit: GravityFit, thresholds: Sequence[float]) -> bool:
    return fit.gamma_p < thresholds[-1]


def gamma_distribution(
    sc_fits: Mapping[tuple[Context, str], GravityFit],
    category_map: CategoryMap,
    min_observations: int,
    thresholds: Sequence[float],
) -> list[GammaDistributionRow]:
    """Min / max / spread of the distance coefficient per area and context.

    Only categories with more than ``min_observations`` rows and a
    significant distance coefficient qualify; areas with no qualifying
    category are omitted (noted in the log).
    """
    gammas: dict[tuple[str, Context], list[float]] = defaultdict(list)
    for (context, category), fit in sc_fits.items():
        if fit.n > min_observations and _significant(fit, thresholds):
            gammas[(category_map.area_of(category), context)].append(fit.gamma)

    rows = []
    for area in category_map.areas():
        for context in CONTEXT_ORDER:
            values = gammas.get((area, context))
            if values is None:
                if any(c == context for c, _ in sc_fits):
                    logger.info(
                        "gamma distribution: no qualifying category for %s / %s",
                        area,
                        context.value,
                    )
                continue
            s = summarize(values)
            rows.append(
                GammaDistributionRow(
                    area=area, context=context, min=min(values), max=max(values), sd=s.sd
                )
            )
    return rows


def gamma_counts(
    sc_fits: Mapping[tuple[Context, str], GravityFit],
    category_map: CategoryMap,
    thresholds: Sequence[float],
) -> list[GammaCountRow]:
    """Counts of significant distance coefficients per area and context,
    with per-context totals appended."""
    significant: dict[tuple[str, Context], int] = defaultdict(int)
    negative: dict[tuple[str, Context], int] = defaultdict(int)
    contexts_seen = sorted({c for c, _ in sc_fits}, key=CONTEXT_ORDER.index)
    for (context, category), fit in sc_fits.items():
        if not _significant(fit, thresholds):
            continue
        key = (category_map.area_of(category), context)
        significant[key] += 1
        if fit.gamma < 0:
            negative[key] += 1

    rows = []
    for area in category_map.areas():
        for context in contexts_seen:
            key = (area, context)
            rows.append(
                GammaCountRow(
                    area=area,
                    context=context,
                    n_significant=significant[key],
                    n_negative=negative[key],
                )
            )
    for context in contexts_seen:
        rows.append(
            GammaCountRow(
                area=TOTAL_LABEL,
                context=context,
                n_significant=sum(
                    n for (_, c), n in significant.items() if c is context
                ),
                n_negative=sum(n for (_, c), n in negative.items() if c is context),
            )
        )
    return rows


def gamma_distribution_table(
    rows: Sequence[GammaDistributionRow], name: str = "gamma_distribution"
) -> Table:
    return Table(
        name=name,
        columns=("area", "context", "min", "max", "sd"),
        rows=tuple(
            (r.area, r.context.value, _coef(r.min), _coef(r.max), _coef(r.sd)) for r in rows
        ),
    )


def gamma_counts_table(rows: Sequence[GammaCountRow], name: str = "gamma_counts") -> Table:
    return Table(
        name=name,
        columns=("area", "context", "n_significant", "n_negative"),
        rows=tuple(
            (r.area, r.context.value, str(r.n_significant), str(r.n_negative)) for r in rows
        ),
    )


def emit(tables: Iterable[Table], format: str) -> bytes:
    """Render tables to CSV or Markdown bytes; deterministic."""
    tables = list(tables)
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for index, table in enumerate(tables):
            if len(tables) > 1:
                if index:
                    buf.write("\n")
                buf.write(f"# {table.name}\n")
            writer.writerow(table.columns)
            for row in table.rows:
                writer.writerow(row)
        return buf.getvalue().encode("utf-8")
    if format == "markdown":
        parts = []
        for table in tables:
            lines = [f"## {table.name}", ""]
            lines.append("| " + " | ".join(table.columns) + " |")
            lines.append("| " + " | ".join("---" for _ in table.columns) + " |")
            for row in table.rows:
                lines.append("| " + " | ".join(row) + " |")
            parts.append("\n".join(lines))
        return ("\n\n".join(parts) + "\n").encode("utf-8")
    raise ValueError(f"unknown output format {format!r}")
