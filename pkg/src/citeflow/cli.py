"""Command-line entry point.

Subcommands: ``validate`` (corpus consistency), ``run`` (full analysis),
``simulate`` (synthetic corpus).  Configuration comes from a JSON file;
flags override it.  Logs go to stderr, per-fit summary lines to stdout,
results to files.  Exit codes: 0 success, 1 domain failure, 2 usage or
I/O failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Mapping, Optional, Sequence

from . import __version__
from .flows import build_observations, cited_universe, descriptive_summary
from .ingest import (
    Gazetteer,
    ParseError,
    UnknownTerritoryError,
    parse_category_map,
    parse_citations,
    parse_gazetteer,
    parse_publications,
    write_category_map,
    write_citations,
    write_gazetteer,
    write_publications,
)
from .mass import build_profiles
from .model import (
    AnalysisConfig,
    CategoryScheme,
    Context,
    MajorityRule,
    SchemeKind,
    YearWindow,
    validate_corpus,
)
from .regress import MIN_OBSERVATIONS_FOR_FIT, GravityFit, fit_ols, log_transform
from .report import (
    Table,
    descriptives_table,
    emit,
    fit_table,
    gamma_counts,
    gamma_counts_table,
    gamma_distribution,
    gamma_distribution_table,
)
from .synth import InfeasibleSpecError, default_spec, generate_corpus, spec_from_json
from .territory import assign_corpus

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2

SCHEME_CHOICES = ("sc", "da", "both")
CONTEXT_CHOICES = ("national", "continental", "intercontinental", "all")

CORPUS_FILES = ("publications.jsonl", "citations.csv", "gazetteer.csv", "scmap.csv")


class UsageError(Exception):
    """Configuration or I/O problem; maps to exit code 2."""


class DomainError(Exception):
    """Analysis-level failure on valid inputs; maps to exit code 1."""


@dataclasses.dataclass
class RunConfig:
    """Materialized run configuration (config file merged with flags)."""

    publications: Path
    citations: Path
    gazetteer: Path
    category_map: Path
    out_dir: Path
    publications_format: str = "jsonl"
    scheme: str = "both"
    context: str = "all"
    jobs: Optional[int] = None
    dump_assignments: bool = False
    dump_profiles: bool = False
    dump_observations: bool = False
    analysis: AnalysisConfig = dataclasses.field(default_factory=AnalysisConfig)


def _load_json(path: Path) -> dict:
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError(f"{path}: expected a JSON object")
    return data


def load_run_config(path: Path, args: argparse.Namespace) -> RunConfig:
    raw = _load_json(path)
    try:
        analysis = AnalysisConfig(
            cited_window=YearWindow(*raw.get("cited_window", (2010, 2012))),
            citing_window=YearWindow(*raw.get("citing_window", (2010, 2017))),
            home_country=raw.get("home_country", "IT"),
            min_observations=raw.get("min_observations", 30),
            significance_thresholds=tuple(
                raw.get("significance_thresholds", (0.01, 0.05, 0.1))
            ),
            exclude_same_territory_dyads=raw.get("exclude_same_territory_dyads", True),
            same_territory_floor_km=raw.get("same_territory_floor_km", 1.0),
            majority_rule=MajorityRule(raw.get("majority_rule", "strict")),
        )
        base = path.parent

        def _path(key: str) -> Path:
            if key not in raw:
                raise UsageError(f"{path}: missing required key {key!r}")
            p = Path(raw[key])
            return p if p.is_absolute() else base / p

        config = RunConfig(
            publications=_path("publications"),
            citations=_path("citations"),
            gazetteer=_path("gazetteer"),
            category_map=_path("category_map"),
            out_dir=Path(raw["out_dir"]) if "out_dir" in raw else base / "out",
            publications_format=raw.get("publications_format", "jsonl"),
            scheme=raw.get("scheme", "both"),
            context=raw.get("context", "all"),
            jobs=raw.get("jobs"),
            dump_assignments=raw.get("dump_assignments", False),
            dump_profiles=raw.get("dump_profiles", False),
            dump_observations=raw.get("dump_observations", False),
            analysis=analysis,
        )
    except (TypeError, ValueError) as exc:
        raise UsageError(f"{path}: invalid configuration: {exc}") from exc

    # flags override the config file
    if getattr(args, "scheme", None):
        config.scheme = args.scheme
    if getattr(args, "context", None):
        config.context = args.context
    if getattr(args, "out", None):
        config.out_dir = Path(args.out)
    if getattr(args, "jobs", None):
        config.jobs = args.jobs
    if getattr(args, "dump_assignments", False):
        config.dump_assignments = True
    if getattr(args, "dump_profiles", False):
        config.dump_profiles = True
    if getattr(args, "dump_observations", False):
        config.dump_observations = True
    if config.scheme not in SCHEME_CHOICES:
        raise UsageError(f"invalid scheme {config.scheme!r}")
    if config.context not in CONTEXT_CHOICES:
        raise UsageError(f"invalid context {config.context!r}")
    if config.publications_format not in ("jsonl", "csv"):
        raise UsageError(f"invalid publications_format {config.publications_format!r}")
    return config


def _read_corpus(config: RunConfig):
    def _open(path: Path):
        try:
            return path.open("rb")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc}") from exc

    try:
        with _open(config.publications) as fh:
            pubs = parse_publications(fh, config.publications_format)
        with _open(config.citations) as fh:
            edges = parse_citations(fh)
        with _open(config.gazetteer) as fh:
            gazetteer = parse_gazetteer(fh)
        with _open(config.category_map) as fh:
            category_map = parse_category_map(fh)
    except ParseError as exc:
        raise UsageError(f"parse failure: {exc}") from exc
    return pubs, edges, gazetteer, category_map


def _write_outputs(out_dir: Path, outputs: Mapping[str, bytes]) -> None:
    """Write every output file, removing partial results on failure."""
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    try:
        for name in sorted(outputs):
            target = out_dir / name
            target.write_bytes(outputs[name])
            written.append(target)
    except OSError:
        for target in written:
            target.unlink(missing_ok=True)
        raise


def cmd_validate(config: RunConfig) -> int:
    pubs, edges, gazetteer, _ = _read_corpus(config)
    violations = validate_corpus(pubs, edges, gazetteer)
    for violation in violations:
        print(violation)
    if violations:
        logger.error("corpus has %d violations", len(violations))
        return EXIT_DOMAIN
    logger.info("corpus is clean: %d publications, %d edges", len(pubs), len(edges))
    return EXIT_OK


def _selected_schemes(config: RunConfig) -> list[SchemeKind]:
    if config.scheme == "both":
        return [SchemeKind.SC, SchemeKind.DA]
    return [SchemeKind(config.scheme)]


def _selected_contexts(config: RunConfig) -> list[Context]:
    if config.context == "all":
        return [Context.NATIONAL, Context.CONTINENTAL, Context.INTERCONTINENTAL]
    return [Context(config.context)]


def _fit_categories(
    observations_by_category: Mapping[str, list],
    analysis: AnalysisConfig,
    jobs: int,
) -> dict[str, GravityFit]:
    """Fit every category with enough observations, in parallel."""
    eligible = {
        category: rows
        for category, rows in observations_by_category.items()
        if len(rows) > analysis.min_observations and len(rows) >= MIN_OBSERVATIONS_FOR_FIT
    }

    def _fit(category: str) -> tuple[str, GravityFit]:
        rows = log_transform(eligible[category])
        return category, fit_ols(rows, thresholds=analysis.significance_thresholds)

    if jobs <= 1 or len(eligible) <= 1:
        results = dict(_fit(category) for category in sorted(eligible))
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = dict(pool.map(_fit, sorted(eligible)))
    return results


def _summary_line(context: Context, kind: SchemeKind, category: str, fit: GravityFit) -> str:
    return (
        f"{context.value} {kind.value} {category}: n={fit.n} "
        f"m_i={fit.alpha:.3f}{fit.marks[1]} m_j={fit.beta:.3f}{fit.marks[2]} "
        f"d={fit.gamma:.3f}{fit.gamma_mark} const={fit.ln_k:.3f}{fit.marks[0]} "
        f"r2={fit.r2:.3f}"
    )


def cmd_run(config: RunConfig) -> int:
    pubs, edges, gazetteer, category_map = _read_corpus(config)
    violations = validate_corpus(pubs, edges, gazetteer)
    if violations:
        for violation in violations:
            print(violation)
        logger.error("refusing to run on a corpus with %d violations", len(violations))
        return EXIT_DOMAIN

    jobs = config.jobs or os.cpu_count() or 1
    analysis = config.analysis
    assignments = assign_corpus(pubs, analysis.majority_rule)
    cited_to = cited_universe(analysis, pubs, assignments)

    outputs: dict[str, bytes] = {}
    summary_lines: list[str] = []
    sc_fits: dict[tuple[Context, str], GravityFit] = {}

    try:
        for kind in _selected_schemes(config):
            scheme = (
                CategoryScheme.fine() if kind is SchemeKind.SC else CategoryScheme.coarse(category_map)
            )
            profiles = build_profiles(pubs, edges, cited_to, scheme)
            if config.dump_profiles:
                rows = tuple(
                    (cited_category, citing_category, repr(weight))
                    for cited_category, profile in sorted(profiles.items())
                    for citing_category, weight in profile.items()
                )
                outputs[f"profiles_{kind.value}.csv"] = emit(
                    [
                        Table(
                            name=f"profiles_{kind.value}",
                            columns=("cited_category", "citing_category", "weight"),
                            rows=rows,
                        )
                    ],
                    "csv",
                )
            for context in _selected_contexts(config):
                ctx_config = dataclasses.replace(analysis, context=context)
                observations = build_observations(
                    ctx_config, scheme, pubs, edges, assignments, gazetteer, profiles
                )
                if not observations:
                    raise DomainError(
                        f"no observations for context {context.value!r} at scheme {kind.value!r}"
                    )
                by_category: dict[str, list] = {}
                for obs in observations:
                    by_category.setdefault(obs.category, []).append(obs)

                summaries = {
                    category: descriptive_summary(rows)
                    for category, rows in sorted(by_category.items())
                }
                stem = f"{context.value}_{kind.value}"
                descriptives = descriptives_table(summaries, name=f"descriptives_{stem}")
                outputs[f"descriptives_{stem}.csv"] = emit([descriptives], "csv")
                outputs[f"descriptives_{stem}.md"] = emit([descriptives], "markdown")

                fits = _fit_categories(by_category, analysis, jobs)
                if kind is SchemeKind.SC:
                    for category, fit in fits.items():
                        sc_fits[(context, category)] = fit
                table = fit_table(fits, kind, name=f"fits_{stem}")
                outputs[f"fits_{stem}.csv"] = emit([table], "csv")
                outputs[f"fits_{stem}.md"] = emit([table], "markdown")
                for category in sorted(fits):
                    summary_lines.append(_summary_line(context, kind, category, fits[category]))

                if config.dump_observations:
                    rows = tuple(
                        (
                            obs.context.value,
                            obs.category,
                            obs.i.token(),
                            obs.j.token(),
                            str(int(obs.cites)),
                            repr(obs.m_i),
                            repr(obs.m_j),
                            repr(obs.d_km),
                        )
                        for obs in observations
                    )
                    outputs[f"observations_{stem}.csv"] = emit(
                        [
                            Table(
                                name=f"observations_{stem}",
                                columns=(
                                    "context",
                                    "category",
                                    "i",
                                    "j",
                                    "cites",
                                    "m_i",
                                    "m_j",
                                    "d_km",
                                ),
                                rows=rows,
                            )
                        ],
                        "csv",
                    )

        if SchemeKind.SC in _selected_schemes(config):
            distribution = gamma_distribution(
                sc_fits,
                category_map,
                analysis.min_observations,
                analysis.significance_thresholds,
            )
            counts = gamma_counts(sc_fits, category_map, analysis.significance_thresholds)
            for name, table in (
                ("gamma_distribution", gamma_distribution_table(distribution)),
                ("gamma_counts", gamma_counts_table(counts)),
            ):
                outputs[f"{name}.csv"] = emit([table], "csv")
                outputs[f"{name}.md"] = emit([table], "markdown")

        if config.dump_assignments:
            rows = []
            index = assignments
            for side, table in (
                ("cited", index.cited_municipality),
                ("cited", index.cited_country),
                ("citing", index.citing_municipality),
                ("citing", index.citing_country),
            ):
                for pub_id in sorted(table):
                    a = table[pub_id]
                    rows.append(
                        (
                            pub_id,
                            side,
                            a.level.value,
                            a.territory.token() if a.territory else "",
                            a.reason.value,
                        )
                    )
            outputs["assignments.csv"] = emit(
                [
                    Table(
                        name="assignments",
                        columns=("pub_id", "side", "level", "territory", "reason"),
                        rows=tuple(rows),
                    )
                ],
                "csv",
            )
    except (DomainError, ValueError, UnknownTerritoryError) as exc:
        logger.error("run failed: %s", exc)
        return EXIT_DOMAIN

    _write_outputs(config.out_dir, outputs)
    for line in summary_lines:
        print(line)
    logger.info("wrote %d files to %s", len(outputs), config.out_dir)
    return EXIT_OK


def cmd_simulate(spec_path: Optional[Path], out_dir: Path, seed: Optional[int]) -> int:
    if spec_path is None:
        spec = default_spec(seed if seed is not None else 0)
    else:
        try:
            spec = spec_from_json(spec_path.read_bytes())
        except OSError as exc:
            raise UsageError(f"cannot read {spec_path}: {exc}") from exc
        except (KeyError, TypeError, ValueError, json.JSONDecodeError) as exc:
            raise UsageError(f"{spec_path}: invalid spec: {exc}") from exc
        if seed is not None:
            spec = dataclasses.replace(spec, seed=seed)
    try:
        pubs, edges, gazetteer, category_map, manifest = generate_corpus(spec)
    except (InfeasibleSpecError, ValueError) as exc:
        raise UsageError(f"invalid spec: {exc}") from exc

    outputs = {
        "publications.jsonl": write_publications(pubs, "jsonl"),
        "citations.csv": write_citations(edges),
        "gazetteer.csv": write_gazetteer(gazetteer),
        "scmap.csv": write_category_map(category_map),
        "manifest.json": manifest.to_json(),
    }
    _write_outputs(out_dir, outputs)
    print(
        f"simulated corpus: {manifest.n_publications} publications, "
        f"{manifest.n_edges} citations, seed={spec.seed}"
    )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="citeflow",
        description="Gravity-model analysis of citation flows between territories.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check corpus consistency")
    p_validate.add_argument("--config", required=True, type=Path)

    p_run = sub.add_parser("run", help="run the full analysis")
    p_run.add_argument("--config", required=True, type=Path)
    p_run.add_argument("--scheme", choices=SCHEME_CHOICES)
    p_run.add_argument("--context", choices=CONTEXT_CHOICES)
    p_run.add_argument("--out", type=Path)
    p_run.add_argument("--jobs", type=int)
    p_run.add_argument("--dump-assignments", action="store_true")
    p_run.add_argument("--dump-profiles", action="store_true")
    p_run.add_argument("--dump-observations", action="store_true")

    p_sim = sub.add_parser("simulate", help="generate a synthetic corpus")
    p_sim.add_argument("--spec", type=Path)
    p_sim.add_argument("--out", required=True, type=Path)
    p_sim.add_argument("--seed", type=int)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(name)s: %(message)s"
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "validate":
            return cmd_validate(load_run_config(args.config, args))
        if args.command == "run":
            return cmd_run(load_run_config(args.config, args))
        if args.command == "simulate":
            return cmd_simulate(args.spec, args.out, args.seed)
        parser.error(f"unknown command {args.command!r}")
    except UsageError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
