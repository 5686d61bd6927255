"""Pipeline command line: synth | match | stats | fit | similarity | all.

Stages communicate through files only, so each one can be run (and debugged)
in isolation; `all` chains them on the intermediate artifacts it writes.
Artifacts contain no timestamps or host identifiers — re-running with the
same inputs and seed reproduces them byte for byte.

Exit codes: 0 success, 1 processing error, 2 usage / missing input.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys

from .errors import FitError, PipelineError
from .ingest import (
    UTC_OFFSET_MAX,
    UTC_OFFSET_MIN,
    Charging,
    Tech,
    build_dataset,
    parse_cdr_events,
    parse_network_events,
    write_rejects_csv,
)
from .matching import match_backward, read_errors_csv, write_errors_csv
from .similarity import (
    DEFAULT_MIN_PER_BIN,
    build_matrix,
    build_profiles,
    extract_groups,
    order_by_row_sum,
    render_heatmap_svg,
    reorder,
    subsample_cells,
    write_matrix_csv,
)
from .stats import (
    MIN_FIT_SAMPLE,
    compute_bin_stats,
    exgaussian_loglik,
    fit_exgaussian,
    group_samples,
    write_bin_stats_csv,
)
from .synth import default_scenario, generate_trace

ERRORS_CSV = "errors.csv"
MATCH_REPORT_JSON = "match_report.json"
REJECTS_NETWORK_CSV = "rejects_network.csv"
REJECTS_CDR_CSV = "rejects_cdr.csv"
BIN_STATS_CSV = "bin_stats.csv"
FITTED_PARAMS_JSON = "fitted_params.json"
SIMILARITY_CSV = "similarity.csv"
HEATMAP_SVG = "heatmap.svg"
GROUPS_JSON = "groups.json"


@dataclasses.dataclass
class RunConfig:
    command: str
    out: str
    utc_offset_seconds: int = 0
    network: str | None = None
    cdr: str | None = None
    errors: str | None = None
    fmt: str = "csv"
    min_per_bin: int = DEFAULT_MIN_PER_BIN
    charging: str | None = None
    tech: str | None = None
    pooled: bool = False
    seed: int = 42
    heatmap: bool = False
    sample_cells: int | None = None
    groups_out: bool = False
    subscribers: int | None = None
    days: int | None = None
    rate: float | None = None


def _utc_offset(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}")
    if not UTC_OFFSET_MIN <= v <= UTC_OFFSET_MAX:
        raise argparse.ArgumentTypeError(
            f"utc offset {v} outside [{UTC_OFFSET_MIN}, {UTC_OFFSET_MAX}]"
        )
    return v


def _add_io_opts(p, *, network=False, errors=False):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument(
        "--utc-offset",
        type=_utc_offset,
        default=0,
        dest="utc_offset",
        help="seconds to add to timestamps before time-of-day binning (default 0)",
    )
    if network:
        p.add_argument("--network", required=True, help="network events file")
        p.add_argument("--cdr", required=True, help="CDR events file")
        p.add_argument("--format", choices=("csv", "ndjson"), default="csv", help="input format")
    if errors:
        p.add_argument("--errors", required=True, help="errors CSV from the match stage")


def _add_similarity_opts(p):
    p.add_argument(
        "--min-per-bin",
        type=int,
        default=DEFAULT_MIN_PER_BIN,
        help=f"samples required on both sides of a bin comparison (default {DEFAULT_MIN_PER_BIN})",
    )
    p.add_argument("--charging", choices=[c.value for c in Charging], help="stratum charging type")
    p.add_argument("--tech", choices=[t.value for t in Tech], help="stratum technology")
    p.add_argument("--pooled", action="store_true", help="pool all strata instead of filtering")
    p.add_argument("--sample-cells", type=int, help="seeded random subsample of cells")
    p.add_argument("--heatmap", action="store_true", help="also render heatmap.svg")
    p.add_argument("--groups", action="store_true", help="also write experimental groups.json")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cdrlag",
        description="Measure CDR timestamp errors against network events and "
        "compare per-cell error behavior.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic trace with planted delay laws")
    _add_io_opts(p)
    p.add_argument("--seed", type=int, default=42, help="generator seed (default 42)")
    p.add_argument("--subscribers", type=int, help="override subscriber count")
    p.add_argument("--days", type=int, help="override day count")
    p.add_argument("--rate", type=float, help="override events per subscriber-day")

    p = sub.add_parser("match", help="match CDRs backward onto network events")
    _add_io_opts(p, network=True)

    p = sub.add_parser("stats", help="per-(charging, tech, bin) error statistics")
    _add_io_opts(p, errors=True)

    p = sub.add_parser("fit", help="exGaussian fits per (charging, tech, bin)")
    _add_io_opts(p, errors=True)

    p = sub.add_parser("similarity", help="cell-to-cell correlation-index matrix")
    _add_io_opts(p, errors=True)
    _add_similarity_opts(p)
    p.add_argument("--seed", type=int, default=42, help="seed for --sample-cells")

    p = sub.add_parser("all", help="match, stats, fit and similarity in sequence")
    _add_io_opts(p, network=True)
    _add_similarity_opts(p)
    p.add_argument("--seed", type=int, default=42, help="seed for --sample-cells")

    return parser


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        out=args.out,
        utc_offset_seconds=getattr(args, "utc_offset", 0),
        network=getattr(args, "network", None),
        cdr=getattr(args, "cdr", None),
        errors=getattr(args, "errors", None),
        fmt=getattr(args, "format", "csv"),
        min_per_bin=getattr(args, "min_per_bin", DEFAULT_MIN_PER_BIN),
        charging=getattr(args, "charging", None),
        tech=getattr(args, "tech", None),
        pooled=getattr(args, "pooled", False),
        seed=getattr(args, "seed", 42),
        heatmap=getattr(args, "heatmap", False),
        sample_cells=getattr(args, "sample_cells", None),
        groups_out=getattr(args, "groups", False),
        subscribers=getattr(args, "subscribers", None),
        days=getattr(args, "days", None),
        rate=getattr(args, "rate", None),
    )


def _stage_synth(cfg: RunConfig) -> None:
    scenario = default_scenario(cfg.seed)
    overrides = {}
    if cfg.subscribers is not None:
        overrides["subscribers"] = cfg.subscribers
    if cfg.days is not None:
        overrides["days"] = cfg.days
    if cfg.rate is not None:
        overrides["events_per_subscriber_day"] = cfg.rate
    if cfg.utc_offset_seconds:
        overrides["utc_offset_seconds"] = cfg.utc_offset_seconds
    if overrides:
        scenario = dataclasses.replace(scenario, **overrides)
    art = generate_trace(scenario, cfg.out)
    print(f"synth: {art.network_count} network events, {art.cdr_count} CDRs -> {cfg.out}")


def _stage_match(cfg: RunConfig) -> str:
    network, net_rejects = parse_network_events(cfg.network, cfg.fmt)
    cdrs, cdr_rejects = parse_cdr_events(cfg.cdr, cfg.fmt)
    dataset = build_dataset(network, cdrs, cfg.utc_offset_seconds)
    records, report = match_backward(dataset)

    errors_path = os.path.join(cfg.out, ERRORS_CSV)
    write_errors_csv(records, errors_path)
    write_rejects_csv(net_rejects, os.path.join(cfg.out, REJECTS_NETWORK_CSV))
    write_rejects_csv(cdr_rejects, os.path.join(cfg.out, REJECTS_CDR_CSV))
    payload = {
        "matched_count": report.matched_count,
        "unmatched_count": report.unmatched_count,
        "per_cell_counts": report.per_cell_counts,
        "network_events": len(network),
        "cdr_events": len(cdrs),
        "network_rejects": len(net_rejects),
        "cdr_rejects": len(cdr_rejects),
    }
    with open(os.path.join(cfg.out, MATCH_REPORT_JSON), "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(
        f"match: {report.matched_count} matched, {report.unmatched_count} unmatched "
        f"-> {errors_path}"
    )
    return errors_path


def _require_records(records) -> None:
    if not records:
        raise PipelineError("no error records")


def _stage_stats(cfg: RunConfig, records) -> None:
    _require_records(records)
    stats = compute_bin_stats(records, cfg.utc_offset_seconds)
    path = os.path.join(cfg.out, BIN_STATS_CSV)
    write_bin_stats_csv(stats, path)
    print(f"stats: {len(stats)} groups -> {path}")


def _stage_fit(cfg: RunConfig, records) -> None:
    _require_records(records)
    fits = []
    for key, sample in group_samples(records, cfg.utc_offset_seconds).items():
        if sample.size < MIN_FIT_SAMPLE:
            continue
        try:
            params = fit_exgaussian(sample)
        except FitError as exc:
            print(
                f"fit: skipping {key.charging.value}/{key.tech.value}/bin{key.bin}: {exc}",
                file=sys.stderr,
            )
            continue
        fits.append(
            {
                "charging": key.charging.value,
                "tech": key.tech.value,
                "bin": key.bin,
                "mu": params.mu,
                "sigma": params.sigma,
                "tau": params.tau,
                "loglik": exgaussian_loglik(sample, params),
                "n": int(sample.size),
            }
        )
    path = os.path.join(cfg.out, FITTED_PARAMS_JSON)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(fits, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"fit: {len(fits)} groups -> {path}")


def _stage_similarity(cfg: RunConfig, records) -> None:
    _require_records(records)
    stratum = None
    if not cfg.pooled:
        stratum = (Charging(cfg.charging), Tech(cfg.tech))
    profiles = build_profiles(records, cfg.utc_offset_seconds, stratum)
    if cfg.sample_cells is not None:
        profiles = subsample_cells(profiles, cfg.sample_cells, cfg.seed)
    if len(profiles) < 2:
        raise PipelineError(f"need at least 2 cell profiles, got {len(profiles)}")
    matrix = build_matrix(profiles, cfg.min_per_bin)
    ordered = reorder(matrix, order_by_row_sum(matrix))
    path = os.path.join(cfg.out, SIMILARITY_CSV)
    write_matrix_csv(ordered, path)
    if cfg.heatmap:
        render_heatmap_svg(ordered, os.path.join(cfg.out, HEATMAP_SVG))
    if cfg.groups_out:
        first, second = extract_groups(matrix)
        with open(os.path.join(cfg.out, GROUPS_JSON), "w", encoding="utf-8") as fh:
            json.dump({"group_1": list(first), "group_2": list(second)}, fh, indent=2)
            fh.write("\n")
    print(f"similarity: {len(profiles)} cells -> {path}")


def run(cfg: RunConfig) -> int:
    """Execute one subcommand; returns the process exit code."""
    inputs = []
    if cfg.command in ("match", "all"):
        inputs += [cfg.network, cfg.cdr]
    if cfg.command in ("stats", "fit", "similarity"):
        inputs.append(cfg.errors)
    for p in inputs:
        if not os.path.isfile(p):
            print(f"error: input not found: {p}", file=sys.stderr)
            return 2

    os.makedirs(cfg.out, exist_ok=True)
    try:
        if cfg.command == "synth":
            _stage_synth(cfg)
        elif cfg.command == "match":
            _stage_match(cfg)
        elif cfg.command == "stats":
            _stage_stats(cfg, read_errors_csv(cfg.errors))
        elif cfg.command == "fit":
            _stage_fit(cfg, read_errors_csv(cfg.errors))
        elif cfg.command == "similarity":
            _stage_similarity(cfg, read_errors_csv(cfg.errors))
        elif cfg.command == "all":
            errors_path = _stage_match(cfg)
            records = read_errors_csv(errors_path)
            _require_records(records)
            _stage_stats(cfg, records)
            _stage_fit(cfg, records)
            _stage_similarity(cfg, records)
        else:  # unreachable behind argparse
            raise PipelineError(f"unknown command {cfg.command}")
    except (PipelineError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command in ("similarity", "all"):
        stratified = args.charging is not None and args.tech is not None
        if args.pooled == stratified:  # exactly one mode must be chosen
            parser.error("pass either --pooled or both --charging and --tech")
    return run(_config_from_args(args))


if __name__ == "__main__":
    sys.exit(main())
