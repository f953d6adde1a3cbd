"""Command-line front end tying the modules together.

Exit codes: 0 success, 2 domain error, 3 capacity error, 4 I/O error.
Errors print a single machine-parseable line `error <code>: <message>`
on stderr. Reports are deterministic for a given configuration apart
from the wall-time provenance field.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .averages import average
from .census import (
    GapCensus,
    census,
    li,
    load_census_cache,
    pair_count,
    quad_count,
    save_census_cache,
    triple_count,
)
from .errors import ChampionLabError, DomainError, ReportIOError
from .model import (
    model_scan,
    predicted_gap_count,
    scientific,
    transition_interval,
)
from .report import VERSION, Report, emit, jsonable, render_figure
from .singular import OffsetSet, sigma, sigma_pair, sigma_truncated

log = logging.getLogger("championlab.cli")

CACHE_ENV = "CHAMPIONLAB_CACHE_DIR"


@dataclass
class RunConfig:
    command: str
    x: Optional[int] = None
    d: Optional[int] = None
    d1: Optional[int] = None
    d2: Optional[int] = None
    k: Optional[int] = None
    delta: float = 0.0
    y_trunc: Optional[int] = None
    tolerance: float = 1e-8
    offsets: Optional[tuple[int, ...]] = None
    log_x: Optional[float] = None
    d_max: Optional[int] = None
    cap: Optional[int] = None
    format: str = "csv"
    cache_path: Optional[Path] = None
    threads: int = 1
    out: Optional[Path] = None
    fig: Optional[Path] = None


def _resolve_cache(config: RunConfig) -> Optional[Path]:
    if config.cache_path is not None:
        return config.cache_path
    env = os.environ.get(CACHE_ENV)
    if env and config.x is not None:
        return Path(env) / f"census_{config.x}.csv"
    return None


def _census_with_cache(config: RunConfig) -> tuple[GapCensus, str]:
    path = _resolve_cache(config)
    if path is None:
        return census(config.x, config.threads), "off"
    if path.exists():
        cached = load_census_cache(path, config.x)
        if cached is not None:
            return cached, "hit"
    cns = census(config.x, config.threads)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        save_census_cache(cns, path)
    except OSError as exc:
        log.warning("cannot write census cache %s: %s", path, exc)
    return cns, "miss"


def _require(config: RunConfig, *fields: str) -> None:
    for name in fields:
        if getattr(config, name) is None:
            raise DomainError(f"command {config.command!r} requires --{name.replace('_', '-')}")


def _run_census(config: RunConfig) -> tuple[dict, str]:
    _require(config, "x")
    cns, cache_state = _census_with_cache(config)
    result = {
        "x": cns.x,
        "total_primes": cns.total_primes,
        "n_star": cns.n_star,
        "champions": list(cns.champions),
        "counts": {str(d): c for d, c in cns.counts.items()},
    }
    return result, cache_state


def _run_pairs(config: RunConfig) -> dict:
    _require(config, "x", "d")
    tc = pair_count(config.x, config.d, config.threads)
    return {"x": tc.x, "d": config.d, "offsets": list(tc.offsets.offsets), "count": tc.count}


def _run_triples(config: RunConfig) -> dict:
    _require(config, "x", "d1", "d")
    tc = triple_count(config.x, config.d1, config.d, config.threads)
    return {
        "x": tc.x, "d1": config.d1, "d": config.d,
        "offsets": list(tc.offsets.offsets), "count": tc.count,
    }


def _run_quad(config: RunConfig) -> dict:
    _require(config, "x", "d1", "d2", "d")
    tc = quad_count(config.x, config.d1, config.d2, config.d, config.threads)
    return {
        "x": tc.x, "d1": config.d1, "d2": config.d2, "d": config.d,
        "offsets": list(tc.offsets.offsets), "count": tc.count,
    }


def _run_sseries(config: RunConfig) -> dict:
    if config.offsets is None:
        _require(config, "d")
        dset = OffsetSet.of([0, config.d])
    else:
        dset = OffsetSet.of(config.offsets)
    if config.y_trunc is not None:
        sv = sigma_truncated(dset, config.y_trunc)
        kind = "truncated"
    elif config.offsets is None:
        sv = sigma_pair(config.d)
        kind = "pair"
    else:
        sv = sigma(dset, config.tolerance)
        kind = "general"
    offsets = list(dset.offsets)
    reason = None
    if sv.is_zero:
        reason = "odd d" if kind == "pair" else f"residues mod {sv.zero_witness} fully covered"
    return {
        "kind": kind,
        "offsets": offsets,
        "value": sv.value,
        "truncation_y": sv.truncation_y,
        "tail_bound": sv.tail_bound,
        "zero_witness": sv.zero_witness,
        "reason": reason,
    }


def _run_average(config: RunConfig) -> dict:
    _require(config, "k", "d")
    cap = config.cap if config.cap is not None else config.d
    rep = average(config.k, config.d, cap, config.tolerance)
    return {
        "k": rep.k, "d": rep.d, "cap": rep.cap, "sum": rep.sum,
        "main_term": rep.main_term, "ratio": rep.ratio, "remainder": rep.remainder,
    }


def _run_model(config: RunConfig) -> dict:
    _require(config, "log_x")
    scan = model_scan(config.log_x, config.d_max)
    return {
        "log_x": scan.log_x,
        "argmax_d": scan.argmax_d,
        "ties": list(scan.ties),
        "window": list(scan.window),
        "dense": scan.dense,
        "values": {str(d): v for d, v in sorted(scan.values.items())},
    }


def _run_intervals(config: RunConfig) -> dict:
    ranks = [config.k] if config.k is not None else list(range(3, 8))
    rows = []
    for rank in ranks:
        ti = transition_interval(rank, config.delta)
        rows.append({
            "k": ti.rank,
            "primorial": ti.primorial,
            "lo_log10": ti.interval.lo_log10,
            "hi_log10": ti.interval.hi_log10,
            "lo": scientific(ti.interval.lo_log10),
            "hi": scientific(ti.interval.hi_log10),
        })
    return {"delta": config.delta, "rows": rows}


def _run_compare(config: RunConfig) -> tuple[dict, str]:
    _require(config, "x")
    cns, cache_state = _census_with_cache(config)
    log_x = math.log(config.x)
    cap = config.cap if config.cap is not None else math.floor(log_x * log_x)
    li2 = li(config.x, 2)
    rows = []
    for d in range(2, cap + 1, 2):
        observed = cns.counts.get(d, 0)
        predicted = predicted_gap_count(log_x, d)
        sv = sigma_pair(d).value
        li_pred = sv * li2 * (1.0 - d / log_x)
        rows.append({
            "d": d,
            "observed": observed,
            "predicted": predicted,
            "ratio": observed / predicted if predicted > 0 else None,
            "li_ratio": observed / li_pred if li_pred > 0 else None,
        })
    result = {"x": config.x, "cap": cap, "li2": li2, "rows": rows}
    return result, cache_state


def run(config: RunConfig) -> Report:
    """Dispatch a validated configuration and wrap the result in a Report."""
    t0 = time.perf_counter()
    cache_state = "off"
    if config.command == "census":
        result, cache_state = _run_census(config)
    elif config.command == "champion":
        full, cache_state = _run_census(config)
        result = {k: full[k] for k in ("x", "total_primes", "n_star", "champions")}
    elif config.command == "pairs":
        result = _run_pairs(config)
    elif config.command == "triples":
        result = _run_triples(config)
    elif config.command == "tuple":
        result = _run_quad(config)
    elif config.command == "sseries":
        result = _run_sseries(config)
    elif config.command == "average":
        result = _run_average(config)
    elif config.command == "model":
        result = _run_model(config)
    elif config.command == "intervals":
        result = _run_intervals(config)
    elif config.command == "compare":
        result, cache_state = _run_compare(config)
    else:
        raise DomainError(f"unknown command {config.command!r}")

    fields = {
        "census": ("x",),
        "champion": ("x",),
        "pairs": ("x", "d"),
        "triples": ("x", "d1", "d"),
        "tuple": ("x", "d1", "d2", "d"),
        "sseries": ("d", "offsets", "y_trunc", "tolerance"),
        "average": ("k", "d", "cap", "tolerance"),
        "model": ("log_x", "d_max"),
        "intervals": ("k", "delta"),
        "compare": ("x", "cap"),
    }[config.command]
    inputs = {
        name: getattr(config, name)
        for name in fields
        if getattr(config, name) is not None
    }
    # thread count is an execution detail: reports must come out
    # byte-identical for any pool size, so it is not echoed
    provenance = {
        "tool": "championlab",
        "version": VERSION,
        "cache": cache_state,
        "wall_time_s": round(time.perf_counter() - t0, 6),
    }
    return Report(
        command=config.command,
        inputs=jsonable(inputs),
        result=jsonable(result),
        provenance=jsonable(provenance),
    )


def _parse_offsets(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.replace(";", ",").split(","))
    except ValueError as exc:
        raise DomainError(f"cannot parse offsets {text!r}: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="championlab",
        description="Prime gap census, singular series, and champion model reports.",
    )
    parser.add_argument("--version", action="version", version=f"championlab {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("csv", "json", "plot"), default="csv")
        p.add_argument("--out", type=Path, help="write the report here instead of stdout")
        p.add_argument("--fig", type=Path, help="render a figure of the report series")
        p.add_argument("--threads", type=int, default=os.cpu_count() or 1)

    p = sub.add_parser("census", help="gap histogram N(x,d) with champions")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--cache", type=Path, dest="cache_path")
    common(p)

    p = sub.add_parser("champion", help="champion set and N*(x) only")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--cache", type=Path, dest="cache_path")
    common(p)

    p = sub.add_parser("pairs", help="pi_2(x, d)")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    common(p)

    p = sub.add_parser("triples", help="pi_3(x, d', d)")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--d1", type=int, required=True, help="the smaller offset d'")
    p.add_argument("--d", type=int, required=True)
    common(p)

    p = sub.add_parser("tuple", help="pi_4(x, d1, d2, d)")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--d1", type=int, required=True)
    p.add_argument("--d2", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    common(p)

    p = sub.add_parser("sseries", help="singular series values")
    p.add_argument("--d", type=int, help="pair gap (closed form)")
    p.add_argument("--offsets", type=str, help="comma-separated offset set")
    p.add_argument("--y-trunc", type=int, dest="y_trunc",
                   help="truncate the product at this prime bound")
    p.add_argument("--tolerance", type=float, default=1e-8)
    common(p)

    p = sub.add_parser("average", help="singular series average A_k(d, D)")
    p.add_argument("--k", type=int, required=True, choices=(3, 4))
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--cap", type=int, help="truncation D (default: d)")
    p.add_argument("--tolerance", type=float, default=1e-8)
    common(p)

    p = sub.add_parser("model", help="scan M(x, d) for its argmax")
    p.add_argument("--log-x", type=float, required=True, dest="log_x")
    p.add_argument("--d-max", type=int, dest="d_max",
                   help="window end (default: ceil((log x)^2))")
    common(p)

    p = sub.add_parser("intervals", help="champion transition intervals")
    p.add_argument("--k", type=int, help="champion rank (default: rows 3..7)")
    p.add_argument("--delta", type=float, default=0.0)
    common(p)

    p = sub.add_parser("compare", help="census vs model, side by side")
    p.add_argument("--x", type=int, required=True)
    p.add_argument("--cap", type=int, help="largest even d compared")
    p.add_argument("--cache", type=Path, dest="cache_path")
    common(p)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig(command=args.command)
    for name in ("x", "d", "d1", "d2", "k", "delta", "y_trunc", "tolerance",
                 "log_x", "d_max", "cap", "format", "cache_path", "threads",
                 "out", "fig"):
        if hasattr(args, name) and getattr(args, name) is not None:
            setattr(config, name, getattr(args, name))
    if getattr(args, "offsets", None):
        config.offsets = _parse_offsets(args.offsets)
    if config.threads < 1:
        raise DomainError(f"--threads must be >= 1, got {config.threads}")
    return config


def main(argv: Optional[list[str]] = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run(config)
        text = emit(report, config.format)
        if config.out is not None:
            try:
                config.out.write_text(text, encoding="utf-8")
            except OSError as exc:
                raise ReportIOError(f"cannot write report {config.out}: {exc}") from exc
        else:
            sys.stdout.write(text)
        fig_path = config.fig
        if fig_path is None and config.format == "plot" and config.out is not None:
            fig_path = config.out.with_suffix(".png")
        if fig_path is not None:
            render_figure(report, fig_path)
    except ChampionLabError as exc:
        print(f"error {exc.exit_code}: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
