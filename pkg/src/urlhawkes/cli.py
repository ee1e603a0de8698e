"""Command-line entry point: ``urlhawkes {fit,simulate,stats,report}``.

Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .adm4 import FitConfig, fit_adm4, select_decay
from .core import HawkesParams, branching_spectral_radius
from .ingest import (
    DIMENSIONS,
    EventRecord,
    UrlCache,
    cascade_stats,
    default_cache_path,
    filter_cascades,
    ingest,
    load_taxonomy,
    pair_count_matrix,
    parse_event_log,
    write_event_log,
)
from .ingest.resolve import HttpFetcher
from .simulate import SimConfig, StabilityError, simulate_batch
from .tables import sha256_file, write_csv, write_json

log = logging.getLogger("urlhawkes")

# One representative URL per platform, used when dumping simulated cascades.
PLATFORM_URLS = (
    "https://twitter.com/i/status/{k}",
    "https://www.facebook.com/posts/{k}",
    "https://www.instagram.com/p/{k}",
    "https://plus.google.com/{k}",
    "https://www.youtube.com/watch?v={k}",
    "https://www.nytimes.com/sim/{k}",
    "https://www.rt.com/sim/{k}",
)


class CliError(RuntimeError):
    pass


def _dimension_names(U: int) -> list[str]:
    return list(DIMENSIONS) if U == len(DIMENSIONS) else [f"dim{i}" for i in range(U)]


class _Run:
    """Collects outputs and writes the manifest last."""

    def __init__(self, command: str, out: Path, config: dict, inputs: list[Path]):
        self.command = command
        self.out = out
        self.config = config
        self.inputs = inputs
        self.outputs: list[str] = []
        self.result: dict = {}
        self.start = time.perf_counter()
        out.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out / name

    def finish(self, manifest_name: str) -> Path:
        doc = {
            "command": self.command,
            "version": __version__,
            "config": self.config,
            "inputs": {str(p): sha256_file(p) for p in self.inputs},
            "outputs": self.outputs,
            "result": self.result,
            "wall_clock_seconds": round(time.perf_counter() - self.start, 6),
        }
        path = self.out / manifest_name
        write_json(path, doc)
        return path


def _write_params(path: Path, params: HawkesParams) -> None:
    write_json(path, params.to_dict())


def _load_params(path: Path) -> HawkesParams:
    try:
        with open(path, encoding="utf-8") as fh:
            return HawkesParams.from_dict(json.load(fh))
    except (OSError, ValueError) as exc:
        raise CliError(f"cannot read params {path}: {exc}") from exc


def _infectivity_rows(A: np.ndarray, names: list[str]):
    """Sources on rows, destinations on columns: cell = A[destination, source]."""
    header = [""] + [f"→ {n}" for n in names]
    rows = [[f"{src} →"] + [A[d, s] for d in range(len(names))] for s, src in enumerate(names)]
    return header, rows


def cmd_fit(args) -> int:
    out = Path(args.out)
    taxonomy = load_taxonomy(args.taxonomy)
    cache = UrlCache(args.cache if args.cache else default_cache_path())
    fetch = HttpFetcher(timeout=args.timeout, user_agent=args.user_agent) if args.online else None
    data = ingest(args.input, taxonomy, cache, fetch=fetch, offline=not args.online,
                  min_cascade_size=args.min_cascade_size)
    for w in data.warnings:
        print(f"warning: {w}", file=sys.stderr)
    sequences = data.sequences(args.group)
    if not sequences:
        raise CliError(f"no paired URLs for group {args.group!r} in {args.input}")

    config = {
        "input": str(args.input),
        "group": args.group,
        "omega": args.omega,
        "omega_grid": args.omega_grid,
        "C": args.C,
        "ratio": args.ratio,
        "max_iter": args.max_iter,
        "tol": args.tol,
        "admm_rho": args.admm_rho,
        "seed": args.seed,
        "min_cascade_size": args.min_cascade_size,
        "online": args.online,
        "taxonomy": args.taxonomy,
        "lambda_nuclear": args.C * args.ratio,
        "lambda_l1": args.C * (1 - args.ratio),
    }
    inputs = [Path(args.input)] + ([Path(args.taxonomy)] if args.taxonomy else [])
    run = _Run("fit", out, config, inputs)

    omega = args.omega
    grid_scores = None
    base = dict(C=args.C, ratio=args.ratio, max_iter=args.max_iter, tol=args.tol,
                admm_rho=args.admm_rho, init_seed=args.seed)
    if args.omega_grid:
        omega, grid_scores = select_decay(sequences, FitConfig(omega=args.omega_grid[0], **base),
                                          args.omega_grid, seed=args.seed)
    result = fit_adm4(sequences, FitConfig(omega=omega, **base))
    params = result.params
    names = list(DIMENSIONS)

    _write_params(run.path(f"params_{args.group}.json"), params)
    write_csv(run.path(f"objective_trace_{args.group}.csv"), ["iteration", "objective"],
              enumerate(result.objective_trace))
    header, rows = _infectivity_rows(params.A, names)
    write_csv(run.path(f"infectivity_{args.group}.csv"), header, rows)
    counts = pair_count_matrix(data.pairs, args.group)
    write_csv(run.path(f"pair_counts_{args.group}.csv"), [""] + [f"→ {n}" for n in names],
              [[f"{n} →"] + list(counts[i]) for i, n in enumerate(names)])

    run.result = {
        "converged": result.converged,
        "iterations_run": result.iterations_run,
        "final_objective": result.objective_trace[-1],
        "omega": omega,
        "sequences": len(sequences),
        "events": int(sum(len(s) for s in sequences)),
        "events_per_dimension": dict(zip(names, map(int, sum(s.counts() for s in sequences)))),
        "inactive_dimensions": [n for n, c in zip(names, sum(s.counts() for s in sequences)) if c == 0],
        "spectral_radius": branching_spectral_radius(params.A),
        "warnings": len(data.warnings),
    }
    if grid_scores is not None:
        run.result["omega_grid_heldout_loglik"] = {repr(k): v for k, v in grid_scores.items()}
    run.finish(f"manifest_fit_{args.group}.json")
    if not result.converged:
        print(f"warning: no convergence within {args.max_iter} iterations", file=sys.stderr)
    return 0


def simulated_records(sequences, group: str) -> list[EventRecord]:
    """Event-log rows that re-ingest to exactly ``sequences``.

    Each cascade gets one original per platform at time 0, one retweet per
    event pointing at the original of the event's platform, and a final
    original at the horizon so that the cascade duration equals ``T``.
    """
    records = []
    for k, seq in enumerate(sequences):
        cid = f"sim{k}"
        for u in range(seq.U):
            records.append(EventRecord(f"{cid}-o{u}", cid, f"{cid}-root{u}", 0, PLATFORM_URLS[u].format(k=f"{k}o{u}"), group))
        for i, (t, u) in enumerate(zip(seq.times.tolist(), seq.dims.tolist())):
            records.append(EventRecord(f"{cid}-e{i}", cid, f"{cid}-u{i}", t,
                                       PLATFORM_URLS[0].format(k=f"{k}e{i}"), group, retweet_of=f"{cid}-o{u}"))
        records.append(EventRecord(f"{cid}-end", cid, f"{cid}-end", seq.T, PLATFORM_URLS[0].format(k=f"{k}end"), group))
    return records


def cmd_simulate(args) -> int:
    params = _load_params(Path(args.params))
    if params.U > len(DIMENSIONS):
        raise CliError(f"event-log format supports at most {len(DIMENSIONS)} dimensions, params have {params.U}")
    radius = branching_spectral_radius(params.A)
    if radius >= 1:
        raise CliError(f"unstable parameters: spectral radius {radius:.6g} >= 1")
    config = {"params": str(args.params), "horizon": args.horizon, "count": args.count, "seed": args.seed,
              "group": args.group, "max_events": args.max_events}
    run = _Run("simulate", Path(args.out), config, [Path(args.params)])
    try:
        sequences = simulate_batch(params, SimConfig(T=args.horizon, seed=args.seed, max_events=args.max_events),
                                   args.count)
    except StabilityError as exc:
        raise CliError(str(exc)) from exc
    write_event_log(simulated_records(sequences, args.group), run.path("events.csv"))
    run.result = {"spectral_radius": radius, "cascades": len(sequences),
                  "events": int(sum(len(s) for s in sequences))}
    run.finish("manifest_simulate.json")
    return 0


def cmd_stats(args) -> int:
    records = filter_cascades(parse_event_log(args.input), args.min_cascade_size)
    stats = cascade_stats(records)
    config = {"input": str(args.input), "min_cascade_size": args.min_cascade_size, "figures": not args.no_figures}
    run = _Run("stats", Path(args.out), config, [Path(args.input)])
    hist, cdf, daily = stats.size_histogram(), stats.duration_cdf(), stats.daily_table()
    write_csv(run.path("cascade_sizes.csv"), ["size", "count"], hist)
    write_csv(run.path("duration_cdf.csv"), ["duration_seconds", "cum_fraction"], cdf)
    write_csv(run.path("suspended_users.csv"), ["cascade_id", "size", "suspended_users", "normal_users"],
              [(c.cascade_id, c.size, c.suspended_users, c.normal_users) for c in stats.cascades])
    write_csv(run.path("daily_pairs.csv"), ["date", "psm", "normal"], daily)
    if not args.no_figures:
        from . import plotting

        plotting.plot_size_distribution(hist, run.path("cascade_sizes.png"))
        plotting.plot_duration_cdf(cdf, run.path("duration_cdf.png"))
        plotting.plot_suspended([c.cascade_id for c in stats.cascades],
                                [c.suspended_users for c in stats.cascades], run.path("suspended_users.png"))
        plotting.plot_daily_pairs(daily, run.path("daily_pairs.png"))
    run.result = {"records": len(records), "cascades": len(stats.cascades)}
    run.finish("manifest_stats.json")
    return 0


def _group_name(path: Path, taken: set[str]) -> str:
    name = path.stem
    if name.startswith("params_"):
        name = name[len("params_"):]
    base, i = name, 2
    while name in taken:
        name = f"{base}_{i}"
        i += 1
    taken.add(name)
    return name


def cmd_report(args) -> int:
    paths = [Path(p) for p in args.params]
    loaded = [_load_params(p) for p in paths]
    dims = {p.U for p in loaded}
    if len(dims) != 1:
        raise CliError(f"parameter files disagree on dimension count: {sorted(dims)}")
    U = dims.pop()
    names = _dimension_names(U)
    taken: set[str] = set()
    groups = [(_group_name(p, taken), params) for p, params in zip(paths, loaded)]
    config = {"params": [str(p) for p in paths], "figures": not args.no_figures}
    run = _Run("report", Path(args.out), config, paths)

    for name, params in groups:
        rows = [(names[s], names[d], params.A[d, s]) for s in range(U) for d in range(U)]
        write_csv(run.path(f"heatmap_{name}.csv"), ["source", "destination", "weight"], rows)
        if not args.no_figures:
            from . import plotting

            plotting.plot_infectivity(params.A, names, run.path(f"heatmap_{name}.png"), title=name)
    if len(groups) > 1:
        header = ["destination"]
        for name, _ in groups:
            header += [f"{name}_top_source", f"{name}_top_weight"]
        rows = []
        for d in range(U):
            row = [names[d]]
            for _, params in groups:
                # first maximum wins ties, in dimension order
                s = int(np.argmax(params.A[d]))
                row += [names[s], params.A[d, s]]
            rows.append(row)
        write_csv(run.path("comparison.csv"), header, rows)
        asym = []
        for name, params in groups:
            for s in range(U):
                for d in range(U):
                    if s != d and params.A[d, s] > params.A[s, d]:
                        asym.append((name, names[s], names[d], params.A[d, s], params.A[s, d]))
        write_csv(run.path("asymmetry.csv"), ["group", "source", "destination", "weight", "reverse_weight"], asym)
    run.result = {
        "groups": [name for name, _ in groups],
        "inactive_dimensions": {name: [names[u] for u in range(U) if p.mu[u] == 0 and not p.A[:, u].any()]
                                for name, p in groups},
    }
    run.finish("manifest_report.json")
    return 0


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _nonneg_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value >= 0):
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return value


def _unit_float(text: str) -> float:
    value = _nonneg_float(text)
    if value > 1:
        raise argparse.ArgumentTypeError(f"must lie in [0, 1]: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _float_list(text: str) -> list[float]:
    return [_positive_float(t) for t in text.split(",") if t.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urlhawkes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fit", help="fit an ADM4 Hawkes model to one user group")
    p.add_argument("--input", required=True, help="event-log CSV")
    p.add_argument("--group", required=True, choices=["psm", "normal"])
    decay = p.add_mutually_exclusive_group(required=True)
    decay.add_argument("--omega", type=_positive_float, help="kernel decay rate (1/s)")
    decay.add_argument("--omega-grid", type=_float_list, help="comma-separated decays; pick by held-out likelihood")
    p.add_argument("--C", type=_nonneg_float, default=1000.0, help="penalization level (default 1000)")
    p.add_argument("--ratio", type=_unit_float, default=0.5, help="nuclear share of the penalty (default 0.5)")
    p.add_argument("--max-iter", type=_positive_int, default=50)
    p.add_argument("--tol", type=_positive_float, default=1e-5)
    p.add_argument("--admm-rho", type=_positive_float, default=0.1)
    p.add_argument("--seed", type=_seed, default=0, help="initialization seed")
    p.add_argument("--min-cascade-size", type=_positive_int, default=1)
    p.add_argument("--taxonomy", help="domain<TAB>dimension file (default: bundled)")
    p.add_argument("--cache", help="URL cache file (default: $URLHAWKES_CACHE or ~/.cache/urlhawkes/urls.tsv)")
    p.add_argument("--online", action="store_true", help="resolve cache misses over HTTP")
    p.add_argument("--timeout", type=_positive_float, default=10.0)
    p.add_argument("--user-agent", default=f"urlhawkes/{__version__}")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="simulate cascades from a params JSON")
    p.add_argument("--params", required=True)
    p.add_argument("--horizon", type=_positive_float, required=True)
    p.add_argument("--count", type=_positive_int, default=1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--group", choices=["psm", "normal"], default="psm", help="label for simulated users")
    p.add_argument("--max-events", type=_positive_int, default=10_000_000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("stats", help="cascade statistics tables and figures")
    p.add_argument("--input", required=True)
    p.add_argument("--min-cascade-size", type=_positive_int, default=1)
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("report", help="heatmap tables and group comparison from fitted params")
    p.add_argument("--params", action="append", required=True, help="params JSON (repeatable)")
    p.add_argument("--no-figures", action="store_true")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (CliError, ValueError, OSError, RuntimeError, FloatingPointError) as exc:
        print(f"urlhawkes {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
