"""Command line interface.

Exit codes: 0 success, 1 usage error, 2 data/input error, 3 numeric
failure. Global flags (--config, --out, --jobs, --seed) are accepted by
every subcommand and override the corresponding config keys.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime as dt
import json
import os
import sys
from importlib import resources

from .artifacts import (
    _json_safe,
    read_curve_csv,
    write_curve_csv,
    write_fit_json,
    write_heatmap_data,
    write_json,
    write_matrix_csv,
    write_matrix_sidecar,
)
from .config import DEFAULT_SEED, RunConfig, load_config
from .errors import DataError, NumericError
from .estimators import cross_response, market_response_matrix, response_noise, sign_correlator
from .fitting import fit_power_law
from .grid import dense_lags, log_spaced_lags
from .pipeline import (
    compute_batch,
    ingest_report,
    load_market,
    market_average_correlator,
    market_average_response,
    normalized_rank_values,
    pair_correlator_curves,
    pair_response_curves,
    pool_average,
    rank_by_response,
    run_pipeline,
    subset_curve,
    write_rank_csv,
    write_symbol_series,
)
from .synth import CALIBRATION_RESOURCE, build_calibration, emit_market, write_calibration

USAGE_EXIT = 1
DATA_EXIT = 2
NUMERIC_EXIT = 3


class UsageError(Exception):
    """A structurally bad invocation (bad flags, missing required ones)."""


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage failures exit 1 instead of argparse's 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _global_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="path to the run config YAML")
    common.add_argument("--out", help="output directory (overrides config)")
    common.add_argument("--jobs", type=int, help="worker threads (overrides config)")
    common.add_argument("--seed", type=int, help="seed override (also rewrites a synth source)")
    return common


def _load_config(args) -> RunConfig:
    if not args.config:
        raise UsageError("this command needs --config pointing at a run config")
    cfg = load_config(args.config)
    cfg = cfg.override(out=args.out, jobs=args.jobs)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
        if cfg.source.kind == "synth":
            spec = dataclasses.replace(cfg.source.synth, seed=args.seed)
            cfg = dataclasses.replace(cfg, source=dataclasses.replace(cfg.source, synth=spec))
    return cfg


def _parse_pair(text: str) -> tuple[str, str]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise DataError(f"--pair wants 'I,J', got {text!r}")
    return parts[0], parts[1]


def _parse_date(text: str | None) -> dt.date | None:
    if text is None:
        return None
    try:
        return dt.date.fromisoformat(text)
    except ValueError:
        raise DataError(f"--date wants YYYY-MM-DD, got {text!r}") from None


def _lag_array(args, cfg: RunConfig):
    if getattr(args, "lag_grid", "dense") == "log":
        return log_spaced_lags(cfg.lags.log_points, cfg.lags.log_max)
    return dense_lags(cfg.lags.dense_max)


def cmd_run(args) -> int:
    cfg = _load_config(args)
    manifest = run_pipeline(cfg)
    print(os.path.join(cfg.out, "manifest.json"))
    print(f"stages: {' '.join(manifest['completed_stages'])}  artifacts: {len(manifest['artifacts'])}")
    return 0


def cmd_ingest(args) -> int:
    cfg = _load_config(args)
    market = load_market(cfg)
    report = ingest_report(market)
    os.makedirs(cfg.out, exist_ok=True)
    path = os.path.join(cfg.out, "ingest_report.json")
    write_json(report, path)
    print(path)
    return 0


def cmd_synth(args) -> int:
    cfg = _load_config(args)
    if cfg.source.kind != "synth":
        raise DataError("synth requires a config with source.kind 'synth'")
    spec = cfg.source.synth
    truth = emit_market(spec, cfg.out)
    print(os.path.join(cfg.out, "ground_truth.json"))
    print(f"stocks: {len(truth['files'])}  days: {spec.n_days}")
    return 0


def cmd_calibrate(args) -> int:
    seed = args.seed if args.seed is not None else DEFAULT_SEED
    table = build_calibration(n_samples=args.samples, seed=seed)
    if args.out:
        path = args.out
    else:
        path = str(resources.files("xresponse").joinpath(CALIBRATION_RESOURCE))
    write_calibration(table, path)
    print(path)
    print(f"points: {len(table['latent_correlation'])}  samples per point: {table['n_samples']}")
    return 0


def cmd_signs(args) -> int:
    cfg = _load_config(args)
    market = load_market(cfg)
    written = write_symbol_series(
        market, args.symbol, cfg.out, "signs", _parse_date(args.date)
    )
    print(f"{len(written)} file(s) under {os.path.join(cfg.out, 'signs', args.symbol)}")
    return 0


def cmd_midpoints(args) -> int:
    cfg = _load_config(args)
    market = load_market(cfg)
    written = write_symbol_series(
        market, args.symbol, cfg.out, "midpoints", _parse_date(args.date)
    )
    print(f"{len(written)} file(s) under {os.path.join(cfg.out, 'midpoints', args.symbol)}")
    return 0


def _pair_curve_command(args, op: str) -> int:
    cfg = _load_config(args)
    market = load_market(cfg)
    sym_i, sym_j = _parse_pair(args.pair)
    mids_i, signs_i, signs_j, common = market.pair_series(sym_i, sym_j)
    lags = _lag_array(args, cfg)
    if op == "respond":
        curve = cross_response(mids_i, signs_j, lags, cfg.averaging)
    elif op == "correlate":
        curve = sign_correlator(signs_i, signs_j, lags, cfg.averaging)
    else:
        curve = response_noise(mids_i, signs_j, lags, cfg.averaging)
    rel = os.path.join("curves", f"{op}_{sym_i}_{sym_j}.csv")
    path = os.path.join(cfg.out, rel)
    write_curve_csv(curve, path)
    print(path)
    print(f"common days: {common.count}")
    return 0


def cmd_respond(args) -> int:
    return _pair_curve_command(args, "respond")


def cmd_correlate(args) -> int:
    return _pair_curve_command(args, "correlate")


def cmd_noise(args) -> int:
    return _pair_curve_command(args, "noise")


def cmd_matrix(args) -> int:
    cfg = _load_config(args)
    market = load_market(cfg)
    tau = int(args.tau)
    if tau < 1:
        raise DataError("--tau must be >= 1")
    batch = compute_batch(cfg, market, [tau])
    matrix = market_response_matrix(
        batch.matrix_raw(tau), market.symbols, market.sectors, tau
    )
    base = os.path.join(cfg.out, "matrix")
    write_matrix_csv(matrix, os.path.join(base, f"matrix_tau{tau}.csv"))
    write_matrix_sidecar(matrix, os.path.join(base, f"matrix_tau{tau}.meta.json"))
    write_heatmap_data(matrix, os.path.join(base, f"heatmap_tau{tau}.txt"))
    print(os.path.join(base, f"matrix_tau{tau}.csv"))
    print(f"normalizer: {matrix.normalizer!r}  degenerate: {matrix.degenerate}")
    return 0


def cmd_average(args) -> int:
    cfg = _load_config(args)
    market = load_market(cfg)
    log_lags = log_spaced_lags(cfg.lags.log_points, cfg.lags.log_max)
    batch = compute_batch(cfg, market, log_lags)
    kind = "response" if args.kind == "response" else "sign_correlator"
    if args.mode == "market":
        pairs = pair_response_curves(batch) if kind == "response" else pair_correlator_curves(batch)
        avg = market_average_response(pairs, market.symbols) if kind == "response" \
            else market_average_correlator(pairs, market.symbols)
        rel = f"avg_{args.kind}.csv"
    else:
        if not args.stock:
            raise DataError("--stock is required for passive/active averages")
        market.check_symbol(args.stock)
        pool = _resolve_pool(args.pool, market)
        avg = pool_average(batch, args.mode, args.stock, pool, kind=kind)
        rel = f"{args.mode}_{args.kind}_{args.stock}.csv"
    path = os.path.join(cfg.out, "curves", rel)
    write_curve_csv(avg, path)
    print(path)
    return 0


def _resolve_pool(pool_spec: str, market) -> list[str]:
    if pool_spec == "market":
        return list(market.symbols)
    if pool_spec.startswith("sector:"):
        code = pool_spec.split(":", 1)[1]
        members = [s for s, sec in zip(market.symbols, market.sectors) if sec == code]
        if not members:
            raise DataError(f"no stocks with sector {code!r} in this run")
        return members
    raise DataError(f"--pool wants 'market' or 'sector:<code>', got {pool_spec!r}")


def cmd_rank(args) -> int:
    cfg = _load_config(args)
    market = load_market(cfg)
    if args.lags:
        try:
            rank_lags = tuple(int(p) for p in args.lags.split(","))
        except ValueError:
            raise DataError(f"--lags wants comma-separated integers, got {args.lags!r}") from None
    else:
        rank_lags = cfg.lags.rank
    primary = args.primary if args.primary is not None else max(rank_lags)
    if primary not in rank_lags:
        raise DataError(f"--primary {primary} is not in the lag set {list(rank_lags)}")
    k = args.k if args.k is not None else cfg.rank_top
    batch = compute_batch(cfg, market, sorted(set(rank_lags)))
    values = normalized_rank_values(batch, args.mode, rank_lags)
    ranked = rank_by_response(values, rank_lags, k=k, primary_lag=primary)
    path = os.path.join(cfg.out, "rank", f"rank_{args.mode}.csv")
    write_rank_csv(ranked, rank_lags, path)
    print(path)
    return 0


def cmd_fit(args) -> int:
    curve = read_curve_csv(args.curve)
    fit = fit_power_law(curve)
    out_dir = args.out or "."
    stem = os.path.splitext(os.path.basename(args.curve))[0]
    path = os.path.join(out_dir, f"{stem}_fit.json")
    write_fit_json(fit, path)
    print(json.dumps(_json_safe(fit.to_dict()), sort_keys=True))
    return 0


def build_parser() -> CliParser:
    parser = CliParser(prog="xresponse", description=__doc__)
    common = _global_flags()
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    sub.add_parser("run", parents=[common], help="full pipeline per config").set_defaults(func=cmd_run)
    sub.add_parser("ingest", parents=[common], help="parse tick files, write a report").set_defaults(func=cmd_ingest)
    sub.add_parser("synth", parents=[common], help="emit a synthetic market as tick files").set_defaults(func=cmd_synth)

    p = sub.add_parser("calibrate", parents=[common], help="rebuild the sign-amplitude calibration table")
    p.add_argument("--samples", type=int, default=10_000_000, help="Monte Carlo samples per grid point")
    p.set_defaults(func=cmd_calibrate)

    for name, fn in (("signs", cmd_signs), ("midpoints", cmd_midpoints)):
        p = sub.add_parser(name, parents=[common], help=f"write per-day {name} CSVs for one symbol")
        p.add_argument("--symbol", required=True)
        p.add_argument("--date", help="restrict to one day, YYYY-MM-DD")
        p.set_defaults(func=fn)

    for name, fn, what in (
        ("respond", cmd_respond, "price response"),
        ("correlate", cmd_correlate, "sign correlator"),
        ("noise", cmd_noise, "odd/even response noise"),
    ):
        p = sub.add_parser(name, parents=[common], help=f"{what} curve for one ordered pair")
        p.add_argument("--pair", required=True, metavar="I,J")
        p.add_argument("--lag-grid", choices=("dense", "log"), default="dense")
        p.set_defaults(func=fn)

    p = sub.add_parser("matrix", parents=[common], help="all-pairs normalized response matrix at one lag")
    p.add_argument("--tau", type=int, required=True)
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("average", parents=[common], help="market / passive / active averages")
    p.add_argument("--mode", choices=("market", "passive", "active"), default="market")
    p.add_argument("--kind", choices=("response", "correlator"), default="response")
    p.add_argument("--stock", help="fixed stock for passive/active modes")
    p.add_argument("--pool", default="market", help="'market' or 'sector:<code>'")
    p.set_defaults(func=cmd_average)

    p = sub.add_parser("rank", parents=[common], help="top stocks by normalized pool-averaged response")
    p.add_argument("--mode", choices=("passive", "active"), default="passive")
    p.add_argument("--k", type=int)
    p.add_argument("--lags", help="comma-separated lag set, default from config")
    p.add_argument("--primary", type=int, help="ordering lag, default the largest")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("fit", parents=[common], help="fit the decay law to a curve CSV")
    p.add_argument("--curve", required=True, help="path to a tau,value,count CSV")
    p.set_defaults(func=cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return NUMERIC_EXIT
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
