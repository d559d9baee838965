"""Batch command-line front end.

Commands: headline, episodes, r3, nulls, cot, simulate-intermediary, run-all.
Inputs default to <data-dir>/sp500_daily.csv and <data-dir>/finra_vix_monthly.csv,
where the data directory comes from --data-dir, the REGIMELAB_DATA_DIR
environment variable, or ./data. All outputs are deterministic given flags,
seed, and inputs.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .dataio import (
    build_panel,
    load_exposure_csv,
    load_monthly_csv,
    load_price_csv,
    write_table,
)
from .econometrics import depth_regression, headline_regression, robustness_sweep
from .episodes import (
    bucket_rows_to_records,
    bucket_stats,
    delta_sensitivity,
    detect_episodes,
    episodes_to_rows,
)
from .intermediary import IntermediaryConfig, simulate, to_monthly_table
from .nullmodels import (
    MODELS,
    AsymVolParams,
    BlockBootstrapParams,
    GbmParams,
    HestonParams,
    MarkovRsParams,
    NullSpec,
    run_null_study,
)
from .regime import classify
from .survival import cox_fit
from .timeseries import log_returns, realized_vol

MONTHLY_SCHEMA_HELP = (
    "expected CSV schema: header 'month,margin_debt,vix'; months YYYY-MM, unique, "
    "no gaps; positive values"
)
PRICE_SCHEMA_HELP = "expected CSV schema: header 'date,close'; ISO-8601 dates; positive closes"
COT_SCHEMA_HELP = (
    "expected CSV schema: header 'period,exposure,vol'; ISO week-ending dates or YYYY-MM "
    "periods; positive values"
)

COT_MESSAGE = """\
cot: companion exposure test NOT ESTIMATED (status: not estimated).
The weekly speculative-positioning history is not assembled in this package,
and no estimates are fabricated. When an assembled file is supplied via
--input, the command runs the regime-interacted regression of the detrended
exposure change on (1, stress flag, lagged level, stress x lagged level)
with Newey-West standard errors, and labels the output
'companion - not a paper claim'.
{schema}"""

EMA_NOTE = (
    "note: EMA detrending seeds the moving average with the first observation; "
    "early detrended values are sensitive to this convention"
)


@dataclass
class RunConfig:
    """Parsed flags; defaults reproduce the baseline settings."""

    command: str = "run-all"
    data_dir: Path = field(default_factory=lambda: Path("data"))
    prices: Path | None = None
    monthly: Path | None = None
    cot_input: Path | None = None
    out: Path = field(default_factory=lambda: Path("results"))
    format: str = "csv"
    q: float = 0.10
    delta: float = 0.05
    lags: int = 6
    lag_regime: int = 0
    bootstrap_b: int = 10_000
    n_paths: int = 1_000
    n_days: int = 19_170
    seed: int = 1
    synthetic: bool = False
    models: tuple[str, ...] = MODELS
    comparator: float = 1.35
    agents: int = 50
    periods: int = 360

    def price_path(self) -> Path:
        return self.prices if self.prices is not None else self.data_dir / "sp500_daily.csv"

    def monthly_path(self) -> Path:
        return self.monthly if self.monthly is not None else self.data_dir / "finra_vix_monthly.csv"

    def out_file(self, stem: str) -> Path:
        ext = "json" if self.format == "json" else "csv"
        return self.out / f"{stem}.{ext}"


def _write(cfg: RunConfig, stem: str, rows: list[dict]) -> Path:
    cfg.out.mkdir(parents=True, exist_ok=True)
    path = cfg.out_file(stem)
    write_table(rows, path, cfg.format)
    print(f"wrote {path}")
    return path


def _load_headline_panel(cfg: RunConfig):
    if cfg.synthetic:
        sim = simulate(
            IntermediaryConfig(n_agents=cfg.agents, T=cfg.periods, seed=cfg.seed)
        )
        print(f"synthetic panel: {cfg.periods} months from the intermediary simulator (seed {cfg.seed})")
        return build_panel(to_monthly_table(sim), q=cfg.q)
    path = cfg.monthly_path()
    if not path.exists():
        raise FileNotFoundError(
            f"monthly panel not found: {path}; pass --monthly or --synthetic. {MONTHLY_SCHEMA_HELP}"
        )
    return build_panel(load_monthly_csv(path), q=cfg.q)


def cmd_headline(cfg: RunConfig) -> int:
    panel = _load_headline_panel(cfg)
    fit = headline_regression(panel, lags=cfg.lags, lag_regime=cfg.lag_regime)
    _write(cfg, "headline", fit.rows())
    print(
        f"headline: b_S = {fit.b_S:+.4f} (p = {fit.wald_p:.4g}), stress slope "
        f"{fit.stress_slope['estimate']:+.4f}, n_stress = {fit.n_stress}, "
        f"threshold = {fit.threshold:.4g}"
    )
    sweep_rows = robustness_sweep(panel, lags=cfg.lags)
    _write(cfg, "sweeps", sweep_rows)
    print(EMA_NOTE)
    panel_rows = [
        {
            "month": m,
            "margin_debt": float(panel.margin_debt[i]),
            "vol_proxy": float(panel.vol_proxy[i]),
            "detrended": float(panel.detrended[i]),
            "regime": int(panel.regime[i]),
        }
        for i, m in enumerate(panel.months)
    ]
    _write(cfg, "panel", panel_rows)
    return 0


def _load_prices(cfg: RunConfig):
    path = cfg.price_path()
    if not path.exists():
        raise FileNotFoundError(f"price series not found: {path}; pass --prices. {PRICE_SCHEMA_HELP}")
    return load_price_csv(path)


def cmd_episodes(cfg: RunConfig) -> int:
    path = _load_prices(cfg)
    eps = detect_episodes(path, delta=cfg.delta, allow_censored=True)
    if not eps:
        print(f"no episodes with depth >= {cfg.delta}")
        return 0
    _write(cfg, "episodes", episodes_to_rows(path, eps))
    buckets = bucket_stats(eps, bootstrap_B=cfg.bootstrap_b, seed=cfg.seed)
    _write(cfg, "buckets", bucket_rows_to_records(buckets))
    _write(cfg, "delta_sensitivity", delta_sensitivity(path))
    n_deep = sum(1 for e in eps if e.depth >= 0.30)
    n_cens = sum(1 for e in eps if e.censored)
    print(f"episodes: {len(eps)} at delta={cfg.delta} ({n_deep} deeper than 30%, {n_cens} censored)")

    rets = log_returns(path)
    vol = realized_vol(rets, window=21)
    valid = ~np.isnan(vol)
    cls = classify(vol[valid], q=cfg.q)
    vol_rows = []
    j = 0
    for i in np.flatnonzero(valid):
        vol_rows.append(
            {
                "date": str(path.dates[i + 1]),  # vol[i] covers returns ending at date i+1
                "realized_vol": float(vol[i]),
                "stress": int(cls.flags[j]),
            }
        )
        j += 1
    _write(cfg, "volseries", vol_rows)
    return 0


def cmd_r3(cfg: RunConfig) -> int:
    path = _load_prices(cfg)
    eps = detect_episodes(path, delta=cfg.delta, allow_censored=True)
    completed = [e for e in eps if not e.censored]
    if len(completed) < 3:
        print(
            f"r3: aborting, need >= 3 completed episodes, found {len(completed)}",
            file=sys.stderr,
        )
        return 1

    rows = []
    fit = depth_regression(eps, lags=cfg.lags)
    rows += [{"variant": "full", **r} for r in fit.rows()]
    outliers = [e for e in completed if str(path.dates[e.peak_idx]).startswith("1980-11")]
    if outliers:
        reduced = [e for e in eps if e not in outliers]
        fit_x = depth_regression(reduced, lags=cfg.lags)
        rows += [{"variant": "excl_1980-11", **r} for r in fit_x.rows()]
    else:
        print("r3: no 1980-11 peak episode in this sample; exclude-one variant skipped")
    _write(cfg, "r3_depth", rows)
    beta = fit.coef[1]
    print(f"r3 depth regression: beta = {beta:+.4f} (p = {fit.p[1]:.4g}) on {fit.nobs} episodes")

    last_idx = len(path) - 1
    durations = [e.t_rec if not e.censored else last_idx - e.trough_idx for e in eps]
    events = [0 if e.censored else 1 for e in eps]
    depth = [e.depth for e in eps]
    cox = cox_fit(durations, events, depth)
    _write(cfg, "cox", [cox.row()])
    print(
        f"cox: gamma = {cox.gamma:+.4f} (se {cox.se:.4f}, z {cox.z:+.3f}), "
        f"hazard ratio per 10pp depth = {cox.hazard_ratio_per_0p10:.3f}"
    )
    return 0


def _null_params(model: str, cfg: RunConfig, returns: np.ndarray | None):
    if model == "gbm":
        return GbmParams()
    if model == "asym_vol":
        return AsymVolParams()
    if model == "heston":
        return HestonParams()
    if model == "markov_rs":
        return MarkovRsParams()
    if returns is None:
        raise FileNotFoundError("block_bootstrap requires the price CSV for empirical returns")
    return BlockBootstrapParams(returns=returns)


def cmd_nulls(cfg: RunConfig) -> int:
    models = list(cfg.models)
    bad = [m for m in models if m not in MODELS]
    if bad:
        raise ValueError(f"unknown models {bad}; choose from {MODELS}")
    returns = None
    price_file = cfg.price_path()
    if "block_bootstrap" in models:
        if price_file.exists():
            returns = log_returns(load_price_csv(price_file))
        elif models == ["block_bootstrap"]:
            raise FileNotFoundError(
                f"block_bootstrap requires the price CSV ({price_file}). {PRICE_SCHEMA_HELP}"
            )
        else:
            print(f"note: block_bootstrap skipped, price CSV not found ({price_file})")
            models = [m for m in models if m != "block_bootstrap"]

    rows = []
    for model in models:
        spec = NullSpec(
            model=model,
            params=_null_params(model, cfg, returns),
            n_days=cfg.n_days,
            n_paths=cfg.n_paths,
            seed=cfg.seed,
            delta=cfg.delta,
        )
        summary = run_null_study(spec, comparator_tau=cfg.comparator)
        rows.append(summary.row())
        print(
            f"{model}: median tau {summary.median_tau:.3f} "
            f"[{summary.q05:.2f}, {summary.q95:.2f}], p = {summary.p_one_sided:.3f}, "
            f"accepted {summary.n_accepted}/{cfg.n_paths}"
        )
    _write(cfg, "nulls", rows)
    return 0


def cmd_cot(cfg: RunConfig) -> int:
    if cfg.cot_input is None:
        print(COT_MESSAGE.format(schema=COT_SCHEMA_HELP))
        return 0
    table = load_exposure_csv(cfg.cot_input)
    panel = build_panel(table, q=cfg.q)
    fit = headline_regression(panel, lags=cfg.lags, lag_regime=cfg.lag_regime)
    _write(cfg, "cot_companion", fit.rows())
    print("companion - not a paper claim")
    print(
        f"cot companion: b_S = {fit.b_S:+.4f} (p = {fit.wald_p:.4g}), "
        f"n_stress = {fit.n_stress} of {len(panel)}"
    )
    return 0


def cmd_simulate_intermediary(cfg: RunConfig) -> int:
    sim = simulate(IntermediaryConfig(n_agents=cfg.agents, T=cfg.periods, seed=cfg.seed))
    _write(cfg, "intermediary_panel", sim.rows())
    n_stress = int(sim.regime.sum())
    print(f"simulated {cfg.periods} periods, {cfg.agents} agents, {n_stress} stress periods")
    return 0


def cmd_run_all(cfg: RunConfig) -> int:
    failures = 0
    monthly_ok = cfg.synthetic or cfg.monthly_path().exists()
    if monthly_ok:
        failures += _guarded(cmd_headline, cfg)
    else:
        print("run-all: monthly panel missing, running headline on synthetic data")
        failures += _guarded(cmd_headline, _with(cfg, synthetic=True))

    if cfg.price_path().exists():
        failures += _guarded(cmd_episodes, cfg)
        failures += _guarded(cmd_r3, cfg)
    else:
        print(
            "run-all: price CSV missing, data-conditional checks skipped "
            f"(episodes, r3; expected at {cfg.price_path()})"
        )
    failures += _guarded(cmd_nulls, cfg)
    failures += _guarded(cmd_cot, cfg)
    if failures:
        print(f"run-all: {failures} sub-command(s) failed", file=sys.stderr)
        return 1
    print("run-all: complete")
    return 0


def _with(cfg: RunConfig, **kw) -> RunConfig:
    out = RunConfig(**{**cfg.__dict__, **kw})
    return out


def _guarded(fn, cfg: RunConfig) -> int:
    try:
        return 1 if fn(cfg) else 0
    except (ValueError, OSError) as exc:
        print(f"{fn.__name__}: {exc}", file=sys.stderr)
        return 1


COMMANDS = {
    "headline": cmd_headline,
    "episodes": cmd_episodes,
    "r3": cmd_r3,
    "nulls": cmd_nulls,
    "cot": cmd_cot,
    "simulate-intermediary": cmd_simulate_intermediary,
    "run-all": cmd_run_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="regimelab",
        description="Regime-conditional exposure regressions, drawdown-recovery episodes, and null-model studies.",
    )
    parser.add_argument("--version", action="version", version=f"regimelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, *, paths=False, monthly=False) -> None:
        p.add_argument("--data-dir", type=Path, default=None,
                       help="input directory (default: $REGIMELAB_DATA_DIR or ./data)")
        p.add_argument("--out", type=Path, default=Path("results"), help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--seed", type=int, default=1)
        if paths:
            p.add_argument("--prices", type=Path, default=None, help="daily price CSV (date,close)")
        if monthly:
            p.add_argument("--monthly", type=Path, default=None,
                           help="monthly panel CSV (month,margin_debt,vix)")

    p = sub.add_parser("headline", help="regime-interacted exposure regression plus robustness sweeps")
    common(p, monthly=True)
    p.add_argument("--synthetic", action="store_true", help="use the intermediary simulator instead of data")
    p.add_argument("--q", type=float, default=0.10, help="stress tail fraction")
    p.add_argument("--lags", type=int, default=6, help="Newey-West lag count")
    p.add_argument("--lag-regime", type=int, default=0, help="lag the stress indicator k months")
    p.add_argument("--agents", type=int, default=50)
    p.add_argument("--periods", type=int, default=360)

    p = sub.add_parser("episodes", help="drawdown-recovery episode detection and bucket statistics")
    common(p, paths=True)
    p.add_argument("--delta", type=float, default=0.05, help="minimum drawdown depth")
    p.add_argument("--q", type=float, default=0.10)
    p.add_argument("--bootstrap-b", type=int, default=10_000, help="bootstrap resamples for bucket CIs")

    p = sub.add_parser("r3", help="continuous-depth regression and Cox hazard model")
    common(p, paths=True)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--lags", type=int, default=6)

    p = sub.add_parser("nulls", help="null-model duration-ratio studies")
    common(p, paths=True)
    p.add_argument("--models", type=str, default=",".join(MODELS),
                   help=f"comma-separated subset of {','.join(MODELS)}")
    p.add_argument("--paths", dest="n_paths", type=int, default=1_000)
    p.add_argument("--days", dest="n_days", type=int, default=19_170)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--comparator", type=float, default=1.35, help="empirical median duration ratio")

    p = sub.add_parser("cot", help="companion exposure test (reports not-estimated without input)")
    common(p)
    p.add_argument("--input", dest="cot_input", type=Path, default=None,
                   help="assembled companion CSV (period,exposure,vol)")
    p.add_argument("--q", type=float, default=0.10)
    p.add_argument("--lags", type=int, default=6)
    p.add_argument("--lag-regime", type=int, default=0)

    p = sub.add_parser("simulate-intermediary", help="emit a simulated intermediary panel")
    common(p)
    p.add_argument("--agents", type=int, default=50)
    p.add_argument("--periods", type=int, default=360)

    p = sub.add_parser("run-all", help="chain headline, episodes, r3, nulls, cot")
    common(p, paths=True, monthly=True)
    p.add_argument("--synthetic", action="store_true")
    p.add_argument("--q", type=float, default=0.10)
    p.add_argument("--delta", type=float, default=0.05)
    p.add_argument("--lags", type=int, default=6)
    p.add_argument("--bootstrap-b", type=int, default=10_000)
    p.add_argument("--models", type=str, default=",".join(MODELS))
    p.add_argument("--paths", dest="n_paths", type=int, default=1_000)
    p.add_argument("--days", dest="n_days", type=int, default=19_170)
    p.add_argument("--comparator", type=float, default=1.35)
    p.add_argument("--agents", type=int, default=50)
    p.add_argument("--periods", type=int, default=360)

    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    data_dir = args.data_dir
    if data_dir is None:
        data_dir = Path(os.environ.get("REGIMELAB_DATA_DIR", "data"))
    cfg = RunConfig(command=args.command, data_dir=data_dir)
    for name in (
        "prices", "monthly", "cot_input", "out", "format", "q", "delta", "lags",
        "lag_regime", "bootstrap_b", "n_paths", "n_days", "seed", "synthetic",
        "comparator", "agents", "periods",
    ):
        if hasattr(args, name):
            setattr(cfg, name, getattr(args, name))
    if hasattr(args, "models"):
        cfg.models = tuple(m.strip() for m in args.models.split(",") if m.strip())
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    try:
        return COMMANDS[cfg.command](cfg)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
