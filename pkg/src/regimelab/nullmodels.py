"""Calibrated null price processes and the duration-ratio Monte Carlo study.

Five models: geometric Brownian motion, one-lag asymmetric volatility,
Heston stochastic volatility (full-truncation Milstein with the variance-of-
variance correction), two-state Markov regime switching, and a stationary
block bootstrap of an empirical return series.

All paths use a daily step dt = 1/252 and start at 100. Path i draws from a
generator derived from (seed, i) only, so studies parallelize and are
reproducible path by path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dataio import PricePath
from .episodes import _episodes_from_closes
from .resample import derive_rng, stationary_block_indices

try:  # optional compiled kernels for the sequential recurrences
    from numba import njit
except ImportError:  # pragma: no cover - numba is an optional accelerator
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]
        def wrap(f):
            return f
        return wrap

DT = 1.0 / 252.0
P0 = 100.0

MODELS = ("gbm", "asym_vol", "heston", "markov_rs", "block_bootstrap")


@dataclass(frozen=True)
class GbmParams:
    mu: float = 0.08
    sigma: float = 0.157

    def __post_init__(self) -> None:
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


@dataclass(frozen=True)
class AsymVolParams:
    sigma_base: float = 0.157
    gamma_lev: float = -5.0  # per unit daily log return
    vol_floor: float = 0.01
    vol_cap: float = 2.0
    mu: float = 0.08

    def __post_init__(self) -> None:
        if not self.vol_floor < self.sigma_base < self.vol_cap:
            raise ValueError("need vol_floor < sigma_base < vol_cap")


@dataclass(frozen=True)
class HestonParams:
    """Square-root variance with leverage correlation.

    The calibration deliberately sits at a Feller ratio just below one, so
    the variance process spends time near zero; paths whose share of
    near-degenerate steps (v <= eps_v) exceeds max_zero_frac are rejected.
    """

    mu: float = 0.08
    vbar: float = 0.0247
    kappa: float = 5.0
    xi: float = 0.5
    rho: float = -0.75
    v0: float | None = None  # None -> vbar
    eps_v: float = 1e-3
    max_zero_frac: float = 0.05

    def __post_init__(self) -> None:
        if not -1.0 < self.rho < 1.0:
            raise ValueError("rho must be in (-1, 1)")
        if min(self.vbar, self.kappa, self.xi) <= 0:
            raise ValueError("vbar, kappa, xi must be positive")

    @property
    def feller_ratio(self) -> float:
        return 2.0 * self.kappa * self.vbar / (self.xi * self.xi)


@dataclass(frozen=True)
class MarkovRsParams:
    mu_bull: float = 0.15
    sigma_bull: float = 0.12
    stay_bull: float = 0.98
    mu_bear: float = -0.10
    sigma_bear: float = 0.25
    stay_bear: float = 0.93

    def __post_init__(self) -> None:
        for p in (self.stay_bull, self.stay_bear):
            if not 0.0 < p < 1.0:
                raise ValueError("stay probabilities must be in (0, 1)")

    @property
    def stationary_bull(self) -> float:
        leave_bull = 1.0 - self.stay_bull
        leave_bear = 1.0 - self.stay_bear
        return leave_bear / (leave_bull + leave_bear)


@dataclass(frozen=True)
class BlockBootstrapParams:
    returns: np.ndarray  # empirical daily log returns
    mean_block: int = 63

    def __post_init__(self) -> None:
        r = np.asarray(self.returns, dtype=float)
        object.__setattr__(self, "returns", r)
        if r.size < 2:
            raise ValueError("need an empirical return series")
        if self.mean_block < 1:
            raise ValueError("mean_block must be >= 1")


DEFAULT_PARAMS = {
    "gbm": GbmParams,
    "asym_vol": AsymVolParams,
    "heston": HestonParams,
    "markov_rs": MarkovRsParams,
    "block_bootstrap": BlockBootstrapParams,
}


@dataclass(frozen=True)
class NullSpec:
    model: str
    params: object
    n_days: int = 19_170
    n_paths: int = 1_000
    seed: int = 1
    delta: float = 0.05

    def __post_init__(self) -> None:
        if self.model not in MODELS:
            raise ValueError(f"unknown model {self.model!r}; choose from {MODELS}")
        if self.n_days < 252:
            raise ValueError("n_days must be >= 252")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must be in (0, 1)")


@dataclass(frozen=True)
class NullStudySummary:
    model: str
    n_accepted: int
    n_zero_episode: int
    median_tau: float
    q05: float
    q95: float
    p_one_sided: float
    comparator: float

    def row(self) -> dict:
        return {
            "model": self.model,
            "n_accepted": self.n_accepted,
            "n_zero_episode": self.n_zero_episode,
            "median_tau": self.median_tau,
            "q05": self.q05,
            "q95": self.q95,
            "p_one_sided": self.p_one_sided,
            "comparator": self.comparator,
        }


# ---------------------------------------------------------------------------
# Step kernels (sequential recurrences; jitted when numba is available)
# ---------------------------------------------------------------------------

@njit(cache=True)
def _asym_vol_steps(z, dt, mu, sigma_base, gamma, floor, cap):  # pragma: no cover - jitted
    n = z.size
    r = np.empty(n)
    sqdt = math.sqrt(dt)
    sigma = sigma_base
    for t in range(n):
        if t > 0:
            sigma = sigma_base * math.exp(gamma * r[t - 1])
            if sigma < floor:
                sigma = floor
            elif sigma > cap:
                sigma = cap
        r[t] = (mu - 0.5 * sigma * sigma) * dt + sigma * sqdt * z[t]
    return r


@njit(cache=True)
def _heston_steps(z1, z2, dt, mu, vbar, kappa, xi, v0, eps_v):  # pragma: no cover - jitted
    n = z1.size
    steps = np.empty(n)
    v_used = np.empty(n)  # floored variance driving each price step
    sqdt = math.sqrt(dt)
    v = v0
    n_degenerate = 0
    for t in range(n):
        vplus = v if v > 0.0 else 0.0
        v_used[t] = vplus
        if vplus <= eps_v:
            n_degenerate += 1
        steps[t] = (mu - 0.5 * vplus) * dt + math.sqrt(vplus) * sqdt * z1[t]
        v = (
            v
            + kappa * (vbar - vplus) * dt
            + xi * math.sqrt(vplus * dt) * z2[t]
            + 0.25 * xi * xi * (dt * z2[t] * z2[t] - dt)
        )
        if v < 0.0:
            v = 0.0
    return steps, v_used, n_degenerate


@njit(cache=True)
def _markov_steps(z, u, dt, mu1, s1, p11, mu2, s2, p22, state0):  # pragma: no cover - jitted
    n = z.size
    steps = np.empty(n)
    sqdt = math.sqrt(dt)
    state = state0  # 0 = bull, 1 = bear
    n_bull = 0
    for t in range(n):
        if state == 0:
            if u[t] >= p11:
                state = 1
        else:
            if u[t] >= p22:
                state = 0
        if state == 0:
            n_bull += 1
            steps[t] = (mu1 - 0.5 * s1 * s1) * dt + s1 * sqdt * z[t]
        else:
            steps[t] = (mu2 - 0.5 * s2 * s2) * dt + s2 * sqdt * z[t]
    return steps, n_bull


def _simulate_closes(spec: NullSpec, path_index: int) -> np.ndarray | None:
    """Closing prices for one path, or None when the path is rejected."""
    rng = derive_rng(spec.seed, path_index)
    n_steps = spec.n_days - 1
    p = spec.params

    if spec.model == "gbm":
        z = rng.standard_normal(n_steps)
        steps = (p.mu - 0.5 * p.sigma * p.sigma) * DT + p.sigma * math.sqrt(DT) * z
    elif spec.model == "asym_vol":
        z = rng.standard_normal(n_steps)
        steps = _asym_vol_steps(z, DT, p.mu, p.sigma_base, p.gamma_lev, p.vol_floor, p.vol_cap)
    elif spec.model == "heston":
        z1 = rng.standard_normal(n_steps)
        w = rng.standard_normal(n_steps)
        z2 = p.rho * z1 + math.sqrt(1.0 - p.rho * p.rho) * w
        v0 = p.vbar if p.v0 is None else p.v0
        steps, _, n_degenerate = _heston_steps(
            z1, z2, DT, p.mu, p.vbar, p.kappa, p.xi, v0, p.eps_v
        )
        if n_degenerate / n_steps > p.max_zero_frac:
            return None
    elif spec.model == "markov_rs":
        state0 = 0 if rng.random() < p.stationary_bull else 1
        z = rng.standard_normal(n_steps)
        u = rng.random(n_steps)
        steps, _ = _markov_steps(
            z, u, DT, p.mu_bull, p.sigma_bull, p.stay_bull,
            p.mu_bear, p.sigma_bear, p.stay_bear, state0,
        )
    else:  # block_bootstrap
        idx = stationary_block_indices(n_steps, p.mean_block, rng)
        steps = p.returns[idx]

    closes = np.empty(spec.n_days)
    closes[0] = P0
    closes[1:] = P0 * np.exp(np.cumsum(steps))
    return closes


@lru_cache(maxsize=8)
def _synthetic_dates(n: int) -> np.ndarray:
    return np.datetime64("1950-01-03", "D") + np.arange(n)


def simulate_path(spec: NullSpec, path_index: int) -> PricePath | None:
    """Simulate path `path_index`; None signals a rejected (degenerate) path."""
    closes = _simulate_closes(spec, path_index)
    if closes is None:
        return None
    return PricePath(_synthetic_dates(spec.n_days), closes)


def run_null_study(spec: NullSpec, comparator_tau: float = 1.35) -> NullStudySummary:
    """Distribution of per-path median duration ratios against a comparator.

    For each accepted path, episodes are detected at spec.delta and the
    median per-episode duration ratio is taken; paths with no completed
    episode are excluded from the medians but counted. The one-sided p-value
    is the fraction of accepted paths whose median reaches the comparator.
    """
    if comparator_tau <= 0:
        raise ValueError("comparator_tau must be positive")
    medians: list[float] = []
    n_rejected = 0
    n_zero = 0
    for i in range(spec.n_paths):
        closes = _simulate_closes(spec, i)
        if closes is None:
            n_rejected += 1
            continue
        eps = _episodes_from_closes(closes, spec.delta, allow_censored=False)
        if not eps:
            n_zero += 1
            continue
        medians.append(float(np.median([e.tau for e in eps])))
    n_accepted = spec.n_paths - n_rejected
    if n_accepted == 0:
        raise ValueError("all simulated paths were rejected")
    if not medians:
        raise ValueError("no completed episodes on any accepted path")
    med_arr = np.array(medians)
    q05, q95 = np.percentile(med_arr, [5.0, 95.0])
    return NullStudySummary(
        model=spec.model,
        n_accepted=n_accepted,
        n_zero_episode=n_zero,
        median_tau=float(np.median(med_arr)),
        q05=float(q05),
        q95=float(q95),
        p_one_sided=float(np.sum(med_arr >= comparator_tau) / n_accepted),
        comparator=comparator_tau,
    )
