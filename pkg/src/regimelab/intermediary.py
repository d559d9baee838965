"""Stylized VaR-constrained intermediary simulator.

Every agent operates at the constraint frontier (exposure = capital / (k *
vol)) in both regimes. Stress arrives through a two-state exogenous chain
that raises volatility by a fixed multiplier and impairs capital by a fixed
fraction per period; calm periods replenish capital at a level-independent
per-period drift plus symmetric noise. In stress, exposures contract
multiplicatively; in calm, the aggregate exposure drifts additively -- the
two behaviors the headline regression is designed to separate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataio import MonthlyTable


def _per_agent(value, n: int) -> np.ndarray:
    arr = np.broadcast_to(np.asarray(value, dtype=float), (n,)).copy()
    if np.any(arr <= 0):
        raise ValueError("per-agent parameters must be positive")
    return arr


@dataclass(frozen=True)
class IntermediaryConfig:
    n_agents: int = 50
    var_k: float | np.ndarray = 2.33        # VaR confidence multiplier, per agent
    calm_drift: float | np.ndarray = 0.004  # per-period capital drift in calm
    capital_noise_sd: float = 0.01          # level-independent calm capital noise
    initial_capital: float | np.ndarray = 1.0
    sigma_bar: float = 0.15                 # calm volatility level
    eps: float = 0.0025                     # relative variance of the vol noise
    stress_entry: float = 0.10              # P(stress at t+1 | calm at t)
    stress_exit: float = 0.35               # P(calm at t+1 | stress at t)
    stress_vol_mult: float = 2.0
    stress_loss: float = 0.04               # capital loss fraction per stress period
    impact: float = 1.0                     # price response per relative exposure change
    T: int = 360
    seed: int = 7

    def __post_init__(self) -> None:
        if self.n_agents < 1 or self.T < 3:
            raise ValueError("need n_agents >= 1 and T >= 3")
        if self.stress_vol_mult <= 1.0:
            raise ValueError("stress_vol_mult must exceed 1")
        if not 0.0 < self.stress_loss < 1.0:
            raise ValueError("stress_loss must be in (0, 1)")
        for p in (self.stress_entry, self.stress_exit):
            if not 0.0 < p < 1.0:
                raise ValueError("stress entry/exit probabilities must be in (0, 1)")
        if self.eps < 0 or self.capital_noise_sd < 0:
            raise ValueError("noise parameters must be >= 0")
        if self.sigma_bar <= 0 or self.impact <= 0:
            raise ValueError("sigma_bar and impact must be positive")


@dataclass(frozen=True)
class SimulatedPanel:
    vol: np.ndarray        # (T,)
    regime: np.ndarray     # (T,) int, 1 = stress
    capital: np.ndarray    # (T, n_agents)
    aggregate: np.ndarray  # (T,) sum of frontier exposures
    price: np.ndarray      # (T,)
    config: IntermediaryConfig

    def agent_exposure(self) -> np.ndarray:
        k = _per_agent(self.config.var_k, self.config.n_agents)
        return self.capital / (k[None, :] * self.vol[:, None])

    def rows(self) -> list[dict]:
        return [
            {
                "t": t,
                "vol": float(self.vol[t]),
                "regime": int(self.regime[t]),
                "aggregate_exposure": float(self.aggregate[t]),
                "price": float(self.price[t]),
            }
            for t in range(self.vol.size)
        ]


def simulate(config: IntermediaryConfig) -> SimulatedPanel:
    """Run the simulator; all randomness comes from config.seed.

    The same underlying draws are used at every eps / noise level (they are
    scaled, not redrawn), so runs differing only in those knobs are coupled.
    """
    n, T = config.n_agents, config.T
    rng = np.random.default_rng(config.seed)
    k = _per_agent(config.var_k, n)
    rho = _per_agent(config.calm_drift, n)
    c0 = _per_agent(config.initial_capital, n)

    u_chain = rng.random(T - 1)
    u_vol = rng.uniform(-1.0, 1.0, T)
    z_cap = rng.standard_normal((T - 1, n))

    regime = np.zeros(T, dtype=int)
    for t in range(1, T):
        if regime[t - 1] == 0:
            regime[t] = 1 if u_chain[t - 1] < config.stress_entry else 0
        else:
            regime[t] = 0 if u_chain[t - 1] < config.stress_exit else 1

    capital = np.empty((T, n))
    capital[0] = c0
    noise = config.capital_noise_sd * z_cap
    for t in range(1, T):
        if regime[t] == 1:
            capital[t] = (1.0 - config.stress_loss) * capital[t - 1]
        else:
            capital[t] = capital[t - 1] + rho + noise[t - 1]

    xi = math.sqrt(3.0 * config.eps) * u_vol
    base = np.where(regime == 1, config.sigma_bar * config.stress_vol_mult, config.sigma_bar)
    vol = base * (1.0 + xi)

    aggregate = (capital / k[None, :]).sum(axis=1) / vol

    price = np.empty(T)
    price[0] = 100.0
    for t in range(1, T):
        price[t] = price[t - 1] * (1.0 + config.impact * (aggregate[t] - aggregate[t - 1]) / aggregate[t - 1])

    return SimulatedPanel(vol, regime, capital, aggregate, price, config)


def to_monthly_table(panel: SimulatedPanel, start_month: str = "1995-01") -> MonthlyTable:
    """Expose the simulated aggregate as a monthly exposure table."""
    y, m = int(start_month[:4]), int(start_month[5:7])
    base = y * 12 + (m - 1)
    months = [f"{(base + t) // 12:04d}-{(base + t) % 12 + 1:02d}" for t in range(panel.vol.size)]
    return MonthlyTable(months, panel.aggregate.copy(), panel.vol.copy())


def recovery_time_additive(retention: float, level: float, rate: float) -> float:
    """Periods to regain the prior level under constant-rate additive growth."""
    if not 0.0 < retention < 1.0:
        raise ValueError("retention must be in (0, 1)")
    if level <= 0 or rate <= 0:
        raise ValueError("level and rate must be positive")
    return (1.0 - retention) * level / rate


def recovery_time_multiplicative(retention: float, growth: float) -> float:
    """Periods to regain the prior level under constant multiplicative growth."""
    if not 0.0 < retention < 1.0:
        raise ValueError("retention must be in (0, 1)")
    if growth <= 0:
        raise ValueError("growth must be positive")
    return -math.log(retention) / math.log(1.0 + growth)
