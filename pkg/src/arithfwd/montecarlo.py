"""
Exact-discretization Monte Carlo under the risk-neutral measure.

The state (x, y, int x, int y) has a Gaussian transition over any step, so
each grid step draws the exact 4D increment; there is no time-stepping bias.
Random streams are counter based: block ``j`` of ``block_size`` paths uses a
Philox generator keyed by ``(seed, j)``, so a path's draws depend only on
the seed and the path index, never on the number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .curve import DiscountCurve
from .g2pp import G2ppParams, bond_log_inverse, decay_integral, integrated_shift
from .quadrature import psd_cholesky
from .timegrid import AccrualGrid

DEFAULT_BLOCK = 4096
_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class McConfig:
    n_paths: int
    seed: int = 42
    antithetic: bool = False
    block_size: int = DEFAULT_BLOCK

    def __post_init__(self) -> None:
        if int(self.n_paths) != self.n_paths or self.n_paths < 2:
            raise ValueError(f"n_paths must be an integer >= 2, got {self.n_paths}")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.block_size < 2 or self.block_size % 2:
            raise ValueError(f"block_size must be even and >= 2, got {self.block_size}")
        if self.antithetic and self.n_paths % 2:
            raise ValueError("antithetic sampling needs an even number of paths")

    @property
    def n_blocks(self) -> int:
        return -(-self.n_paths // self.block_size)


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_paths: int

    def within(self, target: float, n_sigma: float = 3.0, floor: float = 0.0) -> bool:
        return abs(self.value - target) <= max(n_sigma * self.std_error, floor)


@dataclass(frozen=True)
class Panel:
    """
    Per-path simulation output.

    rates[:, k-1] is R_k, the overnight rate fixed at T_k.
    discount[:, k-1] is 1/B(T_k) for k = 1..K and discount[:, K] is 1/B(T_e).
    integrated_rate is the integral of r over [T_s, T_e].
    factors, if kept, holds (x, y) at T_1..T_K with shape (n, K, 2).
    """

    grid: AccrualGrid
    curve: DiscountCurve
    rates: np.ndarray
    discount: np.ndarray
    integrated_rate: np.ndarray
    antithetic: bool
    factors: np.ndarray | None = None

    @property
    def n_paths(self) -> int:
        return self.rates.shape[0]


def step_covariance(params: G2ppParams, h: float) -> np.ndarray:
    """Covariance of the (x, y, int x, int y) increment over a step of length h, from a zero state."""
    a, b = params.a, params.b
    s, e, rho = params.sigma, params.eta, params.rho
    Ea, Eb = decay_integral(a, h), decay_integral(b, h)
    E2a, E2b, Eab = decay_integral(2 * a, h), decay_integral(2 * b, h), decay_integral(a + b, h)
    sxy = rho * s * e
    c = np.empty((4, 4))
    c[0, 0] = s * s * E2a
    c[1, 1] = e * e * E2b
    c[0, 1] = sxy * Eab
    c[0, 2] = s * s * (Ea - E2a) / a
    c[0, 3] = sxy * (Ea - Eab) / b
    c[1, 2] = sxy * (Eb - Eab) / a
    c[1, 3] = e * e * (Eb - E2b) / b
    c[2, 2] = s * s * (h - 2 * Ea + E2a) / (a * a)
    c[3, 3] = e * e * (h - 2 * Eb + E2b) / (b * b)
    c[2, 3] = sxy * (h - Ea - Eb + Eab) / (a * b)
    iu = np.triu_indices(4, 1)
    c[(iu[1], iu[0])] = c[iu]
    return c


def _block_normals(cfg: McConfig, block: int, n_steps: int, m: int) -> np.ndarray:
    key = ((block & _MASK64) << 64) | (cfg.seed & _MASK64)
    rng = np.random.Generator(np.random.Philox(key=key))
    if cfg.antithetic:
        half = rng.standard_normal((n_steps, cfg.block_size // 2, 4))
        z = np.empty((n_steps, cfg.block_size, 4))
        z[:, 0::2] = half
        z[:, 1::2] = -half
    else:
        z = rng.standard_normal((n_steps, cfg.block_size, 4))
    return z[:, :m]


class _Plan:
    """Path-independent quantities shared by all blocks."""

    def __init__(self, model: G2ppParams, curve: DiscountCurve, grid: AccrualGrid):
        self.model = model
        self.grid = grid
        times = np.asarray(grid.times, dtype=float)
        starts = times[0] > 0.0
        self.step_ends = np.concatenate(([times[0]], times[1:])) if starts else times[1:]
        prev = np.concatenate(([0.0], self.step_ends[:-1]))
        self.steps = self.step_ends - prev
        self.first_record = 1 if starts else 0
        self.shift_int = np.array([float(integrated_shift(model, curve, t)) for t in times])
        loadings = [bond_log_inverse(model, curve, times[k], times[k + 1]) for k in range(grid.K)]
        self.c0 = np.array([c[0] for c in loadings])
        self.ba = np.array([c[1] for c in loadings])
        self.bb = np.array([c[2] for c in loadings])
        self.chol = {}
        self.decay = {}
        for h in np.unique(self.steps):
            self.chol[h] = psd_cholesky(step_covariance(model, float(h)))
            self.decay[h] = (
                math.exp(-model.a * h),
                math.exp(-model.b * h),
                float(decay_integral(model.a, h)),
                float(decay_integral(model.b, h)),
            )


def _simulate_block(plan: _Plan, cfg: McConfig, block: int, m: int, keep_factors: bool):
    grid = plan.grid
    K = grid.K
    z = _block_normals(cfg, block, len(plan.steps), m)
    x = np.zeros(m)
    y = np.zeros(m)
    ix = np.zeros(m)
    iy = np.zeros(m)
    rates = np.empty((m, K))
    disc = np.empty((m, K + 1))
    factors = np.empty((m, K, 2)) if keep_factors else None
    i_start = np.zeros(m)

    def record(j: int) -> None:
        disc[:, j] = np.exp(-(plan.shift_int[j] + ix + iy))
        if j < K:
            rates[:, j] = np.expm1(plan.c0[j] + plan.ba[j] * x + plan.bb[j] * y) / grid.fractions[j]
            if keep_factors:
                factors[:, j, 0] = x
                factors[:, j, 1] = y

    if plan.first_record == 0:  # T_s = 0, the initial state sits on the grid
        record(0)
    for i, h in enumerate(plan.steps):
        ea, eb, ba, bb = plan.decay[h]
        dz = z[i] @ plan.chol[h].T
        ix = ix + ba * x + dz[:, 2]
        iy = iy + bb * y + dz[:, 3]
        x = ea * x + dz[:, 0]
        y = eb * y + dz[:, 1]
        j = i + 1 - plan.first_record  # index into grid.times
        record(j)
        if j == 0:
            i_start = ix + iy
    integrated = (plan.shift_int[K] - plan.shift_int[0]) + (ix + iy - i_start)
    return rates, disc, integrated, factors


def _block_sizes(cfg: McConfig, start_block: int, stop_block: int) -> list[tuple[int, int]]:
    out = []
    for blk in range(start_block, stop_block):
        m = min(cfg.block_size, cfg.n_paths - blk * cfg.block_size)
        out.append((blk, m))
    return out


def _assemble(plan, curve, cfg, blocks, keep_factors, workers):
    if workers is None or workers <= 1:
        parts = [_simulate_block(plan, cfg, blk, m, keep_factors) for blk, m in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda bm: _simulate_block(plan, cfg, bm[0], bm[1], keep_factors), blocks))
    return Panel(
        grid=plan.grid,
        curve=curve,
        rates=np.concatenate([p[0] for p in parts]),
        discount=np.concatenate([p[1] for p in parts]),
        integrated_rate=np.concatenate([p[2] for p in parts]),
        antithetic=cfg.antithetic,
        factors=np.concatenate([p[3] for p in parts]) if keep_factors else None,
    )


def simulate_paths(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    cfg: McConfig,
    *,
    keep_factors: bool = False,
    workers: int | None = None,
) -> Panel:
    """Simulate ``cfg.n_paths`` paths on the accrual grid; see ``Panel``."""
    plan = _Plan(model, curve, grid)
    try:
        return _assemble(plan, curve, cfg, _block_sizes(cfg, 0, cfg.n_blocks), keep_factors, workers)
    except MemoryError as exc:
        raise MemoryError(
            f"panel of {cfg.n_paths} paths x {grid.K} periods does not fit in memory; "
            f"use iter_panels to stream blocks"
        ) from exc


def iter_panels(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    cfg: McConfig,
    blocks_per_chunk: int = 16,
    *,
    workers: int | None = None,
) -> Iterator[Panel]:
    """Yield consecutive chunks of the panel ``simulate_paths`` would return, in path order."""
    plan = _Plan(model, curve, grid)
    for start in range(0, cfg.n_blocks, blocks_per_chunk):
        stop = min(start + blocks_per_chunk, cfg.n_blocks)
        yield _assemble(plan, curve, cfg, _block_sizes(cfg, start, stop), False, workers)


def _units(values: np.ndarray, antithetic: bool) -> np.ndarray:
    # antithetic pairs are adjacent paths; average them into one sample
    if antithetic:
        return 0.5 * (values[0::2] + values[1::2])
    return values


def _std(u: np.ndarray) -> float:
    # a constant sample has exactly zero spread; np.std would report mean rounding
    if len(u) < 2 or np.all(u == u[0]):
        return 0.0
    return float(np.std(u, ddof=1))


def mean_estimate(samples: np.ndarray, antithetic: bool = False) -> McEstimate:
    n = len(samples)
    u = _units(np.asarray(samples, dtype=float), antithetic)
    se = _std(u) / math.sqrt(len(u))
    return McEstimate(float(np.mean(u)), se, n)


def ratio_estimate(num: np.ndarray, den: np.ndarray, antithetic: bool = False, scale: float = 1.0) -> McEstimate:
    """scale * mean(num) / mean(den), with a delta-method standard error."""
    n = len(num)
    un = _units(np.asarray(num, dtype=float), antithetic)
    ud = _units(np.asarray(den, dtype=float), antithetic)
    mn, md = float(np.mean(un)), float(np.mean(ud))
    q = mn / md
    resid = un - q * ud
    se = _std(resid) / (abs(md) * math.sqrt(len(un)))
    return McEstimate(scale * q, abs(scale) * se, n)


def mc_arithmetic_forward(panel: Panel) -> McEstimate:
    """F_a = E^Q[Sum tau_k R_k / B(T_e)] / (tau P(T_e))."""
    grid = panel.grid
    p_end = panel.curve.discount(grid.end)
    leg = panel.discount[:, -1] * (panel.rates @ grid.fractions)
    return mean_estimate(leg / (grid.total * p_end), panel.antithetic)


def factor_ratio_samples(panel: Panel, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-path (R_k / B(T_e), R_k / B(T_k)) for 1-based k."""
    if not 1 <= k <= panel.grid.K:
        raise ValueError(f"period index k must be in [1, {panel.grid.K}], got {k}")
    r = panel.rates[:, k - 1]
    return r * panel.discount[:, -1], r * panel.discount[:, k - 1]


def mc_factor(panel: Panel, k: int) -> McEstimate:
    """
    Ratio estimator of E^{T_e}[R_k] / E^{T_k}[R_k].

    Computed as E^Q[R_k / B(T_e)] P(T_k) / (E^Q[R_k / B(T_k)] P(T_e)).
    """
    num, den = factor_ratio_samples(panel, k)
    grid = panel.grid
    scale = panel.curve.discount(grid.times[k - 1]) / panel.curve.discount(grid.end)
    return ratio_estimate(num, den, panel.antithetic, scale)


def mc_factor_direct(panel: Panel, k: int, on_forward: float) -> McEstimate:
    """Estimator of E^{T_e}[R_k] / F_k, the curve-normalized factor."""
    num, _ = factor_ratio_samples(panel, k)
    p_end = panel.curve.discount(panel.grid.end)
    return mean_estimate(num / (p_end * on_forward), panel.antithetic)


def mc_takada_oa(panel: Panel) -> McEstimate:
    """E^{T_e}[integral of r over [T_s, T_e]] / tau, from risk-neutral paths."""
    grid = panel.grid
    p_end = panel.curve.discount(grid.end)
    return mean_estimate(panel.discount[:, -1] * panel.integrated_rate / (p_end * grid.total), panel.antithetic)


def mc_discount(panel: Panel, k: int) -> McEstimate:
    """E^Q[1/B(T_k)] for 1-based k; k = K + 1 gives T_e."""
    return mean_estimate(panel.discount[:, k - 1], panel.antithetic)
