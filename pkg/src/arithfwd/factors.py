"""
Arithmetic factors A_k and their cheap approximations.

The factor is defined as E^{T_e}[R_k] / F_k, which makes

    F_a = (1 / tau) * sum_k tau_k * A_k * F_k

an identity. The normalized-product expression and the measure ratio
E^{T_e}[R_k] / E^{T_k}[R_k] are kept as diagnostics; the ratio differs from
the definition by the in-advance convexity of a single overnight period.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .curve import DiscountCurve, on_forwards
from .g2pp import G2ppParams, bond_log_inverse, factor_law, forward_measure, RISK_NEUTRAL
from .quadrature import DEFAULT_ORDER, gaussian_expectation_2d
from .timegrid import AccrualGrid

METHODS = ("exact", "linear", "piecewise")


@dataclass(frozen=True)
class FactorTerms:
    """Quadrature building blocks for one period k."""

    expected_rate: float  # E^{T_e}[R_k]
    expected_inv_bond: float  # E^{T_e}[1 / P(T_k, T_e)]
    in_advance: float  # E^{T_k}[R_k]
    product_form: float  # normalized-product expression of A_k
    on_forward: float  # F_k from the curve

    @property
    def value(self) -> float:
        return _normalize(self.expected_rate, self.on_forward)

    @property
    def ratio_form(self) -> float:
        return _normalize(self.expected_rate, self.in_advance)


@dataclass(frozen=True)
class FactorCurve:
    grid: AccrualGrid
    values: np.ndarray
    method: str
    terms: tuple[FactorTerms, ...] | None = None
    midpoint: int | None = None

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown factor method {self.method!r}")
        if len(self.values) != self.grid.K:
            raise ValueError("one factor per accrual period is required")


def _normalize(num: float, den: float) -> float:
    if den == 0.0:
        if num == 0.0:
            return 1.0
        raise ValueError("arithmetic factor is undefined for a zero overnight forward")
    return num / den


def _rate_integrand(model, curve, t0, t1, tau):
    c0, ba, bb = bond_log_inverse(model, curve, t0, t1)
    return lambda x, y: np.expm1(c0 + ba * x + bb * y) / tau


def factor_terms(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    k: int,
    order: int = DEFAULT_ORDER,
) -> FactorTerms:
    """All quadrature expectations behind A_k, for 1-based k."""
    if not 1 <= k <= grid.K:
        raise ValueError(f"period index k must be in [1, {grid.K}], got {k}")
    t_k, t_next, t_end = float(grid.times[k - 1]), float(grid.times[k]), grid.end
    tau = float(grid.fractions[k - 1])
    fwd = float(on_forwards(curve, grid)[k - 1])

    rate = _rate_integrand(model, curve, t_k, t_next, tau)
    c0, ba, bb = bond_log_inverse(model, curve, t_k, t_end)

    def inv_bond(x, y):
        return np.exp(c0 + ba * x + bb * y)

    law_end = factor_law(model, t_k, forward_measure(t_end))
    law_k = factor_law(model, t_k, forward_measure(t_k) if t_k > 0 else RISK_NEUTRAL)

    e_rate = gaussian_expectation_2d(law_end, rate, order)
    e_inv = gaussian_expectation_2d(law_end, inv_bond, order)
    e_prod = gaussian_expectation_2d(law_end, lambda x, y: rate(x, y) * inv_bond(x, y), order)
    in_adv = gaussian_expectation_2d(law_k, rate, order)
    if e_prod == 0.0 and e_rate == 0.0:
        product = 1.0
    else:
        product = e_rate * e_inv / e_prod
    return FactorTerms(e_rate, e_inv, in_adv, product, fwd)


def factor_exact(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    k: int,
    order: int = DEFAULT_ORDER,
) -> float:
    """A_k = E^{T_e}[R_k] / F_k by Gauss-Hermite quadrature."""
    return factor_terms(model, curve, grid, k, order).value


def in_advance_forward(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    k: int,
    order: int = DEFAULT_ORDER,
) -> float:
    """E^{T_k}[R_k]: the overnight rate's expectation under its own fixing-date measure."""
    if not 1 <= k <= grid.K:
        raise ValueError(f"period index k must be in [1, {grid.K}], got {k}")
    t_k = float(grid.times[k - 1])
    rate = _rate_integrand(model, curve, t_k, float(grid.times[k]), float(grid.fractions[k - 1]))
    law_k = factor_law(model, t_k, forward_measure(t_k) if t_k > 0 else RISK_NEUTRAL)
    return gaussian_expectation_2d(law_k, rate, order)


def factor_curve_exact(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    order: int = DEFAULT_ORDER,
    workers: int | None = None,
) -> FactorCurve:
    ks = range(1, grid.K + 1)
    if workers is None or workers <= 1:
        terms = [factor_terms(model, curve, grid, k, order) for k in ks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            terms = list(pool.map(lambda k: factor_terms(model, curve, grid, k, order), ks))
    values = np.array([t.value for t in terms])
    return FactorCurve(grid, values, "exact", tuple(terms))


def factor_linear(a1: float, grid: AccrualGrid) -> FactorCurve:
    """Line through (T_1, A_1) and (T_e, 1)."""
    if not a1 > 0:
        raise ValueError(f"A_1 must be positive, got {a1}")
    t = grid.times[:-1]
    t1 = grid.times[0]
    values = a1 + (t - t1) * (1.0 - a1) / (grid.end - t1)
    return FactorCurve(grid, values, "linear")


def factor_piecewise(a1: float, am: float, grid: AccrualGrid, m: int | None = None) -> FactorCurve:
    """
    Two segments, (T_1, A_1) -> (T_m, A_m) -> (T_e, 1), joined at the 1-based index m.

    m defaults to ceil(K / 2).
    """
    if m is None:
        m = grid.midpoint_index()
    if not 1 < m < grid.K:
        raise ValueError(f"midpoint index must satisfy 1 < m < K={grid.K}, got {m}")
    if not (a1 > 0 and am > 0):
        raise ValueError(f"factors must be positive, got A_1={a1}, A_m={am}")
    t = grid.times[:-1]
    t1, tm = grid.times[0], grid.times[m - 1]
    left = a1 + (t - t1) * (am - a1) / (tm - t1)
    right = am + (t - tm) * (1.0 - am) / (grid.end - tm)
    idx = np.arange(1, grid.K + 1)
    values = np.where(idx <= m, left, right)
    return FactorCurve(grid, values, "piecewise", midpoint=m)
