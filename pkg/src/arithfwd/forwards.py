"""
Forward quotes for an arithmetic-average overnight period.

exact       (1/tau) sum tau_k A_k F_k with quadrature factors
murex       all factors set to one
linear      factors on the line from A_1 to 1 at T_e
piecewise   factors on two lines through A_1, A_m and 1
geometric   compounded forward from the curve
takada_det  log(1 + tau F_g) / tau
takada_oa   E^{T_e}[integral of r over the period] / tau
mc          exact forward estimated by Monte Carlo
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import curve as _curve
from .curve import DiscountCurve
from .factors import (
    FactorCurve,
    factor_curve_exact,
    factor_exact,
    factor_linear,
    factor_piecewise,
)
from .g2pp import G2ppParams, factor_means, forward_measure, shift_hump
from .montecarlo import McConfig, mc_arithmetic_forward, simulate_paths
from .quadrature import DEFAULT_ORDER
from .timegrid import AccrualGrid

ARITHMETIC_METHODS = ("exact", "murex", "linear", "piecewise")
ALL_METHODS = ARITHMETIC_METHODS + ("geometric", "takada_det", "takada_oa", "mc")
DEFAULT_TIME_STEPS = 64


@dataclass(frozen=True)
class ForwardQuote:
    value: float
    method: str
    start_day: int
    end_day: int
    std_error: float | None = None
    factor_curve: FactorCurve | None = None

    def __post_init__(self) -> None:
        if self.method not in ALL_METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not math.isfinite(self.value):
            raise ArithmeticError(f"{self.method} forward is not finite: {self.value!r}")
        if (self.std_error is not None) != (self.method == "mc"):
            raise ValueError("std_error is reported for Monte Carlo quotes only")

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "value": self.value,
            "std_error": self.std_error,
            "Ts_days": self.start_day,
            "Te_days": self.end_day,
        }


def _quote(grid: AccrualGrid, method: str, value: float, **kw) -> ForwardQuote:
    return ForwardQuote(float(value), method, grid.start_day, grid.end_day, **kw)


def weighted_forward(curve: DiscountCurve, grid: AccrualGrid, factors) -> float:
    """(1/tau) sum_k tau_k * factor_k * F_k."""
    fwds = _curve.on_forwards(curve, grid)
    return float(np.sum(grid.fractions * np.asarray(factors, dtype=float) * fwds) / grid.total)


def arithmetic_forward(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    method: str = "exact",
    order: int = DEFAULT_ORDER,
    midpoint: int | None = None,
) -> ForwardQuote:
    """
    Arithmetic-average forward by one of ``ARITHMETIC_METHODS``.

    The linear and piecewise methods evaluate only A_1 (and A_m) by
    quadrature; exact evaluates every factor.
    """
    if method == "exact":
        fc = factor_curve_exact(model, curve, grid, order)
        # sum tau_k E^{T_e}[R_k] directly; equal to the factor form by construction
        expected = np.array([t.expected_rate for t in fc.terms])
        value = float(np.sum(grid.fractions * expected) / grid.total)
        return _quote(grid, method, value, factor_curve=fc)
    if method == "murex":
        return _quote(grid, method, weighted_forward(curve, grid, np.ones(grid.K)))
    if method == "linear":
        fc = factor_linear(factor_exact(model, curve, grid, 1, order), grid)
        return _quote(grid, method, weighted_forward(curve, grid, fc.values), factor_curve=fc)
    if method == "piecewise":
        m = grid.midpoint_index() if midpoint is None else midpoint
        a1 = factor_exact(model, curve, grid, 1, order)
        am = factor_exact(model, curve, grid, m, order)
        fc = factor_piecewise(a1, am, grid, m)
        return _quote(grid, method, weighted_forward(curve, grid, fc.values), factor_curve=fc)
    raise ValueError(f"method must be one of {ARITHMETIC_METHODS}, got {method!r}")


def geometric_forward(curve: DiscountCurve, grid: AccrualGrid) -> ForwardQuote:
    return _quote(grid, "geometric", _curve.geometric_forward(curve, grid))


def takada_det_forward(curve: DiscountCurve, grid: AccrualGrid) -> ForwardQuote:
    """log(1 + tau F_g) / tau, i.e. log(P(T_s) / P(T_e)) / tau."""
    logp = curve.log_discount(np.array([grid.start, grid.end]))
    return _quote(grid, "takada_det", (logp[0] - logp[1]) / grid.total)


def takada_oa(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    time_steps: int = DEFAULT_TIME_STEPS,
) -> ForwardQuote:
    """
    (1/tau) E^{T_e}[integral of r over [T_s, T_e]].

    The curve's forward integrates exactly to log(P(T_s)/P(T_e)); Gauss-Legendre
    nodes handle the smooth remainder (variance hump plus forward-measure
    factor means), so pillar curves with forward jumps lose no accuracy.
    """
    if time_steps < 16:
        raise ValueError(f"time_steps must be >= 16, got {time_steps}")
    t0, t1 = grid.start, grid.end
    nodes, weights = np.polynomial.legendre.leggauss(int(time_steps))
    half = 0.5 * (t1 - t0)
    us = t0 + half * (nodes + 1.0)
    measure = forward_measure(t1)
    smooth = np.array([float(shift_hump(model, u)) + float(np.sum(factor_means(model, u, measure))) for u in us])
    logp = curve.log_discount(np.array([t0, t1]))
    integral = (logp[0] - logp[1]) + half * float(np.dot(weights, smooth))
    return _quote(grid, "takada_oa", integral / grid.total)


def mc_forward(model: G2ppParams, curve: DiscountCurve, grid: AccrualGrid, cfg: McConfig) -> ForwardQuote:
    est = mc_arithmetic_forward(simulate_paths(model, curve, grid, cfg))
    return _quote(grid, "mc", est.value, std_error=est.std_error)


def price(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    methods: Iterable[str],
    order: int = DEFAULT_ORDER,
    cfg: McConfig | None = None,
    midpoint: int | None = None,
    time_steps: int = DEFAULT_TIME_STEPS,
) -> list[ForwardQuote]:
    """One quote per requested method, in request order."""
    methods = list(methods)
    unknown = [m for m in methods if m not in ALL_METHODS]
    if unknown:
        raise ValueError(f"unknown method(s) {unknown}; choose from {', '.join(ALL_METHODS)}")
    quotes = []
    for method in methods:
        if method in ARITHMETIC_METHODS:
            quotes.append(arithmetic_forward(model, curve, grid, method, order, midpoint))
        elif method == "geometric":
            quotes.append(geometric_forward(curve, grid))
        elif method == "takada_det":
            quotes.append(takada_det_forward(curve, grid))
        elif method == "takada_oa":
            quotes.append(takada_oa(model, curve, grid, time_steps))
        else:
            if cfg is None:
                raise ValueError("the mc method needs a Monte Carlo configuration")
            quotes.append(mc_forward(model, curve, grid, cfg))
    return quotes


def factor_table(
    model: G2ppParams,
    curve: DiscountCurve,
    grid: AccrualGrid,
    order: int = DEFAULT_ORDER,
    midpoint: int | None = None,
) -> tuple[FactorCurve, FactorCurve, FactorCurve]:
    """Exact, linear and piecewise factor curves sharing one quadrature sweep."""
    exact = factor_curve_exact(model, curve, grid, order)
    m = grid.midpoint_index() if midpoint is None else midpoint
    lin = factor_linear(float(exact.values[0]), grid)
    pw = factor_piecewise(float(exact.values[0]), float(exact.values[m - 1]), grid, m)
    return exact, lin, pw

