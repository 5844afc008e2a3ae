"""
G2++ two-factor additive Gaussian short-rate model.

    r(t) = x(t) + y(t) + phi(t)
    dx = -a x dt + sigma dW1,   dy = -b y dt + eta dW2,   dW1 dW2 = rho dt

with x(0) = y(0) = 0 and phi chosen so the model reprices the initial curve.
One-factor Hull-White is the case eta = 0.

Everything here is closed form. phi itself is never tabulated: bond prices
are reconstituted from curve ratios, and integrals of phi reduce to
``-log P(0, T) + V(0, T) / 2``.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .curve import DiscountCurve


@dataclass(frozen=True)
class G2ppParams:
    sigma: float
    a: float
    eta: float
    b: float
    rho: float

    def __post_init__(self) -> None:
        for name in ("sigma", "a", "eta", "b", "rho"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite, got {getattr(self, name)}")
        if self.sigma < 0 or self.eta < 0:
            raise ValueError(f"volatilities must be >= 0, got sigma={self.sigma}, eta={self.eta}")
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"mean reversions must be > 0, got a={self.a}, b={self.b}")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError(f"rho must be in [-1, 1], got {self.rho}")

    @property
    def deterministic(self) -> bool:
        return self.sigma == 0.0 and self.eta == 0.0

    def scaled(self, eps: float) -> "G2ppParams":
        """Same model with both volatilities multiplied by ``eps``."""
        return G2ppParams(self.sigma * eps, self.a, self.eta * eps, self.b, self.rho)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "G2ppParams":
        missing = {"sigma", "a", "eta", "b", "rho"} - set(d)
        if missing:
            raise ValueError(f"missing model parameters: {sorted(missing)}")
        extra = set(d) - {"sigma", "a", "eta", "b", "rho"}
        if extra:
            raise ValueError(f"unknown model parameters: {sorted(extra)}")
        return cls(**{k: float(d[k]) for k in ("sigma", "a", "eta", "b", "rho")})

    @classmethod
    def from_json(cls, path: str | Path) -> "G2ppParams":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


@dataclass(frozen=True)
class Measure:
    """Risk-neutral measure (``horizon=None``) or the T-forward measure for T = ``horizon``."""

    horizon: float | None = None

    def __post_init__(self) -> None:
        if self.horizon is not None and not self.horizon > 0:
            raise ValueError(f"forward measure horizon must be > 0, got {self.horizon}")

    @property
    def risk_neutral(self) -> bool:
        return self.horizon is None


RISK_NEUTRAL = Measure()


def forward_measure(horizon: float) -> Measure:
    return Measure(float(horizon))


@dataclass(frozen=True)
class GaussianLaw2D:
    mean: np.ndarray
    cov: np.ndarray
    time: float
    measure: Measure

    def __post_init__(self) -> None:
        cov = np.asarray(self.cov, dtype=float)
        if cov.shape != (2, 2) or not np.allclose(cov, cov.T, rtol=0, atol=1e-300):
            raise ValueError("covariance must be a symmetric 2x2 matrix")


def decay_integral(c, tau):
    """(1 - exp(-c tau)) / c, i.e. the integral of exp(-c u) over [0, tau]."""
    tau = np.asarray(tau, dtype=float)
    if c == 0.0:
        return tau
    return -np.expm1(-c * tau) / c


def integrated_variance(params: G2ppParams, t, T):
    """
    V(t, T), the variance of the integral of x + y over [t, T] given F_t.

    Depends only on T - t. Written through ``decay_integral`` so short
    tenors keep relative accuracy.
    """
    t = np.asarray(t, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(t > T):
        raise ValueError(f"integrated_variance requires t <= T, got t={t}, T={T}")
    tau = T - t
    a, b = params.a, params.b
    s, e, rho = params.sigma, params.eta, params.rho
    Ba, Bb = decay_integral(a, tau), decay_integral(b, tau)
    vx = (tau - 2.0 * Ba + decay_integral(2 * a, tau)) * (s * s / (a * a))
    vy = (tau - 2.0 * Bb + decay_integral(2 * b, tau)) * (e * e / (b * b))
    vxy = (tau - Ba - Bb + decay_integral(a + b, tau)) * (2.0 * rho * s * e / (a * b))
    out = vx + vy + vxy
    return float(out) if out.ndim == 0 else out


def bond_log_inverse(params: G2ppParams, curve: DiscountCurve, t: float, T: float):
    """
    Loadings of log(1 / P(t, T, x, y)) = c0 + Ba * x + Bb * y.

    Returns ``(c0, Ba, Bb)``.
    """
    if t > T:
        raise ValueError(f"bond reconstitution requires t <= T, got t={t}, T={T}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    half_var = 0.5 * (
        integrated_variance(params, t, T) - integrated_variance(params, 0.0, T) + integrated_variance(params, 0.0, t)
    )
    c0 = float(curve.log_discount(t) - curve.log_discount(T)) - half_var
    return c0, float(decay_integral(params.a, T - t)), float(decay_integral(params.b, T - t))


def bond_reconstitute(params: G2ppParams, curve: DiscountCurve, t: float, T: float, x=0.0, y=0.0):
    """Zero-coupon bond P(t, T) in state (x, y), consistent with the initial curve."""
    c0, Ba, Bb = bond_log_inverse(params, curve, t, T)
    out = np.exp(-(c0 + Ba * np.asarray(x, dtype=float) + Bb * np.asarray(y, dtype=float)))
    return float(out) if out.ndim == 0 else out


def _drift_integral(k: float, c: float, t: float, U: float) -> float:
    # integral over s in [0, t] of exp(-k (t - s)) * (1 - exp(-c (U - s))) / c
    return float(decay_integral(k, t) - math.exp(-c * (U - t)) * decay_integral(k + c, t)) / c


def factor_means(params: G2ppParams, t: float, measure: Measure) -> np.ndarray:
    """E[x(t)], E[y(t)] under ``measure`` (zero under the risk-neutral measure)."""
    if t <= 0 or measure.risk_neutral or params.deterministic:
        return np.zeros(2)
    U = measure.horizon
    a, b = params.a, params.b
    s, e, rho = params.sigma, params.eta, params.rho
    mx = -(s * s * _drift_integral(a, a, t, U) + rho * s * e * _drift_integral(a, b, t, U))
    my = -(e * e * _drift_integral(b, b, t, U) + rho * s * e * _drift_integral(b, a, t, U))
    return np.array([mx, my])


def factor_cov(params: G2ppParams, t: float) -> np.ndarray:
    if t <= 0:
        return np.zeros((2, 2))
    a, b = params.a, params.b
    s, e, rho = params.sigma, params.eta, params.rho
    cxx = s * s * decay_integral(2 * a, t)
    cyy = e * e * decay_integral(2 * b, t)
    cxy = rho * s * e * decay_integral(a + b, t)
    return np.array([[cxx, cxy], [cxy, cyy]], dtype=float)


def factor_law(params: G2ppParams, t: float, measure: Measure = RISK_NEUTRAL) -> GaussianLaw2D:
    """
    Exact Gaussian law of (x(t), y(t)).

    The covariance is measure independent; forward measures shift the mean
    by the Girsanov drift of the horizon bond's volatility. ``t <= 0`` gives
    the point mass at the origin.
    """
    t = float(t)
    return GaussianLaw2D(
        mean=factor_means(params, t, measure),
        cov=factor_cov(params, t),
        time=max(t, 0.0),
        measure=measure,
    )


def shift_hump(params: G2ppParams, u):
    """phi(u) - f(0, u): the variance correction in the exact-fit shift."""
    Ba = decay_integral(params.a, u)
    Bb = decay_integral(params.b, u)
    s, e, rho = params.sigma, params.eta, params.rho
    return 0.5 * s * s * Ba * Ba + 0.5 * e * e * Bb * Bb + rho * s * e * Ba * Bb


def shift(params: G2ppParams, curve: DiscountCurve, u):
    """Exact-fit deterministic shift phi(u)."""
    return curve.inst_forward(u) + shift_hump(params, u)


def integrated_shift(params: G2ppParams, curve: DiscountCurve, T):
    """Integral of phi over [0, T]."""
    return -curve.log_discount(T) + 0.5 * integrated_variance(params, 0.0, T)


def forward_short_rate_mean(params: G2ppParams, curve: DiscountCurve, u: float, horizon: float) -> float:
    """E^{horizon}[r(u)] for 0 < u <= horizon."""
    if u > horizon:
        raise ValueError(f"forward_short_rate_mean requires u <= horizon, got u={u}, horizon={horizon}")
    if u <= 0:
        return float(curve.inst_forward(0.0))
    m = factor_means(params, u, forward_measure(horizon))
    return float(shift(params, curve, u) + m[0] + m[1])
