"""
Initial discount curve P(0, T) and the forwards implied by it.

Two variants: a flat continuously-compounded rate, or pillars interpolated
log-linearly in the discount factor (piecewise-constant instantaneous
forwards, flat-forward extrapolation past the last pillar).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .timegrid import AccrualGrid


class DiscountCurve:
    """Base class; subclasses implement ``log_discount`` and ``inst_forward``."""

    def log_discount(self, T):
        raise NotImplementedError

    def inst_forward(self, t):
        """Instantaneous forward f(0, t) = -d/dt log P(0, t) (right limit at knots)."""
        raise NotImplementedError

    def discount(self, T):
        """P(0, T); accepts scalars or arrays."""
        T_arr = np.asarray(T, dtype=float)
        if np.any(T_arr < 0):
            raise ValueError(f"discount: T must be >= 0, got {T}")
        out = np.exp(self.log_discount(T_arr))
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FlatCurve(DiscountCurve):
    rate: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.rate):
            raise ValueError(f"flat rate must be finite, got {self.rate}")

    def log_discount(self, T):
        return -self.rate * np.asarray(T, dtype=float)

    def inst_forward(self, t):
        t = np.asarray(t, dtype=float)
        out = np.full_like(t, self.rate)
        return float(out) if out.ndim == 0 else out


class PillarCurve(DiscountCurve):
    """
    Log-linear interpolation between (tenor, discount factor) pillars.

    The first pillar must be (0, 1). Discount factors must be strictly
    positive and non-increasing.
    """

    def __init__(self, tenors: Sequence[float], dfs: Sequence[float]):
        tenors = np.asarray(tenors, dtype=float)
        dfs = np.asarray(dfs, dtype=float)
        if tenors.ndim != 1 or tenors.shape != dfs.shape or len(tenors) < 2:
            raise ValueError("pillar curve needs at least two (tenor, df) pairs of equal length")
        if tenors[0] != 0.0 or dfs[0] != 1.0:
            raise ValueError("first pillar must be (0, 1)")
        if np.any(np.diff(tenors) <= 0):
            raise ValueError("pillar tenors must be strictly increasing")
        if np.any(dfs <= 0) or not np.all(np.isfinite(dfs)):
            raise ValueError("discount factors must be finite and strictly positive")
        if np.any(np.diff(dfs) > 0):
            raise ValueError("discount factors must be non-increasing")
        self.tenors = tenors
        self.dfs = dfs
        self._logs = np.log(dfs)
        # forward on segment i is constant between tenors[i] and tenors[i+1]
        self._fwds = -np.diff(self._logs) / np.diff(tenors)

    def __repr__(self) -> str:
        return f"PillarCurve(n_pillars={len(self.tenors)})"

    def _segment(self, T: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.tenors, T, side="right") - 1
        return np.clip(idx, 0, len(self._fwds) - 1)

    def log_discount(self, T):
        T = np.asarray(T, dtype=float)
        i = self._segment(T)
        return self._logs[i] - self._fwds[i] * (T - self.tenors[i])

    def inst_forward(self, t):
        t = np.asarray(t, dtype=float)
        out = self._fwds[self._segment(t)]
        return float(out) if out.ndim == 0 else out

    @classmethod
    def from_csv(cls, path: str | Path) -> "PillarCurve":
        """Read a ``tenor_years,df`` CSV file."""
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["tenor_years", "df"]:
                raise ValueError(f"{path}: expected header 'tenor_years,df', got {reader.fieldnames}")
            rows = [(float(r["tenor_years"]), float(r["df"])) for r in reader]
        if not rows:
            raise ValueError(f"{path}: no pillars")
        tenors, dfs = zip(*rows)
        return cls(tenors, dfs)

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["tenor_years", "df"])
            for t, d in zip(self.tenors, self.dfs):
                writer.writerow([repr(float(t)), repr(float(d))])


def discount(curve: DiscountCurve, T):
    return curve.discount(T)


def on_forwards(curve: DiscountCurve, grid: AccrualGrid) -> np.ndarray:
    """All simply-compounded overnight forwards F_1..F_K."""
    logp = curve.log_discount(grid.times)
    return np.expm1(logp[:-1] - logp[1:]) / grid.fractions


def on_forward(curve: DiscountCurve, grid: AccrualGrid, k: int) -> float:
    """F_k for 1-based period index k."""
    if not 1 <= k <= grid.K:
        raise ValueError(f"period index k must be in [1, {grid.K}], got {k}")
    return float(on_forwards(curve, grid)[k - 1])


def geometric_forward(curve: DiscountCurve, grid: AccrualGrid) -> float:
    """F_g with 1 + tau * F_g = P(T_s) / P(T_e)."""
    logp = curve.log_discount(np.array([grid.start, grid.end]))
    return float(np.expm1(logp[0] - logp[1]) / grid.total)
