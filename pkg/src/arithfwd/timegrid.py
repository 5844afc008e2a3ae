"""
Daily accrual grid for an interest period.

Dates are integer day offsets from the valuation date. Every calendar day is
one overnight period; there is no holiday calendar, so a month is 30 days.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class DayCountBasis:
    """Simple ACT/denominator basis (ACT/360 by default)."""

    denominator: int = 360

    def __post_init__(self) -> None:
        if int(self.denominator) != self.denominator or self.denominator <= 0:
            raise ValueError(f"day-count denominator must be a positive integer, got {self.denominator}")


ACT360 = DayCountBasis(360)


def year_fraction(days: int, basis: DayCountBasis = ACT360) -> float:
    if days < 0:
        raise ValueError(f"days must be >= 0, got {days}")
    return days / basis.denominator


@dataclass(frozen=True)
class AccrualGrid:
    """
    Decomposition of [T_s, T_e) into K overnight periods.

    Attributes
    ----------
    start_day, end_day : int
        Day offsets of T_s and T_e.
    times : np.ndarray
        Shape (K+1,), year fractions T_1 = T_s, ..., T_{K+1} = T_e.
    fractions : np.ndarray
        Shape (K,), the accrual fractions tau_k.
    total : float
        tau(T_s, T_e), stored as the sum of ``fractions``.
    """

    start_day: int
    end_day: int
    basis: DayCountBasis
    times: np.ndarray = field(repr=False)
    fractions: np.ndarray = field(repr=False)
    total: float

    @property
    def K(self) -> int:
        return len(self.fractions)

    @property
    def start(self) -> float:
        return float(self.times[0])

    @property
    def end(self) -> float:
        return float(self.times[-1])

    def midpoint_index(self) -> int:
        """1-based midpoint index m = ceil(K/2)."""
        return -(-self.K // 2)


def build_grid(start_day: int, end_day: int, basis: DayCountBasis = ACT360) -> AccrualGrid:
    """One overnight period per calendar day between ``start_day`` and ``end_day``."""
    if int(start_day) != start_day or int(end_day) != end_day:
        raise ValueError("start_day and end_day must be integers")
    start_day, end_day = int(start_day), int(end_day)
    if start_day < 0:
        raise ValueError(f"start_day must be >= 0, got {start_day}")
    if end_day <= start_day:
        raise ValueError(f"end_day must be > start_day, got start_day={start_day}, end_day={end_day}")

    days = np.arange(start_day, end_day + 1)
    times = days / basis.denominator
    fractions = np.full(end_day - start_day, 1.0 / basis.denominator)
    times.setflags(write=False)
    fractions.setflags(write=False)
    return AccrualGrid(
        start_day=start_day,
        end_day=end_day,
        basis=basis,
        times=times,
        fractions=fractions,
        total=float(np.sum(fractions)),
    )
