"""
Tensor Gauss-Hermite quadrature for expectations over a 2D Gaussian law.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .g2pp import GaussianLaw2D

DEFAULT_ORDER = 32
MAX_ORDER = 128


class QuadratureError(ArithmeticError):
    """Integrand returned a non-finite value at a quadrature node."""

    def __init__(self, message: str, node: tuple[float, float], value: float):
        super().__init__(f"{message} at node (x={node[0]!r}, y={node[1]!r}): value={value!r}")
        self.node = node
        self.value = value


@dataclass(frozen=True)
class QuadratureRule:
    """Probabilists' Gauss-Hermite rule normalized to the standard normal."""

    order: int
    nodes: np.ndarray
    weights: np.ndarray


@lru_cache(maxsize=None)
def hermite_rule(order: int) -> QuadratureRule:
    if int(order) != order or not 1 <= order <= MAX_ORDER:
        raise ValueError(f"quadrature order must be an integer in [1, {MAX_ORDER}], got {order}")
    nodes, weights = np.polynomial.hermite_e.hermegauss(int(order))
    # enforce exact symmetry; hermegauss is symmetric up to rounding
    nodes = 0.5 * (nodes - nodes[::-1])
    weights = 0.5 * (weights + weights[::-1])
    weights = weights / weights.sum()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(int(order), nodes, weights)


def psd_cholesky(cov: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """
    Lower Cholesky factor of a PSD matrix.

    Pivots below ``rtol`` times the largest diagonal entry are treated as
    exact zeros and their column is dropped, so rank-deficient matrices
    (eta = 0, |rho| = 1) factor without jitter.
    """
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0]
    if cov.shape != (n, n) or not np.array_equal(cov, cov.T):
        raise ValueError("covariance must be a symmetric square matrix")
    scale = max(float(np.max(np.diag(cov))), 0.0)
    tol = rtol * scale
    L = np.zeros_like(cov)
    for j in range(n):
        d = cov[j, j] - L[j, :j] @ L[j, :j]
        if d < -tol or cov[j, j] < 0:
            raise ValueError(f"covariance is not positive semidefinite (pivot {j} = {d!r})")
        if d <= tol:
            rest = cov[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]
            if np.any(np.abs(rest) > 10.0 * np.sqrt(tol * scale)):
                raise ValueError("covariance is not positive semidefinite (zero pivot with nonzero coupling)")
            continue
        L[j, j] = np.sqrt(d)
        L[j + 1 :, j] = (cov[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    return L


def gaussian_expectation_2d(
    law: GaussianLaw2D,
    f: Callable[[np.ndarray, np.ndarray], np.ndarray],
    order: int = DEFAULT_ORDER,
) -> float:
    """
    E[f(X, Y)] for (X, Y) distributed as ``law``.

    ``f`` must accept broadcastable arrays. A zero covariance collapses to
    ``f(mean)``.
    """
    mean = np.asarray(law.mean, dtype=float)
    cov = np.asarray(law.cov, dtype=float)
    if not np.any(cov):
        value = np.asarray(f(np.asarray(mean[0]), np.asarray(mean[1])), dtype=float)
        if not np.isfinite(value):
            raise QuadratureError("non-finite integrand", (float(mean[0]), float(mean[1])), float(value))
        return float(value)

    L = psd_cholesky(cov)
    rule = hermite_rule(order)
    z1, z2 = np.meshgrid(rule.nodes, rule.nodes, indexing="ij")
    w = np.outer(rule.weights, rule.weights)
    xs = mean[0] + L[0, 0] * z1
    ys = mean[1] + L[1, 0] * z1 + L[1, 1] * z2
    vals = np.broadcast_to(np.asarray(f(xs, ys), dtype=float), xs.shape)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i, j = np.argwhere(bad)[0]
        raise QuadratureError("non-finite integrand", (float(xs[i, j]), float(ys[i, j])), float(vals[i, j]))
    return float(np.sum(w * vals))
