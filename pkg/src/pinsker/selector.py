"""Penalized selection of a shrinkage weight vector from the finite family.

The cost of a candidate ``lambda`` is::

    J(lambda) = sum lambda_j^2 th_j^2 - 2 sum lambda_j (th_j^2 - zeta/n) + rho |lambda|^2 zeta / n

where ``th`` are the empirical Fourier coefficients of the data and ``zeta``
is the high-frequency energy ``sum_{j > l_n} th_j^2``.  The selected weight is
the candidate of minimal cost; ties go to the lexicographically smallest
``(beta, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import DesignGrid, FourierCoeffs, fourier_transform, synthesize
from .weights import WeightIndex, WeightVector, grid_params, weight_matrix, weight_vector

__all__ = [
    "SelectionResult",
    "Estimate",
    "icbrt",
    "low_cutoff",
    "zeta_hat",
    "rho",
    "penalty",
    "cost",
    "all_costs",
    "select",
    "reconstruct",
    "reference_index",
    "reference_estimator",
    "kappa",
]


@dataclass(frozen=True)
class Estimate:
    coefficients: np.ndarray
    fitted: np.ndarray
    weight: WeightVector | None


@dataclass(frozen=True)
class SelectionResult:
    chosen: WeightIndex
    cost: float
    zeta_hat: float
    rho: float
    all_costs: dict[WeightIndex, float]
    weight: WeightVector


def icbrt(n: int) -> int:
    """Exact integer part of the cube root of a non-negative integer."""
    if n < 0:
        raise ValueError("n must be non-negative")
    r = int(round(n ** (1.0 / 3.0)))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def low_cutoff(n: int) -> int:
    """``l_n = [n^{1/3} + 1]``, computed in exact integer arithmetic."""
    return icbrt(n) + 1


def zeta_hat(coeffs) -> float:
    """High-frequency energy ``sum_{j = l_n + 1}^n th_j^2``; estimates the mean noise variance."""
    values = coeffs.values if isinstance(coeffs, FourierCoeffs) else np.asarray(coeffs, dtype=float)
    n = values.shape[-1]
    ln = low_cutoff(n)
    if ln >= n:
        raise ValueError(f"n = {n} is too small: l_n = {ln} leaves no high-frequency coefficients")
    return np.sum(values[..., ln:] ** 2, axis=-1)


def rho(n: int, gamma: float = 2.0) -> float:
    """Penalty weight ``1 / (3 + ln^gamma n)``."""
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return 1.0 / (3.0 + math.log(n) ** gamma)


def penalty(lam, zeta: float, n: int) -> float:
    """``|lambda|^2 zeta / n``."""
    values = lam.values if isinstance(lam, WeightVector) else np.asarray(lam, dtype=float)
    if zeta < 0:
        raise ValueError(f"zeta_hat must be non-negative, got {zeta}")
    return float(np.dot(values, values) * zeta / n)


def cost(lam, coeffs, zeta: float, rho_value: float) -> float:
    """Penalized cost ``J_n(lambda)`` for one candidate."""
    values = lam.values if isinstance(lam, WeightVector) else np.asarray(lam, dtype=float)
    th = coeffs.values if isinstance(coeffs, FourierCoeffs) else np.asarray(coeffs, dtype=float)
    if values.shape != th.shape:
        raise ValueError(f"weight length {values.shape} does not match coefficients {th.shape}")
    if not 0 < rho_value < 1.0 / 3.0:
        raise ValueError(f"rho must lie in (0, 1/3), got {rho_value}")
    n = th.size
    th2 = th**2
    th_tilde = th2 - zeta / n
    return float(
        np.dot(values**2, th2) - 2.0 * np.dot(values, th_tilde)
        + rho_value * penalty(values, zeta, n)
    )


def all_costs(W: np.ndarray, theta: np.ndarray, rho_value: float) -> np.ndarray:
    """Costs of every row of ``W`` for every row of ``theta``.

    ``W`` is ``(K, n)`` and ``theta`` is ``(n,)`` or ``(reps, n)``; the result
    is ``(K,)`` or ``(reps, K)``.  The squared coefficients are formed once
    and reused across the whole family.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[-1]
    th2 = theta**2
    zeta = zeta_hat(theta)
    th_tilde = th2 - np.expand_dims(zeta, -1) / n
    W2 = W**2
    sq = W2.sum(axis=1)
    quad = th2 @ W2.T
    lin = th_tilde @ W.T
    pen = rho_value * np.multiply.outer(zeta, sq) / n
    return quad - 2.0 * lin + pen


def reconstruct(lam, coeffs: FourierCoeffs) -> Estimate:
    """Shrink the coefficients by ``lambda`` and synthesize on the grid."""
    values = lam.values if isinstance(lam, WeightVector) else np.asarray(lam, dtype=float)
    if values.shape != coeffs.values.shape:
        raise ValueError(
            f"weight length {values.shape} does not match coefficients {coeffs.values.shape}"
        )
    shrunk = values * coeffs.values
    weight = lam if isinstance(lam, WeightVector) else None
    return Estimate(shrunk, synthesize(shrunk, coeffs.grid), weight)


def select(y, grid: DesignGrid, gamma: float = 2.0) -> tuple[SelectionResult, Estimate]:
    """Run the adaptive procedure on observations ``y`` sampled on ``grid``."""
    y = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ValueError("observations must be finite")
    coeffs = fourier_transform(y, grid)
    index, W = weight_matrix(grid.n)
    rho_value = rho(grid.n, gamma)
    costs = all_costs(W, coeffs.values, rho_value)
    best = int(np.argmin(costs))  # first minimum == lexicographic tie-break
    chosen = index[best]
    lam = weight_vector(chosen, grid.n)
    result = SelectionResult(
        chosen=chosen,
        cost=float(costs[best]),
        zeta_hat=float(zeta_hat(coeffs)),
        rho=rho_value,
        all_costs=dict(zip(index, costs.tolist())),
        weight=lam,
    )
    return result, reconstruct(lam, coeffs)


def reference_index(rbar: float, n: int, k: int) -> tuple[WeightIndex, bool]:
    """Oracle index ``(k, l eps)`` with ``l = min(inf{i : i eps >= rbar}, m)``.

    Returns the index and whether the clamp at ``m`` was applied.
    """
    if not rbar > 0:
        raise ValueError(f"rbar must be positive, got {rbar}")
    eps, _, m = grid_params(n)
    i = max(1, math.ceil(rbar / eps))
    while i > 1 and (i - 1) * eps >= rbar:
        i -= 1
    while i * eps < rbar:
        i += 1
    clamped = i > m
    return WeightIndex(k, min(i, m), eps), clamped


def reference_estimator(ball, varsigma_S: float, y, grid: DesignGrid) -> tuple[Estimate, bool]:
    """Benchmark estimator tuned with the true ``k``, ``r`` and noise level.

    Not usable in practice: it needs ``varsigma(S)``, which depends on the
    unknown function.  Returns the estimate and the clamp flag.
    """
    if not varsigma_S > 0:
        raise ValueError(f"varsigma(S) must be positive, got {varsigma_S}")
    alpha, clamped = reference_index(ball.r / varsigma_S, grid.n, ball.k)
    coeffs = fourier_transform(y, grid)
    return reconstruct(weight_vector(alpha, grid.n), coeffs), clamped


def kappa(rho_value: float) -> float:
    """Oracle-inequality factor ``(6 rho - 2 rho^2) / (1 - 3 rho)``."""
    if not 0 < rho_value < 1.0 / 3.0:
        raise ValueError(f"rho must lie in (0, 1/3), got {rho_value}")
    return (6.0 * rho_value - 2.0 * rho_value**2) / (1.0 - 3.0 * rho_value)
