"""Finite family of Pinsker-type shrinkage weights indexed by ``(beta, t)``.

For ``eps = 1/ln n`` the index set is ``{1..k*} x {eps, 2 eps, ..., m eps}``
with ``k* = [1/sqrt(eps)]`` and ``m = [1/eps^2]``.  Each index yields a weight
vector that is flat at one up to ``j0 = [omega/ln n]``, decays like
``1 - (j/omega)^beta`` up to the cutoff ``omega``, and is zero afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "WeightIndex",
    "WeightVector",
    "a_beta",
    "omega",
    "grid_params",
    "weight_grid",
    "weight_vector",
    "weight_matrix",
    "MAX_GRID_SIZE",
]

MAX_GRID_SIZE = 10**6


@dataclass(frozen=True, order=True)
class WeightIndex:
    """Index ``alpha = (beta, t)`` with ``t = step * eps``.

    Ordering is lexicographic on ``(beta, step)``, which is the tie-break used
    by the selector.
    """

    beta: int
    step: int
    eps: float

    def __post_init__(self):
        if self.beta < 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        if self.step < 1:
            raise ValueError(f"step must be >= 1, got {self.step}")
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")

    @property
    def t(self) -> float:
        return self.step * self.eps


@dataclass(frozen=True)
class WeightVector:
    values: np.ndarray
    index: WeightIndex
    omega: float
    j0: int

    @property
    def sq_norm(self) -> float:
        return float(np.dot(self.values, self.values))


def a_beta(beta: int) -> float:
    """``A_beta = (beta + 1)(2 beta + 1) / (pi^{2 beta} beta)``."""
    if beta < 1:
        raise ValueError(f"beta must be >= 1, got {beta}")
    return (beta + 1) * (2 * beta + 1) / (math.pi ** (2 * beta) * beta)


def omega(alpha: WeightIndex, n: int) -> float:
    """Cutoff ``(A_beta t n)^{1/(2 beta + 1)}``."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return (a_beta(alpha.beta) * alpha.t * n) ** (1.0 / (2 * alpha.beta + 1))


def grid_params(n: int) -> tuple[float, int, int]:
    """Return ``(eps, k_star, m)`` for sample size ``n``.

    ``k*`` and ``m`` are computed from ``ln n`` directly so that integer
    parts are not disturbed by the round trip through ``eps``.
    """
    if n < 3:
        raise ValueError(f"n must be >= 3 so that ln n > 1, got {n}")
    ln_n = math.log(n)
    return 1.0 / ln_n, math.floor(math.sqrt(ln_n)), math.floor(ln_n**2)


def weight_grid(n: int) -> list[WeightIndex]:
    """All indices of the family, sorted lexicographically."""
    eps, k_star, m = grid_params(n)
    if k_star * m > MAX_GRID_SIZE:
        raise ValueError(f"weight grid of size {k_star * m} exceeds {MAX_GRID_SIZE}")
    return [
        WeightIndex(beta, i, eps)
        for beta in range(1, k_star + 1)
        for i in range(1, m + 1)
    ]


def weight_vector(alpha: WeightIndex, n: int) -> WeightVector:
    """Weights ``lambda_alpha(j)`` for ``j = 1..n``."""
    w = omega(alpha, n)
    j0 = min(math.floor(w / math.log(n)), n)
    j = np.arange(1, n + 1, dtype=float)
    values = np.where(j <= w, 1.0 - (j / w) ** alpha.beta, 0.0)
    values[:j0] = 1.0
    np.clip(values, 0.0, 1.0, out=values)
    values.setflags(write=False)
    return WeightVector(values, alpha, w, j0)


def weight_matrix(n: int) -> tuple[list[WeightIndex], np.ndarray]:
    """Stack every weight vector of the family into a ``(K, n)`` array."""
    grid = weight_grid(n)
    return grid, np.vstack([weight_vector(a, n).values for a in grid])
