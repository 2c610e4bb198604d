"""scikit-learn compatible front ends for the trigonometric shrinkage estimators.

All three regressors take the design points as a single-feature ``X`` that
must be the sieve ``j/n`` for odd ``n``; ``predict`` evaluates the fitted
trigonometric series at arbitrary points of ``[0, 1]``.

>>> import numpy as np
>>> n = 101
>>> X = (np.arange(1, n + 1) / n)[:, None]
>>> y = 2.0 + 0.01 * np.sin(2 * np.pi * X[:, 0])
>>> est = AdaptiveTrigRegressor().fit(X, y)
>>> float(np.max(np.abs(est.predict(X) - y))) < 0.01
True
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_points, check_sieve
from .basis import SobolevBall, fourier_transform, phi
from .selector import reconstruct, reference_index, rho, select
from .weights import WeightIndex, grid_params, weight_vector

__all__ = ["AdaptiveTrigRegressor", "FixedWeightRegressor", "OracleTrigRegressor"]


class _TrigSeriesMixin(RegressorMixin):
    """Shared prediction for estimators that store ``coef_`` in the phi basis."""

    def predict(self, X):
        check_is_fitted(self, "coef_")
        x = check_points(X)
        nz = np.flatnonzero(self.coef_)
        if nz.size == 0:
            return np.zeros_like(x)
        return phi(nz[None, :] + 1, x[:, None]) @ self.coef_[nz]

    def _store(self, grid, coeffs, estimate):
        self.n_ = grid.n
        self.theta_ = coeffs.values
        self.coef_ = estimate.coefficients
        self.fitted_values_ = estimate.fitted
        self.weights_ = estimate.weight.values
        self.n_features_in_ = 1


class AdaptiveTrigRegressor(_TrigSeriesMixin, BaseEstimator):
    """Data-driven weighted least squares with penalized weight selection.

    Parameters
    ----------
    gamma : float, default=2.0
        Exponent in the penalty weight ``rho = 1 / (3 + ln^gamma n)``.

    Attributes
    ----------
    selection_ : SelectionResult
        Chosen index, its cost, ``zeta_hat``, ``rho`` and every candidate cost.
    coef_ : ndarray of shape (n,)
        Shrunken coefficients ``lambda_j theta_hat_j``.
    fitted_values_ : ndarray of shape (n,)
        Estimate on the design points.
    """

    def __init__(self, gamma: float = 2.0):
        self.gamma = gamma

    def fit(self, X, y):
        grid, y = check_sieve(X, y)
        rho(grid.n, self.gamma)  # validates gamma before the heavy lifting
        result, estimate = select(y, grid, self.gamma)
        self._store(grid, fourier_transform(y, grid), estimate)
        self.selection_ = result
        self.weight_index_ = result.chosen
        return self


class FixedWeightRegressor(_TrigSeriesMixin, BaseEstimator):
    """Weighted least squares with one fixed member ``(beta, step * eps)`` of the family."""

    def __init__(self, beta: int = 1, step: int = 1):
        self.beta = beta
        self.step = step

    def fit(self, X, y):
        grid, y = check_sieve(X, y)
        eps, _, _ = grid_params(grid.n)
        self.weight_index_ = WeightIndex(int(self.beta), int(self.step), eps)
        coeffs = fourier_transform(y, grid)
        self._store(grid, coeffs, reconstruct(weight_vector(self.weight_index_, grid.n), coeffs))
        return self


class OracleTrigRegressor(_TrigSeriesMixin, BaseEstimator):
    """Benchmark tuned with the true smoothness, radius and average noise level.

    Parameters
    ----------
    k : int
        Smoothness of the Sobolev ball.
    r : float
        Radius of the ball.
    varsigma : float
        ``int_0^1 g^2(x, S) dx`` of the data-generating model.
    """

    def __init__(self, k: int = 1, r: float = 1.0, varsigma: float = 1.0):
        self.k = k
        self.r = r
        self.varsigma = varsigma

    def fit(self, X, y):
        grid, y = check_sieve(X, y)
        ball = SobolevBall(self.k, self.r)
        if not self.varsigma > 0:
            raise ValueError(f"varsigma must be positive, got {self.varsigma}")
        alpha, clamped = reference_index(ball.r / self.varsigma, grid.n, ball.k)
        coeffs = fourier_transform(y, grid)
        self._store(grid, coeffs, reconstruct(weight_vector(alpha, grid.n), coeffs))
        self.weight_index_ = alpha
        self.clamped_ = clamped
        return self
