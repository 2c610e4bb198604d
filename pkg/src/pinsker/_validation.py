"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .basis import DesignGrid

__all__ = ["SieveError", "check_sieve", "check_points"]


class SieveError(ValueError):
    """Design points are not the odd-size sieve ``x_j = j/n``.

    ``row`` is the 0-based position of the first offending point, or ``None``
    when the problem is the sample size itself.
    """

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row


def _as_column(X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    X = check_array(X, ensure_2d=True, dtype=float, ensure_min_samples=0)
    if X.shape[1] != 1:
        raise ValueError(f"expected a single feature (the design point), got {X.shape[1]}")
    return X[:, 0]


def check_points(X) -> np.ndarray:
    """Flatten prediction inputs to a 1-d float array of points."""
    return _as_column(X)


def check_sieve(X, y=None, *, atol: float = 1e-9):
    """Validate ``X`` as the sieve ``j/n`` (odd ``n``) and return ``(grid, y)``."""
    x = _as_column(X)
    n = x.size
    if n == 0:
        raise SieveError("no observations", None)
    if n % 2 == 0 or n < 3:
        raise SieveError(f"need an odd number of at least 3 points, got {n}", None)
    expected = np.arange(1, n + 1, dtype=float) / n
    bad = np.flatnonzero(np.abs(x - expected) > atol)
    if bad.size:
        row = int(bad[0])
        raise SieveError(
            f"x[{row}] = {float(x[row])!r} is not on the sieve j/n (expected {float(expected[row])!r})", row
        )
    grid = DesignGrid(n)
    if y is None:
        return grid, None
    y = np.asarray(y, dtype=float).ravel()
    if y.shape != (n,):
        raise ValueError(f"y has {y.size} entries but X has {n}")
    if not np.all(np.isfinite(y)):
        raise ValueError("y contains non-finite values")
    return grid, y
