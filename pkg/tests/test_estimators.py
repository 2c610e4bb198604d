"""scikit-learn front ends."""

import numpy as np
import pytest
from sklearn.base import clone

from pinsker.basis import DesignGrid, SobolevBall
from pinsker._validation import SieveError, check_sieve
from pinsker.estimators import AdaptiveTrigRegressor, FixedWeightRegressor, OracleTrigRegressor
from pinsker.models import library_function
from pinsker.selector import reference_index, select


def _data(n=101, seed=0):
    x = DesignGrid(n).points
    S = library_function("S2", SobolevBall(1, 1.0))
    return x[:, None], S(x) + 0.2 * np.random.default_rng(seed).standard_normal(n)


def test_adaptive_matches_select():
    X, y = _data()
    est = AdaptiveTrigRegressor(gamma=1.5).fit(X, y)
    result, estimate = select(y, DesignGrid(101), 1.5)
    assert est.weight_index_ == result.chosen
    np.testing.assert_array_equal(est.fitted_values_, estimate.fitted)
    np.testing.assert_allclose(est.predict(X), estimate.fitted, atol=1e-12)


def test_clone_and_params():
    est = AdaptiveTrigRegressor(gamma=3.0)
    assert est.get_params() == {"gamma": 3.0}
    assert clone(est).gamma == 3.0
    assert FixedWeightRegressor(2, 5).get_params() == {"beta": 2, "step": 5}
    assert OracleTrigRegressor(1, 2.0, 1.5).set_params(r=4.0).r == 4.0


def test_fixed_and_oracle():
    X, y = _data()
    fixed = FixedWeightRegressor(1, 3).fit(X, y)
    assert fixed.weight_index_.step == 3
    oracle = OracleTrigRegressor(1, 1.0, 1.0).fit(X, y)
    alpha, _ = reference_index(1.0, 101, 1)
    assert oracle.weight_index_ == alpha
    assert not oracle.clamped_
    assert 0 <= oracle.score(X, y) <= 1


def test_predict_between_grid_points_is_smooth():
    X, y = _data()
    est = AdaptiveTrigRegressor().fit(X, y)
    xs = np.linspace(0, 1, 1001)
    pred = est.predict(xs)
    assert np.all(np.isfinite(pred))
    assert pred[0] == pytest.approx(pred[-1], abs=1e-10)  # periodic


def test_unfitted():
    from sklearn.exceptions import NotFittedError

    with pytest.raises(NotFittedError):
        AdaptiveTrigRegressor().predict(np.array([[0.5]]))


class TestSieve:
    def test_even(self):
        with pytest.raises(SieveError):
            check_sieve(np.arange(1, 11) / 10)

    def test_empty(self):
        with pytest.raises(SieveError):
            check_sieve(np.array([]))

    def test_first_bad_row(self):
        x = np.arange(1, 8) / 7
        x[4] += 1e-3
        with pytest.raises(SieveError) as info:
            check_sieve(x)
        assert info.value.row == 4
        assert "x[4]" in str(info.value)

    def test_tolerance(self):
        x = np.arange(1, 8) / 7 + 5e-10
        grid, _ = check_sieve(x)
        assert grid.n == 7

    def test_y_checks(self):
        x = np.arange(1, 4) / 3
        with pytest.raises(ValueError):
            check_sieve(x, np.ones(4))
        with pytest.raises(ValueError):
            check_sieve(x, np.array([0, np.inf, 1.0]))
