"""Scale families, noise laws, test library and the data generator."""

import math

import numpy as np
import pytest

from pinsker.basis import DesignGrid, SobolevBall, ellipsoid_membership, phi
from pinsker.models import (
    LIBRARY,
    ModelSpec,
    NoiseDensity,
    ScaleFamily,
    frechet_L,
    frechet_bound,
    g_squared,
    library_function,
    riemann_gap,
    rng_stream,
    sample_noise,
    scale_value,
    simulate,
    simulate_batch,
    varsigma,
    zero_function,
)


def _phi2(x):
    return phi(2, x)


class TestScale:
    def test_constant(self):
        fam = ScaleFamily.goldfeld_quandt(1.0)
        x = np.linspace(0, 1, 11)
        np.testing.assert_array_equal(scale_value(fam, x, _phi2), 1.0)
        assert not fam.depends_on_s

    def test_gq_example(self):
        fam = ScaleFamily.goldfeld_quandt(1, 1, 1)

        def S(x):
            return np.full_like(np.asarray(x, dtype=float), 2.0)

        assert scale_value(fam, 0.5, S) == pytest.approx(math.sqrt(5.5), rel=1e-15)
        assert scale_value(fam, 0.5, S) == pytest.approx(2.3452, abs=1e-4)

    def test_quadratic_zero_function(self):
        fam = ScaleFamily.quadratic(1.0, 2.0, 0.5, 3.0)
        x = np.linspace(0, 1, 9)
        np.testing.assert_allclose(scale_value(fam, x, zero_function), np.sqrt(1 + 2 * x), rtol=1e-15)

    def test_volume_term(self):
        fam = ScaleFamily.quadratic(1.0, 0.0, 0.0, 2.0)
        # int V(phi_2) = 2 int phi_2^2 = 2
        assert g_squared(fam, 0.3, _phi2) == pytest.approx(3.0, rel=1e-10)

    @pytest.mark.parametrize("args", [(0.0,), (-1.0,), (1.0, -1.0), (1.0, 0.0, -0.5)])
    def test_bad_parameters(self, args):
        with pytest.raises(ValueError):
            ScaleFamily.goldfeld_quandt(*args)


class TestVarsigma:
    def test_constant(self):
        assert varsigma(ScaleFamily.goldfeld_quandt(2.5), zero_function) == pytest.approx(2.5, rel=1e-14)

    def test_linear(self):
        assert varsigma(ScaleFamily.goldfeld_quandt(1, 2, 0), zero_function) == pytest.approx(2.0, rel=1e-12)

    def test_square_of_basis(self):
        assert varsigma(ScaleFamily.goldfeld_quandt(1, 0, 1), _phi2) == pytest.approx(2.0, rel=1e-10)

    def test_riemann_gap(self):
        assert riemann_gap(ScaleFamily.goldfeld_quandt(1.7), zero_function, 101) == pytest.approx(0, abs=1e-14)
        fam = ScaleFamily.goldfeld_quandt(1, 1, 0.5)
        for name in LIBRARY:
            S = library_function(name, SobolevBall(1, 1.0))
            assert riemann_gap(fam, S, 1001) <= 10 / 1001


class TestFrechet:
    def setup_method(self):
        self.S = library_function("S2", SobolevBall(1, 1.0))
        self.f = library_function("S3", SobolevBall(1, 1.0))
        self.x = np.linspace(0, 1, 17)

    def test_gq(self):
        fam = ScaleFamily.goldfeld_quandt(1, 0.3, 0.7)
        np.testing.assert_allclose(frechet_L(fam, self.x, self.S, self.f),
                                   2 * 0.7 * self.S(self.x) * self.f(self.x), rtol=1e-14)

    def test_zero_direction(self):
        fam = ScaleFamily.quadratic(1, 0.3, 0.7, 0.2)
        np.testing.assert_allclose(frechet_L(fam, self.x, self.S, zero_function), 0.0, atol=1e-15)

    def test_zero_function_with_volume(self):
        fam = ScaleFamily.quadratic(1, 0, 0.7, 0.2)
        np.testing.assert_allclose(frechet_L(fam, self.x, zero_function, self.f), 0.0, atol=1e-15)

    def test_matches_finite_difference(self):
        fam = ScaleFamily.quadratic(1, 0.3, 0.7, 0.2)
        d = 1e-6

        def bumped(x):
            return self.S(x) + d * self.f(x)

        fd = (g_squared(fam, self.x, bumped) - g_squared(fam, self.x, self.S)) / d
        np.testing.assert_allclose(frechet_L(fam, self.x, self.S, self.f), fd, atol=1e-5)

    def test_growth_bound_random_triples(self):
        rng = np.random.default_rng(3)
        fam = ScaleFamily.quadratic(1, 0.5, 0.7, 0.2)
        funcs = [library_function(n, SobolevBall(1, r)) for n in LIBRARY for r in (0.5, 2.0)]
        for _ in range(200):
            S, f = funcs[rng.integers(len(funcs))], funcs[rng.integers(len(funcs))]
            x = rng.uniform()
            assert abs(frechet_L(fam, x, S, f)) <= frechet_bound(fam, x, S, f) + 1e-12


class TestConditions:
    def test_positivity_and_boundedness(self):
        fam = ScaleFamily.quadratic(1, 1, 0.5, 0.3)
        x = np.linspace(0, 1, 1001)
        values = []
        for name in LIBRARY:
            S = library_function(name, SobolevBall(1, 10.0))
            assert np.min(g_squared(fam, x, S)) >= 1.0
            values.append(varsigma(fam, S))
        assert np.all(np.isfinite(values))

    def test_continuity_at_zero(self):
        fam = ScaleFamily.quadratic(1, 1, 0.5, 0.3)
        x = np.linspace(0, 1, 1001)
        base = g_squared(fam, x, zero_function)
        for name in LIBRARY:
            f = library_function(name, SobolevBall(1, 1.0))
            gaps = []
            for delta in (0.1, 0.01, 0.001):
                def scaled(t, d=delta):
                    return d * f(t)
                gaps.append(np.max(np.abs(g_squared(fam, x, scaled) - base)))
            assert gaps[0] > gaps[1] > gaps[2]
            assert gaps[2] < 1e-5


class TestNoise:
    @pytest.mark.parametrize("kind, m4", [("gaussian", 3.0), ("uniform", 1.8)])
    def test_fourth_moment(self, kind, m4):
        d = NoiseDensity(kind)
        assert d.fourth_moment == m4
        xi = sample_noise(d, 10**6, rng_stream(1, d.stream_id))
        assert np.mean(xi) == pytest.approx(0, abs=5e-3)
        assert np.var(xi) == pytest.approx(1, rel=1e-2)
        assert np.mean(xi**4) == pytest.approx(m4, rel=0.02)

    def test_student(self):
        d = NoiseDensity.parse("student_t8")
        assert d.fourth_moment == pytest.approx(3 * 6 / 4)
        xi = sample_noise(d, 10**6, rng_stream(2, 0))
        assert np.var(xi) == pytest.approx(1, rel=2e-2)

    def test_parse(self):
        assert NoiseDensity.parse("Gaussian") == NoiseDensity("gaussian")
        assert NoiseDensity.parse("uniform").tag == "uniform"
        for bad in ("cauchy", "student_t", "t3"):
            with pytest.raises(ValueError):
                NoiseDensity.parse(bad)

    def test_streams_are_reproducible(self):
        a = sample_noise(NoiseDensity(), 50, rng_stream(7, 1, 2))
        b = sample_noise(NoiseDensity(), 50, rng_stream(7, 1, 2))
        c = sample_noise(NoiseDensity(), 50, rng_stream(7, 1, 3))
        np.testing.assert_array_equal(a, b)
        assert not np.array_equal(a, c)

    def test_seed_required(self):
        with pytest.raises(ValueError):
            rng_stream(None)


class TestLibrary:
    @pytest.mark.parametrize("name", LIBRARY)
    @pytest.mark.parametrize("k, r", [(1, 1.0), (2, 5.0), (1, 10.0)])
    def test_inside_ball(self, name, k, r):
        ball = SobolevBall(k, r)
        S = library_function(name, ball)
        value, inside = ellipsoid_membership(S.coeffs, ball)
        assert inside
        assert value == pytest.approx(r, rel=1e-12)

    def test_fill(self):
        S = library_function("S1", SobolevBall(1, 4.0), fill=0.25)
        assert S.ellipsoid_value(1) == pytest.approx(1.0, rel=1e-12)

    def test_s1_shape(self):
        S = library_function("S1", SobolevBall(1, 1.0))
        x = np.linspace(0, 1, 9)
        amp = S(0.25)
        np.testing.assert_allclose(S(x), amp * np.sin(2 * np.pi * x), atol=1e-14)

    def test_s3_zero_mean(self):
        S = library_function("S3", SobolevBall(1, 1.0))
        assert S.coeffs[0] == 0.0

    def test_derivative_matches_difference(self):
        S = library_function("S3", SobolevBall(1, 1.0))
        x = np.linspace(0.05, 0.95, 7)
        fd = (S(x + 1e-6) - S(x - 1e-6)) / 2e-6
        np.testing.assert_allclose(S.derivative(x), fd, atol=1e-6)

    def test_unknown(self):
        with pytest.raises(ValueError):
            library_function("S9", SobolevBall(1, 1.0))


class TestSimulate:
    def test_noiseless(self):
        S = library_function("S2", SobolevBall(1, 1.0))
        spec = ModelSpec(S, ScaleFamily.goldfeld_quandt(1, 1, 1), noise_scale=0.0)
        g = DesignGrid(51)
        np.testing.assert_array_equal(simulate(spec, g, rng_stream(0)), S(g.points))

    def test_pure_noise_variance(self):
        spec = ModelSpec(zero_function, ScaleFamily.goldfeld_quandt(1.0))
        y = simulate(spec, DesignGrid(1001), rng_stream(4))
        assert np.var(y) == pytest.approx(1.0, rel=0.05)

    def test_mean_recovers_S(self):
        S = library_function("S1", SobolevBall(1, 1.0))
        spec = ModelSpec(S, ScaleFamily.goldfeld_quandt(1, 1, 0.5), ball=SobolevBall(1, 1.0))
        g = DesignGrid(25)
        Y = simulate_batch(spec, g, 3, range(10**4))
        se = spec.sigma(g) / 100
        assert np.all(np.abs(Y.mean(axis=0) - S(g.points)) <= 4 * se)

    def test_batch_is_keyed(self):
        spec = ModelSpec(zero_function, ScaleFamily.goldfeld_quandt(1.0))
        g = DesignGrid(11)
        full = simulate_batch(spec, g, 9, range(6))
        part = simulate_batch(spec, g, 9, [4, 5])
        np.testing.assert_array_equal(full[4:], part)

    def test_outside_ball_rejected(self):
        S = library_function("S1", SobolevBall(1, 2.0))
        with pytest.raises(ValueError):
            ModelSpec(S, ScaleFamily.goldfeld_quandt(1.0), ball=SobolevBall(1, 1.0))
