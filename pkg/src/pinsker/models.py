"""Data-generating side of the heteroscedastic model ``y_j = S(x_j) + g(x_j, S) xi_j``.

Scale families follow ``g^2(x, S) = G(x, S(x)) + int_0^1 V(S(t)) dt``; the
Goldfeld-Quandt form ``c0 + c1 x + c2 S(x)^2`` is the special case
``G = c0 + c1 x + c2 y^2``, ``V = 0``.  Functions ``S`` are plain vectorised
callables on ``[0, 1]``.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from .basis import QUAD_NODES, DesignGrid, SobolevBall, ellipsoid_membership, phi, sobolev_coeff

__all__ = [
    "ScaleFamily",
    "NoiseDensity",
    "TestFunction",
    "ModelSpec",
    "rng_stream",
    "scale_value",
    "g_squared",
    "varsigma",
    "riemann_gap",
    "frechet_L",
    "frechet_bound",
    "sample_noise",
    "simulate",
    "simulate_batch",
    "library_function",
    "zero_function",
    "LIBRARY",
]

Func = Callable[[np.ndarray], np.ndarray]

_QUAD_T = np.linspace(0.0, 1.0, QUAD_NODES)


def _integrate01(values) -> float:
    return float(simpson(values, x=_QUAD_T))


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for ``(seed, *key)``.

    Streams are keyed rather than spawned sequentially, so the draws for a
    given replication do not depend on how many other replications ran first
    or on which worker ran them.
    """
    if seed is None:
        raise ValueError("an explicit seed is required")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


# ---------------------------------------------------------------------------
# scale families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScaleFamily:
    """Squared scale ``g^2(x, S) = G(x, S(x)) + int V(S)``.

    ``G_y`` and ``V_dot`` are the partial derivatives needed for the Frechet
    derivative.  ``g_prime_star`` bounds ``|G_y(x, y)| / |y|`` and
    ``v_prime_star`` bounds ``|V'(y)| / (1 + |y|)``; their sum is the
    constant of the linear-growth bound on the derivative.
    """

    G: Callable[[np.ndarray, np.ndarray], np.ndarray]
    G_y: Callable[[np.ndarray, np.ndarray], np.ndarray]
    V: Callable[[np.ndarray], np.ndarray] | None = None
    V_dot: Callable[[np.ndarray], np.ndarray] | None = None
    g_prime_star: float = math.inf
    v_prime_star: float = 0.0
    kind: str = "general"
    params: dict = field(default_factory=dict)
    depends_on_s: bool = True

    @classmethod
    def goldfeld_quandt(cls, c0: float, c1: float = 0.0, c2: float = 0.0) -> "ScaleFamily":
        """``g^2 = c0 + c1 x + c2 S(x)^2`` with ``c0 > 0`` and ``c1, c2 >= 0``."""
        fam = cls.quadratic(c0, c1, c2, 0.0)
        return ScaleFamily(
            fam.G, fam.G_y, None, None, fam.g_prime_star, 0.0,
            "goldfeld_quandt", {"c0": c0, "c1": c1, "c2": c2}, c2 != 0.0,
        )

    @classmethod
    def quadratic(cls, c0: float, c1: float = 0.0, c2: float = 0.0, c3: float = 0.0) -> "ScaleFamily":
        """``G = c0 + c1 x + c2 y^2`` and ``V = c3 y^2``."""
        if not c0 > 0:
            raise ValueError(f"c0 must be positive, got {c0}")
        for name, c in (("c1", c1), ("c2", c2), ("c3", c3)):
            if c < 0:
                raise ValueError(f"{name} must be non-negative, got {c}")
        c0, c1, c2, c3 = float(c0), float(c1), float(c2), float(c3)

        def G(x, y):
            return c0 + c1 * np.asarray(x, dtype=float) + c2 * np.asarray(y, dtype=float) ** 2

        def G_y(x, y):
            return np.broadcast_to(2.0 * c2 * np.asarray(y, dtype=float), np.broadcast(x, y).shape)

        V = V_dot = None
        if c3:
            def V(y):
                return c3 * np.asarray(y, dtype=float) ** 2

            def V_dot(y):
                return 2.0 * c3 * np.asarray(y, dtype=float)

        return cls(
            G, G_y, V, V_dot, 2.0 * c2, 2.0 * c3, "quadratic",
            {"c0": c0, "c1": c1, "c2": c2, "c3": c3}, bool(c2 or c3),
        )

    def volume_term(self, S: Func) -> float:
        """``int_0^1 V(S(t)) dt`` (zero when there is no ``V``)."""
        if self.V is None:
            return 0.0
        return _integrate01(self.V(S(_QUAD_T)))


def g_squared(family: ScaleFamily, x, S: Func) -> np.ndarray:
    """``g^2(x, S)`` at points ``x``."""
    x = np.asarray(x, dtype=float)
    out = family.G(x, S(x)) + family.volume_term(S)
    return np.asarray(out, dtype=float)


def scale_value(family: ScaleFamily, x, S: Func):
    """``g(x, S)``; raises if the squared scale is not strictly positive."""
    g2 = g_squared(family, x, S)
    if np.any(g2 <= 0) or not np.all(np.isfinite(g2)):
        raise ValueError("squared scale must be finite and strictly positive")
    out = np.sqrt(g2)
    return out[()] if out.ndim == 0 else out


def varsigma(family: ScaleFamily, S: Func) -> float:
    """Average noise level ``int_0^1 g^2(x, S) dx`` (Simpson quadrature)."""
    return _integrate01(g_squared(family, _QUAD_T, S))


def riemann_gap(family: ScaleFamily, S: Func, n: int) -> float:
    """``|n^{-1} sum_j g^2(j/n, S) - varsigma(S)|``."""
    x = np.arange(1, n + 1, dtype=float) / n
    return abs(float(np.mean(g_squared(family, x, S))) - varsigma(family, S))


def frechet_L(family: ScaleFamily, x, S: Func, f: Func):
    """Derivative of ``g^2(x, .)`` at ``S`` in direction ``f``.

    ``G_y(x, S(x)) f(x) + int_0^1 V'(S(t)) f(t) dt``.
    """
    x = np.asarray(x, dtype=float)
    out = family.G_y(x, S(x)) * f(x)
    if family.V_dot is not None:
        out = out + _integrate01(family.V_dot(S(_QUAD_T)) * f(_QUAD_T))
    out = np.asarray(out, dtype=float)
    return out[()] if out.ndim == 0 else out


def frechet_bound(family: ScaleFamily, x, S: Func, f: Func):
    """Right-hand side ``C* (|S(x) f(x)| + |f|_1 + ||S|| ||f||)`` of the growth bound."""
    x = np.asarray(x, dtype=float)
    c_star = family.g_prime_star + family.v_prime_star
    st, ft = S(_QUAD_T), f(_QUAD_T)
    l1 = _integrate01(np.abs(ft))
    l2 = math.sqrt(_integrate01(st**2)) * math.sqrt(_integrate01(ft**2))
    return c_star * (np.abs(S(x) * f(x)) + l1 + l2)


# ---------------------------------------------------------------------------
# noise
# ---------------------------------------------------------------------------

_NOISE_KINDS = ("gaussian", "uniform", "student_t")


@dataclass(frozen=True)
class NoiseDensity:
    """Centered unit-variance noise law.

    ``kind`` is ``"gaussian"``, ``"uniform"`` (on ``[-sqrt 3, sqrt 3]``) or
    ``"student_t"`` rescaled to unit variance (``nu >= 5``).
    """

    kind: str = "gaussian"
    nu: float | None = None

    def __post_init__(self):
        if self.kind not in _NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}; expected one of {_NOISE_KINDS}")
        if self.kind == "student_t":
            if self.nu is None or self.nu < 5:
                raise ValueError("student_t noise needs nu >= 5 for a controlled fourth moment")
        elif self.nu is not None:
            raise ValueError(f"nu only applies to student_t noise, not {self.kind}")

    @property
    def tag(self) -> str:
        return self.kind if self.kind != "student_t" else f"student_t{self.nu:g}"

    @property
    def fourth_moment(self) -> float:
        if self.kind == "gaussian":
            return 3.0
        if self.kind == "uniform":
            return 9.0 / 5.0
        nu = self.nu
        return 3.0 * (nu - 2.0) / (nu - 4.0)

    @property
    def stream_id(self) -> int:
        return zlib.crc32(self.tag.encode())

    @classmethod
    def parse(cls, tag: str) -> "NoiseDensity":
        tag = tag.strip().lower()
        if tag in ("gaussian", "normal"):
            return cls("gaussian")
        if tag in ("uniform", "scaled_uniform"):
            return cls("uniform")
        if tag.startswith("student_t") or tag.startswith("t"):
            digits = tag.removeprefix("student_t").removeprefix("t").lstrip("_:")
            if not digits:
                raise ValueError(f"student_t noise tag needs degrees of freedom: {tag!r}")
            return cls("student_t", float(digits))
        raise ValueError(f"unknown noise tag {tag!r}")


def sample_noise(density: NoiseDensity, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` i.i.d. standardized draws from ``density``."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    if density.kind == "gaussian":
        return rng.standard_normal(count)
    if density.kind == "uniform":
        a = math.sqrt(3.0)
        return rng.uniform(-a, a, count)
    nu = density.nu
    return rng.standard_t(nu, count) / math.sqrt(nu / (nu - 2.0))


# ---------------------------------------------------------------------------
# test functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """Finite trigonometric series ``sum_j c_j phi_j`` with exact ``L2`` coefficients."""

    name: str
    coeffs: np.ndarray  # c_1 .. c_J in the phi basis

    __test__ = False  # keep pytest from collecting this class

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = np.arange(1, self.coeffs.size + 1)
        return np.tensordot(phi(j, x[..., None]), self.coeffs, axes=([-1], [0]))

    def derivative(self, x, order: int = 1):
        x = np.asarray(x, dtype=float)
        j = np.arange(1, self.coeffs.size + 1)
        w = 2.0 * np.pi * (j // 2)
        # d/dx of sqrt2 cos(wx) / sqrt2 sin(wx) cycles through a phase shift
        phase = np.where(j % 2 == 0, 0.5 * np.pi, 0.0)
        vals = np.sqrt(2.0) * w**order * np.sin(w * x[..., None] + phase + 0.5 * np.pi * order)
        vals = np.where(j == 1, 1.0 if order == 0 else 0.0, vals)
        return np.tensordot(vals, self.coeffs, axes=([-1], [0]))

    def ellipsoid_value(self, k: int) -> float:
        j = np.arange(1, self.coeffs.size + 1)
        return float(np.sum(sobolev_coeff(j, k) * self.coeffs**2))


def _shape_s1():
    c = np.zeros(3)
    c[2] = 1.0 / math.sqrt(2.0)  # sin(2 pi x) = phi_3 / sqrt2
    return c


def _shape_s2():
    c = np.zeros(4)
    c[2] = 1.0 / math.sqrt(2.0)
    c[3] = 0.5 / math.sqrt(2.0)  # 0.5 cos(4 pi x) = 0.5 phi_4 / sqrt2
    return c


def _shape_s3(k: int, terms: int = 15, seed: int = 20070901):
    rng = np.random.default_rng(seed)
    j = np.arange(1, terms + 1)
    c = rng.standard_normal(terms) / sobolev_coeff(j, k)
    # the mean costs nothing in the ellipsoid (a_1 = 1) and would soak up the radius
    c[0] = 0.0
    return c


LIBRARY = ("S1", "S2", "S3")


def library_function(name: str, ball: SobolevBall, fill: float = 1.0) -> TestFunction:
    """Library function scaled so its ellipsoid value is ``fill * r``.

    ``S1 = A sin 2 pi x``; ``S2 = A (sin 2 pi x + cos(4 pi x)/2)``; ``S3`` is a
    15-term zero-mean series with Gaussian coefficients damped by ``1/a_j``
    (fixed seed).
    """
    if not 0 < fill <= 1:
        raise ValueError(f"fill must lie in (0, 1], got {fill}")
    shapes = {"S1": _shape_s1, "S2": _shape_s2, "S3": lambda: _shape_s3(ball.k)}
    try:
        shape = shapes[name]()
    except KeyError:
        raise ValueError(f"unknown library function {name!r}; expected one of {LIBRARY}") from None
    base = TestFunction(name, shape).ellipsoid_value(ball.k)
    amp = math.sqrt(fill * ball.r / base)
    return TestFunction(name, shape * amp)


def zero_function(x):
    return np.zeros_like(np.asarray(x, dtype=float))


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelSpec:
    """Regression function, scale family, noise law and the ball ``S`` lives in."""

    S: Func
    scale: ScaleFamily
    noise: NoiseDensity = field(default_factory=NoiseDensity)
    ball: SobolevBall | None = None
    noise_scale: float = 1.0  # 0 switches the noise off (test hook)

    def __post_init__(self):
        if isinstance(self.S, TestFunction) and self.ball is not None:
            value, inside = ellipsoid_membership(self.S.coeffs, self.ball)
            if not inside:
                raise ValueError(
                    f"{self.S.name} has ellipsoid value {value:.6g} > r = {self.ball.r}"
                )
        g2_min = float(np.min(g_squared(self.scale, _QUAD_T, self.S)))
        if not g2_min > 0:
            raise ValueError(f"squared scale must be positive, min is {g2_min}")

    def with_noise(self, noise: NoiseDensity) -> "ModelSpec":
        return ModelSpec(self.S, self.scale, noise, self.ball, self.noise_scale)

    @property
    def varsigma(self) -> float:
        return varsigma(self.scale, self.S)

    def sigma(self, grid: DesignGrid) -> np.ndarray:
        return scale_value(self.scale, grid.points, self.S)


def simulate(spec: ModelSpec, grid: DesignGrid, rng: np.random.Generator) -> np.ndarray:
    """One sample ``y_j = S(x_j) + g(x_j, S) xi_j``."""
    x = grid.points
    xi = sample_noise(spec.noise, grid.n, rng)
    return spec.S(x) + spec.noise_scale * spec.sigma(grid) * xi


def simulate_batch(spec: ModelSpec, grid: DesignGrid, seed: int, reps, stream: int = 0) -> np.ndarray:
    """Samples for the replication ids in ``reps``, one keyed stream each."""
    x = grid.points
    s = spec.S(x)
    sig = spec.noise_scale * spec.sigma(grid)
    out = np.empty((len(reps), grid.n))
    for row, rep in enumerate(reps):
        out[row] = s + sig * sample_noise(spec.noise, grid.n, rng_stream(seed, stream, rep))
    return out
