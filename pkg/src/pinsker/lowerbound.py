"""Lower-bound laboratory: kernel priors, water-filling and the van Trees bound.

The least favourable prior is a sum of localized bumps.  The unit interval is
cut into ``M`` windows of half-width ``h`` centred at ``2 m h``; on window
``m`` the prior function is ``sum_j theta_{m,j} e_j(v) I_eta(v)`` with the
local coordinate ``v = (x - 2 m h) / h``, the trigonometric basis ``e_j`` of
``L_2[-1, 1]`` and a smooth cut-off ``I_eta``.  Prior standard deviations come
from the closed-form water-filling allocation, and the Bayes risk of any
estimator is bounded from below through the van Trees inequality.

Asymptotic statements are exercised as finite-``n`` ladders; nothing here
claims a limit has been reached.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad, simpson
from scipy.interpolate import CubicHermiteSpline
from scipy.stats import truncnorm

from .basis import SobolevBall
from .models import ScaleFamily, rng_stream, varsigma, zero_function
from .risk import gamma_k, worker_count

__all__ = [
    "KernelProfile",
    "PriorDesign",
    "PriorDraw",
    "BoundComponents",
    "BayesBound",
    "bump",
    "kernel_I",
    "e_basis",
    "e_bar",
    "waterfill",
    "j_value",
    "j_star",
    "min_feasible_budget",
    "pinsker_F",
    "pinsker_F_prime",
    "n_rule",
    "prior_design",
    "conditions_check",
    "prior_draw",
    "derivative_norm_sq",
    "van_trees_bound",
    "bound_components",
    "bayes_lower_bound",
    "lab_ladder",
    "pinsker_target",
]

_E_NODES = 2**14 + 1
_CDF_NODES = 4001


def _raw_bump(u):
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
    return out


_BUMP_MASS = quad(lambda u: math.exp(-1.0 / (1.0 - u * u)), -1.0, 1.0, epsabs=1e-14, epsrel=1e-14)[0]


def bump(u):
    """Smooth kernel ``exp(-1 / (1 - u^2))`` on ``(-1, 1)``, scaled to unit mass."""
    return _raw_bump(u) / _BUMP_MASS


def _build_bump_cdf() -> CubicHermiteSpline:
    # exact cell integrals by Gauss-Legendre, then Hermite interpolation using
    # the density itself as the derivative
    knots = np.linspace(-1.0, 1.0, _CDF_NODES)
    gx, gw = leggauss(12)
    mid = 0.5 * (knots[1:] + knots[:-1])
    half = 0.5 * np.diff(knots)
    cells = (bump(mid[:, None] + half[:, None] * gx[None, :]) * gw).sum(axis=1) * half
    cdf = np.concatenate([[0.0], np.cumsum(cells)])
    cdf /= cdf[-1]
    return CubicHermiteSpline(knots, cdf, bump(knots))


_BUMP_CDF = _build_bump_cdf()


def _bump_cdf(w):
    return _BUMP_CDF(np.clip(w, -1.0, 1.0))


@dataclass(frozen=True)
class KernelProfile:
    """Smooth plateau ``I_eta``: one on ``|x| <= 1 - 2 eta``, zero on ``|x| >= 1``."""

    eta: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.eta < 0.5:
            raise ValueError(f"eta must lie in (0, 1/2), got {self.eta}")

    def _limits(self, x):
        x = np.asarray(x, dtype=float)
        lo = (-1.0 + self.eta - x) / self.eta
        hi = (1.0 - self.eta - x) / self.eta
        return lo, hi

    def __call__(self, x):
        lo, hi = self._limits(x)
        return np.clip(_bump_cdf(hi) - _bump_cdf(lo), 0.0, 1.0)

    def derivative(self, x):
        lo, hi = self._limits(x)
        return (bump(lo) - bump(hi)) / self.eta


def kernel_I(profile: KernelProfile, x):
    """``I_eta(x) = eta^{-1} int 1{|u| <= 1 - eta} V((u - x) / eta) du``."""
    return profile(x)


def e_basis(j, v):
    """Trigonometric basis of ``L_2[-1, 1]``: ``1/sqrt 2``, then ``cos`` / ``sin`` of ``pi [j/2] v``."""
    j = np.asarray(j)
    if np.any(j < 1):
        raise ValueError("basis index must be >= 1")
    v = np.asarray(v, dtype=float)
    arg = np.pi * (j // 2) * v
    out = np.where(j % 2 == 0, np.cos(arg), np.sin(arg))
    return np.where(j == 1, 1.0 / math.sqrt(2.0), out)


def _e_basis_dv(j, v):
    j = np.asarray(j)
    freq = np.pi * (j // 2)
    arg = freq * np.asarray(v, dtype=float)
    out = np.where(j % 2 == 0, -freq * np.sin(arg), freq * np.cos(arg))
    return np.where(j == 1, 0.0, out)


_V_NODES = np.linspace(-1.0, 1.0, _E_NODES)


def e_bar(j, f, *, nodes: int = _E_NODES):
    """``int_{-1}^1 e_j(v)^2 f(v) dv`` by composite Simpson.

    ``f`` is a callable on ``[-1, 1]``; ``j`` may be an array of indices.
    """
    v = _V_NODES if nodes == _E_NODES else np.linspace(-1.0, 1.0, nodes)
    fv = np.asarray(f(v), dtype=float)
    j = np.atleast_1d(np.asarray(j))
    vals = simpson(e_basis(j[:, None], v[None, :]) ** 2 * fv[None, :], x=v, axis=-1)
    return vals if vals.size > 1 else float(vals[0])


# -- water-filling ------------------------------------------------------------


def _power_sums(N: int, k: int):
    j = np.arange(1, N + 1, dtype=float)
    return j, float(np.sum(j**k)), float(np.sum(j ** (2 * k)))


def min_feasible_budget(N: int, k: int) -> float:
    """Smallest budget keeping every water-filling level non-negative."""
    _, s1, s2 = _power_sums(N, k)
    return N**k * s1 - s2


def waterfill(N: int, k: int, R: float) -> np.ndarray:
    """Levels maximizing ``sum y_j / (y_j + 1)`` subject to ``sum y_j j^{2k} = R``.

    Closed form ``y_j = (R + sum j^{2k}) j^{-k} / sum j^k - 1``, valid once
    ``R`` is large enough for the last level to stay non-negative.
    """
    if N < 1 or k < 1:
        raise ValueError(f"need N >= 1 and k >= 1, got N={N}, k={k}")
    j, s1, s2 = _power_sums(N, k)
    r_min = N**k * s1 - s2
    if R < r_min * (1.0 - 1e-12):
        raise ValueError(f"budget R = {R!r} is infeasible; need R >= {r_min!r}")
    y = (R + s2) * j ** (-k) / s1 - 1.0
    return np.maximum(y, 0.0)


def j_value(y) -> float:
    """``J_N(y) = sum y_j / (y_j + 1)``."""
    y = np.asarray(y, dtype=float)
    return float(np.sum(y / (y + 1.0)))


def j_star(N: int, k: int, R: float) -> float:
    """Optimal value ``N - (sum j^k)^2 / (R + sum j^{2k})``."""
    _, s1, s2 = _power_sums(N, k)
    return N - s1**2 / (R + s2)


def pinsker_F(x, k: int, c_star: float):
    """Bandwidth profile ``1/x - (2k+1) / ((k+1)^2 (c (2k+1) x^{2k+2} + x))``."""
    x = np.asarray(x, dtype=float)
    return 1.0 / x - (2 * k + 1) / ((k + 1) ** 2 * (c_star * (2 * k + 1) * x ** (2 * k + 2) + x))


def pinsker_F_prime(x, k: int, c_star: float):
    """Derivative of :func:`pinsker_F`; never positive."""
    x = np.asarray(x, dtype=float)
    num = (c_star * (2 * k + 1) * (k + 1) * x ** (2 * k + 1) - k) ** 2
    den = (k + 1) ** 2 * (c_star * (2 * k + 1) * x ** (2 * k + 2) + x) ** 2
    return -num / den


# -- design -------------------------------------------------------------------


def n_rule(rule, n: int) -> int:
    """Number of basis terms per window.

    ``"polylog"`` gives ``ceil(ln^4 n) + 1``, ``"log"`` gives ``ceil(ln n) + 1``;
    an int is used as is and a callable is called with ``n``.
    """
    if callable(rule):
        N = rule(n)
    elif isinstance(rule, str):
        if rule == "polylog":
            N = math.ceil(math.log(n) ** 4) + 1
        elif rule == "log":
            N = math.ceil(math.log(n)) + 1
        else:
            raise ValueError(f"unknown N rule {rule!r}; use 'polylog', 'log', an int or a callable")
    else:
        N = rule
    if int(N) != N or N < 1:
        raise ValueError(f"N must be a positive integer, got {N!r}")
    return int(N)


@dataclass(frozen=True)
class PriorDesign:
    """Kernel prior with water-filled standard deviations ``t[m-1, j-1]``."""

    k: int
    r: float
    epsilon: float
    n: int
    N: int
    h: float
    M: int
    t: np.ndarray
    d: float
    budget: float
    levels: np.ndarray
    g0: np.ndarray
    g0_hat: float
    varsigma0: float
    c_star: float
    v_star: float
    h_star: float

    @property
    def centers(self) -> np.ndarray:
        return 2.0 * self.h * np.arange(1, self.M + 1)

    @property
    def t_star(self) -> float:
        """``max_m sum_j t_{m,j}``."""
        return float(self.t.sum(axis=1).max()) if self.t.size else 0.0

    def with_t(self, t) -> "PriorDesign":
        """Same geometry with a replaced standard-deviation matrix (test hook)."""
        t = np.asarray(t, dtype=float)
        if t.shape != (self.M, self.N):
            raise ValueError(f"t must have shape {(self.M, self.N)}, got {t.shape}")
        return PriorDesign(**{**self.__dict__, "t": t})


def prior_design(
    k: int,
    r: float,
    epsilon: float,
    n: int,
    N_rule="polylog",
    scale: ScaleFamily | None = None,
) -> PriorDesign:
    """Bandwidth, window count and prior scales of the least favourable design.

    ``scale`` defaults to the constant unit scale; its value at the zero
    function gives ``g0``.
    """
    SobolevBall(k, r)
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    scale = scale if scale is not None else ScaleFamily.goldfeld_quandt(1.0)
    N = n_rule(N_rule, n)
    s0 = varsigma(scale, zero_function)
    c_star = 2.0 ** (2 * k + 1) * (1.0 - epsilon) * r / (math.pi ** (2 * k) * s0)
    v_star = k / (c_star * (k + 1) * (2 * k + 1))
    h_star = v_star ** (1.0 / (2 * k + 1))
    h = h_star * n ** (-1.0 / (2 * k + 1)) * N
    M = math.floor(1.0 / (2.0 * h)) - 1 if h < 0.5 else 0
    if M < 1:
        raise ValueError(
            f"no room for a window: h = {h:.6g} gives M = {M} at n = {n}, N = {N}; "
            "use a smaller N rule or a larger radius"
        )
    centers = 2.0 * h * np.arange(1, M + 1)
    g0_sq = np.asarray(scale.G(centers, np.zeros_like(centers)), dtype=float) + scale.volume_term(zero_function)
    g0 = np.sqrt(g0_sq)
    g0_hat = 2.0 * h * float(np.sum(g0_sq))
    budget = 2.0 ** (2 * k + 1) * (1.0 - epsilon) * r * n * h ** (2 * k + 1) / (math.pi ** (2 * k) * g0_hat)
    levels = waterfill(N, k, budget)
    t = g0[:, None] * np.sqrt(levels[None, :] / (n * h))
    return PriorDesign(
        k=k, r=float(r), epsilon=float(epsilon), n=int(n), N=N, h=h, M=M, t=t,
        d=math.sqrt(N), budget=budget, levels=levels, g0=g0, g0_hat=g0_hat,
        varsigma0=s0, c_star=c_star, v_star=v_star, h_star=h_star,
    )


def conditions_check(design: PriorDesign, eps0: float = 0.5) -> dict:
    """Finite-``n`` values of the sums behind the prior regularity conditions.

    Returns the two smallness quantities, the budget sum with its target and
    pass flag, and the fourth-moment sum with exponent ``eps0``.
    """
    k, h, t = design.k, design.h, design.t
    j = np.arange(1, design.N + 1, dtype=float)
    t2 = t**2
    a2_sum = design.d / h ** (2 * k - 1) * float(np.sum(t2 * j ** (2 * (k - 1))))
    a2_sup = math.sqrt(design.d) * design.t_star
    a3_sum = float(np.sum(t2 * j ** (2 * k))) / h ** (2 * k - 1)
    a3_target = (1.0 - design.epsilon) * design.r * (2.0 / math.pi) ** (2 * k)
    a4_sum = float(np.sum(t2**2 * j ** (4 * k))) / h ** (4 * k - 2 + eps0)
    return {
        "N": design.N,
        "h": h,
        "M": design.M,
        "a2_sum": a2_sum,
        "a2_sup": a2_sup,
        "a3_sum": a3_sum,
        "a3_target": a3_target,
        "a3_pass": a3_sum <= a3_target * (1.0 + 1e-2),
        "a4_sum": a4_sum,
    }


# -- prior draws --------------------------------------------------------------


def _window(design: PriorDesign, x):
    """Window index (0-based, -1 outside) and local coordinate of each point."""
    x = np.asarray(x, dtype=float)
    m = np.rint(x / (2.0 * design.h)).astype(int)
    v = (x - 2.0 * design.h * m) / design.h
    inside = (m >= 1) & (m <= design.M) & (np.abs(v) < 1.0)
    return np.where(inside, m - 1, -1), np.where(inside, v, 0.0)


def _design_columns(design: PriorDesign, profile: KernelProfile, v):
    j = np.arange(1, design.N + 1)
    return e_basis(j[None, :], v[:, None]) * profile(v)[:, None]


@dataclass(frozen=True)
class PriorDraw:
    """One prior function ``sum_{m,j} theta_{m,j} D_{m,j}(x)``."""

    design: PriorDesign
    profile: KernelProfile
    theta: np.ndarray
    zeta: np.ndarray

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        m, v = _window(self.design, x.ravel())
        out = np.zeros(m.shape)
        sel = m >= 0
        if np.any(sel):
            cols = _design_columns(self.design, self.profile, v[sel])
            out[sel] = np.sum(self.theta[m[sel]] * cols, axis=1)
        return out.reshape(x.shape)

    def derivative(self, x):
        """First derivative in ``x``."""
        x = np.asarray(x, dtype=float)
        m, v = _window(self.design, x.ravel())
        out = np.zeros(m.shape)
        sel = m >= 0
        if np.any(sel):
            vs = v[sel]
            j = np.arange(1, self.design.N + 1)[None, :]
            cols = (
                _e_basis_dv(j, vs[:, None]) * self.profile(vs)[:, None]
                + e_basis(j, vs[:, None]) * self.profile.derivative(vs)[:, None]
            )
            out[sel] = np.sum(self.theta[m[sel]] * cols, axis=1) / self.design.h
        return out.reshape(x.shape)

    @property
    def in_truncation_event(self) -> bool:
        return bool(np.all(self.zeta**2 <= self.design.d))

    @property
    def sup_bound(self) -> float:
        """``sqrt(d) t*``, the sup-norm ceiling on the truncation event."""
        return math.sqrt(self.design.d) * self.design.t_star


def prior_draw(
    design: PriorDesign, profile: KernelProfile, rng: np.random.Generator, *, truncate: bool = True
) -> PriorDraw:
    """Draw ``theta_{m,j} = t_{m,j} zeta_{m,j}``.

    With ``truncate`` the multipliers are standard normal conditioned on
    ``zeta^2 <= d``, i.e. the prior restricted to the truncation event.
    """
    shape = design.t.shape
    if truncate:
        b = math.sqrt(design.d)
        zeta = truncnorm.rvs(-b, b, size=shape, random_state=rng)
    else:
        zeta = rng.standard_normal(shape)
    zeta = np.asarray(zeta, dtype=float).reshape(shape)
    return PriorDraw(design, profile, design.t * zeta, zeta)


def derivative_norm_sq(draw: PriorDraw, k: int | None = None, *, points: int = 2**14) -> float:
    """``||S^{(k)}||^2`` on ``[0, 1]`` with the derivative taken by finite differences."""
    k = draw.design.k if k is None else k
    x = np.linspace(0.0, 1.0, points + 1)
    f = draw(x)
    for _ in range(k):
        f = np.gradient(f, x, edge_order=2)
    return float(simpson(f**2, x=x))


# -- van Trees bound ------------------------------------------------------------


def van_trees_bound(Lambda, F, B, I_prior):
    """``Lambda^2 / (F + B + I)``: Bayes risk floor for estimating ``lambda(theta)``."""
    den = np.asarray(F, dtype=float) + np.asarray(B, dtype=float) + np.asarray(I_prior, dtype=float)
    if np.any(den <= 0) or not np.all(np.isfinite(den)):
        raise ValueError("van Trees denominator F + B + I must be positive and finite")
    out = np.asarray(Lambda, dtype=float) ** 2 / den
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BoundComponents:
    """Data information ``F``, scale-sensitivity term ``B`` and prior information per ``(m, j)``."""

    F: np.ndarray
    B: np.ndarray
    fisher_prior: np.ndarray
    lambda_grad: np.ndarray
    nh: float
    draws: int

    @property
    def F_ratio(self) -> np.ndarray:
        return self.F / self.nh

    @property
    def B_ratio(self) -> np.ndarray:
        return self.B / self.nh


def _component_sums(design, profile, scale, blocks, seeds, x):
    """Partial sums of ``g^-2`` per point and of the ``B`` integrand over a batch of draws."""
    n = x.size
    Fs = [np.zeros(len(idx)) for idx, _ in blocks]
    Bs = np.zeros((design.M, design.N))
    for seed_key in seeds:
        draw = prior_draw(design, profile, rng_stream(*seed_key))
        S = np.zeros(n)
        for m, (idx, cols) in enumerate(blocks):
            S[idx] = cols @ draw.theta[m]
        vol = float(np.mean(scale.V(S))) if scale.V is not None else 0.0
        g2 = scale.G(x, S) + vol
        if np.any(g2 <= 0):
            raise FloatingPointError("non-positive squared scale on a prior draw")
        inv_g4 = 1.0 / g2**2
        a = scale.G_y(x, S)
        vdot = scale.V_dot(S) if scale.V_dot is not None else None
        total_inv_g4 = float(np.sum(inv_g4))
        for m, (idx, cols) in enumerate(blocks):
            Fs[m] += 1.0 / g2[idx]
            P = a[idx] ** 2 * inv_g4[idx]
            Bs[m] += P @ cols**2
            if vdot is not None:
                c = (vdot[idx] @ cols) / n  # sieve Riemann sum of int V'(S) D
                Q = a[idx] * inv_g4[idx]
                Bs[m] += 2.0 * c * (Q @ cols) + c**2 * total_inv_g4
    return Fs, Bs


def bound_components(
    design: PriorDesign,
    profile: KernelProfile,
    scale: ScaleFamily | None = None,
    draws: int = 200,
    seed: int = 0,
    workers: int | None = None,
) -> BoundComponents:
    """Information terms of the van Trees bound on the sieve ``i / n``.

    Expectations over the prior are Monte Carlo averages over ``draws``
    truncated prior draws; for a scale that ignores ``S`` they are exact and
    ``B`` is identically zero.
    """
    if draws < 1:
        raise ValueError(f"draws must be >= 1, got {draws}")
    scale = scale if scale is not None else ScaleFamily.goldfeld_quandt(1.0)
    n = design.n
    x = np.arange(1, n + 1, dtype=float) / n
    m_of, v = _window(design, x)
    blocks = []
    for m in range(design.M):
        idx = np.flatnonzero(m_of == m)
        blocks.append((idx, _design_columns(design, profile, v[idx])))

    F = np.zeros((design.M, design.N))
    B = np.zeros((design.M, design.N))
    if not scale.depends_on_s:
        vol = scale.volume_term(zero_function)
        for m, (idx, cols) in enumerate(blocks):
            F[m] = (1.0 / (scale.G(x[idx], np.zeros(idx.size)) + vol)) @ cols**2
    else:
        keys = [(seed, 11, i) for i in range(draws)]
        chunks = [keys[i : i + 25] for i in range(0, draws, 25)]
        with ThreadPoolExecutor(max_workers=worker_count(workers)) as pool:
            parts = list(pool.map(lambda c: _component_sums(design, profile, scale, blocks, c, x), chunks))
        # fixed reduction order keeps the result independent of scheduling
        for Fs, Bs in parts:
            for m, (idx, cols) in enumerate(blocks):
                F[m] += Fs[m] @ cols**2
            B += Bs
        F /= draws
        B *= 0.5 / draws

    with np.errstate(divide="ignore"):
        fisher_prior = 1.0 / design.t**2
    j = np.arange(1, design.N + 1)
    lam = math.sqrt(design.h) * np.atleast_1d(e_bar(j, profile))
    return BoundComponents(F, B, fisher_prior, lam, n * design.h, draws)


@dataclass(frozen=True)
class BayesBound:
    """Bayes risk lower bound in the double-sum and the simplified ``y/(y+1)`` forms."""

    double_sum: float
    tau_form: float
    n: int
    k: int

    @property
    def normalized(self) -> float:
        """``n^{2k/(2k+1)}`` times the double-sum bound."""
        return self.n ** (2 * self.k / (2 * self.k + 1)) * self.double_sum

    @property
    def normalized_tau(self) -> float:
        return self.n ** (2 * self.k / (2 * self.k + 1)) * self.tau_form


def bayes_lower_bound(design: PriorDesign, profile: KernelProfile, components: BoundComponents) -> BayesBound:
    """Sum of per-coefficient van Trees bounds, and its simplified counterpart.

    Entries with ``t = 0`` carry infinite prior information and contribute zero.
    """
    lam = np.broadcast_to(components.lambda_grad[None, :], design.t.shape)
    den = components.F + components.B + components.fisher_prior
    with np.errstate(invalid="ignore", divide="ignore"):
        terms = np.where(np.isfinite(den), lam**2 / den, 0.0)
    kappa_sq = design.n * design.h * design.t**2 / design.g0[:, None] ** 2
    tau = np.sum(design.g0**2 * np.sum(kappa_sq / (kappa_sq + 1.0), axis=1)) / design.n
    return BayesBound(float(np.sum(terms)), float(tau), design.n, design.k)


def pinsker_target(design: PriorDesign) -> float:
    """``(1 - eps)^{1/(2k+1)} gamma_k(S_0)``, the limit the normalized bound approaches."""
    ball = SobolevBall(design.k, design.r)
    return (1.0 - design.epsilon) ** (1.0 / (2 * design.k + 1)) * gamma_k(ball, design.varsigma0)


def lab_ladder(
    ns,
    k: int = 1,
    r: float = 100.0,
    epsilon: float = 0.1,
    eta: float = 0.05,
    N_rule="log",
    scale: ScaleFamily | None = None,
    draws: int = 200,
    seed: int = 0,
    eps0: float = 0.5,
    workers: int | None = None,
) -> list[dict]:
    """Long-format rows ``{n, quantity, value}`` for the lower-bound diagnostics across ``ns``."""
    profile = KernelProfile(eta)
    scale = scale if scale is not None else ScaleFamily.goldfeld_quandt(1.0)
    rows = []
    for n in ns:
        design = prior_design(k, r, epsilon, n, N_rule, scale)
        cond = conditions_check(design, eps0)
        comp = bound_components(design, profile, scale, draws, seed, workers)
        bound = bayes_lower_bound(design, profile, comp)
        e_sq = np.atleast_1d(e_bar(np.arange(1, design.N + 1), lambda v: profile(v) ** 2))
        f_dev = np.max(np.abs(comp.F_ratio - e_sq[None, :] / design.g0[:, None] ** 2))
        target = pinsker_target(design)
        values = {
            "N": cond["N"],
            "h": cond["h"],
            "M": cond["M"],
            "budget": design.budget,
            "a2_sum": cond["a2_sum"],
            "a2_sup": cond["a2_sup"],
            "a3_sum": cond["a3_sum"],
            "a3_target": cond["a3_target"],
            "a4_sum": cond["a4_sum"],
            "F_ratio_dev": float(f_dev),
            "B_ratio_max": float(np.max(np.abs(comp.B_ratio))),
            "bound": bound.double_sum,
            "bound_tau": bound.tau_form,
            "normalized_bound": bound.normalized,
            "target": target,
            "efficiency": bound.normalized / target,
        }
        rows.extend({"n": n, "quantity": q, "value": v} for q, v in values.items())
    return rows
