"""Acceptance suite: one test per criterion, each printing a single PASS/FAIL line.

Every criterion is evaluated at its stated tolerance; the verdict line is
emitted before the assertion so failures are still reported.
"""

import math
import time

import numpy as np
import pytest
from mpmath import mp, mpf, pi as mpi
from scipy.optimize import brentq

from _acceptance_log import verdict
from pinsker.basis import DesignGrid, SobolevBall, basis_matrix, fourier_transform, phi
from pinsker.cli import main
from pinsker.lowerbound import (
    KernelProfile,
    bayes_lower_bound,
    bound_components,
    conditions_check,
    prior_design,
    e_bar,
    j_star,
    j_value,
    min_feasible_budget,
    pinsker_target,
    van_trees_bound,
    waterfill,
)
from pinsker.models import LIBRARY, ModelSpec, NoiseDensity, ScaleFamily, library_function, varsigma
from pinsker.risk import efficiency_curve, gamma_k, oracle_gap, pinsker_constant
from pinsker.selector import kappa, rho
from pinsker.weights import a_beta

DENSITIES = (NoiseDensity("gaussian"), NoiseDensity("uniform"))
GQ = ScaleFamily.goldfeld_quandt(1.0, 1.0, 0.5)


# 1 ---------------------------------------------------------------------------------


def test_criterion_1_basis_exactness():
    start = time.perf_counter()
    worst = 0.0
    for n in (25, 51, 101):
        P = basis_matrix(DesignGrid(n))
        worst = max(worst, float(np.max(np.abs(P.T @ P / n - np.eye(n)))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 5
    verdict(1, "basis exactness", ok, f"max |gram - I| = {worst:.2e} (<= 1e-9), {elapsed:.2f}s (< 5s)")
    assert ok


# 2 ---------------------------------------------------------------------------------


def test_criterion_2_coefficient_bounds():
    start = time.perf_counter()
    r, k = 1.0, 1
    ball = SobolevBall(k, r)
    violations = checks = 0
    for n in (25, 101, 501):
        g = DesignGrid(n)
        j = np.arange(1, n + 1)
        for name in LIBRARY:
            S = library_function(name, ball)
            th = fourier_transform(S(g.points), g).values
            true = np.zeros(n)
            true[: min(n, S.coeffs.size)] = S.coeffs[:n]
            # discrete vs continuous coefficients
            violations += int(np.sum(np.abs(th - true) > 2 * math.pi * math.sqrt(r) * j / n))
            # tail energy
            tails = np.cumsum((th**2)[::-1])[::-1]
            m = np.arange(1, n)
            violations += int(np.sum(m ** (2 * k) * tails[m] > 4 * r / math.pi ** (2 * (k - 1))))
            checks += 2 * n - 1
        # partial sums of l^m (phi_l^2 - 1), uniformly over x
        x = np.linspace(0, 1, 2001)
        l = np.arange(2, n + 1)
        dev = phi(l[:, None], x[None, :]) ** 2 - 1.0
        for p in (0, 1, 2):
            partial = np.cumsum(l[:, None] ** p * dev, axis=0)
            violations += int(np.sum(np.abs(partial) > 2.0**p * l[:, None].astype(float) ** p + 1e-9))
            checks += partial.size
    elapsed = time.perf_counter() - start
    ok = violations == 0 and elapsed < 30
    verdict(2, "coefficient and partial-sum bounds", ok, f"{violations} violations in {checks} checks, {elapsed:.2f}s (< 30s)")
    assert ok


# 3 ---------------------------------------------------------------------------------


def test_criterion_3_closed_forms():
    mp.dps = 50
    errs = {}
    errs["A_beta"] = max(
        abs(a_beta(b) - float((b + 1) * (2 * b + 1) / (mpi ** (2 * b) * b))) for b in range(1, 6)
    )
    errs["kappa"] = max(
        abs(kappa(p) - float((6 * mpf(p) - 2 * mpf(p) ** 2) / (1 - 3 * mpf(p)))) for p in (0.01, 0.1, 0.3)
    )

    def hp_gamma_star(k):
        q = 2 * k + 1
        return mpf(q) ** (mpf(1) / q) * (mpf(k) / (mpi * (k + 1))) ** (mpf(2 * k) / q)

    errs["Gamma*_k"] = max(abs(pinsker_constant(k) - float(hp_gamma_star(k))) for k in (1, 2, 3))
    gk = 0.0
    for k in (1, 2, 3):
        ball = SobolevBall(k, 2.0)
        S = library_function("S2", ball)
        vs = varsigma(GQ, S)
        q = 2 * k + 1
        hp = hp_gamma_star(k) * mpf(2) ** (mpf(1) / q) * mpf(vs) ** (mpf(2 * k) / q)
        gk = max(gk, abs(gamma_k(ball, vs) - float(hp)))
    errs["gamma_k(S)"] = gk
    d = prior_design(1, 1.0, 0.5, 10**4, N_rule=1)
    c = mpf(2) ** 3 * mpf("0.5") / mpi**2
    v = 1 / (c * 2 * 3)
    errs["c*"] = abs(d.c_star - float(c))
    errs["v*"] = abs(d.v_star - float(v))
    errs["h*"] = abs(d.h_star - float(v ** (mpf(1) / 3)))
    worst = max(errs, key=errs.get)
    ok = all(e <= 1e-10 for e in errs.values())
    verdict(3, "closed-form formulas", ok, f"max error {errs[worst]:.1e} ({worst}) over {len(errs)} groups (<= 1e-10)")
    assert ok


# 4 ---------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_4_oracle_gap():
    # radius tuned so the library function is not dominated by the shrinkage floor at n = 101
    ball = SobolevBall(1, 5.0)
    spec = ModelSpec(library_function("S1", ball), GQ, ball=ball)
    n = 101
    start = time.perf_counter()
    gap = oracle_gap(spec, n, 500, 404, DENSITIES, gamma=2.0)
    elapsed = time.perf_counter() - start
    bound = 1.5 * gap.best_candidate_risk + 10 / n
    ok = gap.selector_risk <= bound and 1.5 > 1 + kappa(rho(n, 2.0)) and elapsed < 300
    verdict(4, "oracle-gap surrogate", ok,
            f"selector {gap.selector_risk:.5f} <= 1.5*{gap.best_candidate_risk:.5f} + 10/n = {bound:.5f} "
            f"(ratio {gap.ratio:.3f}, 1+kappa {1 + gap.kappa:.3f}), {elapsed:.1f}s")
    assert ok


# 5 ---------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_5_efficiency_trend():
    ball = SobolevBall(1, 10.0)
    spec = ModelSpec(library_function("S3", ball), GQ, ball=ball)
    start = time.perf_counter()
    recs = efficiency_curve(spec, (101, 301, 1001), 200, 2026, DENSITIES, gamma=2.0)
    elapsed = time.perf_counter() - start
    ratios = [r.ratio for r in recs]
    ses = [r.ratio_stderr for r in recs]
    finite = all(math.isfinite(x) for x in ratios + ses)
    trend = all(b <= a + 2 * math.hypot(sa, sb) for a, b, sa, sb in zip(ratios, ratios[1:], ses, ses[1:]))
    band = 0.3 <= ratios[-1] <= 1.5
    ok = finite and trend and band and elapsed < 600
    shown = ", ".join(f"{r:.3f}+-{s:.3f}" for r, s in zip(ratios, ses))
    verdict(5, "efficiency trend", ok,
            f"ratios [{shown}] non-increasing within 2 se: {trend}; last in [0.3, 1.5]: {band}; {elapsed:.1f}s")
    assert ok


# 6 ---------------------------------------------------------------------------------


def _numeric_waterfill(N, k, R):
    # maximize sum y/(y+1) s.t. sum y w = R by bisection on the multiplier
    w = np.arange(1, N + 1, dtype=float) ** (2 * k)

    def levels(log_mu):
        return np.maximum(0.0, np.exp(-0.5 * log_mu) / np.sqrt(w) - 1.0)

    log_mu = brentq(lambda lm: float(levels(lm) @ w) - R, -80.0, 0.0, xtol=1e-15, rtol=1e-15, maxiter=500)
    return levels(log_mu)


def test_criterion_6_waterfilling():
    rng = np.random.default_rng(6)
    max_dev = max_con = 0.0
    for N in range(1, 11):
        for k in (1, 2):
            j = np.arange(1, N + 1, dtype=float)
            r_min = min_feasible_budget(N, k)
            for R in r_min + (r_min + 1.0) * rng.uniform(0.0, 4.0, 5):
                y = waterfill(N, k, R)
                max_dev = max(max_dev, float(np.max(np.abs(y - _numeric_waterfill(N, k, R)))))
                max_con = max(max_con, abs(float(y @ j ** (2 * k)) - R) / max(1.0, R))
    y = waterfill(2, 1, 7.0)
    example = np.array_equal(y, [3.0, 1.0]) and j_value(y) == 1.25 and j_star(2, 1, 7.0) == 1.25
    ok = max_dev <= 1e-6 and max_con <= 1e-9 and example
    verdict(6, "water-filling", ok,
            f"max |closed - numeric| = {max_dev:.1e} (<= 1e-6), constraint error {max_con:.1e} (<= 1e-9), "
            f"N=2,k=1,R=7 -> {y.tolist()}, J*={j_star(2, 1, 7.0)}")
    assert ok


# 7 ---------------------------------------------------------------------------------


def test_criterion_7_van_trees_conjugate():
    grid = [(n, s, t) for n in (1, 10, 100, 1000, 10000) for s, t in ((0.5, 0.1), (0.5, 2.0), (2.0, 0.3), (2.0, 5.0))]
    assert len(grid) == 20
    worst = 0.0
    for n, s, t in grid:
        exact = s**2 * t**2 / (n * t**2 + s**2)  # posterior variance of the Gaussian location model
        worst = max(worst, abs(van_trees_bound(1.0, n / s**2, 0.0, 1 / t**2) - exact))
    ok = worst <= 1e-8
    verdict(7, "van Trees conjugate case", ok, f"max error {worst:.1e} over 20 (n, sigma, t) points (<= 1e-8)")
    assert ok


# 8 ---------------------------------------------------------------------------------


@pytest.mark.slow
def test_criterion_8_lower_bound_lab():
    # desk-scale design: log N rule and r = 100 keep M >= 1 at n = 1e4
    k, r, eps, eta = 1, 100.0, 0.1, 0.1
    profile = KernelProfile(eta)
    start = time.perf_counter()
    parts = {}
    a3_dev, effs = 0.0, {}
    for n in (10**4, 10**5):
        design = prior_design(k, r, eps, n, "log")
        cond = conditions_check(design)
        a3_dev = max(a3_dev, abs(cond["a3_sum"] / cond["a3_target"] - 1))
        comp = bound_components(design, profile)
        if n == 10**4:
            e_sq = e_bar(np.arange(1, design.N + 1), lambda v: profile(v) ** 2)
            parts["F"] = float(np.max(np.abs(comp.F_ratio / e_sq[None, :] - 1)))
            parts["B"] = float(np.max(np.abs(comp.B)))
        effs[n] = bayes_lower_bound(design, profile, comp).normalized / pinsker_target(design)
    elapsed = time.perf_counter() - start
    ok_a = a3_dev <= 0.01
    ok_b = parts["F"] <= 0.02
    ok_c = parts["B"] == 0.0
    ok_d = all(0.5 <= e <= 1.0 for e in effs.values())
    ok = ok_a and ok_b and ok_c and ok_d and elapsed < 600
    verdict(8, "lower-bound lab", ok,
            f"(a) A3 rel dev {a3_dev:.1e}; (b) F/(nh) rel dev {parts['F']:.2e}; (c) max|B| = {parts['B']}; "
            f"(d) efficiency {effs[10**4]:.4f}, {effs[10**5]:.4f} in [0.5, 1]; {elapsed:.1f}s")
    assert ok


# 9 ---------------------------------------------------------------------------------

DETERMINISM_CFG = """
model.function = S3
model.r = 10.0
run.ns = 101, 301
run.M = 60
lowerbound.ns = 1000, 10000
lowerbound.draws = 60
lowerbound.scale = model
"""


@pytest.mark.slow
def test_criterion_9_determinism(tmp_path):
    cfg = tmp_path / "det.cfg"
    cfg.write_text(DETERMINISM_CFG)
    sim = tmp_path / "data.csv"
    assert main(["simulate", "--config", str(cfg), "--seed", "9", "--n", "101", "--out", str(sim)]) == 0
    commands = {
        "estimate": lambda out, w: ["estimate", str(sim), "--out", out],
        "simulate": lambda out, w: ["simulate", "--n", "301"],
        "risk": lambda out, w: ["risk"],
        "efficiency": lambda out, w: ["efficiency"],
        "oracle-gap": lambda out, w: ["oracle-gap", "--n", "101"],
        "lowerbound": lambda out, w: ["lowerbound"],
    }
    mismatched = []
    for name, build in commands.items():
        blobs = []
        for i, workers in enumerate(("1", "1", "4")):
            out = str(tmp_path / f"{name}-{i}.csv")
            argv = build(out, workers)
            if name != "estimate":
                argv = [*argv, "--config", str(cfg), "--seed", "9", "--workers", workers, "--out", out]
            assert main(argv) == 0
            blob = (tmp_path / f"{name}-{i}.csv").read_bytes()
            if name == "estimate":
                blob += (tmp_path / f"{name}-{i}.summary.csv").read_bytes()
            blobs.append(blob)
        if not blobs[0] == blobs[1] == blobs[2]:
            mismatched.append(name)
    ok = not mismatched
    verdict(9, "determinism", ok,
            f"{len(commands)} commands x (2 runs + 4 workers) byte-identical; mismatches: {mismatched or 'none'}")
    assert ok
