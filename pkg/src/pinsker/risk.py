"""Monte Carlo quadratic risk, Pinsker constant and efficiency ratios.

Losses are empirical squared norms ``||S_hat - S||_n^2``.  Because the basis
is orthonormal on odd grids they are computed in coefficient space as
``sum_j (lambda_j th_hat_j - th_j)^2``, so every member of the weight family
can be scored on the same replication at little extra cost.

Replication ``i`` under noise law ``p`` always draws from the stream keyed by
``(seed, p, i)`` and work is cut into fixed-size chunks, so results do not
depend on the number of worker threads.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import DesignGrid, SobolevBall, basis_matrix, fourier_transform_batch
from .models import ModelSpec, NoiseDensity, simulate_batch
from .selector import all_costs, kappa, reference_index, rho
from .weights import WeightIndex, grid_params, weight_matrix, weight_vector

__all__ = [
    "RiskError",
    "DensityRisk",
    "RiskReport",
    "EfficiencyRecord",
    "OracleGap",
    "Procedure",
    "make_procedure",
    "empirical_sq_norm",
    "pinsker_constant",
    "gamma_k",
    "mc_risk",
    "efficiency_curve",
    "oracle_gap",
    "worker_count",
    "DEFAULT_DENSITIES",
    "CHUNK",
]

DEFAULT_DENSITIES = (NoiseDensity("gaussian"), NoiseDensity("uniform"))
CHUNK = 50


class RiskError(RuntimeError):
    """An estimator produced a non-finite loss on some replication."""

    def __init__(self, message: str, replication: int | None = None, density: str | None = None):
        super().__init__(message)
        self.replication = replication
        self.density = density


def worker_count(requested: int | None = None) -> int:
    """Worker threads to use: ``requested`` (or the CPU count) capped by ``PINSKER_THREADS``."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("PINSKER_THREADS")
    if cap:
        n = min(n, int(cap))
    return max(1, int(n))


def empirical_sq_norm(f, grid: DesignGrid) -> float:
    """``||f||_n^2 = n^{-1} sum_l f_l^2``."""
    f = np.asarray(f, dtype=float)
    if f.shape != (grid.n,):
        raise ValueError(f"expected {grid.n} samples, got shape {f.shape}")
    return float(np.dot(f, f) / grid.n)


def pinsker_constant(k: int) -> float:
    """``Gamma*_k = (2k+1)^{1/(2k+1)} (k / (pi (k+1)))^{2k/(2k+1)}``."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    p = 2 * k + 1
    return p ** (1.0 / p) * (k / (math.pi * (k + 1))) ** (2.0 * k / p)


def gamma_k(ball: SobolevBall, varsigma_S: float) -> float:
    """Pinsker constant ``Gamma*_k r^{1/(2k+1)} varsigma^{2k/(2k+1)}``."""
    if not varsigma_S > 0:
        raise ValueError(f"varsigma must be positive, got {varsigma_S}")
    p = 2 * ball.k + 1
    return pinsker_constant(ball.k) * ball.r ** (1.0 / p) * varsigma_S ** (2.0 * ball.k / p)


# ---------------------------------------------------------------------------
# procedures: map a (reps, n) block of coefficients to (reps, n) weights
# ---------------------------------------------------------------------------


@dataclass
class Procedure:
    name: str
    weights: Callable[[np.ndarray], np.ndarray]

    def __call__(self, theta_hat: np.ndarray) -> np.ndarray:
        return np.broadcast_to(self.weights(theta_hat), theta_hat.shape)


def _selector_weights(n: int, gamma: float):
    _, W = weight_matrix(n)
    rho_value = rho(n, gamma)

    def weights(theta_hat):
        costs = all_costs(W, theta_hat, rho_value)
        return W[np.argmin(costs, axis=-1)]

    return weights


def make_procedure(tag: str, n: int, **params) -> Procedure:
    """Build a batch weight rule by name.

    ``"selector"`` (``gamma``), ``"reference"`` (``ball``, ``varsigma``),
    ``"fixed"`` (``beta``, ``step``), ``"first"`` (keep only the mean) and
    ``"full"`` (keep everything, i.e. interpolate the data).
    """
    if tag == "selector":
        gamma = params.get("gamma", 2.0)
        return Procedure("selector", _selector_weights(n, gamma))
    if tag == "reference":
        ball, vs = params["ball"], params["varsigma"]
        alpha, _ = reference_index(ball.r / vs, n, ball.k)
        return Procedure("reference", lambda th, w=weight_vector(alpha, n).values: w)
    if tag == "fixed":
        eps, _, _ = grid_params(n)
        alpha = WeightIndex(int(params["beta"]), int(params["step"]), eps)
        return Procedure(f"fixed[{alpha.beta},{alpha.step}]", lambda th, w=weight_vector(alpha, n).values: w)
    if tag == "first":
        w = np.zeros(n)
        w[0] = 1.0
        return Procedure("first", lambda th: w)
    if tag == "full":
        return Procedure("full", lambda th: np.ones(n))
    raise ValueError(f"unknown estimator tag {tag!r}")


# ---------------------------------------------------------------------------
# Monte Carlo core
# ---------------------------------------------------------------------------


def _true_coefficients(spec: ModelSpec, grid: DesignGrid) -> np.ndarray:
    return basis_matrix(grid).T @ spec.S(grid.points) / grid.n


def _run_losses(
    spec: ModelSpec,
    grid: DesignGrid,
    densities: Sequence[NoiseDensity],
    M: int,
    seed: int,
    loss_fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    workers: int | None,
) -> dict[str, np.ndarray]:
    """Loss matrices ``(M, L)`` per density; ``loss_fn(theta_hat, theta) -> (reps, L)``."""
    if M < 2:
        raise ValueError(f"need at least 2 replications, got {M}")
    theta = _true_coefficients(spec, grid)
    tasks = [
        (d, range(lo, min(lo + CHUNK, M)))
        for d in densities
        for lo in range(0, M, CHUNK)
    ]

    def run(task):
        d, reps = task
        Y = simulate_batch(spec.with_noise(d), grid, seed, reps, stream=d.stream_id)
        losses = np.atleast_2d(loss_fn(fourier_transform_batch(Y, grid), theta).T).T
        bad = np.flatnonzero(~np.all(np.isfinite(losses), axis=1))
        if bad.size:
            rep = reps[int(bad[0])]
            raise RiskError(f"non-finite loss at replication {rep} ({d.tag})", rep, d.tag)
        return losses

    nw = worker_count(workers)
    if nw == 1:
        chunks = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            chunks = list(pool.map(run, tasks))
    out: dict[str, list] = {d.tag: [] for d in densities}
    for (d, _), block in zip(tasks, chunks):
        out[d.tag].append(block)
    return {tag: np.vstack(blocks) for tag, blocks in out.items()}


def _mean_se(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    return float(values.mean()), float(values.std(ddof=1) / math.sqrt(values.size))


def _check_densities(densities, xi_star: float):
    densities = tuple(densities)
    if not densities:
        raise ValueError("need at least one noise density")
    if xi_star < 3:
        raise ValueError(f"xi_star must be >= 3, got {xi_star}")
    for d in densities:
        if d.fourth_moment > xi_star + 1e-12:
            raise ValueError(
                f"{d.tag} has fourth moment {d.fourth_moment:g} > xi_star = {xi_star:g}"
            )
    return densities


@dataclass(frozen=True)
class DensityRisk:
    mean: float
    stderr: float


@dataclass(frozen=True)
class RiskReport:
    """Per-density mean losses and their maximum (the risk)."""

    estimator: str
    n: int
    replications: int
    per_density: dict[str, DensityRisk]
    risk: float
    risk_stderr: float
    losses: dict[str, np.ndarray] = field(repr=False, compare=False, default_factory=dict)

    def rows(self) -> list[dict]:
        return [
            {"n": self.n, "density": tag, "estimator": self.estimator,
             "mean": r.mean, "stderr": r.stderr, "ratio": "", "gamma": ""}
            for tag, r in self.per_density.items()
        ]


def _report(name, n, M, losses: dict[str, np.ndarray]) -> RiskReport:
    per = {tag: DensityRisk(*_mean_se(v)) for tag, v in losses.items()}
    worst = max(per, key=lambda tag: (per[tag].mean, tag))
    return RiskReport(name, n, M, per, per[worst].mean, per[worst].stderr, losses)


def mc_risk(
    procedure: Procedure | str,
    spec: ModelSpec,
    n: int,
    M: int,
    seed: int,
    densities: Sequence[NoiseDensity] = DEFAULT_DENSITIES,
    *,
    xi_star: float = 3.0,
    workers: int | None = None,
    **params,
) -> RiskReport:
    """Risk ``max_p E_p ||S_hat - S||_n^2`` over a finite family of noise laws."""
    grid = DesignGrid(n)
    densities = _check_densities(densities, xi_star)
    if isinstance(procedure, str):
        procedure = make_procedure(procedure, n, **params)

    def loss(theta_hat, theta):
        return np.sum((procedure(theta_hat) * theta_hat - theta) ** 2, axis=1)

    losses = _run_losses(spec, grid, densities, M, seed, loss, workers)
    return _report(procedure.name, n, M, {t: v[:, 0] for t, v in losses.items()})


@dataclass(frozen=True)
class EfficiencyRecord:
    n: int
    ratio: float
    ratio_stderr: float
    gamma: float
    risk: float
    report: RiskReport = field(repr=False, compare=False)

    def row(self) -> dict:
        return {"n": self.n, "density": "sup", "estimator": self.report.estimator,
                "mean": self.risk, "stderr": self.report.risk_stderr,
                "ratio": self.ratio, "gamma": self.gamma}


def efficiency_curve(
    spec: ModelSpec,
    ns: Sequence[int],
    M: int,
    seed: int,
    densities: Sequence[NoiseDensity] = DEFAULT_DENSITIES,
    *,
    estimator: str = "selector",
    xi_star: float = 3.0,
    workers: int | None = None,
    **params,
) -> list[EfficiencyRecord]:
    """Normalized risks ``n^{2k/(2k+1)} R / gamma_k(S)`` along a ladder of sample sizes."""
    if spec.ball is None:
        raise ValueError("the model needs a Sobolev ball to normalize by gamma_k")
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise ValueError(f"ns must be strictly increasing, got {ns}")
    vs = spec.varsigma
    gam = gamma_k(spec.ball, vs)
    k = spec.ball.k
    if estimator == "reference":
        params = {"ball": spec.ball, "varsigma": vs, **params}
    out = []
    for n in ns:
        rep = mc_risk(estimator, spec, n, M, seed, densities,
                      xi_star=xi_star, workers=workers, **params)
        scale = n ** (2.0 * k / (2 * k + 1)) / gam
        out.append(EfficiencyRecord(n, rep.risk * scale, rep.risk_stderr * scale, gam, rep.risk, rep))
    return out


@dataclass(frozen=True)
class OracleGap:
    n: int
    replications: int
    selector_risk: float
    selector_stderr: float
    best_candidate_risk: float
    best_candidate_stderr: float
    best_index: WeightIndex
    ratio: float
    kappa: float
    residual: float
    candidate_risks: dict[WeightIndex, DensityRisk]

    def rows(self) -> list[dict]:
        rows = [
            {"n": self.n, "estimator": f"lambda[{a.beta},{a.step}]", "beta": a.beta,
             "t": a.t, "risk": r.mean, "stderr": r.stderr}
            for a, r in self.candidate_risks.items()
        ]
        rows.append({"n": self.n, "estimator": "selector", "beta": "",
                     "t": "", "risk": self.selector_risk, "stderr": self.selector_stderr})
        return rows


def oracle_gap(
    spec: ModelSpec,
    n: int,
    M: int,
    seed: int,
    densities: Sequence[NoiseDensity] = DEFAULT_DENSITIES,
    *,
    gamma: float = 2.0,
    xi_star: float = 3.0,
    workers: int | None = None,
) -> OracleGap:
    """Both sides of the oracle inequality, with the remainder left as a measured residual.

    Each candidate's risk is its own maximum over the noise laws, and the
    best candidate is the minimum of those; the selector is scored on the very
    same replications.
    """
    grid = DesignGrid(n)
    densities = _check_densities(densities, xi_star)
    index, W = weight_matrix(n)
    rho_value = rho(n, gamma)

    def loss(theta_hat, theta):
        est = W[None, :, :] * theta_hat[:, None, :]
        cand = np.sum((est - theta) ** 2, axis=2)
        pick = np.argmin(all_costs(W, theta_hat, rho_value), axis=1)
        sel = cand[np.arange(cand.shape[0]), pick]
        return np.column_stack([cand, sel])

    losses = _run_losses(spec, grid, densities, M, seed, loss, workers)
    tags = list(losses)
    stats = {t: [_mean_se(losses[t][:, c]) for c in range(len(index) + 1)] for t in tags}

    def sup(c):
        t = max(tags, key=lambda t: (stats[t][c][0], t))
        return DensityRisk(*stats[t][c])

    cand = {a: sup(c) for c, a in enumerate(index)}
    sel = sup(len(index))
    best = min(cand, key=lambda a: (cand[a].mean, a))
    kap = kappa(rho_value)
    return OracleGap(
        n=n, replications=M,
        selector_risk=sel.mean, selector_stderr=sel.stderr,
        best_candidate_risk=cand[best].mean, best_candidate_stderr=cand[best].stderr,
        best_index=best,
        ratio=sel.mean / cand[best].mean,
        kappa=kap,
        residual=sel.mean - (1.0 + kap) * cand[best].mean,
        candidate_risks=cand,
    )
