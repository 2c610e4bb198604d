"""Experiment configuration in a flat ``dotted.key = value`` text format.

Example::

    # model
    model.function = S3
    model.k = 1
    model.r = 10.0
    model.scale.kind = goldfeld_quandt
    model.scale.c0 = 1.0
    model.scale.c1 = 1.0
    model.scale.c2 = 0.5
    model.noise = gaussian, uniform
    run.ns = 101, 301, 1001
    run.M = 200
    run.seed = 2026

Lines starting with ``#`` or ``;`` are comments.  Unknown keys are errors,
so typos do not silently fall back to defaults.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass
from pathlib import Path

from .basis import SobolevBall
from .models import LIBRARY, ModelSpec, NoiseDensity, ScaleFamily, library_function

__all__ = ["ConfigError", "ExperimentConfig", "load_config", "KEYS"]


class ConfigError(ValueError):
    """Invalid configuration; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(tok) for tok in text.replace(",", " ").split())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip())


def _n_rule(text: str):
    text = text.strip()
    return int(text) if text.lstrip("-").isdigit() else text


# key -> (attribute, parser)
KEYS = {
    "model.function": ("function", str),
    "model.k": ("k", int),
    "model.r": ("r", float),
    "model.fill": ("fill", float),
    "model.scale.kind": ("scale_kind", str),
    "model.scale.c0": ("c0", float),
    "model.scale.c1": ("c1", float),
    "model.scale.c2": ("c2", float),
    "model.scale.c3": ("c3", float),
    "model.noise": ("noise", _str_list),
    "estimator.name": ("estimator", str),
    "estimator.gamma": ("gamma", float),
    "estimator.xi_star": ("xi_star", float),
    "run.ns": ("ns", _int_list),
    "run.M": ("M", int),
    "run.seed": ("seed", int),
    "run.workers": ("workers", int),
    "lowerbound.k": ("lb_k", int),
    "lowerbound.r": ("lb_r", float),
    "lowerbound.epsilon": ("lb_epsilon", float),
    "lowerbound.eta": ("lb_eta", float),
    "lowerbound.N_rule": ("lb_N_rule", _n_rule),
    "lowerbound.draws": ("lb_draws", int),
    "lowerbound.eps0": ("lb_eps0", float),
    "lowerbound.ns": ("lb_ns", _int_list),
    "lowerbound.scale": ("lb_scale", str),
}
_ATTR_TO_KEY = {attr: key for key, (attr, _) in KEYS.items()}

_ESTIMATORS = ("selector", "reference", "first", "full")


@dataclass
class ExperimentConfig:
    """Everything a CLI run needs; the seed has no default on purpose."""

    function: str = "S3"
    k: int = 1
    r: float = 10.0
    fill: float = 1.0
    scale_kind: str = "goldfeld_quandt"
    c0: float = 1.0
    c1: float = 1.0
    c2: float = 0.5
    c3: float = 0.0
    noise: tuple[str, ...] = ("gaussian", "uniform")
    estimator: str = "selector"
    gamma: float = 2.0
    xi_star: float = 3.0
    ns: tuple[int, ...] = (101, 301, 1001)
    M: int = 200
    seed: int | None = None
    workers: int | None = None
    lb_k: int = 1
    lb_r: float = 100.0
    lb_epsilon: float = 0.1
    lb_eta: float = 0.1
    lb_N_rule: object = "log"
    lb_draws: int = 200
    lb_eps0: float = 0.5
    lb_ns: tuple[int, ...] = (1000, 10000, 100000)
    lb_scale: str = "constant"

    def validate(self) -> "ExperimentConfig":
        def bad(attr, msg):
            raise ConfigError(_ATTR_TO_KEY[attr], msg)

        if self.seed is None:
            bad("seed", "a seed is required (no clock-based seeding)")
        if self.function not in LIBRARY:
            bad("function", f"unknown function {self.function!r}; choose from {', '.join(LIBRARY)}")
        if self.k < 1:
            bad("k", f"must be >= 1, got {self.k}")
        if not self.r > 0:
            bad("r", f"must be positive, got {self.r}")
        if not 0 < self.fill <= 1:
            bad("fill", f"must lie in (0, 1], got {self.fill}")
        if self.scale_kind not in ("goldfeld_quandt", "quadratic"):
            bad("scale_kind", f"unknown scale family {self.scale_kind!r}")
        if not self.c0 > 0:
            bad("c0", f"must be positive, got {self.c0}")
        for attr in ("c1", "c2", "c3"):
            if getattr(self, attr) < 0:
                bad(attr, f"must be non-negative, got {getattr(self, attr)}")
        if self.scale_kind == "goldfeld_quandt" and self.c3:
            bad("c3", "only the quadratic scale family has a c3 term")
        if not self.noise:
            bad("noise", "at least one noise law is required")
        for tag in self.noise:
            try:
                NoiseDensity.parse(tag)
            except ValueError as exc:
                bad("noise", str(exc))
        if self.estimator not in _ESTIMATORS:
            bad("estimator", f"unknown estimator {self.estimator!r}; choose from {', '.join(_ESTIMATORS)}")
        if not self.gamma > 0:
            bad("gamma", f"must be positive, got {self.gamma}")
        if self.xi_star < 3:
            bad("xi_star", f"must be >= 3, got {self.xi_star}")
        if not self.ns:
            bad("ns", "at least one sample size is required")
        for n in self.ns:
            if n < 3 or n % 2 == 0:
                bad("ns", f"sample sizes must be odd and >= 3, got {n}")
        if self.M < 2:
            bad("M", f"need at least 2 replications, got {self.M}")
        if self.workers is not None and self.workers < 1:
            bad("workers", f"must be >= 1, got {self.workers}")
        if self.lb_k < 1:
            bad("lb_k", f"must be >= 1, got {self.lb_k}")
        if not self.lb_r > 0:
            bad("lb_r", f"must be positive, got {self.lb_r}")
        if not 0 < self.lb_epsilon < 1:
            bad("lb_epsilon", f"must lie in (0, 1), got {self.lb_epsilon}")
        if not 0 < self.lb_eta < 0.5:
            bad("lb_eta", f"must lie in (0, 1/2), got {self.lb_eta}")
        if isinstance(self.lb_N_rule, str) and self.lb_N_rule not in ("polylog", "log"):
            bad("lb_N_rule", f"use 'polylog', 'log' or a positive integer, got {self.lb_N_rule!r}")
        if isinstance(self.lb_N_rule, int) and self.lb_N_rule < 1:
            bad("lb_N_rule", f"must be >= 1, got {self.lb_N_rule}")
        if self.lb_draws < 1:
            bad("lb_draws", f"must be >= 1, got {self.lb_draws}")
        if not 0 < self.lb_eps0 < 1:
            bad("lb_eps0", f"must lie in (0, 1), got {self.lb_eps0}")
        if not self.lb_ns or any(n < 3 for n in self.lb_ns):
            bad("lb_ns", "need sample sizes >= 3")
        if self.lb_scale not in ("constant", "model"):
            bad("lb_scale", f"use 'constant' or 'model', got {self.lb_scale!r}")
        return self

    # -- builders ---------------------------------------------------------

    @property
    def ball(self) -> SobolevBall:
        return SobolevBall(self.k, self.r)

    def scale_family(self) -> ScaleFamily:
        if self.scale_kind == "goldfeld_quandt":
            return ScaleFamily.goldfeld_quandt(self.c0, self.c1, self.c2)
        return ScaleFamily.quadratic(self.c0, self.c1, self.c2, self.c3)

    def lowerbound_scale(self) -> ScaleFamily:
        """Unit scale, or the model family when ``lowerbound.scale = model``."""
        return ScaleFamily.goldfeld_quandt(1.0) if self.lb_scale == "constant" else self.scale_family()

    @property
    def densities(self) -> tuple[NoiseDensity, ...]:
        return tuple(NoiseDensity.parse(tag) for tag in self.noise)

    def model_spec(self, noise: NoiseDensity | None = None) -> ModelSpec:
        S = library_function(self.function, self.ball, self.fill)
        return ModelSpec(S, self.scale_family(), noise or self.densities[0], self.ball)

    def replace(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})


def parse_config(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into a dict of typed attributes."""
    parser = configparser.ConfigParser(
        interpolation=None, comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
        delimiters=("=",), strict=True,
    )
    parser.optionxform = str  # keep "run.M" case-sensitive
    try:
        parser.read_string("[config]\n" + text, source=source)
    except configparser.Error as exc:
        raise ConfigError("<syntax>", str(exc).replace("[config]\n", "")) from None
    values = {}
    for key, raw in parser["config"].items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        attr, conv = KEYS[key]
        try:
            values[attr] = conv(raw.strip())
        except ValueError:
            raise ConfigError(key, f"cannot parse {raw!r}") from None
    return values


def load_config(path=None, **overrides) -> ExperimentConfig:
    """Read a config file (optional) and apply non-``None`` overrides, then validate."""
    values = {}
    if path is not None:
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError("--config", f"cannot read {path}: {exc.strerror}") from None
        values = parse_config(text, str(path))
    cfg = ExperimentConfig(**values).replace(**overrides)
    return cfg.validate()
