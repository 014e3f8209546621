"""Experiment configuration files (TOML).

A config describes one restoration experiment end to end: the clean image,
the forward operator, the noise, the dictionary and the solver settings.
Unknown keys are rejected so that a config always means exactly one thing.
See the bundled ``recipes/*.toml`` for complete examples.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

import numpy as np

from .core import ConfigError

__all__ = ["ExperimentConfig", "load_config", "recipe_names", "recipe_path"]

PROBLEMS = ("deconv-poisson", "inpaint-gaussian", "denoise-multiplicative", "custom")
ALGORITHMS = ("primal", "primal-dual", "both")
OPERATORS = ("convolution", "mask", "identity")

_TOP = {
    "problem", "input", "size", "observation", "reference", "output", "trace",
    "gamma", "constraint", "algorithm", "n_iter", "tol", "peak",
    "operator", "dictionary", "noise", "solver",
}
_SECTIONS = {
    "operator": {"kind", "psf", "psf_width", "mask", "missing_fraction", "seed"},
    "dictionary": {"kind", "levels"},
    "noise": {"kind", "sigma", "peak", "looks", "seed", "floor"},
    "solver": {"mu", "theta", "tau", "sigma", "trace_stride"},
}
_REQUIRED = ("problem", "input", "observation", "output", "gamma", "algorithm", "n_iter")


@dataclass
class ExperimentConfig:
    problem: str
    input: str
    observation: Path
    output: Path
    gamma: float
    algorithm: str
    n_iter: int
    size: tuple = (64, 64)
    reference: Path | None = None
    trace: Path | None = None
    constraint: object = "none"
    tol: float = 0.0
    peak: float = 255.0
    operator: dict = field(default_factory=lambda: {"kind": "identity"})
    dictionary: dict = field(default_factory=lambda: {"kind": "orthobasis-haar"})
    noise: dict = field(default_factory=dict)
    solver: dict = field(default_factory=dict)
    source: Path | None = None

    @property
    def box_bounds(self) -> tuple[float, float]:
        c = self.constraint
        if c == "none":
            return -np.inf, np.inf
        if c == "positive":
            return 0.0, np.inf
        return float(c[0]), float(c[1])


def _fail(key, msg):
    raise ConfigError(f"config field '{key}': {msg}")


def _num(raw, key, positive=False, integer=False, allow_zero=True):
    val = raw[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        _fail(key, "must be a number")
    if integer and int(val) != val:
        _fail(key, "must be an integer")
    if positive and not (val > 0 or (allow_zero and val == 0)):
        _fail(key, "must be positive" if not allow_zero else "must be nonnegative")
    return int(val) if integer else float(val)


def _check_section(raw, name):
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        _fail(name, "must be a table")
    for key in sec:
        if key not in _SECTIONS[name]:
            _fail(f"{name}.{key}", "unknown key")
    return dict(sec)


def parse_config(raw: dict, source: Path | None = None) -> ExperimentConfig:
    """Validate a decoded TOML document."""
    for key in raw:
        if key not in _TOP:
            _fail(key, "unknown key")
    for key in _REQUIRED:
        if key not in raw:
            _fail(key, "missing")

    if raw["problem"] not in PROBLEMS:
        _fail("problem", f"must be one of {PROBLEMS}")
    if raw["algorithm"] not in ALGORITHMS:
        _fail("algorithm", f"must be one of {ALGORITHMS}")
    gamma = _num(raw, "gamma", positive=True)
    n_iter = _num(raw, "n_iter", integer=True)
    if n_iter < 1:
        _fail("n_iter", "must be >= 1")
    tol = _num(raw, "tol", positive=True) if "tol" in raw else 0.0
    peak = _num(raw, "peak", positive=True, allow_zero=False) if "peak" in raw else 255.0

    size = tuple(raw.get("size", (64, 64)))
    if len(size) != 2 or not all(isinstance(s, int) and s > 0 for s in size):
        _fail("size", "must be [height, width] positive integers")

    constraint = raw.get("constraint", "none")
    if isinstance(constraint, list):
        if len(constraint) != 2 or not all(isinstance(v, (int, float)) for v in constraint):
            _fail("constraint", "box must be [lower, upper]")
        if constraint[0] > constraint[1]:
            _fail("constraint", "lower bound exceeds upper bound")
    elif constraint not in ("none", "positive"):
        _fail("constraint", "must be 'none', 'positive' or [lower, upper]")

    operator = _check_section(raw, "operator")
    operator.setdefault("kind", "identity")
    if operator["kind"] not in OPERATORS:
        _fail("operator.kind", f"must be one of {OPERATORS}")
    if operator["kind"] == "convolution" and not ("psf" in operator or "psf_width" in operator):
        _fail("operator.psf", "convolution needs 'psf' (file) or 'psf_width'")
    if operator["kind"] == "mask" and "mask" not in operator:
        _fail("operator.mask", "mask operator needs a mask file path")
    if "missing_fraction" in operator:
        mf = _num(operator, "missing_fraction", positive=True)
        if mf >= 1:
            _fail("operator.missing_fraction", "must be < 1")

    dictionary = _check_section(raw, "dictionary")
    dictionary.setdefault("kind", "orthobasis-haar")
    if "levels" in dictionary:
        if _num(dictionary, "levels", integer=True) < 1:
            _fail("dictionary.levels", "must be >= 1")

    noise = _check_section(raw, "noise")
    if noise.get("kind") not in ("gaussian", "poisson", "multiplicative"):
        _fail("noise.kind", "must be gaussian, poisson or multiplicative")
    for key, kw in (("sigma", {"positive": True}), ("peak", {"positive": True, "allow_zero": False}),
                    ("floor", {"positive": True, "allow_zero": False})):
        if key in noise:
            _num(noise, key, **kw)
    if "looks" in noise and _num(noise, "looks", integer=True) < 1:
        _fail("noise.looks", "must be a positive integer")
    if "seed" in noise:
        s = _num(noise, "seed", integer=True)
        if not 0 <= s < 2**64:
            _fail("noise.seed", "must be a 64-bit unsigned integer")
    if noise["kind"] == "gaussian" and "sigma" not in noise:
        _fail("noise.sigma", "gaussian noise needs sigma")
    if noise["kind"] == "multiplicative" and "looks" not in noise:
        _fail("noise.looks", "multiplicative noise needs looks")
    if noise["kind"] == "multiplicative" and operator["kind"] != "identity":
        _fail("operator.kind", "multiplicative noise requires the identity operator")

    solver = _check_section(raw, "solver")
    for key in ("mu", "tau", "sigma"):
        if key in solver:
            _num(solver, key, positive=True, allow_zero=False)
    if "theta" in solver:
        th = _num(solver, "theta")
        if not 0 < th < 2:
            _fail("solver.theta", "must lie in (0, 2)")
    if "trace_stride" in solver and _num(solver, "trace_stride", integer=True) < 1:
        _fail("solver.trace_stride", "must be >= 1")

    def path(key):
        return Path(raw[key]) if key in raw else None

    return ExperimentConfig(
        problem=raw["problem"],
        input=str(raw["input"]),
        observation=Path(raw["observation"]),
        output=Path(raw["output"]),
        gamma=gamma,
        algorithm=raw["algorithm"],
        n_iter=n_iter,
        size=size,
        reference=path("reference"),
        trace=path("trace"),
        constraint=constraint,
        tol=tol,
        peak=peak,
        operator=operator,
        dictionary=dictionary,
        noise=noise,
        solver=solver,
        source=source,
    )


def recipe_names() -> list[str]:
    root = resources.files("proxsplit") / "recipes"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".toml"))


def recipe_path(name: str):
    ref = resources.files("proxsplit") / "recipes" / f"{name}.toml"
    if not ref.is_file():
        raise FileNotFoundError(f"no bundled recipe {name!r}; available: {recipe_names()}")
    return ref


def load_config(path) -> ExperimentConfig:
    """Load a config file, or a bundled recipe given as ``recipe:<name>``."""
    spec = str(path)
    if spec.startswith("recipe:"):
        ref = recipe_path(spec[len("recipe:"):])
        text = ref.read_text()
        source = Path(str(ref))
    else:
        source = Path(spec)
        if not source.is_file():
            raise FileNotFoundError(f"config file not found: {source}")
        text = source.read_text()
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return parse_config(raw, source)
