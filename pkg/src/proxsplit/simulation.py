"""Seeded observation models and image-quality metrics."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    ConfigError,
    DimensionError,
    DomainError,
    Identity,
    UnsupportedConfigError,
    as_image,
)

__all__ = ["NoiseSpec", "degrade", "poisson_rescale", "mae", "psnr"]

NOISE_KINDS = ("gaussian", "poisson", "multiplicative")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise to draw.

    ``sigma`` is the Gaussian standard deviation, ``peak`` the Poisson
    intensity the blurred image is rescaled to, ``looks`` the number of
    speckle looks. Only the parameter of the chosen kind is consulted.
    """

    kind: str
    sigma: float = 0.0
    peak: float = 30.0
    looks: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigError(f"unknown noise kind {self.kind!r}")
        if self.kind == "gaussian" and self.sigma < 0:
            raise ConfigError("sigma must be nonnegative")
        if self.kind == "poisson" and not self.peak > 0:
            raise ConfigError("peak must be positive")
        if self.kind == "multiplicative" and (int(self.looks) != self.looks or self.looks < 1):
            raise ConfigError("looks must be a positive integer")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must fit in 64 unsigned bits")


def poisson_rescale(x, h, peak: float) -> float:
    """Factor ``s`` such that ``max(H (s x)) == peak``."""
    hx = h.apply(as_image(x))
    top = float(hx.max())
    if not top > 0:
        raise DomainError("blurred image has no positive intensity to rescale")
    return peak / top


def degrade(x, h, spec: NoiseSpec) -> np.ndarray:
    """Simulate an observation of `x` through operator `h`.

    gaussian
        ``Hx + e`` with ``e ~ N(0, sigma²)`` i.i.d.
    poisson
        ``x`` is first rescaled so that ``max(Hx) = spec.peak`` (see
        :func:`poisson_rescale`), then each pixel is an independent Poisson
        draw with mean ``(Hx)[i]``.
    multiplicative
        ``x * e`` with ``e ~ Gamma(looks, 1/looks)``; `h` must be the identity
        and ``x > 0``.
    """
    x = as_image(x)
    rng = np.random.default_rng(int(spec.seed))
    if spec.kind == "multiplicative":
        if not isinstance(h, Identity):
            raise UnsupportedConfigError("multiplicative noise is only defined without an operator")
        if np.any(x <= 0):
            raise DomainError("multiplicative noise needs a strictly positive image")
        eps = rng.gamma(shape=spec.looks, scale=1.0 / spec.looks, size=x.shape)
        return x * eps
    if spec.kind == "gaussian":
        hx = h.apply(x)
        if spec.sigma == 0:
            return hx
        return hx + spec.sigma * rng.standard_normal(hx.shape)
    hx = h.apply(x * poisson_rescale(x, h, spec.peak))
    if np.any(hx < -1e-9 * spec.peak):
        raise DomainError("poisson intensities must be nonnegative")
    return rng.poisson(np.maximum(hx, 0.0)).astype(np.float64)


def _same_shape(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} != {b.shape}")
    return a, b


def mae(a, b) -> float:
    """Mean absolute error."""
    a, b = _same_shape(a, b)
    return float(np.mean(np.abs(a - b)))


def psnr(a, ref, peak: float) -> float:
    """Peak signal-to-noise ratio in dB; ``inf`` when the images coincide."""
    a, ref = _same_shape(a, ref)
    if not peak > 0:
        raise DomainError("peak must be positive")
    mse = float(np.mean((a - ref) ** 2))
    if mse == 0.0:
        return np.inf
    return float(10.0 * np.log10(peak**2 / mse))
