"""Array conventions, the linear-operator interface and norm estimation.

Images are 2-D ``float64`` arrays of shape ``(height, width)`` in row-major
order; coefficient vectors are 1-D ``float64`` arrays. Every operator in the
package follows the :class:`LinearMap` interface.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DimensionError",
    "DomainError",
    "ConfigError",
    "UnsupportedConfigError",
    "as_image",
    "as_coefs",
    "dot",
    "LinearMap",
    "Identity",
    "Composite",
    "power_iteration",
    "ProductPoint",
]


class DimensionError(ValueError):
    """Array shapes or lengths do not agree."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function."""


class ConfigError(ValueError):
    """A parameter set violates a documented invariant."""


class UnsupportedConfigError(ConfigError):
    """A valid combination of components that this code cannot handle."""


def as_image(data, shape=None) -> np.ndarray:
    """Return `data` as a finite 2-D float64 array, optionally checking its shape."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        raise DimensionError(f"expected a non-empty 2-D image, got shape {arr.shape}")
    if shape is not None and arr.shape != tuple(shape):
        raise DimensionError(f"expected image of shape {tuple(shape)}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("image contains non-finite values")
    return arr


def as_coefs(data, length=None) -> np.ndarray:
    """Return `data` as a finite 1-D float64 array, optionally checking its length."""
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-D coefficient vector, got shape {arr.shape}")
    if length is not None and arr.size != length:
        raise DimensionError(f"expected {length} coefficients, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("coefficients contain non-finite values")
    return arr


def dot(u, v) -> float:
    """Euclidean inner product of two arrays of equal size (any shape)."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.size != v.size:
        raise DimensionError(f"length mismatch: {u.size} != {v.size}")
    return float(np.dot(u.ravel(), v.ravel()))


class LinearMap:
    """Bounded linear operator with an explicit adjoint.

    Subclasses set ``in_shape`` and ``out_shape`` and implement
    :meth:`apply` and :meth:`adjoint`.
    """

    in_shape: tuple
    out_shape: tuple

    def apply(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def __call__(self, x):
        return self.apply(x)

    def norm(self, iters: int = 200, seed: int = 0) -> float:
        """Spectral norm. Subclasses with a closed form override this."""
        return power_iteration(self, iters=iters, seed=seed)


class Identity(LinearMap):
    def __init__(self, shape):
        self.in_shape = self.out_shape = tuple(shape)

    def apply(self, x):
        return np.array(x, dtype=np.float64, copy=True)

    def adjoint(self, y):
        return np.array(y, dtype=np.float64, copy=True)

    def norm(self, iters: int = 200, seed: int = 0) -> float:
        return 1.0


class Composite(LinearMap):
    """``outer ∘ inner``."""

    def __init__(self, outer: LinearMap, inner: LinearMap):
        if tuple(outer.in_shape) != tuple(inner.out_shape):
            raise DimensionError(
                f"cannot compose: {inner.out_shape} does not feed {outer.in_shape}"
            )
        self.outer = outer
        self.inner = inner
        self.in_shape = inner.in_shape
        self.out_shape = outer.out_shape

    def apply(self, x):
        return self.outer.apply(self.inner.apply(x))

    def adjoint(self, y):
        return self.inner.adjoint(self.outer.adjoint(y))


def power_iteration(op: LinearMap, iters: int = 200, seed: int = 0, rtol: float = 1e-10) -> float:
    """Estimate the largest singular value of `op`.

    Runs power iteration on ``op.adjoint ∘ op`` from a seeded Gaussian start,
    stopping after `iters` steps or once the estimate changes by less than
    `rtol` relative.

    Returns 0.0 for the zero operator.
    """
    if iters < 1:
        raise ConfigError("iters must be >= 1")
    rng = np.random.default_rng(seed)
    u = rng.standard_normal(op.in_shape)
    u /= np.linalg.norm(u)
    est = 0.0
    for _ in range(iters):
        w = op.adjoint(op.apply(u))
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        new = np.sqrt(nw)
        u = w / nw
        if abs(new - est) <= rtol * new:
            est = new
            break
        est = new
    return float(est)


@dataclass
class ProductPoint:
    """A point ``(x1, x2, alpha)`` of image space × observation space × coefficient space."""

    x1: np.ndarray
    x2: np.ndarray
    alpha: np.ndarray

    def copy(self) -> "ProductPoint":
        return ProductPoint(self.x1.copy(), self.x2.copy(), self.alpha.copy())

    def __add__(self, other: "ProductPoint") -> "ProductPoint":
        return ProductPoint(self.x1 + other.x1, self.x2 + other.x2, self.alpha + other.alpha)

    def __sub__(self, other: "ProductPoint") -> "ProductPoint":
        return ProductPoint(self.x1 - other.x1, self.x2 - other.x2, self.alpha - other.alpha)

    def __mul__(self, s: float) -> "ProductPoint":
        return ProductPoint(s * self.x1, s * self.x2, s * self.alpha)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.x1**2) + np.sum(self.x2**2) + np.sum(self.alpha**2)))

    def inner(self, other: "ProductPoint") -> float:
        return dot(self.x1, other.x1) + dot(self.x2, other.x2) + dot(self.alpha, other.alpha)

    @classmethod
    def zeros(cls, image_shape, obs_shape, n_coefs) -> "ProductPoint":
        return cls(np.zeros(image_shape), np.zeros(obs_shape), np.zeros(n_coefs))
