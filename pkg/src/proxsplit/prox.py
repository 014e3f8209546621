"""Proximity operators and projectors.

Conventions: ``prox_{βf}(x) = argmin_u β f(u) + ||u - x||² / 2``. All proxes
here are separable and act elementwise on arrays of any shape.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .core import (
    ConfigError,
    DimensionError,
    DomainError,
    ProductPoint,
    UnsupportedConfigError,
)

__all__ = [
    "lambert_w0",
    "NoiseModel",
    "GaussianNoise",
    "PoissonNoise",
    "MultiplicativeNoise",
    "prox_gaussian",
    "prox_poisson",
    "prox_multiplicative",
    "prox_conjugate",
    "PenaltySpec",
    "L1Penalty",
    "GenericPenalty",
    "prox_penalty",
    "soft_threshold",
    "BoxConstraint",
    "project_box",
    "KernelProjectorL1",
    "KernelProjectorL2",
    "project_ker_L1",
    "project_ker_L2",
]

_INV_E = np.exp(-1.0)


# -- Lambert W -------------------------------------------------------------------


def lambert_w0(a):
    """Principal branch of the Lambert W function, ``w * exp(w) = a``.

    Halley iteration started from ``log(1 + a)`` (clamped at -1), from the
    asymptotic ``log a - log log a`` for large arguments and from the
    branch-point series close to ``-1/e``.

    Raises
    ------
    DomainError
        If any ``a < -1/e`` by more than 1e-12.
    """
    a_arr = np.asarray(a, dtype=np.float64)
    if np.any(np.isnan(a_arr)):
        raise DomainError("lambert_w0 of NaN")
    if np.any(a_arr < -_INV_E - 1e-12):
        raise DomainError("lambert_w0 is real only for a >= -1/e")
    a_flat = np.maximum(a_arr.ravel(), -_INV_E)

    w = np.maximum(np.log1p(np.maximum(a_flat, -1.0 + 1e-300)), -1.0)
    big = a_flat > 1e10
    if np.any(big):
        la = np.log(a_flat[big])
        w[big] = la - np.log(la) + np.log(la) / la
    near = a_flat < -0.25
    if np.any(near):
        p = np.sqrt(np.maximum(2.0 * (np.e * a_flat[near] + 1.0), 0.0))
        w[near] = -1.0 + p - p**2 / 3.0 + 11.0 / 72.0 * p**3

    active = np.ones_like(w, dtype=bool)
    active &= np.e * a_flat + 1.0 > 1e-15  # the branch point itself stays at -1
    for _ in range(50):
        if not active.any():
            break
        wa = w[active]
        ew = np.exp(wa)
        f = wa * ew - a_flat[active]
        wp1 = wa + 1.0
        denom = ew * wp1 - (wa + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w[active] = wa - step
        done = np.abs(step) <= 1e-15 * (1.0 + np.abs(wa))
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    w = w.reshape(a_arr.shape)
    return float(w) if w.ndim == 0 else w


def _lambert_w0_of_exp(s: np.ndarray) -> np.ndarray:
    """W(exp(s)) without forming exp(s) when it would overflow."""
    s = np.asarray(s, dtype=np.float64)
    out = np.empty_like(s)
    small = s <= 20.0
    if np.any(small):
        out[small] = lambert_w0(np.exp(s[small]))
    if np.any(~small):
        t = s[~small]
        # w + log w = t, Newton from the asymptotic start
        w = t - np.log(t)
        for _ in range(50):
            step = (w + np.log(w) - t) / (1.0 + 1.0 / w)
            w = w - step
            if np.all(np.abs(step) <= 1e-15 * w):
                break
        out[~small] = w
    return out


# -- noise models ----------------------------------------------------------------


class NoiseModel:
    """Data fidelity ``f1`` built from an observation ``y``.

    Subclasses provide :meth:`value` (may be ``inf`` off the domain) and
    :meth:`prox` computing ``prox_{beta f1}``.
    """

    kind: str
    y: np.ndarray

    @property
    def shape(self):
        return self.y.shape

    def value(self, eta) -> float:
        raise NotImplementedError

    def prox(self, x, beta: float) -> np.ndarray:
        raise NotImplementedError

    def prox_conjugate(self, u, sigma: float) -> np.ndarray:
        """``prox_{sigma f1*}(u)`` via the Moreau identity."""
        return prox_conjugate(self.prox, u, sigma)


def _check_beta(beta):
    if not beta > 0:
        raise DomainError(f"prox step must be positive, got {beta}")


class GaussianNoise(NoiseModel):
    kind = "gaussian"

    def __init__(self, y, sigma2: float):
        if not sigma2 > 0:
            raise ConfigError("gaussian noise variance must be positive")
        self.y = np.asarray(y, dtype=np.float64)
        self.sigma2 = float(sigma2)

    def value(self, eta) -> float:
        return float(np.sum((np.asarray(eta) - self.y) ** 2) / (2.0 * self.sigma2))

    def prox(self, x, beta):
        return prox_gaussian(x, beta, self)

    def gradient(self, eta):
        return (np.asarray(eta) - self.y) / self.sigma2


class PoissonNoise(NoiseModel):
    kind = "poisson"

    def __init__(self, y):
        y = np.asarray(y, dtype=np.float64)
        if np.any(y < 0):
            raise DomainError("poisson counts must be nonnegative")
        if np.any(y != np.round(y)):
            raise DomainError("poisson counts must be integer valued")
        self.y = y

    def value(self, eta) -> float:
        eta = np.asarray(eta, dtype=np.float64)
        pos = self.y > 0
        if np.any(eta[pos] <= 0) or np.any(eta[~pos] < 0):
            return np.inf
        return float(np.sum(eta) - np.sum(self.y[pos] * np.log(eta[pos])))

    def prox(self, x, beta):
        return prox_poisson(x, beta, self)


class MultiplicativeNoise(NoiseModel):
    """M-look speckle likelihood on the log-image ``z``.

    ``y`` is the (positive) intensity observation; its logarithm is stored
    in ``log_y`` and all evaluations happen in the log domain.
    """

    kind = "multiplicative"

    def __init__(self, y, looks: int):
        y = np.asarray(y, dtype=np.float64)
        if np.any(y <= 0):
            raise DomainError("multiplicative model needs a strictly positive observation")
        if int(looks) != looks or looks < 1:
            raise ConfigError("number of looks must be a positive integer")
        self.looks = int(looks)
        self.y = y
        self.log_y = np.log(y)

    def value(self, z) -> float:
        z = np.asarray(z, dtype=np.float64)
        return float(self.looks * np.sum(z + np.exp(self.log_y - z)))

    def prox(self, x, beta):
        return prox_multiplicative(x, beta, self)


def prox_gaussian(x, beta: float, model: GaussianNoise) -> np.ndarray:
    """``(beta * y + sigma2 * x) / (beta + sigma2)``."""
    _check_beta(beta)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.y.shape:
        raise DimensionError(f"{x.shape} != {model.y.shape}")
    s2 = model.sigma2
    return (beta * model.y + s2 * x) / (beta + s2)


def prox_poisson(x, beta: float, model: PoissonNoise) -> np.ndarray:
    """Positive root of ``u² - (x - beta) u - beta y = 0``, elementwise."""
    _check_beta(beta)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.y.shape:
        raise DimensionError(f"{x.shape} != {model.y.shape}")
    y = model.y
    b = x - beta
    disc = np.sqrt(b * b + 4.0 * beta * y)
    out = np.empty_like(b)
    pos = b >= 0
    out[pos] = 0.5 * (b[pos] + disc[pos])
    # b < 0: rationalised form avoids cancellation
    neg = ~pos
    denom = disc[neg] - b[neg]
    out[neg] = 2.0 * beta * y[neg] / denom
    return out


def prox_multiplicative(x, beta: float, model: MultiplicativeNoise) -> np.ndarray:
    """Minimiser of ``beta*M*(z + y*exp(-z)) + (z - x)²/2``, elementwise.

    Stationarity ``z - x + bM (1 - y e^{-z}) = 0`` with ``u = z - x + bM``
    gives ``u e^u = bM y e^{bM - x}``, so ``z = x - bM + W(bM y e^{bM - x})``.
    The argument of W is always positive.
    """
    _check_beta(beta)
    x = np.asarray(x, dtype=np.float64)
    if x.shape != model.y.shape:
        raise DimensionError(f"{x.shape} != {model.y.shape}")
    bm = beta * model.looks
    log_arg = np.log(bm) + model.log_y + bm - x
    return x - bm + _lambert_w0_of_exp(log_arg)


def prox_conjugate(prox: Callable, u, sigma: float) -> np.ndarray:
    """Moreau identity: ``prox_{sigma f*}(u) = u - sigma * prox_{f/sigma}(u / sigma)``."""
    _check_beta(sigma)
    u = np.asarray(u, dtype=np.float64)
    return u - sigma * prox(u / sigma, 1.0 / sigma)


# -- sparsity penalties ----------------------------------------------------------


class PenaltySpec:
    """Separable penalty ``gamma * sum_i psi(alpha[i])``."""

    gamma: float
    right_slope_at_zero: float

    def psi(self, t):
        raise NotImplementedError

    def value(self, alpha) -> float:
        return float(self.gamma * np.sum(self.psi(np.asarray(alpha))))

    def prox(self, v, step: float) -> np.ndarray:
        """``prox_{step * gamma * Psi}(v)``."""
        if self.gamma == 0:
            return np.array(v, dtype=np.float64, copy=True)
        return prox_penalty(v, step * self.gamma, self)


@dataclass
class L1Penalty(PenaltySpec):
    gamma: float = 1.0
    right_slope_at_zero: float = field(default=1.0, init=False)

    def __post_init__(self):
        if self.gamma < 0:
            raise ConfigError("gamma must be nonnegative")

    def psi(self, t):
        return np.abs(t)

    def dpsi(self, t):
        return np.ones_like(np.asarray(t, dtype=np.float64))


@dataclass
class GenericPenalty(PenaltySpec):
    """A penalty ``psi`` meeting the conditions for a decoupled thresholding prox.

    ``psi`` must be even, convex, nonnegative, nondecreasing on [0, inf),
    zero at 0, twice differentiable away from 0 and have a positive right
    derivative at 0. ``dpsi`` is its derivative on (0, inf); ``d2psi``
    (optional) its second derivative, used for Newton steps.
    """

    psi_fn: Callable
    dpsi_fn: Callable
    right_slope_at_zero: float
    gamma: float = 1.0
    d2psi_fn: Callable | None = None

    def __post_init__(self):
        if not self.right_slope_at_zero > 0:
            raise ConfigError("penalty needs a positive right derivative at zero")
        if self.gamma < 0:
            raise ConfigError("gamma must be nonnegative")
        probe = np.array([0.5, 1.0, 3.0])
        if float(self.psi_fn(np.zeros(1))[0]) != 0.0:
            raise ConfigError("penalty must vanish at zero")
        if not np.allclose(self.psi_fn(probe), self.psi_fn(-probe)):
            raise ConfigError("penalty must be even")
        vals = self.psi_fn(probe)
        if np.any(vals < 0) or np.any(np.diff(vals) < 0):
            raise ConfigError("penalty must be nonnegative and nondecreasing on [0, inf)")

    def psi(self, t):
        return self.psi_fn(np.asarray(t, dtype=np.float64))

    def dpsi(self, t):
        return self.dpsi_fn(np.asarray(t, dtype=np.float64))


def soft_threshold(v, thresh) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - thresh, 0.0)


def prox_penalty(v, delta: float, spec: PenaltySpec) -> np.ndarray:
    """``prox_{delta * psi}`` applied coordinatewise.

    Zero when ``|v| <= delta * psi'(0+)``; otherwise the root of
    ``a + delta * psi'(a) = |v|`` on ``(0, |v|]`` carrying the sign of ``v``.
    `spec.gamma` is not applied here; see :meth:`PenaltySpec.prox`.
    """
    if not delta > 0:
        raise DomainError("delta must be positive")
    v = np.asarray(v, dtype=np.float64)
    if isinstance(spec, L1Penalty):
        return soft_threshold(v, delta)
    if not spec.right_slope_at_zero > 0:
        raise ConfigError("penalty needs a positive right derivative at zero")

    mag = np.abs(v)
    out = np.zeros_like(v)
    active = mag > delta * spec.right_slope_at_zero
    if not np.any(active):
        return out
    target = mag[active]
    lo = np.zeros_like(target)
    hi = target.copy()
    a = 0.5 * target
    for _ in range(200):
        g = a + delta * spec.dpsi(a) - target
        conv = np.abs(g) <= 1e-13 * (1.0 + target)
        if np.all(conv):
            break
        lo = np.where(g < 0, a, lo)
        hi = np.where(g > 0, a, hi)
        if spec.d2psi_fn is not None:
            slope = 1.0 + delta * spec.d2psi_fn(a)
        else:
            h = 1e-7 * np.maximum(a, 1e-8)
            slope = 1.0 + delta * (spec.dpsi(a + h) - spec.dpsi(np.maximum(a - h, 1e-300))) / (
                a + h - np.maximum(a - h, 1e-300)
            )
        newton = a - g / slope
        bad = ~((newton > lo) & (newton < hi)) | ~np.isfinite(newton)
        nxt = np.where(bad, 0.5 * (lo + hi), newton)
        a = np.where(conv, a, nxt)
    out[active] = a
    return np.sign(v) * out


# -- constraint set --------------------------------------------------------------


@dataclass(frozen=True)
class BoxConstraint:
    lower: float = -np.inf
    upper: float = np.inf

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ConfigError("box lower bound exceeds upper bound")

    @classmethod
    def positive(cls) -> "BoxConstraint":
        return cls(0.0, np.inf)

    @classmethod
    def none(cls) -> "BoxConstraint":
        return cls()

    @property
    def is_active(self) -> bool:
        return np.isfinite(self.lower) or np.isfinite(self.upper)

    def project(self, x) -> np.ndarray:
        return project_box(x, self)

    def distance(self, x) -> float:
        x = np.asarray(x, dtype=np.float64)
        return float(np.linalg.norm(x - project_box(x, self)))


def project_box(x, c: BoxConstraint) -> np.ndarray:
    return np.clip(np.asarray(x, dtype=np.float64), c.lower, c.upper)


# -- projectors onto ker L1 = {x1 = Φα} and ker L2 = {x2 = H x1} ------------------


class KernelProjectorL1:
    """Projector onto ``{(x1, x2, α) : x1 = Φα}`` for a tight frame Φ."""

    def __init__(self, dictionary):
        c = getattr(dictionary, "frame_constant", None)
        if c is None or not getattr(dictionary, "is_tight", False):
            raise UnsupportedConfigError("kernel projector needs a tight-frame dictionary")
        self.dict = dictionary
        self.c = float(c)

    def __call__(self, p: ProductPoint) -> ProductPoint:
        r = (p.x1 - self.dict.apply(p.alpha)) / (1.0 + self.c)
        return ProductPoint(p.x1 - r, p.x2.copy(), p.alpha + self.dict.adjoint(r))


class KernelProjectorL2:
    """Projector onto ``{(x1, x2, α) : x2 = H x1}``."""

    def __init__(self, h):
        if not hasattr(h, "solve_I_plus_HHt"):
            raise UnsupportedConfigError(
                f"{type(h).__name__} cannot solve (I + H H^T) s = r in closed form"
            )
        self.h = h

    def __call__(self, p: ProductPoint) -> ProductPoint:
        s = self.h.solve_I_plus_HHt(p.x2 - self.h.apply(p.x1))
        return ProductPoint(p.x1 + self.h.adjoint(s), p.x2 - s, p.alpha.copy())


def project_ker_L1(p: ProductPoint, proj: KernelProjectorL1) -> ProductPoint:
    return proj(p)


def project_ker_L2(p: ProductPoint, proj: KernelProjectorL2) -> ProductPoint:
    return proj(p)
