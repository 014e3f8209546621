"""Haar wavelet dictionaries with periodic boundaries.

Two dictionaries are provided:

``orthobasis-haar``
    The decimated 2-D Haar transform, an orthonormal basis (L = n).
``undecimated-haar``
    The stationary (a trous) 2-D Haar transform, a tight frame with
    ``L = n * (3 * levels + 1)`` coefficients.

In both cases :meth:`Dictionary.apply` is synthesis (coefficients to image)
and :meth:`Dictionary.adjoint` is analysis.
"""
from __future__ import annotations

import numpy as np

from .core import DimensionError, ConfigError, LinearMap, as_coefs, as_image

__all__ = ["Dictionary", "synthesize", "analyze", "default_levels"]

KINDS = ("orthobasis-haar", "undecimated-haar", "identity")

_SQRT2 = np.sqrt(2.0)
# Parseval a trous filters are (1, 1)/2 and (1, -1)/2; this scale makes the
# finest-level atoms unit norm and the frame constant exactly 4.
_UNDECIMATED_SCALE = 2.0


def default_levels(shape, max_levels: int = 3) -> int:
    """Largest depth <= `max_levels` such that both sides are divisible by 2**depth
    and the coarsest band is at least 2 pixels wide."""
    levels = 0
    h, w = shape
    while levels < max_levels and h % 2 == 0 and w % 2 == 0 and min(h, w) >= 4:
        h //= 2
        w //= 2
        levels += 1
    return max(levels, 1)


class Dictionary(LinearMap):
    """Wavelet synthesis operator Φ : coefficients -> image.

    Parameters
    ----------
    kind : {'orthobasis-haar', 'undecimated-haar', 'identity'}
        ``'identity'`` is the pixel basis (Φ = I); it ignores `levels`.
    image_shape : tuple of int
        ``(height, width)``; both must be divisible by ``2**levels``.
    levels : int, optional
        Decomposition depth. Defaults to :func:`default_levels`.

    Attributes
    ----------
    frame_constant : float
        The constant ``c`` with ``Φ Φᵀ = c I``, measured at construction.
    n_coefs : int
        Number of atoms ``L``.
    """

    def __init__(self, kind: str, image_shape, levels: int | None = None):
        if kind not in KINDS:
            raise ConfigError(f"unknown dictionary kind {kind!r}; expected one of {KINDS}")
        image_shape = tuple(int(s) for s in image_shape)
        if len(image_shape) != 2 or min(image_shape) < 1:
            raise DimensionError(f"invalid image shape {image_shape}")
        if kind == "identity":
            levels = 0
        elif levels is None:
            levels = default_levels(image_shape)
        levels = int(levels)
        if levels < 1 and kind != "identity":
            raise ConfigError("levels must be >= 1")
        step = 2**levels
        if image_shape[0] % step or image_shape[1] % step:
            raise ConfigError(
                f"image shape {image_shape} is not divisible by 2**levels = {step}"
            )
        self.kind = kind
        self.levels = levels
        self.image_shape = image_shape
        n = image_shape[0] * image_shape[1]
        self.n_bands = 3 * levels + 1 if kind == "undecimated-haar" else 1
        self.n_coefs = n * self.n_bands
        self.in_shape = (self.n_coefs,)
        self.out_shape = image_shape
        self.frame_constant = self._measure_frame_constant()

    def __repr__(self):
        return (
            f"Dictionary(kind={self.kind!r}, image_shape={self.image_shape}, "
            f"levels={self.levels})"
        )

    def _measure_frame_constant(self) -> float:
        rng = np.random.default_rng(12345)
        x = rng.standard_normal(self.image_shape)
        y = self.apply(self.adjoint(x))
        c = float(np.vdot(x, y) / np.vdot(x, x))
        if np.linalg.norm(y - c * x) > 1e-10 * np.linalg.norm(y):
            raise ConfigError(f"{self.kind} is not a tight frame on {self.image_shape}")
        return c

    @property
    def is_tight(self) -> bool:
        return True

    def norm(self, iters: int = 200, seed: int = 0) -> float:
        return float(np.sqrt(self.frame_constant))

    def band_atom_norms(self) -> np.ndarray:
        """ℓ2 norm of the atoms in each band (all atoms of a band share it)."""
        if self.kind != "undecimated-haar":
            return np.ones(1)
        s = _UNDECIMATED_SCALE
        norms = [s * 2.0 ** -(j + 1) for j in range(self.levels) for _ in range(3)]
        norms.append(s * 2.0**-self.levels)
        return np.array(norms)

    # -- synthesis / analysis -------------------------------------------------

    def apply(self, alpha) -> np.ndarray:
        alpha = as_coefs(alpha, self.n_coefs)
        if self.kind == "identity":
            return alpha.reshape(self.image_shape).copy()
        if self.kind == "orthobasis-haar":
            return _haar_synthesis(alpha.reshape(self.image_shape), self.levels)
        bands = alpha.reshape((self.n_bands,) + self.image_shape)
        return _UNDECIMATED_SCALE * _atrous_synthesis(bands, self.levels)

    def adjoint(self, x) -> np.ndarray:
        x = as_image(x, self.image_shape)
        if self.kind == "identity":
            return x.ravel().copy()
        if self.kind == "orthobasis-haar":
            return _haar_analysis(x, self.levels).ravel()
        return (_UNDECIMATED_SCALE * _atrous_analysis(x, self.levels)).ravel()

    synthesize = apply
    analyze = adjoint


def synthesize(dictionary: Dictionary, alpha) -> np.ndarray:
    """Φα."""
    return dictionary.apply(alpha)


def analyze(dictionary: Dictionary, x) -> np.ndarray:
    """Φᵀx."""
    return dictionary.adjoint(x)


# -- decimated orthonormal Haar (pyramid layout, in place) ----------------------


def _haar_analysis(x: np.ndarray, levels: int) -> np.ndarray:
    out = x.copy()
    h, w = x.shape
    for _ in range(levels):
        block = out[:h, :w]
        lo = (block[:, 0::2] + block[:, 1::2]) / _SQRT2
        hi = (block[:, 0::2] - block[:, 1::2]) / _SQRT2
        rows = np.concatenate([lo, hi], axis=1)
        lo = (rows[0::2, :] + rows[1::2, :]) / _SQRT2
        hi = (rows[0::2, :] - rows[1::2, :]) / _SQRT2
        out[:h, :w] = np.concatenate([lo, hi], axis=0)
        h //= 2
        w //= 2
    return out


def _haar_synthesis(c: np.ndarray, levels: int) -> np.ndarray:
    out = c.copy()
    h0, w0 = c.shape
    for lev in reversed(range(levels)):
        h, w = h0 >> lev, w0 >> lev
        block = out[:h, :w]
        lo, hi = block[: h // 2, :], block[h // 2 :, :]
        rows = np.empty_like(block)
        rows[0::2, :] = (lo + hi) / _SQRT2
        rows[1::2, :] = (lo - hi) / _SQRT2
        lo, hi = rows[:, : w // 2], rows[:, w // 2 :]
        block = np.empty_like(rows)
        block[:, 0::2] = (lo + hi) / _SQRT2
        block[:, 1::2] = (lo - hi) / _SQRT2
        out[:h, :w] = block
    return out


# -- undecimated Haar, Parseval normalisation -----------------------------------
# Band order: for each level j = 1..levels the (low-row/high-col,
# high-row/low-col, high/high) details, then the final approximation.


def _lo(v, d, axis):
    return 0.5 * (v + np.roll(v, -d, axis=axis))


def _hi(v, d, axis):
    return 0.5 * (v - np.roll(v, -d, axis=axis))


def _lo_adj(v, d, axis):
    return 0.5 * (v + np.roll(v, d, axis=axis))


def _hi_adj(v, d, axis):
    return 0.5 * (v - np.roll(v, d, axis=axis))


def _atrous_analysis(x: np.ndarray, levels: int) -> np.ndarray:
    bands = np.empty((3 * levels + 1,) + x.shape)
    approx = x
    for j in range(levels):
        d = 2**j
        lo_r = _lo(approx, d, 0)
        hi_r = _hi(approx, d, 0)
        bands[3 * j] = _hi(lo_r, d, 1)
        bands[3 * j + 1] = _lo(hi_r, d, 1)
        bands[3 * j + 2] = _hi(hi_r, d, 1)
        approx = _lo(lo_r, d, 1)
    bands[-1] = approx
    return bands


def _atrous_synthesis(bands: np.ndarray, levels: int) -> np.ndarray:
    approx = bands[-1]
    for j in reversed(range(levels)):
        d = 2**j
        lo_r = _lo_adj(approx, d, 1) + _hi_adj(bands[3 * j], d, 1)
        hi_r = _lo_adj(bands[3 * j + 1], d, 1) + _hi_adj(bands[3 * j + 2], d, 1)
        approx = _lo_adj(lo_r, d, 0) + _hi_adj(hi_r, d, 0)
    return approx
