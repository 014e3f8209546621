"""Forward operators: periodic convolution, pixel mask and identity.

Each operator knows how to solve ``(I + H Hᵀ) s = r`` in the domain where
``H Hᵀ`` is diagonal, which is what the kernel projector of the primal
scheme needs.
"""
from __future__ import annotations

import numpy as np

from .core import DimensionError, DomainError, Identity, LinearMap, as_image

__all__ = [
    "ConvOperator",
    "MaskOperator",
    "IdentityOperator",
    "gaussian_psf",
    "random_mask",
    "solve_I_plus_HHt",
]


class ConvOperator(LinearMap):
    """Circular convolution with a point spread function.

    The PSF is given as a full-size image whose centre sits at pixel
    ``(h // 2, w // 2)``; it is shifted to ``(0, 0)`` once at construction.
    Pass ``centered=False`` if the PSF is already anchored at the origin.
    """

    def __init__(self, psf, centered: bool = True):
        psf = as_image(psf)
        self.psf = np.fft.ifftshift(psf) if centered else psf.copy()
        self.in_shape = self.out_shape = psf.shape
        # numpy's fft2/ifft2 pair is unnormalised forward, 1/n inverse: exact round trip.
        self.psf_hat = np.fft.fft2(self.psf)
        self._gain = np.abs(self.psf_hat) ** 2

    def apply(self, x):
        x = as_image(x, self.in_shape)
        return np.real(np.fft.ifft2(self.psf_hat * np.fft.fft2(x)))

    def adjoint(self, y):
        y = as_image(y, self.out_shape)
        return np.real(np.fft.ifft2(np.conj(self.psf_hat) * np.fft.fft2(y)))

    def norm(self, iters: int = 200, seed: int = 0) -> float:
        return float(np.max(np.abs(self.psf_hat)))

    def solve_I_plus_HHt(self, r):
        r = as_image(r, self.out_shape)
        return np.real(np.fft.ifft2(np.fft.fft2(r) / (1.0 + self._gain)))


class MaskOperator(LinearMap):
    """Pointwise multiplication by a binary mask (1 = observed)."""

    def __init__(self, mask):
        mask = np.asarray(mask)
        if mask.ndim != 2:
            raise DimensionError(f"mask must be 2-D, got shape {mask.shape}")
        if not np.all((mask == 0) | (mask == 1)):
            raise DomainError("mask entries must be 0 or 1")
        self.mask = mask.astype(np.float64)
        self.in_shape = self.out_shape = mask.shape

    def apply(self, x):
        return as_image(x, self.in_shape) * self.mask

    def adjoint(self, y):
        return as_image(y, self.out_shape) * self.mask

    def norm(self, iters: int = 200, seed: int = 0) -> float:
        return float(self.mask.max(initial=0.0))

    def solve_I_plus_HHt(self, r):
        return as_image(r, self.out_shape) / (1.0 + self.mask)

    @property
    def missing_fraction(self) -> float:
        return float(1.0 - self.mask.mean())


class IdentityOperator(Identity):
    def apply(self, x):
        return as_image(x, self.in_shape).copy()

    def adjoint(self, y):
        return as_image(y, self.out_shape).copy()

    def solve_I_plus_HHt(self, r):
        return as_image(r, self.out_shape) / 2.0


def solve_I_plus_HHt(op, r):
    """Solve ``(I + H Hᵀ) s = r`` for a convolution, mask or identity operator."""
    return op.solve_I_plus_HHt(r)


def gaussian_psf(shape, width: float) -> np.ndarray:
    """Centred isotropic Gaussian PSF of standard deviation `width` pixels, unit sum."""
    if width <= 0:
        raise DomainError("PSF width must be positive")
    h, w = shape
    yy = np.arange(h) - h // 2
    xx = np.arange(w) - w // 2
    psf = np.exp(-(yy[:, None] ** 2 + xx[None, :] ** 2) / (2.0 * width**2))
    return psf / psf.sum()


def random_mask(shape, missing_fraction: float, seed: int) -> np.ndarray:
    """I.i.d. coin flips: each pixel is missing with probability `missing_fraction`."""
    if not 0.0 <= missing_fraction < 1.0:
        raise DomainError("missing_fraction must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    return (rng.random(shape) >= missing_fraction).astype(np.float64)
