"""Procedural test images.

Stand-ins for an astronomical sky field, a cameraman-like scene and a
textured image, generated from fixed seeds so no binary assets are needed.
All images are nonnegative; the scene and texture span [0, 255].
"""
from __future__ import annotations

import numpy as np

__all__ = ["sky", "cameraman", "texture", "BUILTIN", "builtin"]


def _grid(shape):
    h, w = shape
    yy, xx = np.mgrid[0:h, 0:w]
    return yy / h, xx / w


def sky(shape=(64, 64), seed: int = 7) -> np.ndarray:
    """Point sources and a few diffuse blobs on a faint smooth background."""
    rng = np.random.default_rng(seed)
    yy, xx = _grid(shape)
    img = 1.0 + 0.5 * (yy + xx)
    for _ in range(3):
        cy, cx = rng.uniform(0.2, 0.8, 2)
        r = rng.uniform(0.06, 0.14)
        img += rng.uniform(5.0, 12.0) * np.exp(-((yy - cy) ** 2 + (xx - cx) ** 2) / (2 * r**2))
    h, w = shape
    n_points = max(4, (h * w) // 300)
    ys = rng.integers(0, h, n_points)
    xs = rng.integers(0, w, n_points)
    img[ys, xs] += rng.uniform(20.0, 60.0, n_points)
    return img


def cameraman(shape=(64, 64), seed: int = 3) -> np.ndarray:
    """Piecewise-smooth scene: bright sky gradient, grass, a dark figure and tripod."""
    rng = np.random.default_rng(seed)
    yy, xx = _grid(shape)
    img = 200.0 - 40.0 * yy
    img[yy > 0.7] = 120.0 + 10.0 * np.sin(14 * np.pi * xx[yy > 0.7])
    # coat
    body = (np.abs(xx - 0.42) < 0.12) & (yy > 0.3) & (yy < 0.75)
    img[body] = 25.0
    # head
    head = (yy - 0.22) ** 2 + (xx - 0.42) ** 2 < 0.07**2
    img[head] = 40.0
    # camera box and tripod legs
    img[(np.abs(yy - 0.35) < 0.05) & (np.abs(xx - 0.62) < 0.07)] = 10.0
    for slope in (-0.35, 0.0, 0.35):
        leg = (yy > 0.4) & (np.abs(xx - 0.62 - slope * (yy - 0.4)) < 0.012)
        img[leg] = 15.0
    # building on the horizon
    img[(yy > 0.55) & (yy < 0.7) & (np.abs(xx - 0.85) < 0.06)] = 160.0
    img += rng.normal(0.0, 1.0, shape)
    return np.clip(img, 0.0, 255.0)


def texture(shape=(64, 64), seed: int = 11) -> np.ndarray:
    """Oriented stripes and a checker patch over a smooth ramp."""
    rng = np.random.default_rng(seed)
    yy, xx = _grid(shape)
    img = 110.0 + 60.0 * np.cos(np.pi * (yy - 0.3)) * np.cos(np.pi * (xx - 0.6))
    stripes = (xx + 0.6 * yy) < 0.7
    img[stripes] += 45.0 * np.sign(np.sin(2 * np.pi * 6 * (xx[stripes] - 0.8 * yy[stripes])))
    check = (yy > 0.6) & (xx > 0.55)
    cells = (np.floor(yy * 8) + np.floor(xx * 8)) % 2
    img[check] = np.where(cells[check] > 0, 200.0, 70.0)
    img += rng.normal(0.0, 2.0, shape)
    return np.clip(img, 0.0, 255.0)


BUILTIN = {"sky": sky, "cameraman": cameraman, "texture": texture}


def builtin(name: str, shape) -> np.ndarray:
    try:
        fn = BUILTIN[name]
    except KeyError:
        raise KeyError(f"unknown builtin image {name!r}; choose from {sorted(BUILTIN)}") from None
    return fn(tuple(shape))
