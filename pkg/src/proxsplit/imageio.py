"""Image files: the raw IPF1 float format and 8-bit binary PGM.

IPF1 layout (all little endian)::

    b"IPF1" | width: uint32 | height: uint32 | width*height float64, row-major
"""
from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .core import DimensionError, as_image

__all__ = ["write_ipf", "read_ipf", "write_pgm", "read_pgm", "load_image", "save_image"]

MAGIC = b"IPF1"
_HEADER = struct.Struct("<4sII")


def write_ipf(path, image) -> None:
    img = as_image(image)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, w, h))
        fh.write(np.ascontiguousarray(img, dtype="<f8").tobytes())


def read_ipf(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        raise ValueError(f"{path}: truncated IPF1 header")
    magic, w, h = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise ValueError(f"{path}: not an IPF1 file")
    body = raw[_HEADER.size :]
    if len(body) != 8 * w * h:
        raise DimensionError(f"{path}: expected {w * h} values, found {len(body) // 8}")
    return np.frombuffer(body, dtype="<f8").astype(np.float64).reshape(h, w)


def write_pgm(path, image, lo: float | None = None, hi: float | None = None) -> None:
    """Write an 8-bit P5 PGM, mapping ``[lo, hi]`` (default: data range) linearly to [0, 255]."""
    img = as_image(image)
    lo = float(img.min()) if lo is None else lo
    hi = float(img.max()) if hi is None else hi
    scale = 255.0 / (hi - lo) if hi > lo else 0.0
    data = np.clip(np.round((img - lo) * scale), 0, 255).astype(np.uint8)
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(data.tobytes())


def read_pgm(path) -> np.ndarray:
    """Read a binary (P5) PGM as float64 in [0, maxval]."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while pos < len(raw) and raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            while pos < len(raw) and raw[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(raw) and not raw[pos : pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    pos += 1
    if tokens[0] != b"P5":
        raise ValueError(f"{path}: only binary P5 PGM is supported")
    w, h, maxval = (int(t) for t in tokens[1:])
    dtype = np.uint8 if maxval < 256 else ">u2"
    data = np.frombuffer(raw, dtype=dtype, count=w * h, offset=pos)
    return data.astype(np.float64).reshape(h, w)


def load_image(path) -> np.ndarray:
    """Read IPF1 or PGM, chosen by magic bytes."""
    with open(path, "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_ipf(path)
    if head[:2] == b"P5":
        return read_pgm(path)
    raise ValueError(f"{path}: unrecognised image format")


def save_image(path, image) -> None:
    if str(path).lower().endswith(".pgm"):
        write_pgm(path, image)
    else:
        write_ipf(path, image)
