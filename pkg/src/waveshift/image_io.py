"""Image reading and writing: a strict PGM codec plus Pillow for other formats."""

from __future__ import annotations

import re
from pathlib import Path
from typing import Tuple

import numpy as np

__all__ = [
    "ImageError",
    "read_pgm",
    "write_pgm",
    "load_luma",
    "center_crop",
    "scale_to_u8",
    "LUMA_WEIGHTS",
]

LUMA_WEIGHTS = (0.299, 0.587, 0.114)

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n?)*([^\s#]+)")


class ImageError(ValueError):
    """Raised for undecodable or unsuitable image files; carries the path."""

    def __init__(self, path, message: str):
        super().__init__(f"{path}: {message}")
        self.path = str(path)


def _header_tokens(buf: bytes, count: int) -> Tuple[list, int]:
    tokens, pos = [], 0
    for _ in range(count):
        m = _TOKEN.match(buf, pos)
        if not m:
            raise ValueError("truncated header")
        tokens.append(m.group(1))
        pos = m.end()
    return tokens, pos


def read_pgm(path) -> Tuple[np.ndarray, int]:
    """Read a binary (P5) or ASCII (P2) PGM; returns ``(pixels, maxval)``.

    16-bit P5 samples are big-endian as the format requires.
    """
    path = Path(path)
    try:
        buf = path.read_bytes()
    except OSError as exc:
        raise ImageError(path, f"cannot read ({exc.strerror})") from None
    try:
        (magic, w, h, maxval), pos = _header_tokens(buf, 4)
        width, height, maxval = int(w), int(h), int(maxval)
    except ValueError as exc:
        raise ImageError(path, f"bad PGM header ({exc})") from None
    if magic not in (b"P5", b"P2"):
        raise ImageError(path, f"not a PGM file (magic {magic!r})")
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise ImageError(path, f"bad PGM dimensions {width}x{height} maxval {maxval}")
    n = width * height
    if magic == b"P2":
        values = buf[pos:].split()
        if len(values) < n:
            raise ImageError(path, f"expected {n} samples, found {len(values)}")
        data = np.array([int(v) for v in values[:n]], dtype=np.uint16)
    else:
        # exactly one whitespace byte separates the header from the raster
        pos += 1
        dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
        raw = buf[pos : pos + n * dtype.itemsize]
        if len(raw) < n * dtype.itemsize:
            raise ImageError(path, "truncated raster")
        data = np.frombuffer(raw, dtype=dtype)
    if data.max(initial=0) > maxval:
        raise ImageError(path, f"sample exceeds maxval {maxval}")
    return data.reshape(height, width).astype(np.uint16 if maxval > 255 else np.uint8), maxval


def write_pgm(path, pixels: np.ndarray, maxval: int = 255) -> None:
    """Write a binary P5 PGM from integer pixels."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 2:
        raise ValueError(f"PGM needs a 2D array, got shape {pixels.shape}")
    if not 0 < maxval < 65536:
        raise ValueError(f"maxval out of range: {maxval}")
    if pixels.min(initial=0) < 0 or pixels.max(initial=0) > maxval:
        raise ValueError("pixel values outside [0, maxval]")
    dtype = ">u2" if maxval > 255 else np.uint8
    h, w = pixels.shape
    header = f"P5\n{w} {h}\n{maxval}\n".encode("ascii")
    Path(path).write_bytes(header + pixels.astype(dtype).tobytes())


def scale_to_u8(values: np.ndarray, dark_high: bool = False) -> np.ndarray:
    """Min-max scale to 0..255; a constant input maps to mid-gray 128."""
    v = np.asarray(values, dtype=float)
    finite = np.isfinite(v)
    if not finite.any():
        return np.full(v.shape, 128, dtype=np.uint8)
    lo, hi = v[finite].min(), v[finite].max()
    if hi <= lo:
        out = np.full(v.shape, 128.0)
    else:
        t = (np.where(finite, v, lo) - lo) / (hi - lo)
        out = np.rint(255 * (1 - t if dark_high else t))
    return out.astype(np.uint8)


def load_luma(path) -> np.ndarray:
    """Luma in ``[0, 1]`` (BT.601 weights for colour input) as float64."""
    path = Path(path)
    if path.suffix.lower() in (".pgm", ".pnm") or path.read_bytes()[:2] in (b"P5", b"P2"):
        pixels, maxval = read_pgm(path)
        return pixels.astype(float) / maxval
    from PIL import Image, UnidentifiedImageError

    try:
        with Image.open(path) as im:
            im.load()
            if im.mode in ("I;16", "I;16B", "I;16L"):
                return np.asarray(im, dtype=float) / 65535.0
            if im.mode == "L":
                return np.asarray(im, dtype=float) / 255.0
            rgb = np.asarray(im.convert("RGB"), dtype=float)
    except (UnidentifiedImageError, OSError) as exc:
        raise ImageError(path, f"cannot decode image ({exc})") from None
    return rgb @ np.array(LUMA_WEIGHTS) / 255.0


def center_crop(image: np.ndarray, size: int, shift=(0, 0), path="<array>") -> np.ndarray:
    """``size x size`` crop at the floor-centered offset minus ``shift``.

    Cropping at ``c - u`` yields the translate ``T_u`` of the centered crop.
    """
    h, w = image.shape
    c0, c1 = (h - size) // 2, (w - size) // 2
    r0, r1 = c0 - int(shift[0]), c1 - int(shift[1])
    if h < size or w < size:
        raise ImageError(path, f"image {h}x{w} is smaller than the {size}x{size} crop")
    if r0 < 0 or r1 < 0 or r0 + size > h or r1 + size > w:
        raise ImageError(path, f"shift {tuple(shift)} leaves the {h}x{w} image")
    return image[r0 : r0 + size, r1 : r1 + size]
