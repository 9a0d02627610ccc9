"""Image files: binary/ASCII PGM and PPM natively, PNG through Pillow.

Arrays are float in [0, 1], shape (H, W) for gray and (H, W, 3) for color.
"""
from __future__ import annotations

import os

import numpy as np


class ImageIOError(ValueError):
    pass


def _tokens(data: bytes, count: int):
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    out, pos = [], 2
    while len(out) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if data[pos:pos + 1] == b"#":
            while pos < len(data) and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ImageIOError("truncated PNM header")
        out.append(int(data[start:pos]))
    return out, pos + 1


def read_pnm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    magic = data[:2]
    if magic not in (b"P2", b"P3", b"P5", b"P6"):
        raise ImageIOError(f"{path}: unsupported PNM type {magic!r}")
    (w, h, maxval), pos = _tokens(data, 3)
    chans = 3 if magic in (b"P3", b"P6") else 1
    n = w * h * chans
    if magic in (b"P5", b"P6"):
        dtype = ">u2" if maxval > 255 else "u1"
        arr = np.frombuffer(data, dtype=dtype, count=n, offset=pos)
    else:
        arr = np.array(data[pos:].split()[:n], dtype=np.int64)
    if arr.size != n:
        raise ImageIOError(f"{path}: expected {n} samples, found {arr.size}")
    arr = arr.astype(float) / maxval
    return arr.reshape(h, w, 3) if chans == 3 else arr.reshape(h, w)


def to_bytes(img: np.ndarray) -> np.ndarray:
    return np.clip(np.rint(np.asarray(img, dtype=float) * 255.0), 0, 255).astype(np.uint8)


def write_pnm(path, img: np.ndarray) -> None:
    """Binary PGM (2-D) or PPM (3 channels), maxval 255; values clipped to [0, 1]."""
    img = np.asarray(img)
    if img.ndim == 2:
        magic = b"P5"
    elif img.ndim == 3 and img.shape[2] == 3:
        magic = b"P6"
    else:
        raise ImageIOError(f"cannot write array of shape {img.shape} as PNM")
    h, w = img.shape[:2]
    with open(path, "wb") as fh:
        fh.write(magic + b"\n%d %d\n255\n" % (w, h))
        fh.write(to_bytes(img).tobytes())


def read_image(path) -> np.ndarray:
    ext = os.path.splitext(str(path))[1].lower()
    if ext in (".pgm", ".ppm", ".pnm"):
        return read_pnm(path)
    try:
        from PIL import Image
    except ImportError as exc:  # pragma: no cover
        raise ImageIOError("reading non-PNM images needs Pillow") from exc
    with Image.open(path) as im:
        if im.mode not in ("L", "RGB"):
            im = im.convert("RGB")
        return np.asarray(im, dtype=float) / 255.0


def write_image(path, img: np.ndarray) -> None:
    write_pnm(path, img)


def extension_for(img: np.ndarray) -> str:
    return ".ppm" if np.ndim(img) == 3 else ".pgm"
