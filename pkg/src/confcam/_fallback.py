"""Pure NumPy implementations of the hot kernels.

These are the reference versions; the compiled ``_ext`` module must agree
with them to floating-point accuracy.
"""
import numpy as np

POLE_TOL = 1e-14


def moebius_apply_array(a, b, c, d, z):
    z = np.asarray(z, dtype=complex)
    out = np.empty_like(z)
    finite = np.isfinite(z)
    with np.errstate(invalid="ignore", over="ignore"):
        den = b * z + a
    pole = finite & (np.abs(den) < POLE_TOL)
    ok = finite & ~pole
    out[ok] = (d * z[ok] + c) / den[ok]
    out[pole] = complex(np.inf, 0.0)
    if b == 0:
        out[~finite] = complex(np.inf, 0.0)
    else:
        out[~finite] = d / b
    return out


def bilinear_sample(img, row, col, fill=0.0):
    """Bilinear lookup at fractional ``(row, col)`` with constant ``fill`` outside.

    The raster covers ``[-0.5, H - 0.5] x [-0.5, W - 0.5]``; points in the
    half-pixel border are clamped to the edge pixels.
    """
    img = np.asarray(img, dtype=float)
    row = np.asarray(row, dtype=float)
    col = np.asarray(col, dtype=float)
    h, w = img.shape[:2]
    extra = img.shape[2:]
    inside = (
        np.isfinite(row) & np.isfinite(col)
        & (row >= -0.5) & (row <= h - 0.5) & (col >= -0.5) & (col <= w - 0.5)
    )
    r = np.clip(np.where(inside, row, 0.0), 0.0, h - 1)
    c = np.clip(np.where(inside, col, 0.0), 0.0, w - 1)
    r0 = np.minimum(np.floor(r).astype(np.intp), max(h - 2, 0))
    c0 = np.minimum(np.floor(c).astype(np.intp), max(w - 2, 0))
    r1 = np.minimum(r0 + 1, h - 1)
    c1 = np.minimum(c0 + 1, w - 1)
    fr = r - r0
    fc = c - c0
    if extra:
        fr = fr[..., None]
        fc = fc[..., None]
    top = img[r0, c0] * (1 - fc) + img[r0, c1] * fc
    bot = img[r1, c0] * (1 - fc) + img[r1, c1] * fc
    out = top * (1 - fr) + bot * fr
    mask = inside[..., None] if extra else inside
    return np.where(mask, out, fill)


def render_sum(coef, wm, wn, du, dth):
    """``out[p] = sum_{m,n} coef[m,n] exp(i (wm[m] du[p] + wn[n] dth[p]))``.

    ``coef`` is (M, N) complex; ``wm``/``wn`` are angular frequencies and
    ``du``/``dth`` node offsets, all 1-D real.
    """
    coef = np.asarray(coef, dtype=complex)
    du = np.asarray(du, dtype=float)
    dth = np.asarray(dth, dtype=float)
    out = np.empty(du.shape[0], dtype=complex)
    step = 4096
    for s in range(0, du.shape[0], step):
        em = np.exp(1j * np.outer(du[s:s + step], wm))
        en = np.exp(1j * np.outer(dth[s:s + step], wn))
        out[s:s + step] = np.einsum("pn,pn->p", em @ coef, en)
    return out
