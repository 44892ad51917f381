"""Finite-difference stencils on uniform grids."""

from __future__ import annotations

import numpy as np


def d1(f, h, order=2, axis=-1):
    """First derivative, central interior, one-sided at the ends."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, -1)
    out = np.empty_like(f)
    if order == 2:
        out[..., 1:-1] = (f[..., 2:] - f[..., :-2]) / (2.0 * h)
    elif order == 4:
        out[..., 2:-2] = (
            -f[..., 4:] + 8.0 * f[..., 3:-1] - 8.0 * f[..., 1:-3] + f[..., :-4]
        ) / (12.0 * h)
        out[..., 1] = (f[..., 2] - f[..., 0]) / (2.0 * h)
        out[..., -2] = (f[..., -1] - f[..., -3]) / (2.0 * h)
    else:
        raise ValueError(f"unsupported order {order}")
    out[..., 0] = (-3.0 * f[..., 0] + 4.0 * f[..., 1] - f[..., 2]) / (2.0 * h)
    out[..., -1] = (3.0 * f[..., -1] - 4.0 * f[..., -2] + f[..., -3]) / (2.0 * h)
    return np.moveaxis(out, -1, axis)


def d2(f, h, axis=-1):
    """Second derivative, central interior, one-sided at the ends."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, -1)
    out = np.empty_like(f)
    out[..., 1:-1] = (f[..., 2:] - 2.0 * f[..., 1:-1] + f[..., :-2]) / (h * h)
    out[..., 0] = (f[..., 0] - 2.0 * f[..., 1] + f[..., 2]) / (h * h)
    out[..., -1] = (f[..., -1] - 2.0 * f[..., -2] + f[..., -3]) / (h * h)
    return np.moveaxis(out, -1, axis)
