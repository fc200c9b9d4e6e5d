"""Central finite-difference gradients for checking the analytic backward passes."""

from __future__ import annotations

import numpy as np

STEP = 1e-5


def numeric_grad(f, x: np.ndarray, step: float = STEP) -> np.ndarray:
    """d f / d x by central differences; ``f`` maps the (mutated in place) x to a scalar."""
    g = np.zeros_like(x, dtype=float)
    flat = x.reshape(-1)
    gflat = g.reshape(-1)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + step
        up = f(x)
        flat[i] = old - step
        down = f(x)
        flat[i] = old
        gflat[i] = (up - down) / (2 * step)
    return g


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """||a - n|| / max(||n||, 1e-8)."""
    return float(np.linalg.norm(analytic - numeric) / max(np.linalg.norm(numeric), 1e-8))
