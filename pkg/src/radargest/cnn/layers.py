"""Forward and backward kernels for the layer types, on numpy arrays.

Feature maps are (N, C, H, W) row-major float64 arrays. Convolution is
cross-correlation: the kernel is not flipped.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..errors import NonFiniteError, ParameterError


def check_finite(x: np.ndarray, where: str) -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise NonFiniteError(f"non-finite value in {where}")
    return x


def _pad_amount(kernel: int, padding: str) -> int:
    if padding == "same":
        return (kernel - 1) // 2
    if padding == "valid":
        return 0
    raise ParameterError(f"unknown padding {padding!r}")


def _batched(x: np.ndarray, ndim: int) -> tuple[np.ndarray, bool]:
    if x.ndim == ndim - 1:
        return x[None], True
    if x.ndim != ndim:
        raise ParameterError(f"expected a {ndim - 1}-D or {ndim}-D input, got shape {x.shape}")
    return x, False


def _im2col(xpad: np.ndarray, k: int, h: int, w: int) -> np.ndarray:
    """Patches laid out as (C*k*k, N*h*w) so the product with the kernel matrix is one GEMM."""
    n, c = xpad.shape[:2]
    cols = np.empty((c, k, k, n, h, w))
    xt = xpad.transpose(1, 0, 2, 3)
    for i in range(k):
        for j in range(k):
            cols[:, i, j] = xt[:, :, i : i + h, j : j + w]
    return cols.reshape(c * k * k, n * h * w)


def _col2im(dcols: np.ndarray, shape: tuple, k: int, h: int, w: int) -> np.ndarray:
    n, c, hp, wp = shape
    dcols = dcols.reshape(c, k, k, n, h, w)
    dxt = np.zeros((c, n, hp, wp))
    for i in range(k):
        for j in range(k):
            dxt[:, :, i : i + h, j : j + w] += dcols[:, i, j]
    return dxt.transpose(1, 0, 2, 3)


def _conv_geometry(x: np.ndarray, w: np.ndarray, padding: str):
    o, c, k, k2 = w.shape
    if k != k2:
        raise ParameterError("kernels must be square")
    if x.shape[1] != c:
        raise ParameterError(f"input has {x.shape[1]} maps, weights expect {c}")
    p = _pad_amount(k, padding)
    xpad = np.pad(x, ((0, 0), (0, 0), (p, p), (p, p))) if p else x
    h, wd = xpad.shape[2] - k + 1, xpad.shape[3] - k + 1
    if h < 1 or wd < 1:
        raise ParameterError("kernel larger than padded input")
    return xpad, p, h, wd


def conv_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, padding: str = "same", return_cols: bool = False):
    """Multi-map 2-D cross-correlation plus bias.

    x: (N, C, H, W) or (C, H, W); w: (O, C, k, k); b: (O,). With
    ``return_cols`` the patch matrix is returned too, for reuse by
    conv_backward.
    """
    x, squeeze = _batched(np.asarray(x, float), 4)
    xpad, _, h, wd = _conv_geometry(x, w, padding)
    o, k = w.shape[0], w.shape[2]
    cols = _im2col(xpad, k, h, wd)
    y = w.reshape(o, -1) @ cols
    y = y.reshape(o, x.shape[0], h, wd).transpose(1, 0, 2, 3) + b[None, :, None, None]
    y = np.ascontiguousarray(y)
    if squeeze:
        y = y[0]
    return (y, cols) if return_cols else y


def conv_backward(dy: np.ndarray, x: np.ndarray, w: np.ndarray, padding: str = "same", input_grad: bool = True, cols=None):
    """Gradients (dx, dw, db) of conv_forward; dx is None when ``input_grad`` is false."""
    x, squeeze = _batched(np.asarray(x, float), 4)
    dy, _ = _batched(dy, 4)
    xpad, p, h, wd = _conv_geometry(x, w, padding)
    o, k = w.shape[0], w.shape[2]
    dy_mat = dy.transpose(1, 0, 2, 3).reshape(o, -1)
    if cols is None:
        cols = _im2col(xpad, k, h, wd)
    dw = (dy_mat @ cols.T).reshape(w.shape)
    db = dy.sum(axis=(0, 2, 3))
    if not input_grad:
        return None, dw, db
    dxpad = _col2im(w.reshape(o, -1).T @ dy_mat, xpad.shape, k, h, wd)
    dx = dxpad[:, :, p : p + x.shape[2], p : p + x.shape[3]] if p else dxpad
    dx = np.ascontiguousarray(dx)
    return (dx[0] if squeeze else dx), dw, db


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def relu_backward(dy: np.ndarray, pre: np.ndarray) -> np.ndarray:
    # gradient is 0 at exactly 0
    return dy * (pre > 0)


def pool_output_size(n: int, p: int, s: int) -> int:
    return (n - p) // s + 1


def maxpool_overlap(x: np.ndarray, p: int = 3, s: int = 2):
    """Max over p x p windows at stride s.

    Returns (y, argmax) where argmax holds, per output cell, the flat index
    (row * W + col) of the winning input cell in its map. Ties go to the
    lowest flat index.
    """
    x, squeeze = _batched(np.asarray(x, float), 4)
    n, c, h, wd = x.shape
    if p < 1 or s < 1:
        raise ParameterError("pool size and stride must be >= 1")
    if p > h or p > wd:
        raise ParameterError(f"pool window {p} larger than input {h}x{wd}")
    win = sliding_window_view(x, (p, p), axis=(2, 3))[:, :, ::s, ::s]
    ho, wo = win.shape[2], win.shape[3]
    flat = win.reshape(n, c, ho, wo, p * p)
    local = np.argmax(flat, axis=-1)
    y = np.take_along_axis(flat, local[..., None], axis=-1)[..., 0]
    rows = np.arange(ho)[:, None] * s + local // p
    cols = np.arange(wo)[None, :] * s + local % p
    argmax = rows * wd + cols
    if squeeze:
        return y[0], argmax[0]
    return y, argmax


def maxpool_backward(dy: np.ndarray, argmax: np.ndarray, in_shape: tuple) -> np.ndarray:
    """Route each output gradient to its recorded argmax (overlaps accumulate)."""
    squeeze = len(in_shape) == 3
    if squeeze:
        dy, argmax, in_shape = dy[None], argmax[None], (1,) + tuple(in_shape)
    n, c, h, w = in_shape
    offsets = (np.arange(n * c) * (h * w)).reshape(n, c, 1, 1)
    idx = (argmax + offsets).ravel()
    dx = np.bincount(idx, weights=dy.ravel(), minlength=n * c * h * w).reshape(n, c, h, w)
    return dx[0] if squeeze else dx


def fc_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """y = W x + b for each row of x. w: (out, in)."""
    x = np.asarray(x, float)
    if x.shape[-1] != w.shape[1]:
        raise ParameterError(f"input width {x.shape[-1]} does not match weights {w.shape}")
    return x @ w.T + b


def fc_backward(dy: np.ndarray, x: np.ndarray, w: np.ndarray):
    x2 = np.atleast_2d(x)
    dy2 = np.atleast_2d(dy)
    dx = dy2 @ w
    dw = dy2.T @ x2
    db = dy2.sum(axis=0)
    return (dx.reshape(np.shape(x)), dw, db)


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def softmax_cross_entropy(logits: np.ndarray, labels) -> tuple[float, np.ndarray]:
    """Mean softmax cross-entropy and its gradient w.r.t. the logits.

    logits: (N, K) or (K,); labels: (N,) ints or a single int.
    """
    logits = np.asarray(logits, float)
    single = logits.ndim == 1
    z = logits[None] if single else logits
    y = np.atleast_1d(np.asarray(labels, dtype=int))
    n, k = z.shape
    if len(y) != n:
        raise ParameterError("one label per row of logits required")
    if np.any(y < 0) or np.any(y >= k):
        raise ParameterError(f"label out of range 0..{k - 1}")
    shifted = z - z.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    log_p = shifted - log_norm[:, None]
    loss = float(-log_p[np.arange(n), y].mean())
    grad = np.exp(log_p)
    grad[np.arange(n), y] -= 1.0
    grad /= n
    return loss, (grad[0] if single else grad)
