"""Single-step forward and backward passes for RNN, GRU and LSTM cells.

All cells share one parameter layout: ``W`` (input, G*hidden), ``U``
(hidden, G*hidden) and ``b`` (G*hidden), where G is the gate count.
Gate order is [i, f, g, o] for the LSTM and [z, r, n] for the GRU.

GRU:   z = sig(x Wz + h Uz + bz),  r = sig(x Wr + h Ur + br)
       n = tanh(x Wn + (r * h) Un + bn),  h' = (1 - z) * n + z * h
LSTM:  c' = f * c + i * g,  h' = o * tanh(c')
RNN:   h' = tanh(x W + h U + b)

Masked rows (mask == 0) carry the previous state through unchanged.
"""

from __future__ import annotations

import numpy as np

CELLS = ("rnn", "gru", "lstm")
GATES = {"rnn": 1, "gru": 3, "lstm": 4}


def sigmoid(x):
    # split by sign so exp never overflows
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def _check(cell, x, h, W, U):
    if cell not in GATES:
        raise ValueError(f"unknown cell {cell!r}")
    hidden = U.shape[0]
    if W.shape[1] != GATES[cell] * hidden or U.shape[1] != GATES[cell] * hidden:
        raise ValueError(f"{cell} weights do not match hidden size {hidden}")
    if x.shape[-1] != W.shape[0]:
        raise ValueError(f"input dim {x.shape[-1]} does not match W rows {W.shape[0]}")
    if h.shape[-1] != hidden:
        raise ValueError(f"state dim {h.shape[-1]} does not match hidden size {hidden}")


def step(cell, x, h, c, W, U, b, mask=None, check=False):
    """One time step on a batch. Returns ``(h', c', cache)``; ``c`` is None unless LSTM."""
    if check:
        _check(cell, x, h, W, U)
    hs = U.shape[0]
    if cell == "rnn":
        h_new = np.tanh(x @ W + h @ U + b)
        c_new = None
        cache = (x, h, h_new)
    elif cell == "lstm":
        a = x @ W + h @ U + b
        i = sigmoid(a[:, :hs])
        f = sigmoid(a[:, hs:2 * hs])
        g = np.tanh(a[:, 2 * hs:3 * hs])
        o = sigmoid(a[:, 3 * hs:])
        c_new = f * c + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        cache = (x, h, c, i, f, g, o, tc)
    elif cell == "gru":
        xw = x @ W + b
        azr = xw[:, :2 * hs] + h @ U[:, :2 * hs]
        z = sigmoid(azr[:, :hs])
        r = sigmoid(azr[:, hs:])
        rh = r * h
        n = np.tanh(xw[:, 2 * hs:] + rh @ U[:, 2 * hs:])
        h_new = (1.0 - z) * n + z * h
        c_new = None
        cache = (x, h, z, r, rh, n)
    else:
        raise ValueError(f"unknown cell {cell!r}")
    if mask is not None:
        keep = mask[:, None] > 0
        h_new = np.where(keep, h_new, h)
        if c_new is not None:
            c_new = np.where(keep, c_new, c)
    return h_new, c_new, (cell, mask, cache)


def step_backward(dh, dc, cache, W, U, grads):
    """Backward through one step.

    ``dh``/``dc`` are gradients w.r.t. the step outputs; parameter gradients are
    accumulated into ``grads`` (keys ``W``, ``U``, ``b``). Returns
    ``(dx, dh_prev, dc_prev)``.
    """
    cell, mask, inner = cache
    hs = U.shape[0]
    if mask is not None:
        m = mask[:, None]
        dh_carry, dh = dh * (1.0 - m), dh * m
        if dc is not None:
            dc_carry, dc = dc * (1.0 - m), dc * m
    else:
        dh_carry = 0.0
        dc_carry = 0.0
    dc_prev = None
    if cell == "rnn":
        x, h, h_new = inner
        da = dh * (1.0 - h_new * h_new)
        grads["W"] += x.T @ da
        grads["U"] += h.T @ da
        grads["b"] += da.sum(axis=0)
        dx = da @ W.T
        dh_prev = da @ U.T
    elif cell == "lstm":
        x, h, c, i, f, g, o, tc = inner
        dct = dc + dh * o * (1.0 - tc * tc)
        da = np.empty((dh.shape[0], 4 * hs))
        da[:, :hs] = dct * g * i * (1.0 - i)
        da[:, hs:2 * hs] = dct * c * f * (1.0 - f)
        da[:, 2 * hs:3 * hs] = dct * i * (1.0 - g * g)
        da[:, 3 * hs:] = dh * tc * o * (1.0 - o)
        grads["W"] += x.T @ da
        grads["U"] += h.T @ da
        grads["b"] += da.sum(axis=0)
        dx = da @ W.T
        dh_prev = da @ U.T
        dc_prev = dct * f
    else:
        x, h, z, r, rh, n = inner
        Un = U[:, 2 * hs:]
        dan = dh * (1.0 - z) * (1.0 - n * n)
        drh = dan @ Un.T
        dazr = np.empty((dh.shape[0], 2 * hs))
        dazr[:, :hs] = dh * (h - n) * z * (1.0 - z)
        dazr[:, hs:] = drh * h * r * (1.0 - r)
        da = np.concatenate([dazr, dan], axis=1)
        grads["W"] += x.T @ da
        grads["U"][:, :2 * hs] += h.T @ dazr
        grads["U"][:, 2 * hs:] += rh.T @ dan
        grads["b"] += da.sum(axis=0)
        dx = da @ W.T
        dh_prev = dh * z + drh * r + dazr @ U[:, :2 * hs].T
    dh_prev = dh_prev + dh_carry
    if dc_prev is not None:
        dc_prev = dc_prev + dc_carry
    return dx, dh_prev, dc_prev
