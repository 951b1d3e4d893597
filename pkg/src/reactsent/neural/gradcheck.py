"""Central finite-difference verification of the analytic gradients."""

from __future__ import annotations

from collections import OrderedDict
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .model import ModelSpec, RecurrentClassifier, bce_with_logits


def relative_error(analytic, numeric):
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    return np.abs(a - n) / np.maximum(1e-8, np.abs(a) + np.abs(n))


@dataclass
class GradCheckResult:
    max_rel_error: float
    per_param: dict[str, float]
    n_checked: int


FD_PRECISIONS = {"double": np.float64, "extended": np.longdouble}


def _loss(model, inputs, mask, labels):
    _, cache = model.forward(inputs, mask)
    return bce_with_logits(cache.logits, labels)[0]


@contextmanager
def _shadow(model: RecurrentClassifier, dtype):
    """Temporarily swap the model's parameters for copies of the given dtype."""
    params, embedding = model.params, model.embedding
    model.params = OrderedDict((k, v.astype(dtype)) for k, v in params.items())
    if embedding is not None:
        model.embedding = model.params.get("embedding", embedding.astype(dtype))
    try:
        yield model.params
    finally:
        model.params, model.embedding = params, embedding


def gradient_check(model: RecurrentClassifier, inputs, mask, labels, eps: float = 1e-5,
                   params=None, fd_precision: str = "extended") -> GradCheckResult:
    """Compare backprop gradients with central differences of the mean BCE loss.

    The analytic gradient always comes from the float64 model. The finite
    differences are evaluated in ``fd_precision``: ``"double"`` or ``"extended"``
    (``np.longdouble``). In double precision the loss is only resolved to about
    1e-16, which is 5e-12 in a difference quotient at eps=1e-5; entries whose true
    gradient is near zero then exceed 1e-4 relative error on rounding alone.
    ``params`` restricts the check to some parameter names (default: all).
    """
    _, cache = model.forward(inputs, mask)
    _, dlogits = bce_with_logits(cache.logits, labels)
    analytic = model.backward(cache, dlogits)
    dtype = FD_PRECISIONS[fd_precision]
    names = list(model.params) if params is None else list(params)
    if inputs.ndim == 3:
        inputs = np.asarray(inputs).astype(dtype)
    labels = np.asarray(labels).astype(dtype)
    with _shadow(model, dtype) as shadow:
        per_param, n = {}, 0
        for name in names:
            err, size = _check_param(model, shadow[name], name, analytic[name],
                                     inputs, mask, labels, dtype(eps))
            per_param[name] = err
            n += size
    return GradCheckResult(max(per_param.values(), default=0.0), per_param, n)


def _check_param(model, theta, name, analytic, inputs, mask, labels, eps):
    numeric = np.zeros_like(theta)
    flat = theta.reshape(-1)
    num_flat = numeric.reshape(-1)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + eps
        up = _loss(model, inputs, mask, labels)
        flat[i] = orig - eps
        down = _loss(model, inputs, mask, labels)
        flat[i] = orig
        num_flat[i] = (up - down) / (2 * eps)
    if name == "embedding":
        # PAD row is frozen by construction; its analytic gradient is pinned to zero
        numeric[0] = 0.0
    err = relative_error(analytic, numeric)
    return (float(err.max()) if err.size else 0.0), flat.size


def random_instance(spec: ModelSpec, seed: int, input_dim: int = 3, batch: int = 2,
                    seq_len: int = 4, padded: bool = True):
    """A tiny random model and batch for gradient checking.

    With ``padded`` the second sequence is shorter than ``seq_len`` so masking
    is exercised as well.
    """
    rng = np.random.default_rng(seed)
    model = RecurrentClassifier(spec, input_dim, seed=seed)
    x = rng.normal(0.0, 1.0, (batch, seq_len, input_dim))
    mask = np.ones((batch, seq_len))
    if padded and batch > 1 and seq_len > 1:
        mask[1, seq_len - 1:] = 0.0
        x[1, seq_len - 1:] = 0.0
    labels = rng.integers(0, 2, batch).astype(np.float64)
    return model, x, mask, labels
