"""Stacked, optionally bidirectional recurrent binary classifiers in numpy.

Everything runs in float64. The forward pass keeps a cache that
:meth:`RecurrentClassifier.backward` walks in reverse (backpropagation through
time) to produce exact gradients for every parameter.
"""

from __future__ import annotations

import json
import re
from collections import OrderedDict
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import cells
from .cells import CELLS, GATES, sigmoid

READOUTS = ("last", "mean")
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ModelSpec:
    cell: str = "lstm"
    bidirectional: bool = False
    layers: int = 1
    hidden: int = 128
    readout: str = "last"
    dropout: float = 0.0

    def __post_init__(self):
        if self.cell not in CELLS:
            raise ValueError(f"cell must be one of {CELLS}, got {self.cell!r}")
        if self.layers not in (1, 2, 3):
            raise ValueError(f"layers must be 1, 2 or 3, got {self.layers}")
        if self.hidden < 1:
            raise ValueError("hidden must be >= 1")
        if self.readout not in READOUTS:
            raise ValueError(f"readout must be one of {READOUTS}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError("dropout must lie in [0, 1)")

    @property
    def directions(self) -> int:
        return 2 if self.bidirectional else 1

    @property
    def name(self) -> str:
        base = ("Bi" if self.bidirectional else "") + self.cell.upper()
        return f"Stacked {base} {self.layers}" if self.layers > 1 else base

    @property
    def slug(self) -> str:
        return ("bi" if self.bidirectional else "") + self.cell + (str(self.layers) if self.layers > 1 else "")

    @classmethod
    def from_name(cls, name: str, **kwargs) -> "ModelSpec":
        """Parse names such as ``rnn``, ``gru``, ``bilstm``, ``lstm2`` or ``bilstm3``."""
        m = re.fullmatch(r"(bi)?(rnn|gru|lstm)([123])?", name.strip().lower().replace("-", "").replace("_", ""))
        if not m:
            raise ValueError(f"unrecognised model name {name!r}")
        return cls(cell=m.group(2), bidirectional=bool(m.group(1)),
                   layers=int(m.group(3) or 1), **kwargs)


def expected_param_count(spec: ModelSpec, input_dim: int, embedding_rows: int = 0) -> int:
    """Closed-form parameter count.

    Each (layer, direction) holds G*h*(in + h + 1) weights, G = 1/3/4 for
    rnn/gru/lstm; the first layer sees ``input_dim`` inputs, later ones
    ``h * directions``. The head adds ``h * directions + 1``. Trainable
    embeddings add ``embedding_rows * input_dim``.
    """
    g, h, d = GATES[spec.cell], spec.hidden, spec.directions
    total = 0
    for layer in range(spec.layers):
        n_in = input_dim if layer == 0 else h * d
        total += d * g * h * (n_in + h + 1)
    return total + h * d + 1 + embedding_rows * input_dim


def _dir_names(spec):
    return ("fwd", "bwd") if spec.bidirectional else ("fwd",)


@dataclass
class ForwardCache:
    ids: np.ndarray | None
    mask: np.ndarray
    layers: list = field(default_factory=list)
    dropout_masks: list = field(default_factory=list)
    readout: np.ndarray | None = None
    top: np.ndarray | None = None
    logits: np.ndarray | None = None


class RecurrentClassifier:
    """Embedding lookup (optional), recurrent stack, readout and sigmoid head."""

    def __init__(self, spec: ModelSpec, input_dim: int, seed: int = 0,
                 embedding: np.ndarray | None = None, train_embedding: bool = False):
        self.spec = spec
        self.input_dim = input_dim
        self.embedding = None if embedding is None else np.asarray(embedding, dtype=np.float64)
        if self.embedding is not None and self.embedding.shape[1] != input_dim:
            raise ValueError("embedding dim does not match input_dim")
        self.train_embedding = train_embedding and self.embedding is not None
        self.params: OrderedDict[str, np.ndarray] = OrderedDict()
        rng = np.random.default_rng(seed)
        bound = 1.0 / np.sqrt(spec.hidden)
        g, h, d = GATES[spec.cell], spec.hidden, spec.directions
        for layer in range(spec.layers):
            n_in = input_dim if layer == 0 else h * d
            for direction in _dir_names(spec):
                key = f"l{layer}.{direction}"
                self.params[key + ".W"] = rng.uniform(-bound, bound, (n_in, g * h))
                self.params[key + ".U"] = rng.uniform(-bound, bound, (h, g * h))
                self.params[key + ".b"] = rng.uniform(-bound, bound, g * h)
        self.params["head.w"] = rng.uniform(-bound, bound, h * d)
        self.params["head.b"] = rng.uniform(-bound, bound, 1)
        if self.train_embedding:
            self.params["embedding"] = self.embedding

    def n_params(self) -> int:
        return sum(p.size for p in self.params.values())

    def embed(self, ids: np.ndarray) -> np.ndarray:
        table = self.params["embedding"] if self.train_embedding else self.embedding
        return table[ids]

    # forward -----------------------------------------------------------

    def _run_direction(self, x, mask, key, reverse):
        W, U, b = self.params[key + ".W"], self.params[key + ".U"], self.params[key + ".b"]
        B, T, _ = x.shape
        h = np.zeros((B, self.spec.hidden), dtype=x.dtype)
        c = np.zeros((B, self.spec.hidden), dtype=x.dtype) if self.spec.cell == "lstm" else None
        out = np.empty((B, T, self.spec.hidden), dtype=x.dtype)
        step_caches = [None] * T
        order = range(T - 1, -1, -1) if reverse else range(T)
        for t in order:
            h, c, step_caches[t] = cells.step(self.spec.cell, x[:, t], h, c, W, U, b, mask[:, t])
            out[:, t] = h
        return out, step_caches

    def forward(self, inputs: np.ndarray, mask: np.ndarray, train: bool = False,
                rng: np.random.Generator | None = None):
        """Probabilities for a batch plus the cache needed by :meth:`backward`.

        ``inputs`` is either int ids of shape (B, T), looked up in the embedding,
        or already-embedded float vectors of shape (B, T, input_dim).
        """
        mask = np.asarray(mask, dtype=np.float64)
        if inputs.ndim == 2:
            ids = np.asarray(inputs)
            x = self.embed(ids)
        else:
            ids = None
            x = np.asarray(inputs)
        if x.shape[:2] != mask.shape or x.shape[2] != self.input_dim:
            raise ValueError(f"inputs {x.shape} inconsistent with mask {mask.shape} / dim {self.input_dim}")
        cache = ForwardCache(ids, mask)
        for layer in range(self.spec.layers):
            if layer > 0 and train and self.spec.dropout > 0:
                keep = 1.0 - self.spec.dropout
                drop = (rng.random(x.shape) < keep) / keep
                x = x * drop
                cache.dropout_masks.append(drop)
            else:
                cache.dropout_masks.append(None)
            outs, step_caches = [], []
            for direction in _dir_names(self.spec):
                out, sc = self._run_direction(x, mask, f"l{layer}.{direction}", direction == "bwd")
                outs.append(out)
                step_caches.append(sc)
            cache.layers.append(step_caches)
            x = np.concatenate(outs, axis=2) if len(outs) > 1 else outs[0]
        cache.top = x
        h = self.spec.hidden
        if self.spec.readout == "last":
            # states are carried through padding, so the forward final state sits at T-1
            # and the backward direction's final state at position 0
            parts = [x[:, -1, :h]]
            if self.spec.bidirectional:
                parts.append(x[:, 0, h:])
            r = np.concatenate(parts, axis=1)
        else:
            count = np.maximum(mask.sum(axis=1, keepdims=True), 1.0)
            r = (x * mask[:, :, None]).sum(axis=1) / count
        cache.readout = r
        logits = r @ self.params["head.w"] + self.params["head.b"][0]
        cache.logits = logits
        return sigmoid(logits), cache

    def predict_proba(self, inputs, mask):
        return self.forward(inputs, mask)[0]

    # backward ----------------------------------------------------------

    def backward(self, cache: ForwardCache, dlogits: np.ndarray) -> dict[str, np.ndarray]:
        """Gradients of a scalar loss given its gradient w.r.t. the logits."""
        spec, h = self.spec, self.spec.hidden
        grads = {k: np.zeros_like(v) for k, v in self.params.items()}
        r, top, mask = cache.readout, cache.top, cache.mask
        grads["head.w"] = r.T @ dlogits
        grads["head.b"] = np.array([dlogits.sum()])
        dr = np.outer(dlogits, self.params["head.w"])
        dtop = np.zeros_like(top)
        if spec.readout == "last":
            dtop[:, -1, :h] += dr[:, :h]
            if spec.bidirectional:
                dtop[:, 0, h:] += dr[:, h:]
        else:
            count = np.maximum(mask.sum(axis=1, keepdims=True), 1.0)
            dtop += (dr / count)[:, None, :] * mask[:, :, None]
        dx = dtop
        T = mask.shape[1]
        for layer in range(spec.layers - 1, -1, -1):
            dirs = _dir_names(spec)
            dinput = None
            for k, direction in enumerate(dirs):
                key = f"l{layer}.{direction}"
                W, U = self.params[key + ".W"], self.params[key + ".U"]
                g = {"W": grads[key + ".W"], "U": grads[key + ".U"], "b": grads[key + ".b"]}
                dout = dx[:, :, k * h:(k + 1) * h]
                step_caches = cache.layers[layer][k]
                dh = np.zeros((mask.shape[0], h))
                dc = np.zeros((mask.shape[0], h)) if spec.cell == "lstm" else None
                # undo the processing order: fwd ran 0..T-1, bwd ran T-1..0
                order = range(T - 1, -1, -1) if direction == "fwd" else range(T)
                dxs = None
                for t in order:
                    d_in, dh, dc = cells.step_backward(dh + dout[:, t], dc, step_caches[t], W, U, g)
                    if dxs is None:
                        dxs = np.empty((mask.shape[0], T, d_in.shape[1]))
                    dxs[:, t] = d_in
                dinput = dxs if dinput is None else dinput + dxs
            drop = cache.dropout_masks[layer]
            if drop is not None:
                dinput = dinput * drop
            dx = dinput
        if self.train_embedding and cache.ids is not None:
            demb = np.zeros_like(self.params["embedding"])
            np.add.at(demb, cache.ids, dx)
            demb[0] = 0.0  # PAD row never moves
            grads["embedding"] = demb
        return grads

    # persistence -------------------------------------------------------

    def state(self) -> dict[str, np.ndarray]:
        out = {k: v.copy() for k, v in self.params.items()}
        if self.embedding is not None and not self.train_embedding:
            out["embedding"] = self.embedding.copy()
        return out

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        for k in self.params:
            self.params[k][...] = state[k]
        if self.embedding is not None and "embedding" in state:
            self.embedding[...] = state["embedding"]


def bce_loss(probabilities, labels, eps: float = 1e-12) -> float:
    """Mean binary cross-entropy with probabilities clamped to [eps, 1 - eps]."""
    p = np.clip(np.asarray(probabilities, dtype=np.float64), eps, 1.0 - eps)
    y = np.asarray(labels, dtype=np.float64)
    return float(np.mean(-(y * np.log(p) + (1.0 - y) * np.log1p(-p))))


def bce_with_logits(logits, labels, weights=None):
    """Mean BCE computed from logits, and its gradient w.r.t. the logits.

    Same value as :func:`bce_loss` on ``sigmoid(logits)`` wherever no clamping
    occurs, but finite and informative for saturated logits too.
    """
    z = np.asarray(logits)
    y = np.asarray(labels).astype(z.dtype)
    w = np.ones_like(z) if weights is None else np.asarray(weights).astype(z.dtype)
    per = np.logaddexp(0.0, z) - y * z
    n = z.shape[0]
    # kept as a numpy scalar so extended-precision callers keep their precision
    loss = np.sum(w * per) / n
    grad = w * (sigmoid(z) - y) / n
    return loss, grad


def save_model(path: str | Path, model: RecurrentClassifier, vocab_tokens: list[str],
               meta: dict | None = None) -> None:
    header = {
        "version": MODEL_FORMAT_VERSION,
        "spec": asdict(model.spec),
        "input_dim": model.input_dim,
        "train_embedding": model.train_embedding,
        "vocab": vocab_tokens,
        **(meta or {}),
    }
    arrays = {f"param/{k}": v for k, v in model.state().items()}
    with Path(path).open("wb") as fh:
        np.savez(fh, header=np.array(json.dumps(header, ensure_ascii=False, sort_keys=True)), **arrays)


def load_model(path: str | Path) -> tuple[RecurrentClassifier, dict]:
    with np.load(Path(path), allow_pickle=False) as data:
        header = json.loads(str(data["header"]))
        if header.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model file version {header.get('version')!r}")
        state = {k[len("param/"):]: data[k] for k in data.files if k.startswith("param/")}
    spec = ModelSpec(**header["spec"])
    model = RecurrentClassifier(spec, header["input_dim"], embedding=state.get("embedding"),
                                train_embedding=header["train_embedding"])
    model.load_state(state)
    return model, header
