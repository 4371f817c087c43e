"""The 2-2-1 XOR network: nine weights, forward pass, losses and backprop.

Weight order (``WEIGHT_NAMES``): hidden unit 1 (from x1, from x2, from bias),
hidden unit 2 (same three), output unit (from h1, from h2, from bias).

Functions accept one weight vector of shape (9,) or a batch of shape (k, 9);
batched evaluation is what makes the Monte Carlo sums in MOST cheap.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .core import Objective, SearchSpace

WEIGHT_NAMES = ("h1_x1", "h1_x2", "h1_b", "h2_x1", "h2_x2", "h2_b", "o_h1", "o_h2", "o_b")
N_WEIGHTS = 9
CE_CLAMP = 1e-12
WEIGHT_BOUND = 50.0

HIDDEN_ACTIVATIONS = ("relu", "sigmoid")
LOSSES = ("cross_entropy", "squared_error")


@dataclass(frozen=True)
class NetConfig:
    hidden_activation: str = "sigmoid"
    loss: str = "squared_error"

    def __post_init__(self):
        if self.hidden_activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"hidden_activation must be one of {HIDDEN_ACTIVATIONS}")
        if self.loss not in LOSSES:
            raise ValueError(f"loss must be one of {LOSSES}")


# the two pairings used in the comparison
GRADIENT_NET = NetConfig("relu", "cross_entropy")
BLACKBOX_NET = NetConfig("sigmoid", "squared_error")


@dataclass(frozen=True)
class XorDataset:
    inputs: np.ndarray  # (4, 2)
    targets: np.ndarray  # (4,)
    convention: str = "paper"

    def __post_init__(self):
        if self.inputs.shape != (4, 2) or self.targets.shape != (4,):
            raise ValueError("an XOR dataset has exactly four rows of two inputs")
        if not np.all(np.isin(self.inputs, (0.0, 1.0))):
            raise ValueError("inputs must be 0/1")

    @property
    def zero_rows(self) -> np.ndarray:
        return self.targets == 0


def xor_dataset(targets: str = "paper") -> XorDataset:
    """``paper``: (0,0)->1, (1,1)->1, mixed->0 (an XNOR table). ``standard``: ordinary XOR."""
    inputs = np.array([[0, 0], [1, 1], [1, 0], [0, 1]], dtype=float)
    if targets == "paper":
        t = np.array([1, 1, 0, 0], dtype=float)
    elif targets == "standard":
        t = np.array([0, 0, 1, 1], dtype=float)
    else:
        raise ValueError(f"targets must be 'paper' or 'standard', got {targets!r}")
    return XorDataset(inputs, t, targets)


def _activate(z, kind):
    return np.maximum(z, 0.0) if kind == "relu" else expit(z)


def _layers(w, inputs, cfg):
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != N_WEIGHTS:
        raise ValueError(f"expected {N_WEIGHTS} weights, got shape {w.shape}")
    x1, x2 = inputs[:, 0], inputs[:, 1]
    W = w[..., None, :]  # broadcast over patterns
    z1 = W[..., 0] * x1 + W[..., 1] * x2 + W[..., 2]
    z2 = W[..., 3] * x1 + W[..., 4] * x2 + W[..., 5]
    h1 = _activate(z1, cfg.hidden_activation)
    h2 = _activate(z2, cfg.hidden_activation)
    y = expit(W[..., 6] * h1 + W[..., 7] * h2 + W[..., 8])
    return z1, z2, h1, h2, y


def forward(w, inputs, cfg: NetConfig = BLACKBOX_NET):
    """Network output(s) in (0, 1).

    ``inputs`` is one pair (shape (2,)) or rows of pairs (shape (p, 2)).
    """
    inputs = np.asarray(inputs, dtype=float)
    single = inputs.ndim == 1
    y = _layers(w, np.atleast_2d(inputs), cfg)[-1]
    return y[..., 0] if single else y


def outputs(w, data: XorDataset, cfg: NetConfig = BLACKBOX_NET):
    return forward(w, data.inputs, cfg)


def loss(w, data: XorDataset, cfg: NetConfig = BLACKBOX_NET):
    y = outputs(w, data, cfg)
    t = data.targets
    if cfg.loss == "squared_error":
        return 0.5 * np.sum((y - t) ** 2, axis=-1)
    yc = np.clip(y, CE_CLAMP, 1 - CE_CLAMP)
    return -np.sum(t * np.log(yc) + (1 - t) * np.log(1 - yc), axis=-1)


def gradient(w, data: XorDataset, cfg: NetConfig = BLACKBOX_NET) -> np.ndarray:
    """Backpropagated gradient of :func:`loss` for a single weight vector."""
    w = np.asarray(w, dtype=float)
    if w.shape != (N_WEIGHTS,):
        raise ValueError("gradient takes a single weight vector of shape (9,)")
    x = data.inputs
    t = data.targets
    z1, z2, h1, h2, y = _layers(w, x, cfg)
    if cfg.loss == "squared_error":
        dz_out = (y - t) * y * (1 - y)
    else:
        # sigmoid + cross entropy collapse to y - t, except where the clamp is active
        inside = (y > CE_CLAMP) & (y < 1 - CE_CLAMP)
        dz_out = np.where(inside, y - t, 0.0)
    if cfg.hidden_activation == "relu":
        d1 = (z1 > 0).astype(float)
        d2 = (z2 > 0).astype(float)
    else:
        d1 = h1 * (1 - h1)
        d2 = h2 * (1 - h2)
    dz1 = dz_out * w[6] * d1
    dz2 = dz_out * w[7] * d2
    return np.array([
        np.sum(dz1 * x[:, 0]), np.sum(dz1 * x[:, 1]), np.sum(dz1),
        np.sum(dz2 * x[:, 0]), np.sum(dz2 * x[:, 1]), np.sum(dz2),
        np.sum(dz_out * h1), np.sum(dz_out * h2), np.sum(dz_out),
    ])


def value_and_grad(data: XorDataset, cfg: NetConfig = GRADIENT_NET):
    def f(w):
        return float(loss(w, data, cfg)), gradient(w, data, cfg)
    return f


def as_objective(data: XorDataset, cfg: NetConfig = BLACKBOX_NET) -> Objective:
    return Objective(lambda w: float(loss(w, data, cfg)), N_WEIGHTS,
                     batch=lambda W: loss(W, data, cfg), name=f"xor-{cfg.loss}")


def weight_space(bound: float = WEIGHT_BOUND) -> SearchSpace:
    return SearchSpace.box(-bound, bound, N_WEIGHTS)


def initial_weights(rng, scale: float = 1.0, hidden_bias: float = 0.5) -> np.ndarray:
    """Gradient-training start point: U(-scale, scale), hidden biases set positive.

    A positive hidden bias keeps both ReLU units active on every pattern at the
    start, which roughly doubles how often the tiny network trains successfully.
    """
    w = rng.uniform(-scale, scale, N_WEIGHTS)
    w[[2, 5]] = hidden_bias
    return w


def rounded_correct(w, data: XorDataset, cfg: NetConfig) -> bool:
    return bool(np.all(np.round(outputs(w, data, cfg)) == data.targets))


def write_weights_csv(dest, rows) -> None:
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    if rows.shape[1] != N_WEIGHTS:
        raise ValueError("weight rows need nine columns")
    with open(dest, "w", newline="", encoding="utf-8") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(WEIGHT_NAMES)
        for r in rows:
            wr.writerow([format(float(v), ".17g") for v in r])


def read_weights_csv(src) -> np.ndarray:
    if not os.path.exists(src):
        raise FileNotFoundError(src)
    with open(src, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != WEIGHT_NAMES:
        raise ValueError(f"{src}: expected header {','.join(WEIGHT_NAMES)}")
    return np.array([[float(v) for v in r] for r in rows[1:]], dtype=float).reshape(-1, N_WEIGHTS)
