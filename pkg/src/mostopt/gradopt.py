"""Gradient update rules: SGD, momentum, NAG, AdaGrad, RMSprop, AdaDelta and Adam.

Every rule is element-wise. Step functions are pure: they take a state and
parameters and return new ones without mutating their inputs.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .core import Trace

METHODS = ("sgd", "momentum", "nag", "adagrad", "rmsprop", "adadelta", "adam")


@dataclass(frozen=True)
class GradConfig:
    method: str = "adam"
    eta: float = 0.001
    gamma: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if not self.eta > 0:
            raise ValueError("eta must be > 0")
        for name in ("gamma", "beta1", "beta2"):
            if not 0 <= getattr(self, name) < 1:
                raise ValueError(f"{name} must lie in [0, 1)")
        if not self.eps > 0:
            raise ValueError("eps must be > 0")


@dataclass(frozen=True)
class GradState:
    t: int
    m: np.ndarray  # first moment / momentum buffer
    v: np.ndarray  # second moment / squared-gradient accumulator
    s: np.ndarray  # AdaDelta squared-update average

    @classmethod
    def zeros(cls, n_or_like) -> GradState:
        shape = np.shape(n_or_like) if np.ndim(n_or_like) else (int(n_or_like),)
        return cls(0, np.zeros(shape), np.zeros(shape), np.zeros(shape))


def adam_moments(state: GradState, g, cfg: GradConfig):
    """Return (m, v, m_hat, v_hat) after folding gradient ``g`` into ``state``."""
    g = np.asarray(g, dtype=float)
    m = cfg.beta1 * state.m + (1 - cfg.beta1) * g
    v = cfg.beta2 * state.v + (1 - cfg.beta2) * g * g
    k = state.t + 1
    return m, v, m / (1 - cfg.beta1**k), v / (1 - cfg.beta2**k)


def adam_step(state: GradState, w, g, cfg: GradConfig):
    m, v, m_hat, v_hat = adam_moments(state, g, cfg)
    w = np.asarray(w, dtype=float) - cfg.eta * m_hat / (np.sqrt(v_hat) + cfg.eps)
    return GradState(state.t + 1, m, v, state.s), w


def baseline_step(state: GradState, w, g, cfg: GradConfig,
                  grad_at: Callable[[np.ndarray], np.ndarray] | None = None):
    """Apply the configured non-Adam rule (Adam is accepted too and delegated).

    NAG needs ``grad_at``, the gradient function, because it evaluates the
    gradient at the look-ahead point ``w - gamma * m``; ``g`` is ignored for it.
    """
    w = np.asarray(w, dtype=float)
    method = cfg.method
    if method == "adam":
        return adam_step(state, w, g, cfg)
    if method == "nag":
        if grad_at is None:
            raise ValueError("nag needs grad_at to evaluate the look-ahead gradient")
        g = np.asarray(grad_at(w - cfg.gamma * state.m), dtype=float)
    else:
        g = np.asarray(g, dtype=float)
    t = state.t + 1

    if method == "sgd":
        return replace(state, t=t), w - cfg.eta * g
    if method in ("momentum", "nag"):
        m = cfg.gamma * state.m + cfg.eta * g
        return replace(state, t=t, m=m), w - m
    if method == "adagrad":
        v = state.v + g * g
        return replace(state, t=t, v=v), w - cfg.eta * g / np.sqrt(v + cfg.eps)
    if method == "rmsprop":
        v = cfg.gamma * state.v + (1 - cfg.gamma) * g * g
        return replace(state, t=t, v=v), w - cfg.eta * g / np.sqrt(v + cfg.eps)
    if method == "adadelta":
        # no learning rate: the step is scaled by the RMS of past updates
        v = cfg.gamma * state.v + (1 - cfg.gamma) * g * g
        dw = -np.sqrt(state.s + cfg.eps) / np.sqrt(v + cfg.eps) * g
        s = cfg.gamma * state.s + (1 - cfg.gamma) * dw * dw
        return replace(state, t=t, v=v, s=s), w + dw
    raise AssertionError(method)


def step(state: GradState, w, g, cfg: GradConfig, grad_at=None):
    if cfg.method == "adam":
        return adam_step(state, w, g, cfg)
    return baseline_step(state, w, g, cfg, grad_at)


class NonFiniteGradientError(ArithmeticError):
    pass


def minimize(value_and_grad: Callable, w0, cfg: GradConfig | None = None, max_steps: int = 1000,
             tol: float = 0.0, record_every: int = 1):
    """Iterate the configured rule from ``w0``.

    ``value_and_grad(w)`` returns ``(loss, gradient)``. Stops after ``max_steps``
    updates or as soon as the loss is <= ``tol``. The trace holds the loss at
    step 0 and after every ``record_every`` updates, plus the final step.
    Widths in the trace are the absolute size of the last update.
    """
    cfg = cfg or GradConfig()
    w = np.array(w0, dtype=float)
    state = GradState.zeros(w)
    trace = Trace()
    start = time.perf_counter()

    def grad_only(x):
        return value_and_grad(x)[1]

    last_dw = np.zeros_like(w)
    for k in range(max_steps + 1):
        loss, g = value_and_grad(w)
        g = np.asarray(g, dtype=float)
        if not np.isfinite(loss) or not np.all(np.isfinite(g)):
            raise NonFiniteGradientError(f"non-finite loss/gradient at step {k}: loss={loss}, w={w.tolist()}")
        done = loss <= tol or k == max_steps
        if k % record_every == 0 or done:
            trace.append(k, w, loss, np.abs(last_dw), time.perf_counter() - start)
        if done:
            break
        state, w_new = step(state, w, g, cfg, grad_only)
        last_dw = w_new - w
        w = w_new
    return w, trace
