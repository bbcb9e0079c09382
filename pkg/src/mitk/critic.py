"""Small feed-forward score networks with exact reverse-mode gradients and Adam.

The architecture family is deliberately closed: affine layers, ReLU hidden
activations, linear outputs, plus an inner-product head for the separable
two-tower form. Gradients are hand-derived for this family and checked
against central finite differences in the test suite, which keeps the
implementation honest without dragging in a general autodiff system.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Mlp",
    "CriticArch",
    "CriticParams",
    "BaselineParams",
    "AdamState",
    "init_mlp",
    "mlp_forward",
    "mlp_backward",
    "glorot_bound",
    "init_critic",
    "score_matrix",
    "score_matrix_with_cache",
    "backward",
    "backward_from_cache",
    "param_arrays",
    "with_param_arrays",
    "init_baseline",
    "log_baseline",
    "baseline_backward",
    "init_adam",
    "adam_step",
    "forward_rows",
    "reset_forward_rows",
]

# instrumentation: rows pushed through mlp_forward since the last reset,
# used to verify the separable form does O(n) tower work, not O(n^2)
_forward_rows = 0


def forward_rows() -> int:
    return _forward_rows


def reset_forward_rows() -> None:
    global _forward_rows
    _forward_rows = 0


@dataclass
class Mlp:
    """Affine/ReLU stack; the final layer is linear."""

    weights: list
    biases: list

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    @property
    def out_dim(self) -> int:
        return self.weights[-1].shape[1]


def glorot_bound(fan_in: int, fan_out: int) -> float:
    return math.sqrt(6.0 / (fan_in + fan_out))


def init_mlp(widths, rng) -> Mlp:
    """Scaled-uniform weight init (bound sqrt(6/(fan_in+fan_out))), zero biases."""
    widths = tuple(int(w) for w in widths)
    if len(widths) < 2 or any(w <= 0 for w in widths):
        raise ValueError(f"invalid layer widths {widths}")
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = glorot_bound(fan_in, fan_out)
        weights.append(rng.uniform(-bound, bound, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    return Mlp(weights, biases)


def mlp_forward(mlp: Mlp, x: np.ndarray):
    """Returns (output, cache); cache holds the per-layer inputs and preactivations."""
    global _forward_rows
    _forward_rows += x.shape[0]
    inputs = []
    preacts = []
    h = x
    last = len(mlp.weights) - 1
    for i, (w, b) in enumerate(zip(mlp.weights, mlp.biases)):
        inputs.append(h)
        z = h @ w + b
        preacts.append(z)
        h = z if i == last else np.maximum(z, 0.0)
    return h, (inputs, preacts)


def mlp_backward(mlp: Mlp, cache, dout: np.ndarray):
    """Gradients of sum(dout * output) with respect to every weight and bias."""
    inputs, preacts = cache
    grads_w = [None] * len(mlp.weights)
    grads_b = [None] * len(mlp.biases)
    dz = dout
    for i in range(len(mlp.weights) - 1, -1, -1):
        grads_w[i] = inputs[i].T @ dz
        grads_b[i] = dz.sum(axis=0)
        if i > 0:
            dh = dz @ mlp.weights[i].T
            dz = dh * (preacts[i - 1] > 0.0)
    return grads_w, grads_b


# ---------------------------------------------------------------------------
# Critic
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CriticArch:
    """Architecture descriptor for the score function g(x, y).

    `joint` concatenates (x, y) into one scalar-output network; `separable`
    runs two towers to an embedding of width `embed` and scores by inner
    product, so an n x n score table costs 2n forward passes instead of n^2.
    """

    x_dim: int
    y_dim: int
    form: str = "separable"
    hidden: tuple = (64, 64)
    embed: int = 32

    def __post_init__(self):
        if self.form not in ("joint", "separable"):
            raise ValueError(f"unknown critic form {self.form!r}")
        if self.x_dim < 1 or self.y_dim < 1 or self.embed < 1:
            raise ValueError("dimensions must be positive")
        if any(h <= 0 for h in self.hidden):
            raise ValueError("hidden widths must be positive")
        object.__setattr__(self, "hidden", tuple(int(h) for h in self.hidden))


@dataclass
class CriticParams:
    form: str
    nets: tuple  # (net,) for joint, (x_tower, y_tower) for separable


def init_critic(arch: CriticArch, seed: int) -> CriticParams:
    rng = np.random.default_rng([seed, 0])
    if arch.form == "joint":
        net = init_mlp((arch.x_dim + arch.y_dim, *arch.hidden, 1), rng)
        return CriticParams("joint", (net,))
    x_tower = init_mlp((arch.x_dim, *arch.hidden, arch.embed), rng)
    y_tower = init_mlp((arch.y_dim, *arch.hidden, arch.embed), rng)
    return CriticParams("separable", (x_tower, y_tower))


def score_matrix(params: CriticParams, batch) -> np.ndarray:
    """(i, j) table of critic scores g(x_i, y_j).

    Diagonal entries score the paired samples; off-diagonal entries pair
    each x with another sample's y and so act as draws from the product of
    marginals.
    """
    scores, _ = score_matrix_with_cache(params, batch)
    return scores


def score_matrix_with_cache(params: CriticParams, batch):
    """score_matrix plus the forward cache needed to backpropagate through it."""
    xs, ys = batch.xs, batch.ys
    n = xs.shape[0]
    if params.form == "separable":
        x_tower, y_tower = params.nets
        hx, cache_x = mlp_forward(x_tower, xs)
        hy, cache_y = mlp_forward(y_tower, ys)
        return hx @ hy.T, (hx, cache_x, hy, cache_y)
    (net,) = params.nets
    paired = np.concatenate([np.repeat(xs, n, axis=0), np.tile(ys, (n, 1))], axis=1)
    out, cache = mlp_forward(net, paired)
    return out.reshape(n, n), cache


def backward_from_cache(params: CriticParams, cache, upstream: np.ndarray):
    """Gradients of sum(upstream * scores) given a forward cache, in param_arrays order."""
    if params.form == "separable":
        x_tower, y_tower = params.nets
        hx, cache_x, hy, cache_y = cache
        dw_x, db_x = mlp_backward(x_tower, cache_x, upstream @ hy)
        dw_y, db_y = mlp_backward(y_tower, cache_y, upstream.T @ hx)
        return _interleave(dw_x, db_x) + _interleave(dw_y, db_y)
    (net,) = params.nets
    n = upstream.shape[0]
    dw, db = mlp_backward(net, cache, upstream.reshape(n * n, 1))
    return _interleave(dw, db)


def backward(params: CriticParams, batch, upstream: np.ndarray):
    """Exact gradients of sum(upstream * scores) in param_arrays order."""
    n = batch.xs.shape[0]
    if upstream.shape != (n, n):
        raise ValueError(f"upstream must be ({n}, {n})")
    _, cache = score_matrix_with_cache(params, batch)
    return backward_from_cache(params, cache, upstream)


def _interleave(ws, bs):
    out = []
    for w, b in zip(ws, bs):
        out.append(w)
        out.append(b)
    return out


def param_arrays(params) -> list:
    """Flat list of a parameter container's arrays, in a stable order."""
    if isinstance(params, CriticParams):
        out = []
        for net in params.nets:
            out.extend(_interleave(net.weights, net.biases))
        return out
    if isinstance(params, BaselineParams):
        return _interleave(params.net.weights, params.net.biases)
    if isinstance(params, Mlp):
        return _interleave(params.weights, params.biases)
    raise TypeError(f"no parameter layout for {type(params)!r}")


def with_param_arrays(params, arrays: list):
    """Rebuild a parameter container from a flat array list (inverse of param_arrays)."""
    arrays = list(arrays)

    def take_mlp(template: Mlp) -> Mlp:
        n = len(template.weights)
        ws, bs = [], []
        for _ in range(n):
            ws.append(arrays.pop(0))
            bs.append(arrays.pop(0))
        return Mlp(ws, bs)

    if isinstance(params, CriticParams):
        nets = tuple(take_mlp(net) for net in params.nets)
        rebuilt = CriticParams(params.form, nets)
    elif isinstance(params, BaselineParams):
        rebuilt = BaselineParams(take_mlp(params.net))
    elif isinstance(params, Mlp):
        rebuilt = take_mlp(params)
    else:
        raise TypeError(f"no parameter layout for {type(params)!r}")
    if arrays:
        raise ValueError("array list longer than the parameter layout")
    return rebuilt


# ---------------------------------------------------------------------------
# Baseline network: emits log a(y), so a(y) > 0 is structural
# ---------------------------------------------------------------------------


@dataclass
class BaselineParams:
    net: Mlp


def init_baseline(y_dim: int, hidden, seed: int) -> BaselineParams:
    rng = np.random.default_rng([seed, 1])
    return BaselineParams(init_mlp((y_dim, *tuple(hidden), 1), rng))


def log_baseline(params: BaselineParams, ys: np.ndarray) -> np.ndarray:
    out, _ = mlp_forward(params.net, ys)
    return out[:, 0]


def baseline_backward(params: BaselineParams, ys: np.ndarray, dlog_a: np.ndarray):
    out, cache = mlp_forward(params.net, ys)
    dw, db = mlp_backward(params.net, cache, dlog_a[:, None])
    return _interleave(dw, db)


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------


@dataclass
class AdamState:
    """Bias-corrected first/second moment accumulators plus hyperparameters."""

    m: list
    v: list
    step: int = 0
    lr: float = 5e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def init_adam(params: list, lr: float = 5e-4, beta1: float = 0.9,
              beta2: float = 0.999, eps: float = 1e-8) -> AdamState:
    return AdamState(
        m=[np.zeros_like(p) for p in params],
        v=[np.zeros_like(p) for p in params],
        step=0,
        lr=lr,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
    )


def adam_step(state: AdamState, params: list, grads: list):
    """One descent update; returns (new state, new params), inputs untouched."""
    if len(params) != len(state.m) or len(grads) != len(params):
        raise ValueError("params/grads must match the optimizer state layout")
    t = state.step + 1
    new_m, new_v, new_p = [], [], []
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if p.shape != g.shape:
            raise ValueError(f"gradient shape {g.shape} does not match param {p.shape}")
        m1 = state.beta1 * m + (1.0 - state.beta1) * g
        v1 = state.beta2 * v + (1.0 - state.beta2) * (g * g)
        m_hat = m1 / (1.0 - state.beta1**t)
        v_hat = v1 / (1.0 - state.beta2**t)
        new_p.append(p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
        new_m.append(m1)
        new_v.append(v1)
    new_state = AdamState(
        m=new_m, v=new_v, step=t,
        lr=state.lr, beta1=state.beta1, beta2=state.beta2, eps=state.eps,
    )
    return new_state, new_p
