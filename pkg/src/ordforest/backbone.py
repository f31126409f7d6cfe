"""Feature networks with hand-rolled forward/backward passes and plain SGD.

Two desk-scale architectures: a bare affine map (``linear``) and a single
hidden layer perceptron (``mlp1``).  Parameters live in one flat float64
vector so the finite-difference oracle and the checkpoint format can treat
them opaquely.  Outputs are raw affine values; any squashing happens
downstream in the tree routing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, ShapeError

ARCH_KINDS = ("linear", "mlp1")
ACTIVATIONS = ("tanh", "relu")


@dataclass(frozen=True)
class BackboneArch:
    """Shape descriptor; ``hidden_dim`` and ``activation`` apply to mlp1 only."""

    kind: str
    input_dim: int
    feature_dim: int
    hidden_dim: int = 0
    activation: str = "tanh"

    def __post_init__(self) -> None:
        if self.kind not in ARCH_KINDS:
            raise ConfigError(f"unknown backbone kind {self.kind!r}")
        if self.input_dim < 1 or self.feature_dim < 1:
            raise ConfigError("input_dim and feature_dim must be at least 1")
        if self.kind == "mlp1":
            if self.hidden_dim < 1:
                raise ConfigError("mlp1 needs hidden_dim >= 1")
            if self.activation not in ACTIVATIONS:
                raise ConfigError(f"unknown activation {self.activation!r}")

    def num_params(self) -> int:
        if self.kind == "linear":
            return self.input_dim * self.feature_dim + self.feature_dim
        return (
            self.input_dim * self.hidden_dim
            + self.hidden_dim
            + self.hidden_dim * self.feature_dim
            + self.feature_dim
        )


class Backbone:
    """A feature function together with its flat parameter vector.

    Flat layout: ``[W1.ravel(), b1, W2.ravel(), b2]`` for mlp1 and
    ``[W.ravel(), b]`` for linear, with weight matrices stored row-major as
    (in, out).
    """

    def __init__(self, arch: BackboneArch, params: np.ndarray):
        params = np.asarray(params, dtype=np.float64)
        if params.shape != (arch.num_params(),):
            raise ShapeError(
                f"expected {arch.num_params()} parameters for {arch.kind}, "
                f"got shape {params.shape}"
            )
        self.arch = arch
        self.params = params

    @classmethod
    def init(cls, arch: BackboneArch, seed: int) -> "Backbone":
        """Deterministic init: weights uniform in +-1/sqrt(fan_in), biases zero."""
        rng = np.random.default_rng(seed)
        parts = []
        for fan_in, fan_out in _layer_shapes(arch):
            bound = 1.0 / np.sqrt(fan_in)
            parts.append(rng.uniform(-bound, bound, size=fan_in * fan_out))
            parts.append(np.zeros(fan_out))
        return cls(arch, np.concatenate(parts))

    def _views(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-layer (W, b) views into the flat vector."""
        out = []
        offset = 0
        for fan_in, fan_out in _layer_shapes(self.arch):
            w = self.params[offset : offset + fan_in * fan_out].reshape(fan_in, fan_out)
            offset += fan_in * fan_out
            b = self.params[offset : offset + fan_out]
            offset += fan_out
            out.append((w, b))
        return out

    def forward_batch(self, inputs: np.ndarray) -> np.ndarray:
        """Map a (B, input_dim) batch to (B, feature_dim) features."""
        inputs = _check_inputs(inputs, self.arch.input_dim)
        if self.arch.kind == "linear":
            (w, b), = self._views()
            return inputs @ w + b
        (w1, b1), (w2, b2) = self._views()
        hidden = _activate(inputs @ w1 + b1, self.arch.activation)
        return hidden @ w2 + b2

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.forward_batch(np.asarray(x, dtype=float)[None, :])[0]

    def backward_batch(self, inputs: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
        """Parameter gradient of ``sum_b <grad_out[b], forward(inputs[b])>``,
        i.e. gradients summed over the batch in row order."""
        inputs = _check_inputs(inputs, self.arch.input_dim)
        grad_out = np.asarray(grad_out, dtype=np.float64)
        if grad_out.shape != (inputs.shape[0], self.arch.feature_dim):
            raise ShapeError(
                f"grad_out shape {grad_out.shape} does not match "
                f"({inputs.shape[0]}, {self.arch.feature_dim})"
            )
        if self.arch.kind == "linear":
            dw = inputs.T @ grad_out
            db = grad_out.sum(axis=0)
            return np.concatenate([dw.ravel(), db])
        (w1, b1), (w2, _) = self._views()
        pre = inputs @ w1 + b1
        hidden = _activate(pre, self.arch.activation)
        dw2 = hidden.T @ grad_out
        db2 = grad_out.sum(axis=0)
        dhidden = grad_out @ w2.T
        dpre = dhidden * _activate_grad(pre, hidden, self.arch.activation)
        dw1 = inputs.T @ dpre
        db1 = dpre.sum(axis=0)
        return np.concatenate([dw1.ravel(), db1, dw2.ravel(), db2])

    def backward(self, x: np.ndarray, grad_f: np.ndarray) -> np.ndarray:
        return self.backward_batch(
            np.asarray(x, dtype=float)[None, :], np.asarray(grad_f, dtype=float)[None, :]
        )

    def copy(self) -> "Backbone":
        return Backbone(self.arch, self.params.copy())


def sgd_step(
    backbone: Backbone,
    grad: np.ndarray,
    lr: float,
    momentum: float = 0.0,
    velocity: np.ndarray | None = None,
) -> np.ndarray | None:
    """In-place parameter update; returns the velocity buffer when momentum
    is used, else None.  Aborts on non-finite gradient entries."""
    if not lr > 0:
        raise ConfigError(f"learning rate must be positive, got {lr!r}")
    grad = np.asarray(grad, dtype=np.float64)
    if grad.shape != backbone.params.shape:
        raise ShapeError(
            f"gradient shape {grad.shape} does not match parameters "
            f"{backbone.params.shape}"
        )
    if not np.all(np.isfinite(grad)):
        bad = int(np.flatnonzero(~np.isfinite(grad))[0])
        raise NumericError(f"non-finite gradient entry at index {bad}")
    if momentum > 0.0:
        if velocity is None:
            velocity = np.zeros_like(backbone.params)
        velocity *= momentum
        velocity -= lr * grad
        backbone.params += velocity
        return velocity
    backbone.params -= lr * grad
    return None


def _layer_shapes(arch: BackboneArch) -> list[tuple[int, int]]:
    if arch.kind == "linear":
        return [(arch.input_dim, arch.feature_dim)]
    return [(arch.input_dim, arch.hidden_dim), (arch.hidden_dim, arch.feature_dim)]


def _check_inputs(inputs: np.ndarray, input_dim: int) -> np.ndarray:
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[1] != input_dim:
        raise ShapeError(
            f"expected inputs of shape (batch, {input_dim}), got {inputs.shape}"
        )
    return inputs


def _activate(pre: np.ndarray, activation: str) -> np.ndarray:
    if activation == "tanh":
        return np.tanh(pre)
    return np.maximum(pre, 0.0)


def _activate_grad(pre: np.ndarray, post: np.ndarray, activation: str) -> np.ndarray:
    if activation == "tanh":
        return 1.0 - post * post
    return (pre > 0.0).astype(np.float64)
