"""Small feed-forward network with hand-written backprop.

Rectifier hidden units, linear output. Weights use the uniform
+-sqrt(6 / (fan_in + fan_out)) initialization from a seeded stream so a
model is reproducible from its seed.
"""

from __future__ import annotations

import numpy as np


class MLP:
    def __init__(self, layer_sizes: list[int], rng: np.random.Generator):
        self.layer_sizes = list(layer_sizes)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for fan_in, fan_out in zip(layer_sizes, layer_sizes[1:]):
            limit = np.sqrt(6.0 / (fan_in + fan_out))
            self.weights.append(rng.uniform(-limit, limit, size=(fan_in, fan_out)))
            self.biases.append(np.zeros(fan_out))
        self._cache: list[np.ndarray] = []

    @property
    def n_layers(self) -> int:
        return len(self.weights)

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Batch forward pass; caches activations for backward()."""
        x = np.atleast_2d(x)
        self._cache = [x]
        h = x
        for i in range(self.n_layers):
            z = h @ self.weights[i] + self.biases[i]
            if i < self.n_layers - 1:
                z = np.maximum(z, 0.0)
            self._cache.append(z)
            h = z
        return h

    def predict(self, x: np.ndarray) -> np.ndarray:
        """Forward pass without touching the gradient cache."""
        h = np.atleast_2d(x)
        for i in range(self.n_layers):
            h = h @ self.weights[i] + self.biases[i]
            if i < self.n_layers - 1:
                h = np.maximum(h, 0.0)
        return h

    def backward(self, dout: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
        """Gradients of a scalar loss given d(loss)/d(output).

        Must follow a forward() on the same batch.
        """
        grads_w = [np.empty(0)] * self.n_layers
        grads_b = [np.empty(0)] * self.n_layers
        delta = dout
        for i in reversed(range(self.n_layers)):
            h_prev = self._cache[i]
            if i < self.n_layers - 1:
                delta = delta * (self._cache[i + 1] > 0.0)
            grads_w[i] = h_prev.T @ delta
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                delta = delta @ self.weights[i].T
        return grads_w, grads_b

    def parameters(self) -> list[np.ndarray]:
        return self.weights + self.biases

    def copy_weights_from(self, other: "MLP") -> None:
        for dst, src in zip(self.parameters(), other.parameters()):
            dst[...] = src

    def clone(self) -> "MLP":
        twin = MLP.__new__(MLP)
        twin.layer_sizes = list(self.layer_sizes)
        twin.weights = [w.copy() for w in self.weights]
        twin.biases = [b.copy() for b in self.biases]
        twin._cache = []
        return twin


class Adam:
    """Adaptive-moment gradient descent on a list of parameter arrays."""

    def __init__(self, params: list[np.ndarray], lr: float = 1e-3,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]

    def step(self, params: list[np.ndarray], grads: list[np.ndarray]) -> None:
        self.t += 1
        b1c = 1.0 - self.beta1 ** self.t
        b2c = 1.0 - self.beta2 ** self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * g * g
            p -= self.lr * (m / b1c) / (np.sqrt(v / b2c) + self.eps)
