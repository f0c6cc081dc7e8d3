"""Monte-Carlo policy-gradient agent (REINFORCE).

Provided behind the same agent interface as the value-based learners;
not part of the benchmark comparison. Samples actions from a softmax
policy and updates once per episode from complete returns against a
mean baseline.
"""

from __future__ import annotations

import numpy as np

from .network import MLP, Adam

N_ACTIONS = 5


class ReinforceAgent:
    kind = "reinforce"
    uses_features = True

    def __init__(self, state_dim: int = 24, seed: int = 0, gamma: float = 0.99,
                 lr: float = 1e-3, hidden: int = 64):
        self.state_dim = state_dim
        self.gamma = gamma
        self.lr = lr
        self.hidden = hidden
        self.rng = np.random.default_rng(seed)
        self.network = MLP([state_dim, hidden, N_ACTIONS], self.rng)
        self.optimizer = Adam(self.network.parameters(), lr=lr)
        self._episode: list[tuple[np.ndarray, int, float]] = []

    def action_values(self, state: np.ndarray) -> np.ndarray:
        return self.network.predict(state)[0]

    def select(self, state: np.ndarray, epsilon: float, rng: np.random.Generator) -> int:
        # Stochastic policy; the epsilon argument is ignored on purpose.
        probs = _softmax(self.action_values(state))
        return int(rng.choice(N_ACTIONS, p=probs))

    def learn(self, state, action, reward, next_state, next_action, terminal) -> None:
        self._episode.append((state, action, float(reward)))
        if terminal:
            self._update_episode()
            self._episode = []

    def episode_end(self) -> None:
        """Flush a truncated episode (step cap without a terminal state)."""
        self._update_episode()
        self._episode = []

    def _update_episode(self) -> None:
        if not self._episode:
            return
        states = np.array([s for s, _, _ in self._episode])
        actions = np.array([a for _, a, _ in self._episode])
        rewards = [r for _, _, r in self._episode]
        returns = np.zeros(len(rewards))
        acc = 0.0
        for i in reversed(range(len(rewards))):
            acc = rewards[i] + self.gamma * acc
            returns[i] = acc
        advantage = returns - returns.mean()
        logits = self.network.forward(states)
        probs = _softmax_rows(logits)
        dlogits = probs.copy()
        dlogits[np.arange(len(actions)), actions] -= 1.0
        dlogits *= advantage[:, None] / len(actions)
        grads_w, grads_b = self.network.backward(dlogits)
        self.optimizer.step(self.network.parameters(), grads_w + grads_b)


def _softmax(x: np.ndarray) -> np.ndarray:
    z = x - x.max()
    e = np.exp(z)
    return e / e.sum()


def _softmax_rows(x: np.ndarray) -> np.ndarray:
    z = x - x.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)
