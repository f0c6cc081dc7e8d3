"""Deep Q-network: replay buffer, target network, periodic batch updates."""

from __future__ import annotations

import numpy as np

from .network import MLP, Adam
from .tabular import Transition

N_ACTIONS = 5


class ReplayBuffer:
    """Fixed-capacity FIFO ring of transitions stored as flat arrays."""

    def __init__(self, capacity: int, state_dim: int):
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.next_states = np.zeros((capacity, state_dim))
        self.terminals = np.zeros(capacity, dtype=bool)
        self._next = 0
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, state, action, reward, next_state, terminal) -> None:
        i = self._next
        self.states[i] = state
        self.actions[i] = action
        self.rewards[i] = reward
        self.next_states[i] = next_state
        self.terminals[i] = terminal
        self._next = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator):
        idx = rng.integers(0, self._size, size=batch_size)
        return (self.states[idx], self.actions[idx], self.rewards[idx],
                self.next_states[idx], self.terminals[idx])


class DqnModel:
    def __init__(self, state_dim: int = 24, seed: int = 0, gamma: float = 0.99,
                 lr: float = 1e-3, hidden: tuple[int, int] = (64, 64),
                 buffer_capacity: int = 10_000, batch_size: int = 32,
                 train_interval: int = 4, target_sync_interval: int = 500):
        self.state_dim = state_dim
        self.gamma = gamma
        self.lr = lr
        self.hidden = tuple(hidden)
        self.batch_size = batch_size
        self.train_interval = train_interval
        self.target_sync_interval = target_sync_interval
        self.rng = np.random.default_rng(seed)
        self.network = MLP([state_dim, *hidden, N_ACTIONS], self.rng)
        self.target_network = self.network.clone()
        self.replay = ReplayBuffer(buffer_capacity, state_dim)
        self.optimizer = Adam(self.network.parameters(), lr=lr)
        self.step_count = 0

    def action_values(self, state: np.ndarray) -> np.ndarray:
        return self.network.predict(state)[0]

    def observe(self, tr: Transition) -> None:
        """Record a transition and run the periodic training schedule."""
        self.replay.add(tr.state, tr.action, tr.reward, tr.next_state, tr.terminal)
        self.step_count += 1
        if self.step_count % self.train_interval == 0 and len(self.replay) >= self.batch_size:
            self._train_batch()
        if self.step_count % self.target_sync_interval == 0:
            self.target_network.copy_weights_from(self.network)

    def _train_batch(self) -> float:
        states, actions, rewards, next_states, terminals = \
            self.replay.sample(self.batch_size, self.rng)
        loss, grads_w, grads_b = td_loss_and_grads(
            self.network, self.target_network, self.gamma,
            states, actions, rewards, next_states, terminals)
        self.optimizer.step(self.network.parameters(), grads_w + grads_b)
        return loss


def td_loss_and_grads(network: MLP, target_network: MLP, gamma: float,
                      states, actions, rewards, next_states, terminals):
    """Squared TD error on the taken actions and its backprop gradients."""
    batch = len(states)
    q_next = target_network.predict(next_states).max(axis=1)
    targets = rewards + gamma * q_next * (~terminals)
    q_all = network.forward(states)
    q_sel = q_all[np.arange(batch), actions]
    err = q_sel - targets
    loss = float(np.mean(err ** 2))
    dout = np.zeros_like(q_all)
    dout[np.arange(batch), actions] = 2.0 * err / batch
    grads_w, grads_b = network.backward(dout)
    return loss, grads_w, grads_b


def dqn_step(model: DqnModel, tr: Transition) -> DqnModel:
    model.observe(tr)
    return model
