"""Learning agents behind one interface.

Every agent exposes
    uses_features : whether it consumes the 24-float vector (True) or the
                    discrete state tuple (False)
    action_values(state) -> ndarray(5)
    learn(state, action, reward, next_state, next_action, terminal)
plus an optional select(state, epsilon, rng) override for agents whose
behavior policy is not epsilon-greedy.
"""

from __future__ import annotations

import numpy as np

from .dqn import DqnModel, ReplayBuffer, dqn_step
from .network import MLP, Adam
from .policy import select_action
from .reinforce import ReinforceAgent
from .tabular import QTable, Transition, q_update, sarsa_update

ALGORITHMS = ("qlearning", "sarsa", "dqn", "reinforce")

TABULAR_ALPHA = 0.2
TABULAR_GAMMA = 0.95


class QLearningAgent:
    kind = "qlearning"
    uses_features = False

    def __init__(self, alpha: float = TABULAR_ALPHA, gamma: float = TABULAR_GAMMA):
        self.table = QTable(alpha=alpha, gamma=gamma)

    def action_values(self, state) -> np.ndarray:
        return self.table.values(state)

    def learn(self, state, action, reward, next_state, next_action, terminal) -> None:
        q_update(self.table, Transition(state, action, reward, next_state, terminal))


class SarsaAgent:
    kind = "sarsa"
    uses_features = False

    def __init__(self, alpha: float = TABULAR_ALPHA, gamma: float = TABULAR_GAMMA):
        self.table = QTable(alpha=alpha, gamma=gamma)

    def action_values(self, state) -> np.ndarray:
        return self.table.values(state)

    def learn(self, state, action, reward, next_state, next_action, terminal) -> None:
        sarsa_update(self.table, Transition(state, action, reward, next_state, terminal),
                     next_action)


class DqnAgent:
    kind = "dqn"
    uses_features = True

    def __init__(self, seed: int = 0, **kwargs):
        self.model = DqnModel(seed=seed, **kwargs)

    def action_values(self, state) -> np.ndarray:
        return self.model.action_values(state)

    def learn(self, state, action, reward, next_state, next_action, terminal) -> None:
        dqn_step(self.model, Transition(state, action, reward, next_state, terminal))


def create_agent(algorithm: str, seed: int = 0):
    if algorithm == "qlearning":
        return QLearningAgent()
    if algorithm == "sarsa":
        return SarsaAgent()
    if algorithm == "dqn":
        return DqnAgent(seed=seed)
    if algorithm == "reinforce":
        return ReinforceAgent(seed=seed)
    raise ValueError(f"unknown algorithm {algorithm!r}")


__all__ = [
    "ALGORITHMS",
    "Adam",
    "DqnAgent",
    "DqnModel",
    "MLP",
    "QLearningAgent",
    "QTable",
    "ReinforceAgent",
    "ReplayBuffer",
    "SarsaAgent",
    "Transition",
    "create_agent",
    "dqn_step",
    "q_update",
    "sarsa_update",
    "select_action",
]
