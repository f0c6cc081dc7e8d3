"""Tabular temporal-difference learners over hashable states."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

import numpy as np

from ..world import ACTIONS

N_ACTIONS = len(ACTIONS)


@dataclass
class Transition:
    state: Any
    action: int
    reward: int
    next_state: Any
    terminal: bool


@dataclass
class QTable:
    alpha: float = 0.2
    gamma: float = 0.95
    epsilon: float = 0.1
    table: dict[Hashable, np.ndarray] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError("alpha must be in (0, 1]")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must be in [0, 1)")

    def values(self, state: Hashable) -> np.ndarray:
        """Action values; unvisited states read as all zeros."""
        arr = self.table.get(state)
        return arr if arr is not None else np.zeros(N_ACTIONS)

    def _entry(self, state: Hashable) -> np.ndarray:
        arr = self.table.get(state)
        if arr is None:
            arr = np.zeros(N_ACTIONS)
            self.table[state] = arr
        return arr


def q_update(table: QTable, tr: Transition) -> QTable:
    """Off-policy backup toward the greedy next-state value."""
    q = table._entry(tr.state)
    bootstrap = 0.0 if tr.terminal else float(np.max(table.values(tr.next_state)))
    target = tr.reward + table.gamma * bootstrap
    q[tr.action] += table.alpha * (target - q[tr.action])
    return table


def sarsa_update(table: QTable, tr: Transition, next_action: int) -> QTable:
    """On-policy backup toward the action the behavior policy actually takes."""
    q = table._entry(tr.state)
    bootstrap = 0.0 if tr.terminal else float(table.values(tr.next_state)[next_action])
    target = tr.reward + table.gamma * bootstrap
    q[tr.action] += table.alpha * (target - q[tr.action])
    return table
