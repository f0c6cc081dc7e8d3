"""Epsilon-greedy action selection."""

from __future__ import annotations

import numpy as np

from ..world import ACTIONS

N_ACTIONS = len(ACTIONS)


def select_action(agent, state, epsilon: float, rng: np.random.Generator) -> int:
    """Random action with probability epsilon, else greedy.

    Greedy ties break toward the first maximum in fixed action order
    (stop < left < forward < right < backward).
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must be in [0, 1]")
    if epsilon > 0.0 and rng.random() < epsilon:
        return int(rng.integers(N_ACTIONS))
    return int(np.argmax(agent.action_values(state)))
