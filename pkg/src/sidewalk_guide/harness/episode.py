"""Single-episode runner shared by training and evaluation.

An episode is a walk down the sidewalk: walking is the task, exactly as
it is for the person the device assists, so while the agent's own
sensing reports a free corridor ahead the walk simply proceeds forward.
The learning agent takes over the action choice whenever its scan shows
the forward corridor blocked within the guard range, or any return
inside the emergency radius. The moment its maneuvering clears the
corridor again, the walk resumes; in clear states the agent is never
consulted, so there is no way to learn loitering. Collisions, the far
end, or the step cap end the walk.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..agents import select_action
from ..agents.features import discrete_state_from, feature_vector_from
from ..freepath import corridor_mask, nearest_cluster_summary
from ..sensing import DetectionTracker, SensorConfig, scan
from ..world import ACTIONS, SidewalkWorld

MAX_EPISODE_STEPS = 300      # bounds a careful walk plus dodging detours
CORRIDOR_HALFWIDTH = 0.5     # m, free-path corridor around the heading
GUARD_RANGE = 5.0            # m; corridor blockers nearer than this hand
                             # control to the agent
EMERGENCY_RANGE = 1.5        # m; anything this close does too
FORWARD = ACTIONS.index("forward")


@dataclass
class EpisodeRecord:
    seed: int
    steps: int
    episode_return: int
    collided: bool
    reached_goal: bool
    detections: dict[str, bool] = field(default_factory=dict)
    duration_ticks: int = 0


@dataclass
class StepTrace:
    actions: list[int] = field(default_factory=list)
    rewards: list[int] = field(default_factory=list)


def observe(world: SidewalkWorld, cfg: SensorConfig, rng: np.random.Generator,
            uses_features: bool):
    sweep = scan(world, cfg, rng)
    nearest = nearest_cluster_summary(sweep)
    if uses_features:
        state = feature_vector_from(sweep, world.walker, world, nearest)
    else:
        state = discrete_state_from(nearest, world.walker, world)
    return sweep, nearest, state


def agent_has_control(sweep) -> bool:
    """The agent steers iff the forward corridor is blocked within the
    guard range or any return is inside the emergency radius."""
    if len(sweep) == 0:
        return False
    near = sweep.ranges <= GUARD_RANGE
    if not near.any():
        return False
    if (sweep.ranges <= EMERGENCY_RANGE).any():
        return True
    blocked = corridor_mask(sweep.ranges, sweep.bearings, 0.0, CORRIDOR_HALFWIDTH)
    return bool((blocked & near).any())


class WalkDriver:
    """Walking-person model around the maneuvering agent.

    Forward while the path ahead reads clear; the agent steers whenever
    its scan shows a blocker. A person does not hover at a hydrant
    indefinitely, so whenever the walk has made no real progress over the
    recent window and the path is still blocked, the walker eases around
    the blockage toward whichever side the scan shows more open. The
    detour uses sensed data only and is deliberately naive: proactive
    dodging by the agent beats it in both speed and safety.
    """

    PROGRESS_WINDOW = 13   # steps over which progress is judged
    MIN_PROGRESS = 0.4     # m of net forward progress expected per window
    EDGE_MARGIN = 0.35     # m from the walkway edge where detours turn inward

    def __init__(self):
        self._trail: list[float] = []
        self._detour_side: Optional[int] = None

    def choose(self, agent, state, sweep, world, epsilon: float,
               rng: np.random.Generator) -> int:
        x = float(world.walker.position[0])
        self._trail.append(x)
        if len(self._trail) > self.PROGRESS_WINDOW:
            self._trail.pop(0)
        if not agent_has_control(sweep):
            self._detour_side = None
            return FORWARD
        stuck = (len(self._trail) == self.PROGRESS_WINDOW
                 and x - self._trail[0] < self.MIN_PROGRESS)
        if stuck:
            return self._detour(sweep, world)
        self._detour_side = None
        if hasattr(agent, "select"):
            return agent.select(state, epsilon, rng)
        return select_action(agent, state, epsilon, rng)

    def _detour(self, sweep, world) -> int:
        left = ACTIONS.index("left")
        right = ACTIONS.index("right")
        y = float(world.walker.position[1])
        # hold one side per blockage so the detour does not dither
        if self._detour_side is None:
            lhs = sweep.ranges[sweep.bearings < -0.26]
            rhs = sweep.ranges[sweep.bearings > 0.26]
            lhs_min = float(lhs.min()) if len(lhs) else np.inf
            rhs_min = float(rhs.min()) if len(rhs) else np.inf
            self._detour_side = left if lhs_min >= rhs_min else right
        if y < world.curb_margin + self.EDGE_MARGIN:
            self._detour_side = left
        elif y > world.width - world.curb_margin - self.EDGE_MARGIN:
            self._detour_side = right
        return self._detour_side


def _choose(agent, state, sweep, epsilon: float,
            rng: np.random.Generator) -> int:
    """Guard-only policy composition (no impatience); used by tests."""
    if not agent_has_control(sweep):
        return FORWARD
    if hasattr(agent, "select"):
        return agent.select(state, epsilon, rng)
    return select_action(agent, state, epsilon, rng)


def run_episode(world: SidewalkWorld, agent, epsilon: float,
                sensor_cfg: SensorConfig, sensor_rng: np.random.Generator,
                agent_rng: np.random.Generator, *, learn: bool = True,
                max_steps: int = MAX_EPISODE_STEPS, dt: float = 0.5,
                track_detections: bool = False, seed: int = 0,
                trace: Optional[StepTrace] = None) -> EpisodeRecord:
    """Run one walk to collision, goal, or the step cap.

    The per-step loop is: sense -> pick action -> step the world -> sense
    again -> learn. Hitting the step cap truncates the episode without
    marking the final transition terminal, so value bootstrapping still
    sees the continuation.
    """
    tracker = DetectionTracker(world) if track_detections else None
    driver = WalkDriver()
    sweep, nearest, state = observe(world, sensor_cfg, sensor_rng, agent.uses_features)
    if tracker:
        tracker.update(sweep)
    action = driver.choose(agent, state, sweep, world, epsilon, agent_rng)

    steps = 0
    total = 0
    collided = False
    reached_goal = False
    while True:
        outcome = world.step(ACTIONS[action], dt)
        steps += 1
        total += outcome.reward
        if trace is not None:
            trace.actions.append(action)
            trace.rewards.append(outcome.reward)
        if outcome.terminal:
            collided = outcome.collided
            reached_goal = outcome.reached_goal
            if learn:
                agent.learn(state, action, outcome.reward, state, action, True)
            break
        sweep, nearest, next_state = observe(world, sensor_cfg, sensor_rng,
                                                agent.uses_features)
        if tracker:
            tracker.update(sweep)
        next_action = driver.choose(agent, next_state, sweep, world, epsilon, agent_rng)
        if learn:
            agent.learn(state, action, outcome.reward, next_state, next_action, False)
        state, action = next_state, next_action
        if steps >= max_steps:
            break
    if learn and hasattr(agent, "episode_end"):
        agent.episode_end()
    return EpisodeRecord(
        seed=seed,
        steps=steps,
        episode_return=total,
        collided=collided,
        reached_goal=reached_goal,
        detections=tracker.result() if tracker else {},
        duration_ticks=world.tick,
    )
