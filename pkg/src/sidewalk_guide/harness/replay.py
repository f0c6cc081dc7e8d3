"""Episode logs and deterministic replay.

A log is JSON-lines: a header record followed by one record per episode.
Replay rebuilds each world from the embedded scenario and seed, re-steps
the recorded actions, and fails loudly on the first divergence - the
integrity audit for the (scenario, seed, actions) determinism contract.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..scenario import ScenarioConfig, build_world, parse_scenario
from ..world import ACTIONS

LOG_FORMAT = 1


class LogParseError(Exception):
    pass


class ReplayDivergence(Exception):
    def __init__(self, episode: int, tick: int, detail: str):
        super().__init__(f"episode {episode} diverged at tick {tick}: {detail}")
        self.episode = episode
        self.tick = tick


@dataclass
class ReplayReport:
    episodes: int
    steps: int


def write_episode_log(path: str | Path, scenario: ScenarioConfig, traces) -> None:
    """traces: iterable of (world_seed, StepTrace, EpisodeRecord)."""
    with open(path, "w") as fh:
        header = {"format": LOG_FORMAT, "kind": "episode-log",
                  "scenario": scenario.to_dict()}
        fh.write(json.dumps(header) + "\n")
        for world_seed, trace, rec in traces:
            fh.write(json.dumps({
                "seed": world_seed,
                "actions": trace.actions,
                "rewards": trace.rewards,
                "collided": rec.collided,
                "reached_goal": rec.reached_goal,
            }) + "\n")


def replay(path: str | Path) -> ReplayReport:
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise LogParseError(f"cannot read log: {exc}") from None
    if not lines:
        raise LogParseError("empty log")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise LogParseError(f"bad header: {exc}") from None
    if header.get("format") != LOG_FORMAT or header.get("kind") != "episode-log":
        raise LogParseError("not an episode log")
    scenario = parse_scenario(header["scenario"])

    total_steps = 0
    n_episodes = 0
    for lineno, line in enumerate(lines[1:], start=1):
        try:
            rec = json.loads(line)
            seed = rec["seed"]
            actions = rec["actions"]
            rewards = rec["rewards"]
            collided = rec["collided"]
            reached_goal = rec["reached_goal"]
        except (json.JSONDecodeError, KeyError) as exc:
            raise LogParseError(f"line {lineno + 1}: truncated or malformed: {exc}") from None
        if len(actions) != len(rewards):
            raise LogParseError(f"line {lineno + 1}: actions/rewards length mismatch")
        world = build_world(scenario, seed_override=seed)
        got_collided = got_goal = False
        for tick, (a, r) in enumerate(zip(actions, rewards)):
            outcome = world.step(ACTIONS[a])
            total_steps += 1
            if outcome.reward != r:
                raise ReplayDivergence(n_episodes, tick,
                                       f"reward {outcome.reward} != logged {r}")
            got_collided = outcome.collided
            got_goal = outcome.reached_goal
        if got_collided != collided:
            raise ReplayDivergence(n_episodes, len(actions) - 1, "collided flag mismatch")
        if got_goal != reached_goal:
            raise ReplayDivergence(n_episodes, len(actions) - 1, "reached_goal flag mismatch")
        n_episodes += 1
    return ReplayReport(episodes=n_episodes, steps=total_steps)
