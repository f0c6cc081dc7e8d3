"""Training runs: epsilon schedules, learning curves, persisted outputs."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..agents import ALGORITHMS, create_agent
from ..agents.checkpoint import save_agent
from ..scenario import ScenarioConfig, build_world, load_scenario
from ..sensing import SensorConfig
from .episode import MAX_EPISODE_STEPS, EpisodeRecord, StepTrace, run_episode

EPSILON_DECAY_EPISODES = 150
# Exploration anneals per algorithm: off-policy Q-learning keeps a healthy
# exploration floor (its target policy learns from it for free), while
# on-policy SARSA anneals low so its behavior converges on what it
# evaluates. The DQN floor follows its published schedule.
EPSILON_FLOOR = {"qlearning": 0.2, "sarsa": 0.04, "dqn": 0.05, "reinforce": 0.0}


@dataclass
class LearningCurve:
    algorithm: str
    returns: list[int] = field(default_factory=list)
    smoothing_window: int = 10

    def smoothed(self) -> list[float]:
        out = []
        w = self.smoothing_window
        for i in range(len(self.returns)):
            lo = max(0, i - w + 1)
            out.append(float(np.mean(self.returns[lo:i + 1])))
        return out

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["episode", "return"])
            for i, r in enumerate(self.returns):
                writer.writerow([i, r])


def epsilon_schedule(algorithm: str, episode: int) -> float:
    floor = EPSILON_FLOOR[algorithm]
    if algorithm == "reinforce":
        return 0.0
    frac = min(1.0, episode / EPSILON_DECAY_EPISODES)
    return 1.0 + (floor - 1.0) * frac


def episode_seeds(run_seed: int, episode: int) -> tuple[np.random.Generator, np.random.Generator, int]:
    """World/sensor streams for one episode, stable across run partitioning."""
    world_seed = int(np.random.SeedSequence((run_seed, episode, 0)).generate_state(1)[0])
    sensor_rng = np.random.default_rng(np.random.SeedSequence((run_seed, episode, 1)))
    agent_unused = np.random.default_rng(0)
    return sensor_rng, agent_unused, world_seed


def train(algorithm: str, scenario: ScenarioConfig | str | Path, episodes: int,
          seed: int, out_dir: str | Path | None = None,
          sensor_cfg: SensorConfig | None = None,
          max_steps: int = MAX_EPISODE_STEPS,
          record_path: str | Path | None = None, agent=None):
    """Train one agent; returns (agent, curve, episode records).

    Passing `agent` trains that instance instead of a freshly created one
    (the epsilon schedule still follows `algorithm`).
    """
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    cfg = scenario if isinstance(scenario, ScenarioConfig) else load_scenario(scenario)
    sensor_cfg = sensor_cfg or SensorConfig()
    if agent is None:
        agent = create_agent(algorithm, seed=seed)
    agent_rng = np.random.default_rng(np.random.SeedSequence((seed, 0xA6E27)))

    curve = LearningCurve(algorithm=algorithm)
    records: list[EpisodeRecord] = []
    traces: list[tuple[int, StepTrace, EpisodeRecord]] = []
    for ep in range(episodes):
        sensor_rng, _, world_seed = episode_seeds(seed, ep)
        world = build_world(cfg, seed_override=world_seed)
        trace = StepTrace() if record_path else None
        rec = run_episode(
            world, agent, epsilon_schedule(algorithm, ep), sensor_cfg, sensor_rng,
            agent_rng, learn=True, max_steps=max_steps, seed=world_seed, trace=trace,
        )
        curve.returns.append(rec.episode_return)
        records.append(rec)
        if trace is not None:
            traces.append((world_seed, trace, rec))

    if record_path:
        from .replay import write_episode_log
        write_episode_log(record_path, cfg, traces)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        save_agent(agent, out / "checkpoint.json")
        curve.write_csv(out / "curve.csv")
        meta = {
            "algorithm": algorithm,
            "episodes": episodes,
            "seed": seed,
            "max_steps": max_steps,
            "sensor": sensor_cfg.to_dict(),
            "final_50_mean": float(np.mean(curve.returns[-50:])),
            "goal_rate": float(np.mean([r.reached_goal for r in records])),
            "collision_rate": float(np.mean([r.collided for r in records])),
        }
        (out / "meta.json").write_text(json.dumps(meta, indent=2))
    return agent, curve, records
