"""Frozen-policy evaluation: detection rates over many episodes.

Episodes are seeded individually from (run seed, episode index), so any
partitioning of the episode range across workers produces identical
statistics.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..scenario import ScenarioConfig, build_world, load_scenario
from ..sensing import SensorConfig
from .episode import MAX_EPISODE_STEPS, StepTrace, run_episode
from .train import episode_seeds

# The obstacle kinds scored in the detection table.
TABLE_KINDS = (
    "pothole",
    "construction_cone",
    "fire_hydrant",
    "electric_scooter",
    "electric_pole",
    "dumpster",
    "tree",
)


@dataclass
class EvaluationResult:
    episodes: int
    detection_pct: dict[str, float]       # kinds present in the scenario
    absent_kinds: list[str]               # table kinds missing from the scenario
    table_average: float                  # mean over present table kinds
    goal_rate: float
    collision_rate: float
    mean_return: float

    def to_dict(self) -> dict:
        return {
            "episodes": self.episodes,
            "detection_pct": self.detection_pct,
            "absent_kinds": self.absent_kinds,
            "table_average": self.table_average,
            "goal_rate": self.goal_rate,
            "collision_rate": self.collision_rate,
            "mean_return": self.mean_return,
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "detected_pct"])
            for kind in sorted(self.detection_pct):
                writer.writerow([kind, f"{self.detection_pct[kind]:.3f}"])
            for kind in self.absent_kinds:
                writer.writerow([kind, "not-present"])


def _eval_chunk(args) -> dict:
    checkpoint_path, scenario_dict, sensor_dict, run_seed, start, count, max_steps, record = args
    from ..agents.checkpoint import load_agent
    from ..scenario import parse_scenario

    agent = load_agent(checkpoint_path)
    cfg = parse_scenario(scenario_dict)
    sensor_cfg = SensorConfig.from_dict(sensor_dict)
    agent_rng = np.random.default_rng(0)  # epsilon=0: never consulted
    detect_counts: dict[str, int] = {}
    returns, goals, collisions = [], 0, 0
    traces = []
    for ep in range(start, start + count):
        sensor_rng, _, world_seed = episode_seeds(run_seed, ep)
        world = build_world(cfg, seed_override=world_seed)
        trace = StepTrace() if record else None
        rec = run_episode(world, agent, 0.0, sensor_cfg, sensor_rng, agent_rng,
                          learn=False, max_steps=max_steps, track_detections=True,
                          seed=world_seed, trace=trace)
        for kind, hit in rec.detections.items():
            detect_counts[kind] = detect_counts.get(kind, 0) + int(hit)
        returns.append(rec.episode_return)
        goals += int(rec.reached_goal)
        collisions += int(rec.collided)
        if trace is not None:
            traces.append((world_seed, trace, rec))
    return {
        "detect_counts": detect_counts,
        "returns": returns,
        "goals": goals,
        "collisions": collisions,
        "traces": traces,
    }


def evaluate(checkpoint: str | Path, scenario: ScenarioConfig | str | Path,
             episodes: int, seed: int, out_dir: str | Path | None = None,
             sensor_cfg: SensorConfig | None = None, workers: int = 1,
             max_steps: int = MAX_EPISODE_STEPS,
             record_path: str | Path | None = None) -> EvaluationResult:
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    cfg = scenario if isinstance(scenario, ScenarioConfig) else load_scenario(scenario)
    sensor_cfg = sensor_cfg or SensorConfig()
    # Fail fast on an unloadable checkpoint before spawning workers.
    from ..agents.checkpoint import load_agent
    load_agent(checkpoint)

    present = {spec.kind for spec in cfg.obstacles}
    chunk = max(1, episodes // max(1, workers))
    jobs = []
    start = 0
    while start < episodes:
        count = min(chunk, episodes - start)
        jobs.append((str(checkpoint), cfg.to_dict(), sensor_cfg.to_dict(),
                     seed, start, count, max_steps, record_path is not None))
        start += count

    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_eval_chunk, jobs))
    else:
        results = [_eval_chunk(job) for job in jobs]

    detect_counts: dict[str, int] = {}
    returns: list[int] = []
    goals = collisions = 0
    traces = []
    for res in results:
        for kind, n in res["detect_counts"].items():
            detect_counts[kind] = detect_counts.get(kind, 0) + n
        returns.extend(res["returns"])
        goals += res["goals"]
        collisions += res["collisions"]
        traces.extend(res["traces"])

    detection_pct = {kind: 100.0 * detect_counts.get(kind, 0) / episodes
                     for kind in sorted(present)}
    present_table = [k for k in TABLE_KINDS if k in present]
    absent = [k for k in TABLE_KINDS if k not in present]
    table_avg = float(np.mean([detection_pct[k] for k in present_table])) if present_table else 0.0
    result = EvaluationResult(
        episodes=episodes,
        detection_pct=detection_pct,
        absent_kinds=absent,
        table_average=table_avg,
        goal_rate=goals / episodes,
        collision_rate=collisions / episodes,
        mean_return=float(np.mean(returns)),
    )
    if record_path:
        from .replay import write_episode_log
        write_episode_log(record_path, cfg, traces)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        result.write_csv(out / "detections.csv")
        (out / "summary.json").write_text(json.dumps(result.to_dict(), indent=2))
    return result
