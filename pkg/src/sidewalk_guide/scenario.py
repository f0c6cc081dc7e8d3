"""Scenario files: versioned YAML descriptions of a sidewalk world.

Schema (format: 1):
    format: 1
    length_m: 152.4
    width_m: 3.0
    curb_margin_m: 0.0        # optional
    seed: 42
    walker: {x: 0.0, y: 1.5, speed_cms: 120.0}   # optional
    obstacles:
      - {kind: tree, x: 20.0, y: 0.6, radius: 0.4}
      - {kind: fence, polygon: [[30.0, 0.1], [36.0, 0.1], [36.0, 0.2], [30.0, 0.2]]}
      - {kind: person, x: 40.0, y: 1.5, radius: 0.3, vx: -60, vy: 12,
         motion: linear_bounce}
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .world import (
    Disc,
    Obstacle,
    OBSTACLE_KINDS,
    Polygon,
    SidewalkWorld,
    WalkerState,
    WorldError,
)

FORMAT_VERSION = 1


class ScenarioError(Exception):
    pass


@dataclass
class ObstacleSpec:
    kind: str
    x: float = 0.0
    y: float = 0.0
    radius: float | None = None
    polygon: list[list[float]] | None = None
    vx: float = 0.0
    vy: float = 0.0
    motion: str = "stationary"

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "vx": self.vx, "vy": self.vy, "motion": self.motion}
        if self.polygon is not None:
            d["polygon"] = self.polygon
        else:
            d.update(x=self.x, y=self.y, radius=self.radius)
        return d


@dataclass
class ScenarioConfig:
    length_m: float
    width_m: float
    seed: int
    curb_margin_m: float = 0.0
    walker_x: float = 0.0
    walker_y: float | None = None
    walker_speed_cms: float = 120.0
    obstacles: list[ObstacleSpec] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_VERSION,
            "length_m": self.length_m,
            "width_m": self.width_m,
            "curb_margin_m": self.curb_margin_m,
            "seed": self.seed,
            "walker": {
                "x": self.walker_x,
                "y": self.walker_y if self.walker_y is not None else self.width_m / 2,
                "speed_cms": self.walker_speed_cms,
            },
            "obstacles": [o.to_dict() for o in self.obstacles],
        }


def parse_scenario(data: dict) -> ScenarioConfig:
    if not isinstance(data, dict):
        raise ScenarioError("scenario must be a mapping")
    if data.get("format") != FORMAT_VERSION:
        raise ScenarioError(f"unsupported scenario format {data.get('format')!r}")
    try:
        cfg = ScenarioConfig(
            length_m=float(data["length_m"]),
            width_m=float(data["width_m"]),
            seed=int(data.get("seed", 0)),
            curb_margin_m=float(data.get("curb_margin_m", 0.0)),
        )
    except KeyError as exc:
        raise ScenarioError(f"missing required field {exc.args[0]!r}") from None
    if cfg.length_m <= 0 or cfg.width_m <= 0:
        raise ScenarioError("length_m and width_m must be positive")
    walker = data.get("walker") or {}
    cfg.walker_x = float(walker.get("x", 0.0))
    cfg.walker_y = float(walker["y"]) if "y" in walker else None
    cfg.walker_speed_cms = float(walker.get("speed_cms", 120.0))
    if cfg.walker_speed_cms <= 0:
        raise ScenarioError("walker speed must be positive")
    for rec in data.get("obstacles", []):
        kind = rec.get("kind")
        if kind not in OBSTACLE_KINDS:
            raise ScenarioError(f"unknown obstacle kind {kind!r}")
        spec = ObstacleSpec(
            kind=kind,
            x=float(rec.get("x", 0.0)),
            y=float(rec.get("y", 0.0)),
            radius=float(rec["radius"]) if "radius" in rec else None,
            polygon=[[float(a), float(b)] for a, b in rec["polygon"]] if "polygon" in rec else None,
            vx=float(rec.get("vx", 0.0)),
            vy=float(rec.get("vy", 0.0)),
            motion=rec.get("motion", "stationary"),
        )
        if spec.polygon is None and spec.radius is None:
            raise ScenarioError(f"obstacle {kind} needs a radius or a polygon")
        if spec.polygon is not None and len(spec.polygon) < 3:
            raise ScenarioError(f"obstacle {kind} polygon needs >= 3 points")
        cfg.obstacles.append(spec)
    return cfg


def load_scenario(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"malformed scenario file: {exc}") from None
    return parse_scenario(data)


def build_world(scenario: ScenarioConfig, seed_override: int | None = None) -> SidewalkWorld:
    """Deterministic world for a fixed (scenario, seed) pair."""
    obstacles = []
    counters: dict[str, int] = {}
    for spec in scenario.obstacles:
        n = counters.get(spec.kind, 0)
        counters[spec.kind] = n + 1
        if spec.polygon is not None:
            footprint = Polygon(np.array(spec.polygon, dtype=float))
        else:
            footprint = Disc(np.array([spec.x, spec.y], dtype=float), float(spec.radius))
        obstacles.append(
            Obstacle(
                id=f"{spec.kind}-{n:02d}",
                kind=spec.kind,
                footprint=footprint,
                velocity=np.array([spec.vx, spec.vy], dtype=float),
                motion_policy=spec.motion,
            )
        )
    walker_y = scenario.walker_y if scenario.walker_y is not None else scenario.width_m / 2
    walker = WalkerState(
        position=np.array([scenario.walker_x, walker_y], dtype=float),
        speed=scenario.walker_speed_cms,
    )
    seed = scenario.seed if seed_override is None else seed_override
    try:
        return SidewalkWorld(
            length=scenario.length_m,
            width=scenario.width_m,
            obstacles=obstacles,
            walker=walker,
            rng_seed=seed,
            curb_margin=scenario.curb_margin_m,
        )
    except WorldError as exc:
        raise ScenarioError(str(exc)) from None
