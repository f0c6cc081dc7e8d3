"""Simulated planar depth sensor.

Casts evenly spaced rays across the field of view and reports the first
surface each ray meets, with per-kind dropout and Gaussian range noise.
Bearings are clockwise relative to the walker heading: negative bearings
are to the walker's left.

Two height classes matter: above-ground surfaces occlude whatever is
behind them, while ground hazards (potholes, puddles) never occlude and
are only visible within `ground_visibility_range` - the sensor has to
look *down* to see them, which is what makes them easy to miss.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Optional

import numpy as np

from . import geometry
from .world import HEIGHT_ABOVE, HEIGHT_GROUND, SidewalkWorld

MIN_RANGE = 0.001  # noise floor so ranges stay positive, m

# Per-ray miss probability by obstacle kind. These values are calibration
# outputs: together with ground_visibility_range they set the per-episode
# detection rates of the standard scenario. Unlisted kinds never drop.
DEFAULT_DROPOUT = {
    "pothole": 0.88,
    "puddle": 0.82,
    "construction_cone": 0.55,
    "fire_hydrant": 0.50,
    "electric_scooter": 0.78,
    "electric_pole": 0.73,
    "dumpster": 0.35,
    "tree": 0.72,
}


@dataclass
class SensorConfig:
    fov: float = 1.57
    max_range: float = 8.0
    beams: int = 181
    dropout_prob: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_DROPOUT))
    ground_visibility_range: float = 2.0
    noise_sigma: float = 0.02

    def __post_init__(self) -> None:
        if self.beams < 3:
            raise ValueError("need at least 3 beams")
        for kind, p in self.dropout_prob.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"dropout_prob[{kind}] outside [0, 1]")

    @property
    def angular_resolution(self) -> float:
        return self.fov / (self.beams - 1)

    def to_dict(self) -> dict:
        return {
            "fov": self.fov,
            "max_range": self.max_range,
            "beams": self.beams,
            "dropout_prob": dict(self.dropout_prob),
            "ground_visibility_range": self.ground_visibility_range,
            "noise_sigma": self.noise_sigma,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SensorConfig":
        return cls(**d)


@dataclass
class ScanPoint:
    range: float
    bearing: float
    height_class: str
    source_obstacle: Optional[str]  # ground truth; evaluation only


class RangeScan:
    """Point cloud from one sensor sweep, stored as parallel arrays."""

    def __init__(self, ranges: np.ndarray, bearings: np.ndarray,
                 heights: np.ndarray, source_index: np.ndarray,
                 obstacle_ids: tuple[str, ...], obstacle_kinds: tuple[str, ...],
                 fov: float, max_range: float, angular_resolution: float,
                 timestamp: int):
        self.ranges = ranges
        self.bearings = bearings
        self.heights = heights
        self.source_index = source_index
        self.obstacle_ids = obstacle_ids
        self.obstacle_kinds = obstacle_kinds
        self.fov = fov
        self.max_range = max_range
        self.angular_resolution = angular_resolution
        self.timestamp = timestamp

    def __len__(self) -> int:
        return len(self.ranges)

    @property
    def points(self) -> list[ScanPoint]:
        out = []
        for i in range(len(self.ranges)):
            src = int(self.source_index[i])
            out.append(ScanPoint(
                range=float(self.ranges[i]),
                bearing=float(self.bearings[i]),
                height_class="ground_level" if self.heights[i] == HEIGHT_GROUND else "above_ground",
                source_obstacle=self.obstacle_ids[src] if src >= 0 else None,
            ))
        return out

    def cartesian(self) -> np.ndarray:
        """Sensor-frame coordinates (forward, rightward); preserves
        pairwise Euclidean distances between sensed points."""
        x = self.ranges * np.cos(self.bearings)
        y = self.ranges * np.sin(self.bearings)
        return np.stack([x, y], axis=1)

    def point_kinds(self) -> list[str | None]:
        return [self.obstacle_kinds[int(i)] if i >= 0 else None for i in self.source_index]


def scan(world: SidewalkWorld, cfg: SensorConfig, rng: np.random.Generator) -> RangeScan:
    """One sensor sweep from the walker's pose.

    Per ray: the nearest above-ground hit occludes everything behind it; a
    ground hit wins only when nearer and within the ground visibility
    range. A dropped above-ground return blocks the ray anyway (the
    surface is still physically there); a dropped ground return lets the
    ray continue to the backdrop.
    """
    if not world.walker.alive:
        raise ValueError("cannot scan: walker is not alive")
    n = cfg.beams
    bearings = np.linspace(-cfg.fov / 2.0, cfg.fov / 2.0, n)
    dirs = geometry.ray_directions(world.walker.heading, bearings)
    origin = world.walker.position

    dc, dr, dobs, dabove = world.disc_primitives()
    sa, sb, sobs, sabove = world.segment_primitives()
    # Only primitives whose surface can fall within max_range matter.
    if len(dc):
        dx = dc[:, 0] - origin[0]
        dy = dc[:, 1] - origin[1]
        reach = np.sqrt(dx * dx + dy * dy) - dr <= cfg.max_range
        if not reach.all():
            dc, dr, dobs, dabove = dc[reach], dr[reach], dobs[reach], dabove[reach]
    if len(sa):
        ab = sb - sa
        denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-18)
        u = np.einsum("ij,ij->i", origin - sa, ab) / denom
        np.clip(u, 0.0, 1.0, out=u)
        closest = sa + u[:, None] * ab
        reach = np.hypot(closest[:, 0] - origin[0], closest[:, 1] - origin[1]) <= cfg.max_range
        if not reach.all():
            sa, sb, sobs, sabove = sa[reach], sb[reach], sobs[reach], sabove[reach]
    t_disc = geometry.ray_circle_hits(origin, dirs, dc, dr)
    t_seg = geometry.ray_segment_hits(origin, dirs, sa, sb)
    t_all = np.concatenate([t_disc, t_seg], axis=1)
    owner = np.concatenate([dobs, sobs]) if t_all.shape[1] else np.zeros(0, int)
    above = np.concatenate([dabove, sabove]) if t_all.shape[1] else np.zeros(0, bool)

    rows = np.arange(n)

    def nearest(mask: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if not mask.any():
            return np.full(n, np.inf), np.full(n, -1, dtype=int)
        sub = t_all[:, mask]
        idx = np.argmin(sub, axis=1)
        t = sub[rows, idx]
        own = np.where(np.isfinite(t), owner[mask][idx], -1)
        return t, own

    t_a, own_a = nearest(above)
    t_g, own_g = nearest(~above)

    # Fixed rng consumption per call keeps scans deterministic for a seed
    # regardless of what the rays hit.
    uniforms = rng.random(2 * n)
    u_ground = uniforms[:n]
    u_above = uniforms[n:]
    noise = rng.normal(0.0, cfg.noise_sigma, n)

    # Sentinel 0.0 at index -1 absorbs the "no hit" owner; those rays are
    # already excluded by the visibility masks below.
    p_drop = _dropout_array(frozenset(cfg.dropout_prob.items()), world.obstacle_kinds)

    # A ground hazard never hides what stands behind it (the sensor looks
    # down at it), so one ray may return both a ground point and an
    # above-ground point. A nearer above-ground surface does hide the
    # ground spot behind it.
    g_visible = np.isfinite(t_g) & (t_g <= cfg.ground_visibility_range) & (t_g < t_a)
    g_kept = g_visible & (u_ground >= p_drop[own_g])
    a_available = np.isfinite(t_a) & (t_a <= cfg.max_range)
    a_kept = a_available & (u_above >= p_drop[own_a])

    n_ground = int(np.count_nonzero(g_kept))
    t_sel = np.concatenate([t_g[g_kept], t_a[a_kept]])
    own_sel = np.concatenate([own_g[g_kept], own_a[a_kept]])
    bear_sel = np.concatenate([bearings[g_kept], bearings[a_kept]])
    height_sel = np.full(len(t_sel), HEIGHT_ABOVE, dtype=int)
    height_sel[:n_ground] = HEIGHT_GROUND
    noise_sel = np.concatenate([noise[g_kept], noise[a_kept]])
    order = np.lexsort((t_sel, bear_sel))
    ranges = t_sel[order] + noise_sel[order]
    np.clip(ranges, MIN_RANGE, cfg.max_range, out=ranges)

    return RangeScan(
        ranges=ranges,
        bearings=bear_sel[order],
        heights=height_sel[order],
        source_index=own_sel[order].astype(int),
        obstacle_ids=world.obstacle_ids,
        obstacle_kinds=world.obstacle_kinds,
        fov=cfg.fov,
        max_range=cfg.max_range,
        angular_resolution=cfg.angular_resolution,
        timestamp=world.tick,
    )


@lru_cache(maxsize=64)
def _dropout_array(dropout_items: frozenset, kinds: tuple[str, ...]) -> np.ndarray:
    probs = dict(dropout_items)
    return np.array([probs.get(kind, 0.0) for kind in kinds] + [0.0])


class DetectionTracker:
    """Streaming per-episode detection bookkeeping.

    An obstacle instance counts as detected once `k_consecutive` scans in a
    row each attribute at least `min_points` points to it. A kind counts as
    detected when any of its instances does.
    """

    def __init__(self, world: SidewalkWorld, k_consecutive: int = 2, min_points: int = 3):
        self.kinds = [o.kind for o in world.obstacles]
        self.k_consecutive = k_consecutive
        self.min_points = min_points
        self._streak = np.zeros(len(self.kinds), dtype=int)
        self._detected = np.zeros(len(self.kinds), dtype=bool)

    def update(self, sweep: RangeScan) -> None:
        if len(self.kinds) == 0:
            return
        counts = np.bincount(sweep.source_index, minlength=len(self.kinds)) \
            if len(sweep) else np.zeros(len(self.kinds), dtype=int)
        qualified = counts >= self.min_points
        self._streak = np.where(qualified, self._streak + 1, 0)
        self._detected |= self._streak >= self.k_consecutive

    def result(self) -> dict[str, bool]:
        out: dict[str, bool] = {}
        for kind, det in zip(self.kinds, self._detected):
            out[kind] = out.get(kind, False) or bool(det)
        return out


def attribute_detections(scan_history: list[RangeScan], world: SidewalkWorld,
                         k_consecutive: int = 2, min_points: int = 3) -> dict[str, bool]:
    """Which obstacle kinds this episode's scans actually picked up."""
    if not scan_history:
        raise ValueError("scan history empty")
    tracker = DetectionTracker(world, k_consecutive=k_consecutive, min_points=min_points)
    for sweep in scan_history:
        tracker.update(sweep)
    return tracker.result()


def iter_dump_records(sweep: RangeScan) -> Iterator[dict]:
    """Replay/test dump: one record per point."""
    for p in sweep.points:
        yield {
            "tick": sweep.timestamp,
            "bearing": p.bearing,
            "range": p.range,
            "height_class": p.height_class,
            "source": p.source_obstacle,
        }
