"""Sidewalk environment: geometry, obstacles, walker kinematics, rewards.

The sidewalk is a corridor along +x. One episode walks it from x=0 toward
x=length. Every step that does not collide pays +1; a collision pays -1 and
ends the episode. Crossing the far end ends the episode with the goal flag
set. Leaving the walkable band sideways counts as hitting the edge curb.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry

OBSTACLE_KINDS = (
    "pothole",
    "construction_cone",
    "fire_hydrant",
    "electric_scooter",
    "electric_pole",
    "dumpster",
    "tree",
    "fence",
    "curb",
    "bollard",
    "puddle",
    "person",
    "person_with_bike",
    "person_with_pet",
)

# Ground hazards are stepped *into*: they collide on center containment and
# are only visible to the sensor at short range.
GROUND_KINDS = frozenset({"pothole", "puddle"})

MOTION_POLICIES = ("stationary", "linear_bounce", "random_walk")

ACTIONS = ("stop", "left", "forward", "right", "backward")
ACTION_INDEX = {name: i for i, name in enumerate(ACTIONS)}

DEFAULT_DT = 0.5          # seconds per simulation step
LANE_STEP = 0.5           # lateral translation of the left/right actions, m
WALKER_RADIUS = 0.25      # body clearance against above-ground footprints, m
MAX_OBSTACLE_SPEED = 300.0  # cm/s
RANDOM_WALK_SIGMA = 0.06    # rad of heading drift per step
EDGE_CURB_ID = "edge-curb"  # synthetic obstacle hit when leaving the band

HEIGHT_GROUND = 0
HEIGHT_ABOVE = 1


class WorldError(Exception):
    pass


class TerminalStateError(WorldError):
    """Raised when stepping a world whose episode already ended."""


@dataclass
class Disc:
    center: np.ndarray
    radius: float

    def translate(self, delta: np.ndarray) -> None:
        # In place: the center may be a view into the world's arrays.
        self.center += delta

    def bounds(self) -> tuple[float, float, float, float]:
        cx, cy = self.center
        return cx - self.radius, cy - self.radius, cx + self.radius, cy + self.radius


@dataclass
class Polygon:
    vertices: np.ndarray  # (n, 2) convex

    def translate(self, delta: np.ndarray) -> None:
        self.vertices = self.vertices + delta

    def bounds(self) -> tuple[float, float, float, float]:
        xs, ys = self.vertices[:, 0], self.vertices[:, 1]
        return float(xs.min()), float(ys.min()), float(xs.max()), float(ys.max())


@dataclass
class Obstacle:
    id: str
    kind: str
    footprint: Disc | Polygon
    height_class: int = HEIGHT_ABOVE
    velocity: np.ndarray = field(default_factory=lambda: np.zeros(2))  # cm/s
    motion_policy: str = "stationary"

    def __post_init__(self) -> None:
        if self.kind not in OBSTACLE_KINDS:
            raise WorldError(f"unknown obstacle kind {self.kind!r}")
        if self.motion_policy not in MOTION_POLICIES:
            raise WorldError(f"unknown motion policy {self.motion_policy!r}")
        if self.kind in GROUND_KINDS:
            self.height_class = HEIGHT_GROUND
        speed = float(np.hypot(*self.velocity))
        if speed > MAX_OBSTACLE_SPEED + 1e-9:
            raise WorldError(f"obstacle {self.id} speed {speed:.1f} cm/s over limit")
        if self.motion_policy == "stationary" and speed > 0:
            raise WorldError(f"stationary obstacle {self.id} has nonzero velocity")

    @property
    def dynamic(self) -> bool:
        return self.motion_policy != "stationary"


@dataclass
class WalkerState:
    position: np.ndarray
    heading: float = 0.0
    speed: float = 120.0  # cm/s, comfortable walking band is 100..150
    alive: bool = True


@dataclass
class StepOutcome:
    reward: int
    collided: bool
    reached_goal: bool
    terminal: bool


class SidewalkWorld:
    """Mutable simulation state. One owner at a time; see module docs."""

    def __init__(self, length: float, width: float, obstacles: list[Obstacle],
                 walker: WalkerState, rng_seed: int, curb_margin: float = 0.0):
        if length <= 0 or width <= 0:
            raise WorldError("world dimensions must be positive")
        self.length = length
        self.width = width
        self.curb_margin = curb_margin
        self.obstacles = sorted(obstacles, key=lambda o: o.id)
        ids = [o.id for o in self.obstacles]
        if len(set(ids)) != len(ids):
            raise WorldError("duplicate obstacle ids")
        self.walker = walker
        self.tick = 0
        self.rng_seed = rng_seed
        self.rng = np.random.default_rng(rng_seed)
        self.terminal = False
        self.last_collision_id: Optional[str] = None
        self._check_bounds()
        self._build_primitives()

    # -- construction ------------------------------------------------------

    def _check_bounds(self) -> None:
        for obs in self.obstacles:
            x0, y0, x1, y1 = obs.footprint.bounds()
            if x1 < 0 or x0 > self.length or y1 < 0 or y0 > self.width:
                raise WorldError(f"obstacle {obs.id} outside world rectangle")

    def _build_primitives(self) -> None:
        """Flatten footprints into arrays for vectorized queries.

        Disc footprints become views into the shared center array, so
        moving a dynamic obstacle through the array moves the footprint.
        """
        disc_centers, disc_radii, disc_idx = [], [], []
        seg_a, seg_b, seg_idx = [], [], []
        for i, obs in enumerate(self.obstacles):
            fp = obs.footprint
            if isinstance(fp, Disc):
                disc_centers.append(np.asarray(fp.center, dtype=float))
                disc_radii.append(fp.radius)
                disc_idx.append(i)
            else:
                verts = fp.vertices
                n = len(verts)
                for k in range(n):
                    seg_a.append(verts[k])
                    seg_b.append(verts[(k + 1) % n])
                    seg_idx.append(i)
        self._disc_centers = np.array(disc_centers) if disc_centers else np.zeros((0, 2))
        self._disc_radii = np.array(disc_radii)
        self._disc_obs = np.array(disc_idx, dtype=int)
        self._seg_a = np.array(seg_a) if seg_a else np.zeros((0, 2))
        self._seg_b = np.array(seg_b) if seg_b else np.zeros((0, 2))
        self._seg_obs = np.array(seg_idx, dtype=int)
        heights = np.array([o.height_class for o in self.obstacles], dtype=int)
        self._disc_above = heights[self._disc_obs] == HEIGHT_ABOVE if len(disc_idx) else np.zeros(0, bool)
        self._seg_above = heights[self._seg_obs] == HEIGHT_ABOVE if len(seg_idx) else np.zeros(0, bool)
        self._seg_rows = {}
        for row, i in enumerate(self._seg_obs):
            self._seg_rows.setdefault(int(i), []).append(row)
        self.obstacle_ids = tuple(o.id for o in self.obstacles)
        self.obstacle_kinds = tuple(o.kind for o in self.obstacles)

        # Dynamic discs get the vectorized motion path; anything else
        # (dynamic polygons) falls back to per-object updates.
        dyn_disc_rows, dyn_vels, dyn_rw = [], [], []
        self._dyn_other: list[int] = []
        for row, i in enumerate(self._disc_obs):
            obs = self.obstacles[i]
            obs.footprint.center = self._disc_centers[row]  # view
            if obs.dynamic:
                dyn_disc_rows.append(row)
                dyn_vels.append(obs.velocity)
                dyn_rw.append(obs.motion_policy == "random_walk")
        for i, obs in enumerate(self.obstacles):
            if obs.dynamic and isinstance(obs.footprint, Polygon):
                self._dyn_other.append(i)
        self._dyn_rows = np.array(dyn_disc_rows, dtype=int)
        self._dyn_vel = np.array(dyn_vels) if dyn_vels else np.zeros((0, 2))
        self._dyn_rw = np.array(dyn_rw, dtype=bool)
        for j, row in enumerate(self._dyn_rows):
            self.obstacles[self._disc_obs[row]].velocity = self._dyn_vel[j]  # view
        self._poly_bboxes = {i: self.obstacles[i].footprint.bounds()
                             for i in self._seg_rows}

    # -- queries used by the sensor ---------------------------------------

    def disc_primitives(self):
        return self._disc_centers, self._disc_radii, self._disc_obs, self._disc_above

    def segment_primitives(self):
        return self._seg_a, self._seg_b, self._seg_obs, self._seg_above

    # -- collision ---------------------------------------------------------

    def collision_check(self) -> Optional[str]:
        """Id of the first intersecting obstacle in id order, or None.

        Above-ground footprints collide against the walker's body radius;
        ground hazards only when the walker's center is inside them.
        """
        pos = self.walker.position
        px, py = float(pos[0]), float(pos[1])
        hit_ids = []
        if len(self._disc_centers):
            dx = self._disc_centers[:, 0] - px
            dy = self._disc_centers[:, 1] - py
            margin = self._disc_radii + self._disc_above * WALKER_RADIUS
            hits = dx * dx + dy * dy < margin * margin
            if hits.any():
                for row in np.nonzero(hits)[0]:
                    hit_ids.append(self.obstacle_ids[self._disc_obs[row]])
        if len(self._seg_a):
            candidates = set()
            # bbox prefilter: only polygons the walker could possibly touch
            near_polys = [
                i for i, (x0, y0, x1, y1) in self._poly_bboxes.items()
                if x0 - WALKER_RADIUS <= px <= x1 + WALKER_RADIUS
                and y0 - WALKER_RADIUS <= py <= y1 + WALKER_RADIUS
            ]
            for i in near_polys:
                obs = self.obstacles[i]
                inside = geometry.point_in_convex_polygon(pos, obs.footprint.vertices)
                if inside:
                    candidates.add(i)
                elif obs.height_class == HEIGHT_ABOVE:
                    if geometry.dist_point_to_polygon_boundary(
                            pos, obs.footprint.vertices) < WALKER_RADIUS:
                        candidates.add(i)
            hit_ids.extend(self.obstacle_ids[i] for i in candidates)
        return min(hit_ids) if hit_ids else None

    # -- dynamics ----------------------------------------------------------

    def _advance_obstacles(self, dt: float) -> None:
        if len(self._dyn_rows):
            vel = self._dyn_vel
            if self._dyn_rw.any():
                # Random-walk discs rotate their velocity by a small
                # seeded perturbation; speed magnitude is untouched.
                angles = np.where(self._dyn_rw, self.rng.normal(0.0, RANDOM_WALK_SIGMA, len(vel)), 0.0)
                c, s = np.cos(angles), np.sin(angles)
                vx = c * vel[:, 0] - s * vel[:, 1]
                vy = s * vel[:, 0] + c * vel[:, 1]
                vel[:, 0] = vx
                vel[:, 1] = vy
            delta = vel * (dt / 100.0)  # cm/s -> m
            centers = self._disc_centers[self._dyn_rows]
            radii = self._disc_radii[self._dyn_rows]
            moved = centers + delta
            # Reflect per axis; |v| is conserved exactly since only signs flip.
            flip_x = (moved[:, 0] - radii < 0.0) | (moved[:, 0] + radii > self.length)
            flip_y = (moved[:, 1] - radii < 0.0) | (moved[:, 1] + radii > self.width)
            vel[flip_x, 0] *= -1.0
            vel[flip_y, 1] *= -1.0
            delta[flip_x, 0] *= -1.0
            delta[flip_y, 1] *= -1.0
            self._disc_centers[self._dyn_rows] = centers + delta
        for i in self._dyn_other:
            obs = self.obstacles[i]
            v = obs.velocity
            if obs.motion_policy == "random_walk":
                angle = self.rng.normal(0.0, RANDOM_WALK_SIGMA)
                c, s = np.cos(angle), np.sin(angle)
                v = np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])
            delta = v * dt / 100.0
            fp = obs.footprint
            x0, y0, x1, y1 = fp.bounds()
            if x0 + delta[0] < 0.0 or x1 + delta[0] > self.length:
                v = v * np.array([-1.0, 1.0])
                delta[0] = -delta[0]
            if y0 + delta[1] < 0.0 or y1 + delta[1] > self.width:
                v = v * np.array([1.0, -1.0])
                delta[1] = -delta[1]
            obs.velocity = v
            fp.translate(delta)
            verts = fp.vertices
            n = len(verts)
            for k, row in enumerate(self._seg_rows[i]):
                self._seg_a[row] = verts[k]
                self._seg_b[row] = verts[(k + 1) % n]
            self._poly_bboxes[i] = fp.bounds()

    # -- stepping ----------------------------------------------------------

    def step(self, action: str, dt: float = DEFAULT_DT) -> StepOutcome:
        if self.terminal:
            raise TerminalStateError("step after terminal state")
        if not self.walker.alive:
            raise WorldError("walker is not alive")
        if dt <= 0:
            raise WorldError("dt must be positive")
        if action not in ACTION_INDEX:
            raise WorldError(f"unknown action {action!r}")

        w = self.walker
        stride = w.speed * dt / 100.0
        hx, hy = np.cos(w.heading), np.sin(w.heading)
        pos = w.position.copy()
        if action == "forward":
            pos += stride * np.array([hx, hy])
        elif action == "backward":
            pos -= stride * np.array([hx, hy])
        elif action == "left":
            pos += LANE_STEP * np.array([-hy, hx])
        elif action == "right":
            pos -= LANE_STEP * np.array([-hy, hx])

        lo = self.curb_margin
        hi = self.width - self.curb_margin
        curb_hit = pos[1] < lo or pos[1] > hi
        pos[0] = min(max(pos[0], 0.0), self.length)
        pos[1] = min(max(pos[1], lo), hi)
        w.position = pos

        self._advance_obstacles(dt)
        self.tick += 1

        hit = self.collision_check()
        if curb_hit and (hit is None or EDGE_CURB_ID < hit):
            hit = EDGE_CURB_ID
        collided = hit is not None
        self.last_collision_id = hit
        reached_goal = bool((not collided) and pos[0] >= self.length)
        terminal = collided or reached_goal
        if terminal:
            self.terminal = True
            if collided:
                w.alive = False
        return StepOutcome(
            reward=-1 if collided else 1,
            collided=collided,
            reached_goal=reached_goal,
            terminal=terminal,
        )

    def goal_distance(self) -> float:
        return max(0.0, self.length - float(self.walker.position[0]))
