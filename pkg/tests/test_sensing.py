import math

import numpy as np
import pytest

from sidewalk_guide.scenario import ObstacleSpec, ScenarioConfig, build_world
from sidewalk_guide.sensing import (
    DetectionTracker,
    RangeScan,
    SensorConfig,
    attribute_detections,
    iter_dump_records,
    scan,
)


def make_world(obstacles, length=30.0, width=10.0, walker_y=5.0, seed=0):
    cfg = ScenarioConfig(length_m=length, width_m=width, seed=seed,
                         walker_x=0.0, walker_y=walker_y,
                         obstacles=list(obstacles))
    return build_world(cfg)


def quiet_sensor(**kw) -> SensorConfig:
    defaults = dict(dropout_prob={}, noise_sigma=0.0)
    defaults.update(kw)
    return SensorConfig(**defaults)


def analytic_ray_disc(origin, angle, center, radius):
    """Independent first-hit oracle for one ray against one disc."""
    d = np.array([math.cos(angle), math.sin(angle)])
    rel = np.array(center) - np.array(origin)
    proj = rel @ d
    miss2 = rel @ rel - proj ** 2
    if miss2 > radius ** 2:
        return None
    root = math.sqrt(radius ** 2 - miss2)
    t = proj - root
    return t if t > 0 else None


def test_empty_world_scan_has_no_points():
    world = make_world([])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    assert len(sweep) == 0
    assert sweep.points == []


def test_hydrant_dead_ahead_range_matches_analytic_oracle():
    hydrant = ObstacleSpec(kind="fire_hydrant", x=3.0, y=5.0, radius=0.2)
    world = make_world([hydrant])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    assert len(sweep) > 0
    # central beam: bearing 0 exists (odd beam count)
    central = np.argmin(np.abs(sweep.bearings))
    assert abs(sweep.bearings[central]) < 1e-12
    expected = analytic_ray_disc((0.0, 5.0), 0.0, (3.0, 5.0), 0.2)
    assert sweep.ranges[central] == pytest.approx(expected, abs=1e-9)
    assert expected == pytest.approx(2.8)
    # every reported point agrees with the oracle on its own ray
    for r, b in zip(sweep.ranges, sweep.bearings):
        t = analytic_ray_disc((0.0, 5.0), -b, (3.0, 5.0), 0.2)
        assert t is not None
        assert r == pytest.approx(t, abs=1e-9)


def test_ground_obstacle_invisible_beyond_visibility_range():
    pothole = ObstacleSpec(kind="pothole", x=5.0, y=5.0, radius=0.35)
    world = make_world([pothole])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    assert len(sweep) == 0


def test_ground_obstacle_visible_within_visibility_range():
    pothole = ObstacleSpec(kind="pothole", x=1.5, y=5.0, radius=0.35)
    world = make_world([pothole])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    assert len(sweep) > 0
    assert all(p.height_class == "ground_level" for p in sweep.points)
    assert all(p.source_obstacle == "pothole-00" for p in sweep.points)


def test_above_ground_occludes_what_is_behind():
    front = ObstacleSpec(kind="dumpster", polygon=[[2.0, 4.0], [2.2, 4.0],
                                                   [2.2, 6.0], [2.0, 6.0]])
    back = ObstacleSpec(kind="tree", x=4.0, y=5.0, radius=0.4)
    world = make_world([front, back])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    sources = {p.source_obstacle for p in sweep.points}
    assert "dumpster-00" in sources
    assert "tree-00" not in sources


def test_ground_hazard_does_not_occlude():
    puddle = ObstacleSpec(kind="puddle", x=1.0, y=5.0, radius=0.4)
    tree = ObstacleSpec(kind="tree", x=4.0, y=5.0, radius=0.4)
    world = make_world([puddle, tree])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    sources = {p.source_obstacle for p in sweep.points}
    assert "puddle-00" in sources
    assert "tree-00" in sources


def test_full_dropout_silences_a_kind():
    tree = ObstacleSpec(kind="tree", x=3.0, y=5.0, radius=0.4)
    world = make_world([tree])
    sweep = scan(world, quiet_sensor(dropout_prob={"tree": 1.0}),
                 np.random.default_rng(0))
    assert len(sweep) == 0


def test_dropout_reduces_point_count_monotonically():
    tree = ObstacleSpec(kind="tree", x=3.0, y=5.0, radius=0.4)
    world = make_world([tree])
    counts = []
    for p in (0.0, 0.5, 0.9):
        total = 0
        for s in range(40):
            sweep = scan(world, quiet_sensor(dropout_prob={"tree": p}),
                         np.random.default_rng(s))
            total += len(sweep)
        counts.append(total)
    assert counts[0] > counts[1] > counts[2]


def test_monotone_visibility_under_shrinking_max_range():
    specs = [ObstacleSpec(kind="tree", x=3.0, y=5.0, radius=0.4),
             ObstacleSpec(kind="fire_hydrant", x=6.5, y=5.5, radius=0.2)]
    world = make_world(specs)
    long = scan(world, quiet_sensor(max_range=8.0), np.random.default_rng(7))
    short = scan(world, quiet_sensor(max_range=4.0), np.random.default_rng(7))
    assert len(short) <= len(long)
    long_bearings = set(np.round(long.bearings, 12))
    for b in short.bearings:
        assert round(float(b), 12) in long_bearings


def test_no_phantom_points_against_ray_march_oracle():
    """With noise and dropout off, every point sits on an obstacle boundary."""
    specs = [
        ObstacleSpec(kind="tree", x=4.0, y=4.0, radius=0.5),
        ObstacleSpec(kind="fire_hydrant", x=3.0, y=6.0, radius=0.2),
        ObstacleSpec(kind="dumpster", polygon=[[6.0, 5.5], [7.2, 5.5],
                                               [7.2, 6.5], [6.0, 6.5]]),
        ObstacleSpec(kind="pothole", x=1.5, y=4.8, radius=0.3),
    ]
    world = make_world(specs)

    def boundary_distance(pt):
        best = np.inf
        for obs in world.obstacles:
            fp = obs.footprint
            if hasattr(fp, "radius"):
                d = abs(np.hypot(*(pt - fp.center)) - fp.radius)
            else:
                from sidewalk_guide.geometry import dist_point_to_polygon_boundary
                d = dist_point_to_polygon_boundary(pt, fp.vertices)
            best = min(best, d)
        return best

    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    assert len(sweep) > 0
    origin = world.walker.position
    for r, b in zip(sweep.ranges, sweep.bearings):
        angle = world.walker.heading - b
        pt = origin + r * np.array([math.cos(angle), math.sin(angle)])
        assert boundary_distance(pt) < 1e-6


def test_noise_keeps_ranges_positive_and_capped():
    tree = ObstacleSpec(kind="tree", x=0.5, y=5.0, radius=0.45)
    world = make_world([tree])
    sweep = scan(world, quiet_sensor(noise_sigma=0.5), np.random.default_rng(3))
    assert np.all(sweep.ranges >= 0.001)
    assert np.all(sweep.ranges <= 8.0)


def test_bearing_sign_convention_left_is_negative():
    # +y in world coordinates is the walker's left.
    left_tree = ObstacleSpec(kind="tree", x=3.0, y=6.5, radius=0.4)
    world = make_world([left_tree])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    assert len(sweep) > 0
    assert np.all(sweep.bearings < 0)


def test_attribute_detections_scripted_pass():
    dumpster = ObstacleSpec(kind="dumpster", polygon=[[4.0, 5.8], [5.6, 5.8],
                                                      [5.6, 6.6], [4.0, 6.6]])
    far_tree = ObstacleSpec(kind="tree", x=28.0, y=8.0, radius=0.4)
    world = make_world([dumpster, far_tree])
    rng = np.random.default_rng(0)
    cfg = quiet_sensor()
    history = []
    for _ in range(6):
        history.append(scan(world, cfg, rng))
        world.step("forward")
    result = attribute_detections(history, world)
    assert result["dumpster"] is True
    assert result["tree"] is False  # never within max_range


def test_attribute_detections_requires_consecutive_scans():
    tree = ObstacleSpec(kind="tree", x=3.0, y=5.0, radius=0.4)
    world = make_world([tree])
    rng = np.random.default_rng(0)
    good = scan(world, quiet_sensor(), rng)
    empty = RangeScan(
        ranges=np.zeros(0), bearings=np.zeros(0), heights=np.zeros(0, int),
        source_index=np.zeros(0, int), obstacle_ids=world.obstacle_ids,
        obstacle_kinds=world.obstacle_kinds, fov=1.57, max_range=8.0,
        angular_resolution=0.0087, timestamp=0)
    # alternating hits never reach 2 consecutive qualifying scans
    assert attribute_detections([good, empty, good, empty], world)["tree"] is False
    assert attribute_detections([good, good], world)["tree"] is True


def test_attribute_detections_empty_history_errors():
    world = make_world([])
    with pytest.raises(ValueError):
        attribute_detections([], world)


def test_detection_tracker_streaming_matches_batch():
    specs = [ObstacleSpec(kind="tree", x=4.0, y=5.9, radius=0.4),
             ObstacleSpec(kind="fire_hydrant", x=7.0, y=4.2, radius=0.2)]
    world = make_world(specs)
    rng = np.random.default_rng(11)
    cfg = quiet_sensor(dropout_prob={"tree": 0.5})
    history = []
    tracker = DetectionTracker(world)
    for _ in range(10):
        sweep = scan(world, cfg, rng)
        history.append(sweep)
        tracker.update(sweep)
        world.step("forward")
    assert tracker.result() == attribute_detections(history, world)


def test_scan_dump_records_have_documented_fields():
    tree = ObstacleSpec(kind="tree", x=3.0, y=5.0, radius=0.4)
    world = make_world([tree])
    sweep = scan(world, quiet_sensor(), np.random.default_rng(0))
    recs = list(iter_dump_records(sweep))
    assert len(recs) == len(sweep)
    assert set(recs[0]) == {"tick", "bearing", "range", "height_class", "source"}
    assert recs[0]["source"] == "tree-00"


def test_sensor_config_validation():
    with pytest.raises(ValueError):
        SensorConfig(beams=2)
    with pytest.raises(ValueError):
        SensorConfig(dropout_prob={"tree": 1.5})
