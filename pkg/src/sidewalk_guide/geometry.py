"""Planar geometry helpers shared by the world model and the range sensor.

Conventions: world coordinates are meters, +x points down the sidewalk
toward the goal, +y is the walker's left. Ray bearings are *clockwise*
from the heading, so a negative bearing is to the walker's left.
"""

from __future__ import annotations

import numpy as np

NO_HIT = np.inf


def unit_from_angle(angle: float) -> np.ndarray:
    return np.array([np.cos(angle), np.sin(angle)])


def ray_directions(heading: float, bearings: np.ndarray) -> np.ndarray:
    """Unit direction vectors, shape (n, 2), for clockwise bearings."""
    angles = heading - bearings
    return np.stack([np.cos(angles), np.sin(angles)], axis=1)


def ray_circle_hits(origin: np.ndarray, dirs: np.ndarray,
                    centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
    """First-hit parameters t >= 0 for each (ray, circle) pair.

    Returns shape (n_rays, n_circles) with NO_HIT where a ray misses.
    Rays starting inside a circle hit at the exit point (t > 0).
    """
    if len(centers) == 0:
        return np.full((len(dirs), 0), NO_HIT)
    rel = centers[None, :, :] - origin[None, None, :]          # (n, m, 2)
    proj = np.einsum("nmk,nk->nm", rel, dirs)                  # along-ray distance
    d2 = np.einsum("nmk,nmk->nm", rel, rel) - proj ** 2        # squared miss distance
    r2 = radii[None, :] ** 2
    disc = r2 - d2
    hit = disc >= 0.0
    root = np.sqrt(np.where(hit, disc, 0.0))
    t_near = proj - root
    t_far = proj + root
    t = np.where(t_near > 1e-9, t_near, t_far)
    t = np.where(hit & (t > 1e-9), t, NO_HIT)
    return t


def ray_segment_hits(origin: np.ndarray, dirs: np.ndarray,
                     seg_a: np.ndarray, seg_b: np.ndarray) -> np.ndarray:
    """First-hit parameters for each (ray, segment) pair, NO_HIT on miss."""
    if len(seg_a) == 0:
        return np.full((len(dirs), 0), NO_HIT)
    e = seg_b - seg_a                                          # (m, 2)
    rel = seg_a[None, :, :] - origin[None, None, :]            # (1, m, 2)
    # Solve origin + t*dir = a + u*e via 2x2 cross products.
    denom = dirs[:, None, 0] * e[None, :, 1] - dirs[:, None, 1] * e[None, :, 0]
    parallel = np.abs(denom) < 1e-12
    denom_safe = np.where(parallel, 1.0, denom)
    t = (rel[..., 0] * e[None, :, 1] - rel[..., 1] * e[None, :, 0]) / denom_safe
    u = (rel[..., 0] * dirs[:, None, 1] - rel[..., 1] * dirs[:, None, 0]) / denom_safe
    valid = ~parallel & (t > 1e-9) & (u >= 0.0) & (u <= 1.0)
    return np.where(valid, t, NO_HIT)


def point_in_convex_polygon(point: np.ndarray, vertices: np.ndarray) -> bool:
    """Containment test for a convex polygon given in CCW or CW order."""
    n = len(vertices)
    sign = 0.0
    for i in range(n):
        a = vertices[i]
        b = vertices[(i + 1) % n]
        cross = (b[0] - a[0]) * (point[1] - a[1]) - (b[1] - a[1]) * (point[0] - a[0])
        if abs(cross) < 1e-12:
            continue
        if sign == 0.0:
            sign = np.sign(cross)
        elif np.sign(cross) != sign:
            return False
    return True


def dist_point_to_segment(point: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    ab = b - a
    denom = float(ab @ ab)
    if denom < 1e-18:
        return float(np.hypot(*(point - a)))
    u = float(np.clip((point - a) @ ab / denom, 0.0, 1.0))
    closest = a + u * ab
    return float(np.hypot(*(point - closest)))


def dist_point_to_polygon(point: np.ndarray, vertices: np.ndarray) -> float:
    """Distance to a convex polygon; 0 when the point is inside."""
    if point_in_convex_polygon(point, vertices):
        return 0.0
    n = len(vertices)
    return min(
        dist_point_to_segment(point, vertices[i], vertices[(i + 1) % n])
        for i in range(n)
    )


def dist_point_to_polygon_boundary(point: np.ndarray, vertices: np.ndarray) -> float:
    n = len(vertices)
    return min(
        dist_point_to_segment(point, vertices[i], vertices[(i + 1) % n])
        for i in range(n)
    )
