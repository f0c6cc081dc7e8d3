"""Free-path assessment over a range scan.

The scan's points are grouped by single-linkage Euclidean clustering;
each cluster carries a threat level inversely proportional to its
distance (unit constant, 1 m, so threat is dimensionless). The path is
free when nothing obstructs the corridor around the direction of
interest.

Safety note: the corridor test deliberately considers *every* scan
point, including isolated returns that the noise filter drops from the
cluster list. A lone return in the corridor still means "not free".
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .sensing import RangeScan, ScanPoint
from .world import HEIGHT_GROUND

THREAT_UNIT = 1.0          # meters; threat = THREAT_UNIT / distance
DEFAULT_LINKAGE_EPS = 0.3  # m
DEFAULT_MIN_POINTS = 2     # smaller clusters are treated as noise
AHEAD_BAND = 0.26          # rad; |bearing| below this reads as "ahead"


@dataclass
class Cluster:
    id: str
    member_ranges: np.ndarray
    member_bearings: np.ndarray
    centroid_range: float      # min member range - conservative distance
    centroid_bearing: float    # mean member bearing
    height_class: str
    label_guess: Optional[str]

    @property
    def points(self) -> list[ScanPoint]:
        return [
            ScanPoint(range=float(r), bearing=float(b),
                      height_class=self.height_class, source_obstacle=None)
            for r, b in zip(self.member_ranges, self.member_bearings)
        ]

    def __len__(self) -> int:
        return len(self.member_ranges)


@dataclass
class FreePathAssessment:
    clusters: list[Cluster]            # ascending centroid_range
    threats: dict[str, float]
    free: bool
    direction_of_interest: float
    corridor_halfwidth: float

    def nearest(self) -> Optional[Cluster]:
        return self.clusters[0] if self.clusters else None


def cluster_scan(sweep: RangeScan, linkage_eps: float = DEFAULT_LINKAGE_EPS,
                 min_points: int = DEFAULT_MIN_POINTS) -> list[Cluster]:
    """Single-linkage Euclidean clusters of the scan in the sensor frame.

    Every point lands in exactly one connected component; components with
    fewer than `min_points` members are dropped as noise. Cluster ids are
    canonical: c0, c1, ... by ascending centroid bearing, so point order
    in the input cannot change the result.
    """
    if linkage_eps <= 0:
        raise ValueError("linkage_eps must be positive")
    n = len(sweep)
    if n == 0:
        return []
    labels = _single_linkage_labels(sweep.cartesian(), linkage_eps)

    raw: list[tuple[float, dict]] = []
    for lab in np.unique(labels):
        idx = np.nonzero(labels == lab)[0]
        if len(idx) < min_points:
            continue
        ranges = sweep.ranges[idx]
        bearings = sweep.bearings[idx]
        ground = int(np.count_nonzero(sweep.heights[idx] == HEIGHT_GROUND))
        sources = sweep.source_index[idx]
        label = _majority_kind(sources, sweep.obstacle_kinds)
        # Canonical member order, so shuffled input scans compare equal.
        order = np.lexsort((ranges, bearings))
        raw.append((
            float(np.mean(bearings)),
            dict(
                member_ranges=ranges[order],
                member_bearings=bearings[order],
                centroid_range=float(np.min(ranges)),
                height_class="ground_level" if ground * 2 > len(idx) else "above_ground",
                label_guess=label,
            ),
        ))
    raw.sort(key=lambda item: item[0])
    return [
        Cluster(id=f"c{i}", centroid_bearing=bearing, **fields)
        for i, (bearing, fields) in enumerate(raw)
    ]


def _single_linkage_labels(pts: np.ndarray, eps: float) -> np.ndarray:
    """Connected-component labels of the eps-neighborhood graph.

    Min-label propagation with pointer jumping: each round every point
    takes the smallest label in its neighborhood, then labels are
    compressed through themselves. The fixpoint assigns every component
    its minimum point index - exactly the transitive closure.
    """
    n = len(pts)
    dx = pts[:, None, 0] - pts[None, :, 0]
    dy = pts[:, None, 1] - pts[None, :, 1]
    within = dx * dx + dy * dy <= eps * eps
    labels = np.arange(n)
    while True:
        neigh = np.where(within, labels[None, :], n).min(axis=1)
        new = np.minimum(labels, neigh)
        new = new[new]
        new = new[new]
        if np.array_equal(new, labels):
            return labels
        labels = new


def _majority_kind(sources: np.ndarray, kinds: tuple[str, ...]) -> Optional[str]:
    valid = sources[sources >= 0]
    if len(valid) == 0:
        return None
    counts = np.bincount(valid, minlength=len(kinds))
    best = counts.max()
    candidates = sorted(kinds[i] for i in np.nonzero(counts == best)[0])
    return candidates[0]


def corridor_mask(ranges: np.ndarray, bearings: np.ndarray,
                  direction: float, corridor_halfwidth: float) -> np.ndarray:
    """Marks points inside the spatial corridor of the given half-width:
    at range r the corridor subtends a half-angle atan(halfwidth / r)."""
    band = np.arctan2(corridor_halfwidth, ranges)
    return np.abs(bearings - direction) <= band


def assess(sweep: RangeScan, direction: float = 0.0,
           corridor_halfwidth: float = 0.5,
           linkage_eps: float = DEFAULT_LINKAGE_EPS,
           min_points: int = DEFAULT_MIN_POINTS) -> FreePathAssessment:
    """Cluster the scan and decide whether the corridor is free.

    Threat per cluster is THREAT_UNIT / centroid_range, so nearer clusters
    always carry strictly higher threat.
    """
    if corridor_halfwidth <= 0:
        raise ValueError("corridor_halfwidth must be positive")
    clusters = cluster_scan(sweep, linkage_eps=linkage_eps, min_points=min_points)
    clusters.sort(key=lambda c: (c.centroid_range, c.id))
    threats = {c.id: THREAT_UNIT / c.centroid_range for c in clusters}
    if len(sweep):
        blocked = corridor_mask(sweep.ranges, sweep.bearings,
                                direction, corridor_halfwidth).any()
    else:
        blocked = False
    return FreePathAssessment(
        clusters=clusters,
        threats=threats,
        free=not blocked,
        direction_of_interest=direction,
        corridor_halfwidth=corridor_halfwidth,
    )


def nearest_cluster_summary(sweep: RangeScan,
                            linkage_eps: float = DEFAULT_LINKAGE_EPS,
                            min_points: int = DEFAULT_MIN_POINTS
                            ) -> Optional[tuple[float, float]]:
    """(distance, mean bearing) of the nearest non-noise cluster.

    Hot-path equivalent of assess(...).nearest(): same linkage, same noise
    filter, same conservative min-member-range distance, without building
    the full cluster list.
    """
    if len(sweep) == 0:
        return None
    labels = _single_linkage_labels(sweep.cartesian(), linkage_eps)
    sizes = np.bincount(labels)
    valid = sizes[labels] >= min_points
    if not valid.any():
        return None
    masked = np.where(valid, sweep.ranges, np.inf)
    i = int(np.argmin(masked))
    member = labels == labels[i]
    return float(sweep.ranges[i]), float(np.mean(sweep.bearings[member]))


def bearing_word(bearing: float) -> str:
    if bearing < -AHEAD_BAND:
        return "left"
    if bearing > AHEAD_BAND:
        return "right"
    return "ahead"


def top_k_report(assessment: FreePathAssessment, k: int = 5) -> list[tuple[str, float, str]]:
    """The k nearest clusters as (label, distance, side) triples."""
    if k < 1:
        raise ValueError("k must be >= 1")
    out = []
    for c in assessment.clusters[:k]:
        label = c.label_guess if c.label_guess is not None else "?"
        out.append((label, round(c.centroid_range, 1), bearing_word(c.centroid_bearing)))
    return out
