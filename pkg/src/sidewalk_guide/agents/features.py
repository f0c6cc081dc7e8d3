"""State featurizations shared by the learners.

Tabular methods see a coarse 48-way discretization (4 distance buckets x
4 bearing sectors x 3 lateral bands); the DQN sees a 24-float vector of
min-pooled beam ranges plus pose and threat summaries, all in [0, 1].

Both featurizers depend on the scan only through the nearest non-noise
cluster, so the episode loop can feed them the cheap nearest-cluster
summary instead of a full assessment.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from ..freepath import FreePathAssessment, bearing_word
from ..sensing import RangeScan
from ..world import SidewalkWorld, WalkerState

N_FEATURES = 24
N_SECTORS = 21

DIST_NEAR = 1.5
DIST_MID = 4.0
DIST_FAR = 8.0

DiscreteState = tuple[str, str, str]
NearestSummary = Optional[tuple[float, float]]  # (range m, bearing rad)


def _nearest_of(assessment: FreePathAssessment) -> NearestSummary:
    nearest = assessment.nearest()
    if nearest is None:
        return None
    return nearest.centroid_range, nearest.centroid_bearing


def discrete_state(assessment: FreePathAssessment, walker: WalkerState,
                   world: SidewalkWorld) -> DiscreteState:
    return discrete_state_from(_nearest_of(assessment), walker, world)


def discrete_state_from(nearest: NearestSummary, walker: WalkerState,
                        world: SidewalkWorld) -> DiscreteState:
    if nearest is None or nearest[0] > DIST_FAR:
        dist, sector = "none", "none"
    else:
        d, bearing = nearest
        dist = "near" if d < DIST_NEAR else ("mid" if d < DIST_MID else "far")
        sector = bearing_word(bearing)
    return dist, sector, lateral_bucket(walker, world)


def lateral_bucket(walker: WalkerState, world: SidewalkWorld) -> str:
    y = float(walker.position[1])
    if y > world.width * 2.0 / 3.0:
        return "left_edge"
    if y < world.width / 3.0:
        return "right_edge"
    return "center"


def feature_vector(sweep: RangeScan, walker: WalkerState, world: SidewalkWorld,
                   assessment: FreePathAssessment) -> np.ndarray:
    return feature_vector_from(sweep, walker, world, _nearest_of(assessment))


def feature_vector_from(sweep: RangeScan, walker: WalkerState,
                        world: SidewalkWorld,
                        nearest: NearestSummary) -> np.ndarray:
    feats = np.ones(N_FEATURES)
    if len(sweep):
        # Sector index from bearing; beams without a return stay at 1.0.
        frac = (sweep.bearings + sweep.fov / 2.0) / sweep.fov
        sector = np.minimum((frac * N_SECTORS).astype(int), N_SECTORS - 1)
        np.minimum.at(feats[:N_SECTORS], sector, sweep.ranges / sweep.max_range)
    feats[N_SECTORS] = min(max(walker.position[1] / world.width, 0.0), 1.0)
    feats[N_SECTORS + 1] = (walker.heading / np.pi + 1.0) / 2.0
    feats[N_SECTORS + 2] = 0.0 if nearest is None else min(1.0, 1.0 / nearest[0])
    return feats
