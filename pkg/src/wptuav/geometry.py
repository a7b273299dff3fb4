"""Planar placement of infrastructure and UAV kinematics.

Sites live in a square of side `area_side`; the UAV flies at fixed altitude H
in exact steps of d_min = V_hor * T_block per coherence block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .config import ScenarioConfig


class Position(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Placement:
    """AP/BS/TUE sites plus the UAV's start and destination."""

    ap_positions: np.ndarray  # (L, 2) array of ground AP coordinates
    bs_position: Position
    tue_position: Position
    uav_start: Position
    uav_dest: Position


def generate_placement(
    config: ScenarioConfig,
    rng: np.random.Generator,
    uav_start: Position | None = None,
    uav_dest: Position | None = None,
) -> Placement:
    """Draw a placement: APs i.i.d. uniform, BS configurable, TUE uniform.

    The BS defaults to the square center unless the config overrides its
    coordinates. The TUE position is drawn whether or not terrestrial
    interference is enabled so that placements are identical across that
    flag. Deterministic given the generator state.
    """
    side = config.area_side
    aps = rng.uniform(0.0, side, size=(config.L, 2))
    tue = rng.uniform(0.0, side, size=2)
    start = uav_start if uav_start is not None else Position(0.0, 0.0)
    dest = uav_dest if uav_dest is not None else Position(0.85 * side, 0.85 * side)
    bs_x = config.bs_x if config.bs_x is not None else side / 2.0
    bs_y = config.bs_y if config.bs_y is not None else side / 2.0
    return Placement(
        ap_positions=aps,
        bs_position=Position(bs_x, bs_y),
        tue_position=Position(float(tue[0]), float(tue[1])),
        uav_start=start,
        uav_dest=dest,
    )


def step_uav(current: Position, heading_rad: float, config: ScenarioConfig) -> Position:
    """Advance one slot: exactly d_min along the heading."""
    d = config.d_min
    return Position(current.x + d * math.cos(heading_rad), current.y + d * math.sin(heading_rad))


def horizontal_distance(a: Position, b: Position) -> float:
    return math.hypot(b.x - a.x, b.y - a.y)


def bearing(a: Position, b: Position) -> float:
    """Heading from a to b in radians."""
    return math.atan2(b.y - a.y, b.x - a.x)


def slots_on_line(start: Position, dest: Position, config: ScenarioConfig) -> int:
    """Smallest n with n * d_min >= straight-line distance."""
    dist = horizontal_distance(start, dest)
    if dist == 0.0:
        return 0
    d = config.d_min
    n = math.floor(dist / d)
    return n if n * d >= dist else n + 1
