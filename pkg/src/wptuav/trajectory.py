"""Greedy per-slot trajectory planners with a carried energy state.

All schemes share the slot model: slot 0 is a coherence block at the start
position funded by the configured initial pilot power; each later slot moves
exactly d_min and runs a block at the new position with the pilot power the
previous block's harvest funded.  Flight stops when the destination is within
d_min (the fractional remainder is never flown) or at the slot cap.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .config import ScenarioConfig
from .geometry import Placement, Position, bearing, horizontal_distance, step_uav


@dataclass
class TrajectoryLog:
    """Slot-by-slot record of one planned flight.

    positions, per_slot_se, p_he, and p_u all have length slots_used;
    index k describes the block flown at slot k (slot 0 is the start).
    """

    positions: list = field(default_factory=list)
    per_slot_se: list = field(default_factory=list)
    p_he: list = field(default_factory=list)
    p_u: list = field(default_factory=list)
    per_slot_se_alt: list = field(default_factory=list)
    direction_switches: int = 0
    direction_searches: int = 0
    slots_used: int = 0
    arrived: bool = False
    aps_reached: int = 0

    def average_se(self) -> float:
        return float(np.mean(self.per_slot_se)) if self.per_slot_se else 0.0

    def average_se_alt(self) -> float:
        return float(np.mean(self.per_slot_se_alt)) if self.per_slot_se_alt else 0.0


def _log_slot(log: TrajectoryLog, pos: Position, metrics, idx: int) -> float:
    """Append candidate idx of a SlotMetrics batch; returns the next pilot power."""
    log.positions.append(pos)
    log.per_slot_se.append(float(metrics.se[idx]))
    log.p_he.append(float(metrics.p_he[idx]))
    log.p_u.append(float(metrics.p_u[idx]))
    if metrics.se_lsfd is not None:
        log.per_slot_se_alt.append(float(metrics.se_lsfd[idx]))
    log.slots_used += 1
    return float(metrics.p_u[idx])


def _sector_base(current: Position, dest: Position) -> float:
    """Low edge (radians) of the closed 90-degree sector centered on the
    bearing to dest.

    Centering the sector on the target bearing keeps the scan symmetric
    about the goal direction at every position; an axis-aligned quadrant
    instead pins the flight to a coordinate parallel whenever the target
    sits almost due east/west/north/south, which stalls progress in long
    low-value corridors."""
    return bearing(current, dest) - 0.25 * math.pi


def _angle_deviation(theta: float, target_bearing: float) -> float:
    diff = theta - target_bearing
    return abs(math.atan2(math.sin(diff), math.cos(diff)))


class _VisitMemory:
    """Spatial hash of visited points; a point within radius of one is tabu.

    Without this memory the greedy scan can trade places between the two
    perpendicular sector edges forever when leaving a strong receiver costs
    SE; forbidding revisits forces net progress toward the target.
    """

    def __init__(self, radius: float):
        self.radius = radius
        self._cells: dict[tuple[int, int], list[tuple[float, float]]] = {}

    def _cell(self, pos) -> tuple[int, int]:
        return (int(math.floor(pos[0] / self.radius)),
                int(math.floor(pos[1] / self.radius)))

    def add(self, pos) -> None:
        self._cells.setdefault(self._cell(pos), []).append((pos[0], pos[1]))

    def seen(self, pos) -> bool:
        cx, cy = self._cell(pos)
        r2 = self.radius * self.radius
        for ix in (cx - 1, cx, cx + 1):
            for iy in (cy - 1, cy, cy + 1):
                for x, y in self._cells.get((ix, iy), ()):
                    if (x - pos[0]) ** 2 + (y - pos[1]) ** 2 <= r2:
                        return True
        return False


def plan_angle_search(start: Position, dest: Position, objective,
                      config: ScenarioConfig) -> TrajectoryLog:
    """Per slot, scan M headings across the 90-degree sector centered on the
    destination bearing, take the SE-best one.  Ties break toward the
    destination bearing, then the lowest candidate index.  Positions once
    flown are tabu within tabu_radius_factor * d_min; when every candidate is
    trodden ground the step falls back to the heading closest to the
    destination bearing."""
    log = TrajectoryLog()
    current = Position(*start)
    if horizontal_distance(current, dest) <= config.d_min:
        log.arrived = True
        return log
    m_cand = config.M
    delta = 0.5 * math.pi / (m_cand - 1)
    memory = _VisitMemory(config.tabu_radius_factor * config.d_min)
    memory.add(current)
    metrics = objective.evaluate([current], config.p0_pilot)
    pilot = _log_slot(log, current, metrics, 0)
    log.direction_searches += m_cand
    prev_heading = None
    while True:
        if horizontal_distance(current, dest) <= config.d_min:
            log.arrived = True
            break
        if log.slots_used >= config.N_slot_max:
            break
        base = _sector_base(current, dest)
        angles = [base + k * delta for k in range(m_cand)]
        cands = [step_uav(current, a, config) for a in angles]
        metrics = objective.evaluate(cands, pilot)
        to_dest = bearing(current, dest)
        fresh = [k for k in range(m_cand) if not memory.seen(cands[k])]
        if fresh:
            best = max(fresh,
                       key=lambda k: (metrics.se[k],
                                      -_angle_deviation(angles[k], to_dest), -k))
        else:
            best = min(range(m_cand),
                       key=lambda k: (_angle_deviation(angles[k], to_dest), k))
        if prev_heading is None or angles[best] != prev_heading:
            log.direction_switches += 1
        prev_heading = angles[best]
        current = cands[best]
        memory.add(current)
        pilot = _log_slot(log, current, metrics, best)
        log.direction_searches += m_cand
    return log


def _mark_reached(placement: Placement, visited: set, pos: Position,
                  d_min: float) -> list[int]:
    """Indices of APs newly within d_min of pos; marks them visited."""
    hits = []
    for idx in range(placement.ap_positions.shape[0]):
        if idx in visited:
            continue
        ap = Position(placement.ap_positions[idx, 0], placement.ap_positions[idx, 1])
        if horizontal_distance(pos, ap) <= d_min:
            visited.add(idx)
            hits.append(idx)
    return hits


def _in_dest_quarter(dest: Position, side: float, point) -> bool:
    """True when point lies in the quarter of the flight square holding dest.

    The square splits at its center lines; each boundary belongs to the
    half that contains dest.  Eligibility is therefore static for a whole
    flight, which keeps detours short: any gate tied to the moving UAV
    position re-admits far-off APs early in the flight, and the added path
    length costs more average SE than the harvest near those APs returns.
    """
    half = 0.5 * side
    return ((point[0] >= half) == (dest.x >= half)
            and (point[1] >= half) == (dest.y >= half))


def plan_line_path(start: Position, dest: Position, objective,
                   config: ScenarioConfig) -> TrajectoryLog:
    """Straight flight toward dest at one d_min step per slot."""
    log = TrajectoryLog()
    current = Position(*start)
    if horizontal_distance(current, dest) <= config.d_min:
        log.arrived = True
        return log
    metrics = objective.evaluate([current], config.p0_pilot)
    pilot = _log_slot(log, current, metrics, 0)
    heading = bearing(current, dest)
    log.direction_searches = 1
    log.direction_switches = 1
    while True:
        if horizontal_distance(current, dest) <= config.d_min:
            log.arrived = True
            break
        if log.slots_used >= config.N_slot_max:
            break
        current = step_uav(current, heading, config)
        metrics = objective.evaluate([current], pilot)
        pilot = _log_slot(log, current, metrics, 0)
    return log


def plan_ap_search(start: Position, dest: Position, placement: Placement,
                   objective, config: ScenarioConfig) -> TrajectoryLog:
    """Fly node to node: nearest unvisited AP inside the quarter of the
    flight square that holds the destination (the destination itself always
    counts as a node), re-selecting whenever a node is reached; APs reached
    in passing count and trigger re-selection too."""
    log = TrajectoryLog()
    current = Position(*start)
    visited: set[int] = set()
    log.aps_reached += len(_mark_reached(placement, visited, current, config.d_min))
    log.direction_switches += log.aps_reached
    if horizontal_distance(current, dest) <= config.d_min:
        log.arrived = True
        log.direction_switches = 0
        log.direction_searches = 0
        log.aps_reached = 0
        return log
    metrics = objective.evaluate([current], config.p0_pilot)
    pilot = _log_slot(log, current, metrics, 0)

    def select_target(pos: Position) -> Position:
        best = None
        best_key = None
        for idx in range(placement.ap_positions.shape[0]):
            if idx in visited:
                continue
            ap = placement.ap_positions[idx]
            if not _in_dest_quarter(dest, config.area_side, ap):
                continue
            d = math.hypot(ap[0] - pos.x, ap[1] - pos.y)
            key = (d, 0, idx)
            if best_key is None or key < best_key:
                best_key = key
                best = Position(ap[0], ap[1])
        d_dest = horizontal_distance(pos, dest)
        if best_key is None or (d_dest, 1, -1) < best_key:
            best = dest
        return best

    target = select_target(current)
    heading = bearing(current, target)
    log.direction_searches += 1
    log.direction_switches += 1
    while True:
        if log.slots_used >= config.N_slot_max:
            break
        current = step_uav(current, heading, config)
        metrics = objective.evaluate([current], pilot)
        pilot = _log_slot(log, current, metrics, 0)
        hits = _mark_reached(placement, visited, current, config.d_min)
        if hits:
            log.aps_reached += len(hits)
            log.direction_switches += len(hits)
            log.direction_searches += 1
        if horizontal_distance(current, dest) <= config.d_min:
            log.arrived = True
            break
        if hits:
            target = select_target(current)
            heading = bearing(current, target)
    return log


def plan_all_aps(start: Position, placement: Placement, objective,
                 config: ScenarioConfig) -> TrajectoryLog:
    """Tour every AP in greedy nearest-unvisited order, ignoring dest."""
    log = TrajectoryLog()
    current = Position(*start)
    visited: set[int] = set()
    n_aps = placement.ap_positions.shape[0]
    hits = _mark_reached(placement, visited, current, config.d_min)
    log.aps_reached += len(hits)
    log.direction_switches += len(hits)
    if len(visited) == n_aps:
        log.arrived = True
        log.direction_switches = 0
        log.aps_reached = 0
        return log
    metrics = objective.evaluate([current], config.p0_pilot)
    pilot = _log_slot(log, current, metrics, 0)

    def select_target(pos: Position) -> Position:
        best = None
        best_key = None
        for idx in range(n_aps):
            if idx in visited:
                continue
            ap = placement.ap_positions[idx]
            d = math.hypot(ap[0] - pos.x, ap[1] - pos.y)
            if best_key is None or (d, idx) < best_key:
                best_key = (d, idx)
                best = Position(ap[0], ap[1])
        return best

    target = select_target(current)
    heading = bearing(current, target)
    log.direction_searches += 1
    log.direction_switches += 1
    while True:
        if log.slots_used >= config.N_slot_max:
            break
        current = step_uav(current, heading, config)
        metrics = objective.evaluate([current], pilot)
        pilot = _log_slot(log, current, metrics, 0)
        hits = _mark_reached(placement, visited, current, config.d_min)
        if hits:
            log.aps_reached += len(hits)
            log.direction_switches += len(hits)
            log.direction_searches += 1
            if len(visited) == n_aps:
                log.arrived = True
                break
            target = select_target(current)
            heading = bearing(current, target)
    return log


def write_trajectory_csv(log: TrajectoryLog, path) -> None:
    """Serialize a log as CSV: slot, x, y, se, p_he, p_u."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["slot", "x", "y", "se", "p_he", "p_u"])
        for k in range(log.slots_used):
            writer.writerow([
                k,
                format(log.positions[k].x, ".17g"),
                format(log.positions[k].y, ".17g"),
                format(log.per_slot_se[k], ".17g"),
                format(log.p_he[k], ".17g"),
                format(log.p_u[k], ".17g"),
            ])


def write_positions_csv(placement: Placement, tue_enabled: bool,
                        path) -> None:
    """Serialize a placement as CSV: role, x, y.

    One "ap" row per access point (array order), then "bs", "tue" (only when
    terrestrial interference is enabled), "start", and "dest".
    """
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["role", "x", "y"])
        for xy in placement.ap_positions:
            writer.writerow(["ap", format(float(xy[0]), ".17g"),
                             format(float(xy[1]), ".17g")])
        rows = [("bs", placement.bs_position)]
        if tue_enabled:
            rows.append(("tue", placement.tue_position))
        rows.append(("start", placement.uav_start))
        rows.append(("dest", placement.uav_dest))
        for role, pos in rows:
            writer.writerow([role, format(pos.x, ".17g"),
                             format(pos.y, ".17g")])
