"""Ball-reactive formation and the blocking system.

A blocker forecasts the ball carrier running straight at our goal and heads
for the first point on that track it can reach no later than the carrier.
Only one defender blocks at a time; everybody else holds formation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional, Tuple

import numpy as np

from .configtext import ConfigError, check_version, compose, line_of, mapping, point, reject_unknown, scalar
from .geometry import DEFAULT_FIELD, FieldSpec, PlayerId, PlayerState, TeamSide, Vec2, WorldState
from .kinematics import DEFAULT_HORIZON, MotionParams, cycles_to_reach, has_ball, reach_cycles

PENALTY_AREA_X = -36.0


@dataclass(frozen=True)
class FormationSlot:
    home: Vec2
    attract_x: float
    attract_y: float
    max_x: float

    def __post_init__(self) -> None:
        if not (0.0 <= self.attract_x <= 1.0 and 0.0 <= self.attract_y <= 1.0):
            raise ValueError("attraction coefficients must lie in [0, 1]")


@dataclass(frozen=True)
class FormationSpec:
    slots: Tuple[Tuple[int, FormationSlot], ...]

    def __post_init__(self) -> None:
        nums = sorted(u for u, _ in self.slots)
        if nums != list(range(1, 12)):
            raise ValueError(f"formation needs slots for uniforms 1..11, got {nums}")

    def slot(self, uniform: int) -> FormationSlot:
        for u, s in self.slots:
            if u == uniform:
                return s
        raise KeyError(f"no formation slot for uniform {uniform}")

    def as_dict(self) -> Dict[int, FormationSlot]:
        return dict(self.slots)


def parse_formation_node(root) -> FormationSpec:
    top = mapping(root, "formation")
    reject_unknown(top, {"version", "slots"}, "formation")
    check_version(top, 1, "formation")
    if "slots" not in top:
        raise ConfigError("missing 'slots' list", line_of(root))
    seq = top["slots"]
    if not hasattr(seq, "value") or not isinstance(seq.value, list):
        raise ConfigError("'slots' must be a list", line_of(seq))
    slots = []
    seen = {}
    for item in seq.value:
        rec = mapping(item, "formation slot")
        reject_unknown(rec, {"uniform", "home", "attract_x", "attract_y", "max_x"}, "formation slot")
        for key in ("uniform", "home", "attract_x", "attract_y", "max_x"):
            if key not in rec:
                raise ConfigError(f"formation slot missing '{key}'", line_of(item))
        u = scalar(rec["uniform"], int, "uniform")
        if not 1 <= u <= 11:
            raise ConfigError(f"uniform {u} outside 1..11", line_of(rec["uniform"]))
        if u in seen:
            raise ConfigError(f"duplicate uniform {u} (first at line {seen[u]})", line_of(item))
        seen[u] = line_of(item)
        try:
            slot = FormationSlot(
                point(rec["home"], "home"),
                scalar(rec["attract_x"], float, "attract_x"),
                scalar(rec["attract_y"], float, "attract_y"),
                scalar(rec["max_x"], float, "max_x"),
            )
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc), line_of(item)) from None
        slots.append((u, slot))
    if len(slots) != 11:
        raise ConfigError(f"formation needs exactly 11 slots, found {len(slots)}", line_of(seq))
    return FormationSpec(tuple(sorted(slots, key=lambda s: s[0])))


def load_formation(text: str) -> FormationSpec:
    return parse_formation_node(compose(text))


def default_formation() -> FormationSpec:
    return load_formation(resources.files("soccer2d.data").joinpath("formation.yaml").read_text())


def formation_target(spec: FormationSpec, ball: Vec2, uniform: int, field: FieldSpec = DEFAULT_FIELD) -> Vec2:
    slot = spec.slot(uniform)
    x = slot.home.x + slot.attract_x * ball.x
    y = slot.home.y + slot.attract_y * ball.y
    x = min(max(x, -field.half_length + 1.0), slot.max_x)
    y = min(max(y, -field.half_width + 1.0), field.half_width - 1.0)
    return Vec2(x, y)


class BlockMode(str, enum.Enum):
    WAIT = "wait"
    PRESS = "press"


@dataclass(frozen=True)
class BlockParams:
    max_distance: float = 30.0
    dribble_speed_factor: float = 0.7
    horizon: int = DEFAULT_HORIZON


@dataclass(frozen=True)
class BlockPlan:
    blocker: int
    target_opponent: PlayerId
    block_point: Vec2
    blocker_cycles: int
    opponent_cycles: int
    mode: BlockMode

    def __post_init__(self) -> None:
        if self.blocker_cycles > self.opponent_cycles:
            raise ValueError("a block plan must not arrive after the opponent")


def opponent_track(
    world: WorldState,
    opponent: PlayerState,
    params: MotionParams,
    horizon: int = DEFAULT_HORIZON,
    speed_factor: float = 0.7,
    field: FieldSpec = DEFAULT_FIELD,
) -> List[Vec2]:
    """Carrier positions for cycles 1..horizon, dribbling straight at our goal.

    ``world`` is in the defending team's frame, so our goal is the left one.
    The track stops before it reaches the goal line.
    """
    if not has_ball(opponent, world, params):
        raise ValueError("opponent does not possess the ball")
    goal = field.left_goal_center
    to_goal = goal - opponent.pos
    dist = to_goal.norm()
    if dist == 0.0:
        return []
    step = speed_factor * params.player_speed_max
    ux = to_goal.x / dist
    uy = to_goal.y / dist
    track = []
    for c in range(1, horizon + 1):
        s = c * step
        if s >= dist:
            break
        track.append(Vec2(opponent.pos.x + ux * s, opponent.pos.y + uy * s))
    return track


def choose_block_mode(plan: BlockPlan, defender: PlayerState, opponent: PlayerState, params: MotionParams) -> BlockMode:
    if opponent.pos.dist(defender.pos) <= 2.0 * params.kickable_dist or opponent.pos.x < PENALTY_AREA_X:
        return BlockMode.PRESS
    return BlockMode.WAIT


@dataclass(frozen=True)
class BlockScan:
    """Why :func:`compute_block_point` did or did not produce a plan."""

    defender: int
    plan: Optional[BlockPlan]
    reason: str  # ok | no_reach | stamina | too_far


def scan_block(
    world: WorldState,
    defender: PlayerState,
    opponent: PlayerState,
    params: MotionParams,
    block: BlockParams = BlockParams(),
    field: FieldSpec = DEFAULT_FIELD,
    track: Optional[List[Vec2]] = None,
) -> BlockScan:
    if track is None:
        track = opponent_track(world, opponent, params, block.horizon, block.dribble_speed_factor, field)
    if not track:
        return BlockScan(defender.uniform, None, "no_reach")
    pts = np.array([(p.x, p.y) for p in track])
    d = np.sqrt((pts[:, 0] - defender.pos.x) ** 2 + (pts[:, 1] - defender.pos.y) ** 2)
    # cheap lower bound on reach cycles to skip the exact check where hopeless
    lower = (d - params.kickable_dist) / params.player_speed_max
    cycles = np.arange(1, len(track) + 1)
    for i in np.flatnonzero(lower <= cycles):
        need = reach_cycles(defender.pos.dist(track[i]), params)
        if need <= i + 1:
            break
    else:
        return BlockScan(defender.uniform, None, "no_reach")
    c = int(i) + 1
    point_ = track[i]
    if defender.stamina < params.stamina_block_threshold:
        return BlockScan(defender.uniform, None, "stamina")
    if point_.dist(defender.pos) > block.max_distance:
        return BlockScan(defender.uniform, None, "too_far")
    plan = BlockPlan(defender.uniform, opponent.pid, point_, need, c, BlockMode.WAIT)
    mode = choose_block_mode(plan, defender, opponent, params)
    return BlockScan(defender.uniform, BlockPlan(defender.uniform, opponent.pid, point_, need, c, mode), "ok")


def compute_block_point(
    world: WorldState,
    defender: PlayerState,
    opponent: PlayerState,
    params: MotionParams,
    horizon: int = DEFAULT_HORIZON,
    block: BlockParams = BlockParams(),
    field: FieldSpec = DEFAULT_FIELD,
) -> Optional[BlockPlan]:
    """Earliest point on the carrier's forecast track the defender reaches in time.

    Absent when no point qualifies within ``horizon``, the defender is too
    tired, or the point is further than ``block.max_distance``.
    """
    if horizon != block.horizon:
        block = BlockParams(block.max_distance, block.dribble_speed_factor, horizon)
    return scan_block(world, defender, opponent, params, block, field).plan


def ball_owner(world: WorldState, side: TeamSide, params: MotionParams) -> Optional[PlayerState]:
    """Nearest ``side`` player within kickable range of the ball, if any."""
    best = None
    best_d = params.kickable_dist
    for p in world.players:
        if p.side is side:
            d = p.pos.dist(world.ball.pos)
            if d <= params.kickable_dist and (best is None or (d, p.uniform) < (best_d, best.uniform)):
                best, best_d = p, d
    return best


def assign_blocker_scans(
    world: WorldState,
    side: TeamSide,
    params: MotionParams,
    block: BlockParams = BlockParams(),
    field: FieldSpec = DEFAULT_FIELD,
    exclude_goalie: bool = True,
) -> Tuple[List[BlockScan], Optional[BlockPlan]]:
    carrier = ball_owner(world, side.opponent, params)
    if carrier is None:
        return [], None
    track = opponent_track(world, carrier, params, block.horizon, block.dribble_speed_factor, field)
    scans = []
    best: Optional[BlockPlan] = None
    for d in sorted(world.team(side), key=lambda p: p.uniform):
        if exclude_goalie and d.uniform == 1:
            continue
        scan = scan_block(world, d, carrier, params, block, field, track)
        scans.append(scan)
        if scan.plan is not None and (best is None or scan.plan.blocker_cycles < best.blocker_cycles):
            best = scan.plan
    return scans, best


def assign_blocker(
    world: WorldState,
    side: TeamSide,
    params: MotionParams,
    block: BlockParams = BlockParams(),
    field: FieldSpec = DEFAULT_FIELD,
    exclude_goalie: bool = True,
) -> Optional[BlockPlan]:
    """The single defender of ``side`` that can block the carrier soonest."""
    return assign_blocker_scans(world, side, params, block, field, exclude_goalie)[1]
