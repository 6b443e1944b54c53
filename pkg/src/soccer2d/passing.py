"""Direct-pass rating, through-pass search and offside-line holding.

A direct pass is rated as a weighted sum of four factors in [0, 1]; the best
safe target wins. A through pass walks polar offsets around each advanced
teammate (wide angles first, far radii first) and kicks to the first point
the teammate is predicted to reach before anyone else.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .geometry import (
    DEFAULT_FIELD,
    FieldSpec,
    PlayerState,
    Vec2,
    WorldState,
    dist_point_to_segment,
    offside_line,
)
from .kinematics import (
    DEFAULT_HORIZON,
    MotionParams,
    PlayerTable,
    batch_velocities,
    cycles_to_reach,
    first_reachers,
    has_ball,
    kick_speed_for,
    kick_velocity_for,
    min_feasible_cycles,
)

LANE_WINDOW = 10.0
SPACE_WINDOW = 10.0
LENGTH_WINDOW = 40.0
PROGRESS_OFFSET = 20.0
PROGRESS_WINDOW = 40.0
DIRECT_MAX_CYCLES = 10
OFFSIDE_TOLERANCE = 0.5


def _clamp01(v: float) -> float:
    return 0.0 if v < 0.0 else 1.0 if v > 1.0 else v


@dataclass(frozen=True)
class PassFactorWeights:
    c_lane: float = 2.0
    c_progress: float = 1.0
    c_receiver_space: float = 1.0
    c_length: float = 0.5

    def __post_init__(self) -> None:
        ws = (self.c_lane, self.c_progress, self.c_receiver_space, self.c_length)
        if any(w < 0 for w in ws) or not any(w > 0 for w in ws):
            raise ValueError("pass weights must be non-negative with at least one positive")

    def scaled(self, k: float) -> PassFactorWeights:
        return PassFactorWeights(
            self.c_lane * k, self.c_progress * k, self.c_receiver_space * k, self.c_length * k
        )

    @classmethod
    def lane_only(cls) -> PassFactorWeights:
        return cls(1.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True)
class PassFactors:
    e_lane: float
    e_progress: float
    e_receiver_space: float
    e_length: float

    def __post_init__(self) -> None:
        for v in (self.e_lane, self.e_progress, self.e_receiver_space, self.e_length):
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"pass factor outside [0, 1]: {v}")


class PassKind(str, enum.Enum):
    DIRECT = "direct"
    THROUGH = "through"


@dataclass(frozen=True)
class PassCandidate:
    kind: PassKind
    target: Vec2
    receiver: int
    initial_speed: float
    arrival_cycles: int
    score: float
    velocity: Vec2


@dataclass(frozen=True)
class ThroughPassParams:
    t_start: int = 35
    t_floor: int = 3
    r_count: int = 5
    radius_step: float = 3.0
    mirror: bool = True

    def __post_init__(self) -> None:
        if not self.t_start > self.t_floor >= 0:
            raise ValueError("need t_start > t_floor >= 0")
        if self.r_count < 1 or not self.radius_step > 0:
            raise ValueError("need r_count >= 1 and radius_step > 0")

    @property
    def count(self) -> int:
        return (self.t_start - self.t_floor) * self.r_count * (2 if self.mirror else 1)


def compute_pass_factors(
    world: WorldState,
    passer: PlayerState,
    target: Vec2,
    receiver: PlayerState,
    params: MotionParams,
) -> PassFactors:
    if receiver.side is not passer.side:
        raise ValueError("receiver must be a teammate of the passer")
    opponents = [p.pos for p in world.players if p.side is not passer.side]
    if opponents:
        lane = min(dist_point_to_segment(o, passer.pos, target) for o in opponents)
        space = min(o.dist(target) for o in opponents)
    else:
        lane = space = math.inf
    return PassFactors(
        e_lane=_clamp01(lane / LANE_WINDOW),
        e_progress=_clamp01((target.x - world.ball.pos.x + PROGRESS_OFFSET) / PROGRESS_WINDOW),
        e_receiver_space=_clamp01(space / SPACE_WINDOW),
        e_length=_clamp01(1.0 - target.dist(passer.pos) / LENGTH_WINDOW),
    )


def score_direct_pass(factors: PassFactors, weights: PassFactorWeights) -> float:
    return (
        weights.c_lane * factors.e_lane
        + weights.c_progress * factors.e_progress
        + weights.c_receiver_space * factors.e_receiver_space
        + weights.c_length * factors.e_length
    )


@dataclass(frozen=True)
class DirectPassEval:
    """Diagnostic row for one teammate considered by :func:`evaluate_direct_passes`."""

    receiver: int
    factors: Optional[PassFactors]
    score: Optional[float]
    arrival_cycles: Optional[int]
    first_reacher: Optional[Tuple[str, int]]
    feasible: bool


def evaluate_direct_passes(
    world: WorldState,
    passer: PlayerState,
    weights: PassFactorWeights,
    params: MotionParams,
    horizon: int = DEFAULT_HORIZON,
    field: FieldSpec = DEFAULT_FIELD,
) -> Tuple[List[DirectPassEval], Optional[PassCandidate]]:
    """Rate every teammate as a direct-pass target; return rows and the winner."""
    if not has_ball(passer, world, params):
        raise ValueError("passer does not have the ball")
    ball = world.ball.pos
    teammates = sorted(
        (p for p in world.players if p.side is passer.side and p.uniform != passer.uniform),
        key=lambda p: p.uniform,
    )
    rows: List[DirectPassEval] = []
    pending = []
    for mate in teammates:
        target = mate.pos
        dist = target.dist(ball)
        n = min_feasible_cycles(dist, params, DIRECT_MAX_CYCLES) if dist > 0 else None
        if n is None or not field.contains(target):
            rows.append(DirectPassEval(mate.uniform, None, None, n, None, False))
            continue
        factors = compute_pass_factors(world, passer, target, mate, params)
        score = score_direct_pass(factors, weights)
        vel = kick_velocity_for(ball, target, n, params)
        pending.append((len(rows), mate, n, vel, factors, score))
        rows.append(DirectPassEval(mate.uniform, factors, score, n, None, False))
    best: Optional[PassCandidate] = None
    if pending:
        table = PlayerTable.build(world, passer.side, exclude=(passer.pid,))
        # the receiver stands on the target, so someone reaches by cycle n at the latest
        reach_by = min(horizon, max(p[2] for p in pending))
        _, idx = first_reachers(ball, batch_velocities([p[3] for p in pending]), table, params, reach_by)
        for (row, mate, n, vel, factors, score), i in zip(pending, idx):
            reacher = table.ids[i] if i >= 0 else None
            ok = reacher == mate.pid
            rows[row] = DirectPassEval(
                mate.uniform,
                factors,
                score,
                n,
                (reacher[0].value, reacher[1]) if reacher else None,
                ok,
            )
            # teammates are visited by ascending uniform, so strict > keeps the lower one
            if ok and (best is None or score > best.score):
                best = PassCandidate(
                    PassKind.DIRECT, mate.pos, mate.uniform, vel.norm(), n, score, vel
                )
    return rows, best


def best_direct_pass(
    world: WorldState,
    passer: PlayerState,
    weights: PassFactorWeights,
    params: MotionParams,
    horizon: int = DEFAULT_HORIZON,
    field: FieldSpec = DEFAULT_FIELD,
) -> Optional[PassCandidate]:
    """Highest-rated direct pass whose receiver is predicted to reach the ball first."""
    return evaluate_direct_passes(world, passer, weights, params, horizon, field)[1]


def generate_through_targets(teammate: PlayerState, goal: Vec2, p: ThroughPassParams) -> List[Vec2]:
    """Polar offsets around ``teammate`` relative to its direction to ``goal``.

    Angles run from ``t_start`` down to ``t_floor + 1`` degrees; within each
    angle the radii go longest first, each +t followed by its -t mirror.
    """
    if teammate.pos == goal:
        raise ValueError("teammate stands on the goal point")
    u = (goal - teammate.pos).unit()
    out: List[Vec2] = []
    for t in range(p.t_start, p.t_floor, -1):
        rad = math.radians(t)
        plus = u.rotated(rad)
        minus = u.rotated(-rad)
        for r in range(p.r_count - 1, -1, -1):
            radius = (r + 1) * p.radius_step
            out.append(teammate.pos + plus * radius)
            if p.mirror:
                out.append(teammate.pos + minus * radius)
    return out


@dataclass(frozen=True)
class ThroughTargetEval:
    receiver: int
    target: Vec2
    verdict: str  # offside | out | infeasible | intercepted:<side>:<unum> | ok
    arrival_cycles: Optional[int] = None


def _through_search(
    world: WorldState,
    passer: PlayerState,
    p: ThroughPassParams,
    params: MotionParams,
    horizon: int,
    field: FieldSpec,
    explain: bool,
) -> Tuple[List[ThroughTargetEval], Optional[PassCandidate]]:
    if not has_ball(passer, world, params):
        raise ValueError("passer does not have the ball")
    ball = world.ball.pos
    goal = field.right_goal_center
    limit = offside_line(world, passer.side, field) + OFFSIDE_TOLERANCE
    runners = sorted(
        (
            m
            for m in world.players
            if m.side is passer.side and m.uniform != passer.uniform and m.pos.x > 0.0
        ),
        key=lambda m: (-m.pos.x, m.uniform),
    )
    log: List[ThroughTargetEval] = []
    table = PlayerTable.build(world, passer.side, exclude=(passer.pid,))
    for mate in runners:
        if mate.pos == goal:
            continue
        targets = generate_through_targets(mate, goal, p)
        kept = []
        for target in targets:
            if target.x > limit:
                if explain:
                    log.append(ThroughTargetEval(mate.uniform, target, "offside"))
                continue
            if not field.contains(target) or target == ball:
                if explain:
                    log.append(ThroughTargetEval(mate.uniform, target, "out"))
                continue
            n = max(1, cycles_to_reach(mate, target, params))
            if kick_speed_for(target.dist(ball), n, params) > params.ball_speed_max:
                if explain:
                    log.append(ThroughTargetEval(mate.uniform, target, "infeasible", n))
                continue
            kept.append((target, n, kick_velocity_for(ball, target, n, params)))
        if not kept:
            continue
        # the receiver itself reaches the target by cycle n, so the scan can stop there
        reach_by = min(horizon, max(k[1] for k in kept))
        _, idx = first_reachers(ball, batch_velocities([k[2] for k in kept]), table, params, reach_by)
        for (target, n, vel), i in zip(kept, idx):
            reacher = table.ids[i] if i >= 0 else None
            if reacher == mate.pid:
                if explain:
                    log.append(ThroughTargetEval(mate.uniform, target, "ok", n))
                factors = compute_pass_factors(world, passer, target, mate, params)
                score = score_direct_pass(factors, PassFactorWeights())
                return log, PassCandidate(
                    PassKind.THROUGH, target, mate.uniform, vel.norm(), n, score, vel
                )
            if explain:
                tag = f"intercepted:{reacher[0].value}:{reacher[1]}" if reacher else "unreached"
                log.append(ThroughTargetEval(mate.uniform, target, tag, n))
    return log, None


def find_through_pass(
    world: WorldState,
    passer: PlayerState,
    p: ThroughPassParams,
    params: MotionParams,
    horizon: int = DEFAULT_HORIZON,
    field: FieldSpec = DEFAULT_FIELD,
) -> Optional[PassCandidate]:
    """First through-pass target some advanced teammate reaches before anyone else."""
    return _through_search(world, passer, p, params, horizon, field, explain=False)[1]


def explain_through_pass(
    world: WorldState,
    passer: PlayerState,
    p: ThroughPassParams,
    params: MotionParams,
    horizon: int = DEFAULT_HORIZON,
    field: FieldSpec = DEFAULT_FIELD,
) -> Tuple[List[ThroughTargetEval], Optional[PassCandidate]]:
    return _through_search(world, passer, p, params, horizon, field, explain=True)


def offside_hold_target(
    world: WorldState,
    player: PlayerState,
    margin: float = 0.7,
    field: FieldSpec = DEFAULT_FIELD,
) -> Vec2:
    """Spot ``margin`` metres behind the offside line at the player's current y."""
    if not margin > 0:
        raise ValueError("margin must be positive")
    x = offside_line(world, player.side, field) - margin
    x = min(x, world.ball.pos.x + 30.0)
    x = min(max(x, -field.half_length), field.half_length)
    return Vec2(x, player.pos.y)
