"""Ball/player motion model, interception prediction and kick solving.

Players are point movers at ``player_speed_max`` with a flat one-cycle turn
penalty; the ball rolls freely with multiplicative decay. Kicks set the ball
velocity directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Collection, List, Optional, Sequence, Tuple

import numpy as np

from .geometry import BallState, PlayerId, PlayerState, TeamSide, Vec2, WorldState

# Guards ceil() against representation error, e.g. (11.585 - 1.085) / 1.05.
_CEIL_EPS = 1e-9
DEFAULT_HORIZON = 50


@dataclass(frozen=True)
class MotionParams:
    ball_decay: float = 0.94
    ball_speed_max: float = 3.0
    player_speed_max: float = 1.05
    kickable_dist: float = 1.085
    dash_stamina_cost: float = 60.0
    stamina_recovery: float = 45.0
    stamina_block_threshold: float = 2600.0

    def __post_init__(self) -> None:
        if not 0.0 < self.ball_decay < 1.0:
            raise ValueError("ball_decay must lie in (0, 1)")
        for name in ("ball_speed_max", "player_speed_max", "kickable_dist"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be positive")
        for name in ("dash_stamina_cost", "stamina_recovery", "stamina_block_threshold"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be non-negative")


@dataclass(frozen=True)
class InterceptOutcome:
    reacher: PlayerId
    cycle: int
    point: Vec2


def step_ball(ball: BallState, params: MotionParams) -> BallState:
    return BallState(
        Vec2(ball.pos.x + ball.vel.x, ball.pos.y + ball.vel.y),
        Vec2(ball.vel.x * params.ball_decay, ball.vel.y * params.ball_decay),
    )


def reach_cycles(distance: float, params: MotionParams) -> int:
    if distance <= params.kickable_dist:
        return 0
    return 1 + math.ceil((distance - params.kickable_dist) / params.player_speed_max - _CEIL_EPS)


def cycles_to_reach(player: PlayerState, target: Vec2, params: MotionParams) -> int:
    return reach_cycles(player.pos.dist(target), params)


def ball_trajectory(ball: BallState, params: MotionParams, horizon: int) -> List[Vec2]:
    """Free-rolling ball positions for cycles 0..horizon."""
    px, py = ball.pos.x, ball.pos.y
    vx, vy = ball.vel.x, ball.vel.y
    k = params.ball_decay
    out = [ball.pos]
    for _ in range(horizon):
        px += vx
        py += vy
        vx *= k
        vy *= k
        out.append(Vec2(px, py))
    return out


def kick_speed_for(distance: float, arrival_cycles: int, params: MotionParams) -> float:
    """Unclamped initial speed that rolls the ball ``distance`` in ``arrival_cycles``."""
    if arrival_cycles < 1:
        raise ValueError("arrival_cycles must be >= 1")
    k = params.ball_decay
    return distance * (1.0 - k) / (1.0 - k ** arrival_cycles)


def kick_velocity_for(start: Vec2, target: Vec2, arrival_cycles: int, params: MotionParams) -> Vec2:
    """Initial ball velocity that reaches ``target`` after ``arrival_cycles`` cycles.

    The magnitude is clamped to ``ball_speed_max``; callers that need the ball
    to actually arrive must compare against :func:`kick_speed_for` first.
    """
    if arrival_cycles < 1:
        raise ValueError("arrival_cycles must be >= 1")
    d = target - start
    dist = d.norm()
    if dist == 0.0:
        raise ValueError("kick start and target coincide")
    speed = min(kick_speed_for(dist, arrival_cycles, params), params.ball_speed_max)
    return Vec2(d.x / dist * speed, d.y / dist * speed)


def min_feasible_cycles(distance: float, params: MotionParams, max_cycles: int) -> Optional[int]:
    for n in range(1, max_cycles + 1):
        if kick_speed_for(distance, n, params) <= params.ball_speed_max:
            return n
    return None


# --------------------------------------------------------------------------
# vectorised first-reacher search
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PlayerTable:
    """Column view of the candidate reachers of one world."""

    ids: Tuple[PlayerId, ...]
    xy: np.ndarray  # (P, 2)
    tie_rank: np.ndarray  # (P,) lexicographic tie key after residual distance

    @classmethod
    def build(
        cls,
        world: WorldState,
        kicker_side: Optional[TeamSide],
        exclude: Collection[PlayerId] = (),
    ) -> PlayerTable:
        players = [p for p in world.players if p.pid not in exclude]
        xy = np.array([(p.pos.x, p.pos.y) for p in players], dtype=float).reshape(-1, 2)
        # opponents of the last kicker first, then uniform, then Left before Right
        rank = [
            (0 if kicker_side is None or p.side is not kicker_side else 1) * 100
            + p.uniform * 2
            + (0 if p.side is TeamSide.LEFT else 1)
            for p in players
        ]
        return cls(tuple(p.pid for p in players), xy, np.array(rank, dtype=np.int64))


def first_reachers(
    ball_pos: Vec2,
    velocities: np.ndarray,
    table: PlayerTable,
    params: MotionParams,
    horizon: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """First reacher for each of T kicks from ``ball_pos``.

    Returns ``(cycle, index)`` arrays of shape (T,); index points into
    ``table.ids`` and both are -1 when nobody reaches within ``horizon``.
    """
    vel = np.asarray(velocities, dtype=float).reshape(-1, 2)
    T = vel.shape[0]
    P = table.xy.shape[0]
    none = (np.full(T, -1, dtype=np.int64), np.full(T, -1, dtype=np.int64))
    if T == 0 or P == 0:
        return none
    k = params.ball_decay
    traj = np.empty((horizon + 1, T, 2))
    pos = np.empty((T, 2))
    pos[:, 0] = ball_pos.x
    pos[:, 1] = ball_pos.y
    v = vel.copy()
    traj[0] = pos
    for c in range(1, horizon + 1):
        pos = pos + v
        v = v * k
        traj[c] = pos
    # (C, T, P)
    dx = traj[:, :, None, 0] - table.xy[None, None, :, 0]
    dy = traj[:, :, None, 1] - table.xy[None, None, :, 1]
    dist = np.sqrt(dx * dx + dy * dy)
    over = (dist - params.kickable_dist) / params.player_speed_max - _CEIL_EPS
    reach = np.where(dist <= params.kickable_dist, 0.0, 1.0 + np.ceil(over))
    cyc = np.arange(horizon + 1, dtype=float)[:, None, None]
    ok = reach <= cyc
    any_c = ok.any(axis=2)  # (C, T)
    hit = any_c.any(axis=0)
    first_c = np.argmax(any_c, axis=0)  # (T,)
    cycles, idx = none
    for t in np.flatnonzero(hit):
        c = first_c[t]
        cand = np.flatnonzero(ok[c, t])
        d = dist[c, t, cand]
        best = cand[d == d.min()]
        if best.size > 1:
            best = best[np.argmin(table.tie_rank[best])]
        else:
            best = best[0]
        cycles[t] = c
        idx[t] = best
    return cycles, idx


def predict_interception(
    world: WorldState,
    params: MotionParams,
    horizon: int = DEFAULT_HORIZON,
    exclude: Collection[PlayerId] = (),
    only_side: Optional[TeamSide] = None,
) -> Optional[InterceptOutcome]:
    """Earliest player to reach the free-rolling ball.

    Ties at equal cycle go to the smaller distance from the point, then to
    the side that did not kick last, then to the lower uniform number.
    ``exclude`` removes players from consideration (the kicker of a
    hypothetical pass); ``only_side`` restricts the search to one team.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if only_side is not None:
        exclude = set(exclude) | {p.pid for p in world.players if p.side is not only_side}
    kicker_side = world.last_kicker[0] if world.last_kicker else None
    table = PlayerTable.build(world, kicker_side, exclude)
    cycles, idx = first_reachers(
        world.ball.pos, np.array([[world.ball.vel.x, world.ball.vel.y]]), table, params, horizon
    )
    if cycles[0] < 0:
        return None
    c = int(cycles[0])
    point = ball_trajectory(world.ball, params, c)[c]
    return InterceptOutcome(table.ids[idx[0]], c, point)


def post_kick_world(world: WorldState, kicker: PlayerState, velocity: Vec2) -> WorldState:
    """Hypothetical world immediately after ``kicker`` sets the ball velocity."""
    return replace(world, ball=BallState(world.ball.pos, velocity), last_kicker=kicker.pid)


def has_ball(player: PlayerState, world: WorldState, params: MotionParams) -> bool:
    return player.pos.dist(world.ball.pos) <= params.kickable_dist


def kickable_players(world: WorldState, params: MotionParams) -> List[PlayerState]:
    """Players within kickable range, nearest first."""
    near = [(p.pos.dist(world.ball.pos), p) for p in world.players]
    near = [(d, p) for d, p in near if d <= params.kickable_dist]
    near.sort(key=lambda dp: (dp[0], dp[1].uniform, dp[1].side is TeamSide.RIGHT))
    return [p for _, p in near]


def batch_velocities(vels: Sequence[Vec2]) -> np.ndarray:
    return np.array([(v.x, v.y) for v in vels], dtype=float).reshape(-1, 2)
