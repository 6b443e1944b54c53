"""Cycle-stepped match physics and the simplified referee."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

from ..geometry import (
    STAMINA_MAX,
    BallState,
    FieldSpec,
    PlayerId,
    PlayerState,
    TeamSide,
    Vec2,
    WorldState,
    offside_line,
    to_team_frame,
    to_team_point,
)
from ..kinematics import step_ball
from .config import MatchConfig

TRAP_SPEED = 0.5
RESTART_CLEARANCE = 5.0
KICKOFF_CLEARANCE = 9.15
KICKOFF_TAKER = 10


class CommandError(ValueError):
    """A command set that the referee refuses to apply."""


@dataclass(frozen=True)
class Dash:
    target: Vec2
    power: float = 1.0


@dataclass(frozen=True)
class Kick:
    velocity: Vec2


@dataclass(frozen=True)
class Idle:
    pass


Command = Union[Dash, Kick, Idle]
IDLE = Idle()
_ZERO = Vec2(0.0, 0.0)


@dataclass(frozen=True)
class OffsideWatch:
    """Teammates of the last kicker who stood beyond the offside line at the kick."""

    kicker: PlayerId
    flagged: FrozenSet[int]


@dataclass
class MatchState:
    world: WorldState
    memory: Dict[int, int] = field(default_factory=dict)
    watch: Optional[OffsideWatch] = None
    event: str = ""
    kick: Optional[Tuple[str, int, float]] = None


def kickoff_world(
    config: MatchConfig,
    kicking_side: TeamSide,
    homes: Dict[TeamSide, Dict[int, Vec2]],
    cycle: int = 0,
    score: Tuple[int, int] = (0, 0),
    stamina: Optional[Dict[PlayerId, float]] = None,
) -> WorldState:
    """Both teams at their homes inside their own half, ball on the centre spot."""
    players: List[PlayerState] = []
    for side in (TeamSide.LEFT, TeamSide.RIGHT):
        for u in range(1, 12):
            h = homes[side][u]
            x = min(h.x, -1.0)
            y = h.y
            if side is kicking_side and u == KICKOFF_TAKER:
                x, y = -0.5, 0.0
            elif side is not kicking_side:
                d = math.hypot(x, y)
                if d < KICKOFF_CLEARANCE:
                    if d == 0.0:
                        x, y = -KICKOFF_CLEARANCE, 0.0
                    else:
                        x, y = x * KICKOFF_CLEARANCE / d, y * KICKOFF_CLEARANCE / d
            pos = to_team_point(Vec2(x, y), side)
            st = stamina[(side, u)] if stamina else STAMINA_MAX
            body = 0.0 if side is TeamSide.LEFT else math.pi
            players.append(PlayerState(side, u, pos, Vec2.zero(), body, st))
    return WorldState(cycle, BallState(Vec2.zero(), Vec2.zero()), tuple(players), score[0], score[1], None)


def _clamp_field(p: Vec2, f: FieldSpec, inset: float) -> Vec2:
    return Vec2(
        min(max(p.x, -f.half_length + inset), f.half_length - inset),
        min(max(p.y, -f.half_width + inset), f.half_width - inset),
    )


def restart_world(world: WorldState, side: TeamSide, spot: Vec2, config: MatchConfig) -> WorldState:
    """Dead-ball restart: ``side`` gets the ball at ``spot``.

    The restarting side's nearest player is placed on the ball; opponents
    inside ``RESTART_CLEARANCE`` are pushed back out to it.
    """
    f = config.field
    spot = _clamp_field(spot, f, 1.0)
    own = [p for p in world.players if p.side is side]
    taker = min(own, key=lambda p: (p.pos.dist(spot), p.uniform))
    back = to_team_point(Vec2(-0.3, 0.0), side)
    players = []
    for p in world.players:
        if p is taker:
            p = replace(p, pos=spot + back, vel=Vec2.zero())
        elif p.side is not side:
            d = p.pos.dist(spot)
            if d < RESTART_CLEARANCE:
                away = (p.pos - spot).unit() if d > 0 else to_team_point(Vec2(1.0, 0.0), side)
                p = replace(p, pos=_clamp_field(spot + away * RESTART_CLEARANCE, f, 0.0), vel=Vec2.zero())
        players.append(p)
    return replace(world, ball=BallState(spot, Vec2.zero()), players=tuple(players), last_kicker=None)


def _crossing_y(a: Vec2, b: Vec2, x: float) -> float:
    if b.x == a.x:
        return b.y
    return a.y + (x - a.x) / (b.x - a.x) * (b.y - a.y)


def step_match(
    state: MatchState,
    commands: Sequence[Command],
    config: MatchConfig,
    homes: Optional[Dict[TeamSide, Dict[int, Vec2]]] = None,
) -> MatchState:
    """Apply one command per player (in ``world.players`` order) and advance a cycle.

    Order: kicks, dashes, ball roll, trapping, goals / out of play, offside,
    cycle counter.
    """
    world = state.world
    mp = config.motion
    f = config.field
    if len(commands) != len(world.players):
        raise CommandError(f"expected {len(world.players)} commands, got {len(commands)}")
    ball = world.ball
    # 1. kicks
    best = None
    for i, (p, cmd) in enumerate(zip(world.players, commands)):
        if isinstance(cmd, Kick):
            d = p.pos.dist(ball.pos)
            if d > mp.kickable_dist:
                raise CommandError(f"{p.side.value} {p.uniform} kicks from {d:.3f} m")
            if cmd.velocity.norm() > mp.ball_speed_max + 1e-9:
                raise CommandError(f"{p.side.value} {p.uniform} kicks faster than ball_speed_max")
            key = (d, p.uniform, 0 if p.side is TeamSide.LEFT else 1)
            if best is None or key < best[0]:
                best = (key, i, p, cmd)
        elif not isinstance(cmd, (Dash, Idle)):
            raise CommandError(f"unknown command {cmd!r}")
    last_kicker = world.last_kicker
    watch = state.watch
    kick_tag = None
    event = ""
    if best is not None:
        _, _, kicker, cmd = best
        ball = BallState(ball.pos, cmd.velocity)
        last_kicker = kicker.pid
        kick_tag = (kicker.side.value, kicker.uniform, best[0][0])
        event = "kick"
        tf = to_team_frame(world, kicker.side)
        line = offside_line(tf, kicker.side, f)
        flagged = frozenset(
            p.uniform
            for p in tf.players
            if p.side is kicker.side and p.uniform != kicker.uniform and p.pos.x > line
        )
        watch = OffsideWatch(kicker.pid, flagged)
    # 2. dashes
    turn_cos = math.cos(math.radians(config.turn_threshold_deg))
    moved: List[PlayerState] = []
    for p, cmd in zip(world.players, commands):
        stamina = p.stamina
        if isinstance(cmd, Dash):
            power = min(max(cmd.power, 0.0), 1.0)
            if mp.dash_stamina_cost > 0:
                power = min(power, stamina / mp.dash_stamina_cost)
            dx = cmd.target.x - p.pos.x
            dy = cmd.target.y - p.pos.y
            dist = math.sqrt(dx * dx + dy * dy)
            if power > 0.0 and dist > 0.0:
                ux, uy = dx / dist, dy / dist
                facing = math.cos(p.body_dir) * ux + math.sin(p.body_dir) * uy
                body = math.atan2(uy, ux)
                if facing < turn_cos:
                    # reversing: this cycle is spent turning, which rests like idling
                    stamina = min(stamina + mp.stamina_recovery, STAMINA_MAX)
                    moved.append(PlayerState(p.side, p.uniform, p.pos, _ZERO, body, stamina))
                    continue
                # the unused share of the cycle recovers like idling
                stamina += (1.0 - power) * mp.stamina_recovery - power * mp.dash_stamina_cost
                stamina = min(stamina, STAMINA_MAX)
                step = min(power * mp.player_speed_max, dist)
                pos = _clamp_field(Vec2(p.pos.x + ux * step, p.pos.y + uy * step), f, 0.0)
                moved.append(PlayerState(p.side, p.uniform, pos, pos - p.pos, body, max(stamina, 0.0)))
                continue
        stamina = min(stamina + mp.stamina_recovery, STAMINA_MAX)
        moved.append(PlayerState(p.side, p.uniform, p.pos, _ZERO, p.body_dir, stamina))
    # 3. ball
    old_ball = ball.pos
    ball = step_ball(ball, mp)
    # 4. trap
    if ball.vel.norm() < TRAP_SPEED and any(p.pos.dist(ball.pos) <= mp.kickable_dist for p in moved):
        ball = BallState(ball.pos, Vec2.zero())
    world2 = replace(world, ball=ball, players=tuple(moved), last_kicker=last_kicker)
    score_l, score_r = world.score_left, world.score_right
    # 5. goals and out of play
    bx, by = ball.pos.x, ball.pos.y
    restart: Optional[Tuple[TeamSide, Vec2]] = None
    scored: Optional[TeamSide] = None
    if abs(bx) > f.half_length:
        line_x = math.copysign(f.half_length, bx)
        y_cross = _crossing_y(old_ball, ball.pos, line_x)
        if abs(y_cross) <= f.goal_width / 2.0:
            scored = TeamSide.LEFT if bx > 0 else TeamSide.RIGHT
        else:
            restart = (_non_toucher(last_kicker), Vec2(line_x, y_cross))
    elif abs(by) > f.half_width:
        line_y = math.copysign(f.half_width, by)
        if by != old_ball.y:
            x_cross = old_ball.x + (line_y - old_ball.y) / (by - old_ball.y) * (bx - old_ball.x)
        else:
            x_cross = bx
        restart = (_non_toucher(last_kicker), Vec2(x_cross, line_y))
    if scored is not None:
        if scored is TeamSide.LEFT:
            score_l += 1
        else:
            score_r += 1
        stamina = {p.pid: p.stamina for p in moved}
        new_world = kickoff_world(
            config, scored.opponent, homes or _homes_from(world), world.cycle + 1, (score_l, score_r), stamina
        )
        return MatchState(new_world, {}, None, f"goal_{scored.value}", kick_tag)
    if restart is not None:
        new_world = restart_world(world2, restart[0], restart[1], config)
        return MatchState(replace(new_world, cycle=world.cycle + 1), {}, None, f"out_{restart[0].value}", kick_tag)
    # 6. offside on reception
    if watch is not None:
        receivers = [
            (p.pos.dist(ball.pos), p.uniform, p)
            for p in moved
            if p.pid != watch.kicker and p.pos.dist(ball.pos) <= mp.kickable_dist
        ]
        if receivers:
            _, _, r = min(receivers, key=lambda t: (t[0], t[1]))
            if r.side is watch.kicker[0] and r.uniform in watch.flagged:
                new_world = restart_world(world2, r.side.opponent, r.pos, config)
                return MatchState(replace(new_world, cycle=world.cycle + 1), {}, None, "offside", kick_tag)
            watch = None
    # 7. clock
    return MatchState(replace(world2, cycle=world.cycle + 1), state.memory, watch, event, kick_tag)


def _non_toucher(last_kicker: Optional[PlayerId]) -> TeamSide:
    if last_kicker is None:
        return TeamSide.LEFT
    return last_kicker[0].opponent


def _homes_from(world: WorldState) -> Dict[TeamSide, Dict[int, Vec2]]:
    return {s: {p.uniform: p.pos if s is TeamSide.LEFT else -p.pos for p in world.team(s)} for s in TeamSide}
