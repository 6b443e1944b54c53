"""Team decision policies: the full skill stack and scripted attackers.

Both policies reason in their own team frame and translate commands back to
absolute coordinates before returning them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..defense import BlockMode, assign_blocker, ball_owner, formation_target
from ..dribbling import DribbleKind, choose_dribble
from ..geometry import BallState, PlayerState, TeamSide, Vec2, WorldState, dist_point_to_segment, to_team_frame
from ..kinematics import (
    DEFAULT_HORIZON,
    MotionParams,
    PlayerTable,
    ball_trajectory,
    batch_velocities,
    first_reachers,
    kick_velocity_for,
    min_feasible_cycles,
    predict_interception,
)
from ..passing import PassFactorWeights, best_direct_pass, evaluate_direct_passes, find_through_pass, offside_hold_target
from .config import AttackerLevel, MatchConfig
from .sim import IDLE, Command, Dash, Idle, Kick

ARRIVE_TOL = 0.1
CARRY_LEAD = 0.3
GOALIE = 1
JOG_POWER = 0.6
DEEP_ZONE = 36.0  # own-goal depth (m from centre) where short build-up is banned
OUTLET_GAIN = 10.0


def to_absolute(cmd: Command, side: TeamSide) -> Command:
    if side is TeamSide.LEFT or isinstance(cmd, Idle):
        return cmd
    if isinstance(cmd, Dash):
        return Dash(-cmd.target, cmd.power)
    return Kick(-cmd.velocity)


def move_to(player: PlayerState, target: Vec2, params: MotionParams, sprint: bool = False) -> Command:
    """Dash toward ``target``; jog unless sprinting, never more than the distance needs."""
    d = player.pos.dist(target)
    if d <= ARRIVE_TOL:
        return IDLE
    power = 1.0 if sprint else min(JOG_POWER, d / params.player_speed_max)
    return Dash(target, power)


def carry(
    player: PlayerState,
    ball: BallState,
    direction: Vec2,
    params: MotionParams,
    dashes: int = 2,
    contested: bool = False,
) -> Command:
    """Dribble one cycle along ``direction``.

    Runs while the ball stays at the player's feet or already rolls ahead on
    the line; otherwise pushes it so that it lands just ahead after
    ``dashes`` dash cycles. A ``contested`` ball (an opponent could kick it
    this cycle) is always kicked, since the nearer kicker wins.
    """
    s = params.player_speed_max
    npos = player.pos + direction * s
    speed = ball.vel.norm()
    if not contested and speed > 0.0:
        rel = ball.pos + ball.vel - npos
        if rel.norm() <= 0.9 * params.kickable_dist and rel.dot(direction) >= -0.3:
            return Dash(npos, 1.0)
        if ball.vel.dot(direction) >= 0.8 * speed and rel.dot(direction) > 0.0:
            return Dash(npos, 1.0)
    target = player.pos + direction * (dashes * s + CARRY_LEAD)
    if target.dist(ball.pos) < 1e-6:
        return Dash(npos, 1.0)
    return Kick(kick_velocity_for(ball.pos, target, dashes + 1, params))


def contested(world: WorldState, me: PlayerState, params: MotionParams) -> bool:
    return any(
        p.pos.dist(world.ball.pos) <= params.kickable_dist for p in world.players if p.side is not me.side
    )


def _max_speed_kick(start: Vec2, target: Vec2, params: MotionParams) -> Kick:
    d = target - start
    return Kick(d.unit() * params.ball_speed_max)


def _pass_kick(ball: Vec2, target: Vec2, params: MotionParams) -> Optional[Kick]:
    dist = target.dist(ball)
    if dist == 0.0:
        return None
    n = min_feasible_cycles(dist, params, 10)
    if n is None:
        return None
    return Kick(kick_velocity_for(ball, target, n, params))


def _outlet(tw: WorldState, me: PlayerState, config: MatchConfig) -> Command:
    """Deep in our half: a safe pass at least ``OUTLET_GAIN`` upfield, else clear to the flank."""
    mp = config.motion
    rows, _ = evaluate_direct_passes(tw, me, config.weights, mp, field=config.field)
    ahead = [
        r for r in rows
        if r.feasible and tw.player(me.side, r.receiver).pos.x > me.pos.x + OUTLET_GAIN
    ]
    if ahead:
        best = max(ahead, key=lambda r: (r.score, -r.receiver))
        mate = tw.player(me.side, best.receiver)
        return Kick(kick_velocity_for(tw.ball.pos, mate.pos, best.arrival_cycles, mp))
    f = config.field
    flank = Vec2(0.0, math.copysign(f.half_width - 4.0, me.pos.y if me.pos.y != 0 else 1.0))
    return _max_speed_kick(tw.ball.pos, flank, mp)


# --------------------------------------------------------------------------
# the full skill stack
# --------------------------------------------------------------------------


def _on_ball(tw: WorldState, me: PlayerState, memory: Dict[int, int], config: MatchConfig) -> Command:
    mp = config.motion
    f = config.field
    tp = find_through_pass(tw, me, config.through, mp, field=f)
    if tp is not None:
        memory.pop(me.uniform, None)
        return Kick(tp.velocity)
    if me.pos.x < -DEEP_ZONE:
        memory.pop(me.uniform, None)
        return _outlet(tw, me, config)
    dp = best_direct_pass(tw, me, config.weights, mp, field=f)
    if dp is not None:
        memory.pop(me.uniform, None)
        return Kick(dp.velocity)
    dec = choose_dribble(tw, me, config.dribble, mp, memory.get(me.uniform))
    if dec.kind is not DribbleKind.PASS_OUT:
        memory[me.uniform] = dec.path_id
        aim = dec.next_waypoint - me.pos
        if aim.norm() < 0.5:
            aim = f.right_goal_center - me.pos
        return carry(me, tw.ball, aim.unit(), mp, contested=contested(tw, me, mp))
    memory.pop(me.uniform, None)
    safe = best_direct_pass(tw, me, PassFactorWeights.lane_only(), mp, field=f)
    if safe is not None:
        return Kick(safe.velocity)
    corner = Vec2(f.half_length, math.copysign(f.half_width, me.pos.y if me.pos.y != 0 else 1.0))
    return _max_speed_kick(tw.ball.pos, corner, mp)


def skill_policy(
    world: WorldState,
    side: TeamSide,
    memory: Dict[int, int],
    config: MatchConfig,
) -> List[Command]:
    """Commands for the 11 players of ``side`` in uniform order.

    ``memory`` maps uniform to the dribble path the player is committed to;
    it is updated in place.
    """
    tw = to_team_frame(world, side)
    mp = config.motion
    ours = sorted(tw.team(side), key=lambda p: p.uniform)
    ball = tw.ball.pos
    cmds: Dict[int, Command] = {}

    owner = ball_owner(tw, side, mp)
    their_owner = ball_owner(tw, side.opponent, mp)
    if owner is not None:
        cmds[owner.uniform] = _on_ball(tw, owner, memory, config)
    for u in list(memory):
        if owner is None or u != owner.uniform:
            if their_owner is not None:
                memory.pop(u)

    attacking = owner is not None or (
        their_owner is None and tw.last_kicker is not None and tw.last_kicker[0] is side
    )
    if owner is None and their_owner is not None:
        if config.blocking_enabled:
            plan = assign_blocker(tw, side, mp, config.block, config.field)
            if plan is not None:
                me = tw.player(side, plan.blocker)
                if plan.mode is BlockMode.PRESS:
                    cmds[plan.blocker] = Dash(their_owner.pos, 1.0)
                else:
                    cmds[plan.blocker] = move_to(me, plan.block_point, mp, sprint=True)
        else:
            chaser = min(
                (p for p in ours if p.uniform != GOALIE),
                key=lambda p: (p.pos.dist(ball), p.uniform),
            )
            cmds[chaser.uniform] = Dash(ball, 1.0)
    elif owner is None:
        grab = predict_interception(tw, mp, only_side=side)
        if grab is not None:
            me = tw.player(*grab.reacher)
            cmds[me.uniform] = move_to(me, grab.point, mp, sprint=True)

    for p in ours:
        if p.uniform in cmds:
            continue
        home = config.formation.slot(p.uniform).home
        if attacking and home.x > 0:
            target = offside_hold_target(tw, p, config.hold_margin, config.field)
        else:
            target = formation_target(config.formation, ball, p.uniform, config.field)
        cmds[p.uniform] = move_to(p, target, mp)
    return [to_absolute(cmds[p.uniform], side) for p in ours]


# --------------------------------------------------------------------------
# scripted attackers
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AttackSlot:
    home: Vec2
    attract_x: float
    attract_y: float
    max_x: float


ATTACK_SHAPE: Dict[int, AttackSlot] = {
    1: AttackSlot(Vec2(-50.0, 0.0), 0.05, 0.1, -45.0),
    2: AttackSlot(Vec2(-30.0, -20.0), 0.5, 0.3, 15.0),
    3: AttackSlot(Vec2(-33.0, -7.0), 0.45, 0.2, 5.0),
    4: AttackSlot(Vec2(-33.0, 7.0), 0.45, 0.2, 5.0),
    5: AttackSlot(Vec2(-30.0, 20.0), 0.5, 0.3, 15.0),
    6: AttackSlot(Vec2(-6.0, -22.0), 0.6, 0.3, 40.0),
    7: AttackSlot(Vec2(-9.0, -7.0), 0.6, 0.4, 35.0),
    8: AttackSlot(Vec2(-9.0, 7.0), 0.6, 0.4, 35.0),
    9: AttackSlot(Vec2(-6.0, 22.0), 0.6, 0.3, 40.0),
    10: AttackSlot(Vec2(10.0, -6.0), 0.6, 0.4, 45.0),
    11: AttackSlot(Vec2(10.0, 6.0), 0.6, 0.4, 45.0),
}
WINGERS = (6, 9)
SHOT_RANGE = 20.0
POINT_BLANK = 9.0
SHOT_PRESSURE = 2.5
AIM_SAMPLES = {AttackerLevel.WEAK: 1, AttackerLevel.MEDIUM: 2, AttackerLevel.STRONG: 3}
PRESSURE_RANGE = 5.0
TAKE_ON_MIN = 2.3
TAKE_ON_MAX = 4.5
TAKE_ON_CLOSING = 0.3
TAKE_ON_ANGLE = math.radians(45.0)
TAKE_ON_PUSH = 3.0
SIDESTEPS = tuple(math.radians(a) for a in (0.0, 20.0, -20.0, 40.0, -40.0, 60.0, -60.0))
CORRIDOR = 6.0
CORRIDOR_CLEAR = 2.5
CHASE_RANGE = 4.0
KNOCK_ON_DASHES = 5
FEINT_PROB = 0.08
FEINT_ANGLE = math.radians(35.0)
THROUGH_BALL_PROB = 0.15
MARK_GAP = 1.5
MARK_DEPTH = 60.0
FRESH = 5000.0
BUILD_UP_X = -35.0


def attack_homes() -> Dict[int, Vec2]:
    return {u: s.home for u, s in ATTACK_SHAPE.items()}


def _attack_target(u: int, ball: Vec2, field) -> Vec2:
    s = ATTACK_SHAPE[u]
    x = min(max(s.home.x + s.attract_x * ball.x, -field.half_length + 1.0), s.max_x)
    y = min(max(s.home.y + s.attract_y * ball.y, -field.half_width + 1.0), field.half_width - 1.0)
    return Vec2(x, y)


def _closing_defender(tw: WorldState, me: PlayerState, heading: Vec2) -> Optional[PlayerState]:
    """Nearest opponent in front, still a step away, that is running at the carrier."""
    best = None
    for p in tw.players:
        if p.side is me.side:
            continue
        rel = p.pos - me.pos
        d = rel.norm()
        if not TAKE_ON_MIN <= d <= TAKE_ON_MAX or rel.dot(heading) < 0.0:
            continue
        closing = -(p.vel.dot(rel)) / d
        if closing >= TAKE_ON_CLOSING and (best is None or d < best[0]):
            best = (d, p)
    return best[1] if best else None


def _shot_open(tw: WorldState, me: PlayerState, velocity: Vec2, params: MotionParams, field) -> bool:
    """True when no defender reaches the shot before it crosses the goal line."""
    traj = ball_trajectory(BallState(tw.ball.pos, velocity), params, DEFAULT_HORIZON)
    cross = next((c for c, q in enumerate(traj) if q.x > field.half_length), None)
    if cross is None:
        return False
    table = PlayerTable.build(tw, me.side, [p.pid for p in tw.team(me.side)])
    cycles, _ = first_reachers(tw.ball.pos, batch_velocities([velocity]), table, params, cross - 1)
    return cycles[0] < 0


def _shoot(
    tw: WorldState, me: PlayerState, level: AttackerLevel, rng: np.random.Generator, config: MatchConfig
) -> Optional[Kick]:
    mp = config.motion
    f = config.field
    kicks = [
        _max_speed_kick(tw.ball.pos, Vec2(f.half_length, float(rng.uniform(-0.43, 0.43)) * f.goal_width), mp)
        for _ in range(AIM_SAMPLES[level])
    ]
    for k in kicks:
        if _shot_open(tw, me, k.velocity, mp, f):
            return k
    near = min(p.pos.dist(me.pos) for p in tw.team(me.side.opponent))
    if near <= SHOT_PRESSURE or me.pos.dist(f.right_goal_center) <= POINT_BLANK:
        return kicks[0]
    return None


def _heading(tw: WorldState, me: PlayerState, goal: Vec2, field) -> Vec2:
    """Goalward direction, bent by up to 60 degrees around defenders in the corridor ahead."""
    base = (goal - me.pos).unit()
    opps = [p.pos for p in tw.team(me.side.opponent)]
    best = (-1.0, base)
    for a in SIDESTEPS:
        d = base.rotated(a)
        end = me.pos + d * CORRIDOR
        if abs(end.y) > field.half_width - 1.0 or end.x > field.half_length - 1.0:
            continue
        clear = min(dist_point_to_segment(o, me.pos, end) for o in opps)
        if clear >= CORRIDOR_CLEAR:
            return d
        if clear > best[0]:
            best = (clear, d)
    return best[1]


def _on_ball_attacker(
    tw: WorldState,
    me: PlayerState,
    level: AttackerLevel,
    rng: np.random.Generator,
    feint: Dict[int, Tuple[int, float]],
    config: MatchConfig,
) -> Command:
    mp = config.motion
    f = config.field
    ball = tw.ball
    goal = f.right_goal_center
    if me.pos.dist(goal) <= SHOT_RANGE:
        shot = _shoot(tw, me, level, rng, config)
        if shot is not None:
            return shot
    opponents = list(tw.team(me.side.opponent))
    mates = [p for p in tw.team(me.side) if p.uniform != me.uniform]
    if me.pos.x < BUILD_UP_X:
        # deep in our own half: hit it long to the most advanced teammate
        front = max(mates, key=lambda m: (m.pos.x, -m.uniform))
        return _max_speed_kick(ball.pos, front.pos, mp)
    pressed = min(p.pos.dist(me.pos) for p in opponents) <= PRESSURE_RANGE
    if level is not AttackerLevel.WEAK and pressed:
        ahead = [m for m in mates if m.pos.x > me.pos.x + 2.0]
        if ahead:
            mate = max(ahead, key=lambda m: (m.pos.x, -m.uniform))
            kick = _pass_kick(ball.pos, mate.pos, mp)
            if kick is not None:
                return kick
    if level is AttackerLevel.STRONG:
        wingers = [tw.player(me.side, u) for u in WINGERS if u != me.uniform]
        wingers = [w for w in wingers if w.pos.x > me.pos.x + 5.0 and w.pos.x < f.half_length - 10.0]
        if wingers and rng.random() < THROUGH_BALL_PROB:
            w = max(wingers, key=lambda m: (m.pos.x, -m.uniform))
            lead = w.pos + (goal - w.pos).unit() * 6.0
            kick = _pass_kick(ball.pos, lead, mp)
            if kick is not None:
                return kick
    straight = (goal - me.pos).unit()
    rival = _closing_defender(tw, me, straight)
    if rival is not None:
        # knock it past a defender who is charging in
        side_sign = 1.0 if (rival.pos - me.pos).y <= 0.0 else -1.0
        target = me.pos + straight.rotated(side_sign * TAKE_ON_ANGLE) * TAKE_ON_PUSH
        if target.dist(ball.pos) > 1e-6:
            return Kick(kick_velocity_for(ball.pos, target, 2, mp))
    heading = _heading(tw, me, goal, f)
    dashes = 2
    if level is AttackerLevel.STRONG:
        left, angle = feint.get(me.uniform, (0, 0.0))
        if left <= 0 and rng.random() < FEINT_PROB:
            left, angle = 6, float(rng.choice([-1.0, 1.0])) * FEINT_ANGLE
        if left > 0:
            feint[me.uniform] = (left - 1, angle)
            heading = heading.rotated(angle)
        dashes = 3
    chased = any(
        (p.pos - me.pos).dot(heading) < 0.0 and p.pos.dist(me.pos) <= CHASE_RANGE for p in opponents
    )
    if chased:
        end = me.pos + heading * CORRIDOR
        if min(dist_point_to_segment(o.pos, me.pos, end) for o in opponents) >= CORRIDOR_CLEAR:
            dashes = KNOCK_ON_DASHES
    return carry(me, ball, heading, mp, dashes, contested(tw, me, mp))


def _mark_lanes(tw: WorldState, side: TeamSide, free: List[PlayerState], mp: MotionParams) -> Dict[int, Command]:
    """Greedy one-to-one marking: stand on the lane between each opponent and the ball."""
    ball = tw.ball.pos
    targets = [p for p in tw.team(side.opponent) if p.pos.dist(ball) > mp.kickable_dist and p.pos.x < MARK_DEPTH]
    pairs = sorted(
        ((m.pos.dist(t.pos), m.uniform, t.uniform, m, t) for m in free for t in targets),
        key=lambda e: e[:3],
    )
    taken_m, taken_t = set(), set()
    out: Dict[int, Command] = {}
    for _, mu, tu, m, t in pairs:
        if mu in taken_m or tu in taken_t:
            continue
        taken_m.add(mu)
        taken_t.add(tu)
        gap = min(MARK_GAP, 0.5 * t.pos.dist(ball))
        out[mu] = move_to(m, t.pos + (ball - t.pos).unit() * gap, mp, sprint=m.stamina > FRESH)
    return out


def attacker_policy(
    world: WorldState,
    side: TeamSide,
    level: AttackerLevel,
    rngs: Dict[int, np.random.Generator],
    config: MatchConfig,
    feint: Optional[Dict[int, Tuple[int, float]]] = None,
) -> List[Command]:
    """Scripted opponent: carry to goal and shoot, with level-dependent extras.

    Weak dribbles and shoots; Medium also passes forward under pressure;
    Strong adds seeded dribble feints and through balls to the wingers.
    ``rngs`` holds one generator per uniform so each player's random draws
    form their own stream.
    """
    feint = {} if feint is None else feint
    tw = to_team_frame(world, side)
    mp = config.motion
    f = config.field
    ours = sorted(tw.team(side), key=lambda p: p.uniform)
    ball = tw.ball.pos
    cmds: Dict[int, Command] = {}
    owner = ball_owner(tw, side, mp)
    their_owner = ball_owner(tw, side.opponent, mp)
    if owner is not None:
        cmds[owner.uniform] = _on_ball_attacker(tw, owner, level, rngs[owner.uniform], feint, config)
    elif their_owner is not None:
        chaser = min((p for p in ours if p.uniform != GOALIE), key=lambda p: (p.pos.dist(ball), p.uniform))
        cmds[chaser.uniform] = Dash(ball, 1.0)
    else:
        grab = predict_interception(tw, mp, only_side=side)
        if grab is not None:
            me = tw.player(*grab.reacher)
            cmds[me.uniform] = move_to(me, grab.point, mp, sprint=True)
    in_possession = owner is not None or (
        their_owner is None and tw.last_kicker is not None and tw.last_kicker[0] is side
    )
    if not in_possession:
        cmds.update(_mark_lanes(tw, side, [p for p in ours if p.uniform not in cmds and p.uniform != GOALIE], mp))
    for p in ours:
        if p.uniform in cmds:
            continue
        if level is AttackerLevel.STRONG and in_possession and p.uniform in WINGERS:
            target = Vec2(min(ball.x + 15.0, f.half_length - 8.0), ATTACK_SHAPE[p.uniform].home.y * 0.9)
            cmds[p.uniform] = move_to(p, target, mp, sprint=True)
            continue
        cmds[p.uniform] = move_to(p, _attack_target(p.uniform, ball, f), mp)
    return [to_absolute(cmds[p.uniform], side) for p in ours]
