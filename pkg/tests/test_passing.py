import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soccer2d.geometry import BallState, PlayerState, TeamSide, Vec2, WorldState, offside_line
from soccer2d.kinematics import MotionParams
from soccer2d.passing import (
    PassFactors,
    PassFactorWeights,
    ThroughPassParams,
    best_direct_pass,
    compute_pass_factors,
    find_through_pass,
    generate_through_targets,
    offside_hold_target,
    score_direct_pass,
)

from oracles import line_up, oracle_interception, possession_world

MP = MotionParams()
GOAL = Vec2(52.5, 0.0)
L, R = TeamSide.LEFT, TeamSide.RIGHT


def _far_right(**given):
    """Right players parked deep in the right half unless placed explicitly."""
    out = {u: Vec2(45.0, -30.0 + 5.0 * u) for u in range(1, 12)}
    out.update({int(k[1:]): v for k, v in given.items()})
    return out


# --------------------------------------------------------------------------
# factors and scores
# --------------------------------------------------------------------------


def test_weights_validation():
    with pytest.raises(ValueError):
        PassFactorWeights(-1.0, 1.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        PassFactorWeights(0.0, 0.0, 0.0, 0.0)
    assert PassFactorWeights().scaled(2.0) == PassFactorWeights(4.0, 2.0, 2.0, 1.0)


def test_factors_clear_pitch_and_midpoint_progress():
    w = line_up({7: Vec2(-30, 0), 8: Vec2(-30, 10)}, _far_right(), Vec2(-30.5, 0))
    f = compute_pass_factors(w, w.player(L, 7), Vec2(-30.5, 10), w.player(L, 8), MP)
    assert f.e_lane == 1.0 and f.e_receiver_space == 1.0
    assert f.e_progress == pytest.approx(0.5)
    assert f.e_length == pytest.approx(1 - Vec2(-30.5, 10).dist(Vec2(-30, 0)) / 40)


def test_factors_opponent_on_the_lane():
    w = line_up({7: Vec2(0, 0), 8: Vec2(20, 0)}, _far_right(r4=Vec2(10, 0)), Vec2(0.5, 0))
    f = compute_pass_factors(w, w.player(L, 7), Vec2(20, 0), w.player(L, 8), MP)
    assert f.e_lane == 0.0


def test_factors_reject_opponent_receiver():
    w = line_up({7: Vec2(0, 0)}, _far_right(), Vec2(0.5, 0))
    with pytest.raises(ValueError):
        compute_pass_factors(w, w.player(L, 7), Vec2(5, 5), w.player(R, 2), MP)
    with pytest.raises(ValueError):
        PassFactors(1.2, 0.0, 0.0, 0.0)


def test_score_examples():
    assert score_direct_pass(PassFactors(0.5, 0.3, 0.2, 0.0), PassFactorWeights(1, 1, 1, 1)) == pytest.approx(1.0)
    assert score_direct_pass(PassFactors(0, 0, 0, 0), PassFactorWeights()) == 0.0


# --------------------------------------------------------------------------
# direct passes
# --------------------------------------------------------------------------


def test_lone_teammate_is_chosen():
    w = line_up({7: Vec2(0, 0), 8: Vec2(5, 0)}, _far_right(), Vec2(0.5, 0))
    best = best_direct_pass(w, w.player(L, 7), PassFactorWeights(), MP)
    assert best.receiver == 8 and best.target == Vec2(5, 0)
    assert best.initial_speed <= MP.ball_speed_max and best.arrival_cycles >= 1


def test_marked_teammates_yield_no_pass():
    left = {7: Vec2(0, 0), 8: Vec2(8, 0), 9: Vec2(0, 8)}
    right = _far_right(r2=Vec2(3, 0), r3=Vec2(0, 3))
    w = line_up(left, right, Vec2(0.5, 0))
    assert best_direct_pass(w, w.player(L, 7), PassFactorWeights(), MP) is None


def test_passer_without_ball_is_rejected():
    w = line_up({7: Vec2(0, 0)}, _far_right(), Vec2(5, 0))
    with pytest.raises(ValueError):
        best_direct_pass(w, w.player(L, 7), PassFactorWeights(), MP)


def exhaustive_direct_pass(world, passer, weights):
    """Reference: score every teammate by the factor formulas, keep oracle-safe ones."""
    k, vmax = MP.ball_decay, MP.ball_speed_max
    ball = world.ball.pos
    opps = [p.pos for p in world.players if p.side is not passer.side]

    def seg(o, a, b):
        ab = b - a
        t = 0.0 if ab.norm() == 0 else min(max((o - a).dot(ab) / ab.dot(ab), 0.0), 1.0)
        return o.dist(a + ab * t)

    best = None
    for mate in sorted(world.team(passer.side), key=lambda p: p.uniform):
        if mate.uniform == passer.uniform:
            continue
        d = mate.pos.dist(ball)
        ns = [n for n in range(1, 11) if d > 0 and d * (1 - k) / (1 - k**n) <= vmax]
        if not ns:
            continue
        n = ns[0]
        speed = d * (1 - k) / (1 - k**n)
        vel = (mate.pos - ball) * (speed / d)
        e = [
            min(min(seg(o, passer.pos, mate.pos) for o in opps) / 10, 1),
            min(max((mate.pos.x - ball.x + 20) / 40, 0), 1),
            min(min(o.dist(mate.pos) for o in opps) / 10, 1),
            min(max(1 - mate.pos.dist(passer.pos) / 40, 0), 1),
        ]
        score = sum(c * f for c, f in zip((weights.c_lane, weights.c_progress, weights.c_receiver_space, weights.c_length), e))
        after = WorldState(world.cycle, BallState(ball, vel), world.players, 0, 0, passer.pid)
        hit = oracle_interception(after, MP, exclude={passer.pid})
        if hit is None or hit[0] != mate.pid:
            continue
        if best is None or score > best[0] + 1e-12:
            best = (score, mate.uniform)
    return None if best is None else best[1]


def test_direct_pass_matches_exhaustive_enumeration():
    rng = np.random.default_rng(77)
    for _ in range(60):
        w, passer = possession_world(rng)
        got = best_direct_pass(w, passer, PassFactorWeights(), MP)
        assert (None if got is None else got.receiver) == exhaustive_direct_pass(w, passer, PassFactorWeights())


def test_three_teammates_two_opponents_scenario():
    left = {6: Vec2(0, 0), 7: Vec2(10, 5), 8: Vec2(-5, 12), 9: Vec2(12, -8)}
    right = _far_right(r2=Vec2(6, 2), r3=Vec2(8, -3))
    w = line_up(left, right, Vec2(0.6, 0))
    got = best_direct_pass(w, w.player(L, 6), PassFactorWeights(), MP)
    want = exhaustive_direct_pass(w, w.player(L, 6), PassFactorWeights())
    assert want is not None and got.receiver == want


def test_opponent_on_target_never_raises_score():
    rng = np.random.default_rng(3)
    checked = 0
    while checked < 40:
        w, passer = possession_world(rng)
        best = best_direct_pass(w, passer, PassFactorWeights(), MP)
        if best is None:
            continue
        mate = w.player(L, best.receiver)
        before = compute_pass_factors(w, passer, best.target, mate, MP)
        players = tuple(
            PlayerState(R, 11, best.target) if p.pid == (R, 11) else p for p in w.players
        )
        crowded = WorldState(0, w.ball, players)
        after = compute_pass_factors(crowded, passer, best.target, mate, MP)
        weights = PassFactorWeights()
        assert score_direct_pass(after, weights) <= score_direct_pass(before, weights)
        checked += 1


# --------------------------------------------------------------------------
# through passes
# --------------------------------------------------------------------------


def test_through_target_count_and_first_point():
    mate = PlayerState(L, 9, Vec2(0, 0))
    pts = generate_through_targets(mate, GOAL, ThroughPassParams())
    assert len(pts) == 320 == ThroughPassParams().count
    # t = 35, r index 1 (radius 6): 6 cos 35 = 4.9149, 6 sin 35 = 3.4415
    six = [p for p in pts[:10] if abs(p.norm() - 6.0) < 1e-9]
    assert sorted((round(p.x, 4), round(p.y, 4)) for p in six) == [(4.9149, -3.4415), (4.9149, 3.4415)]


def test_single_through_target():
    p = ThroughPassParams(t_start=4, t_floor=3, r_count=1, mirror=False)
    assert len(generate_through_targets(PlayerState(L, 9, Vec2(0, 0)), GOAL, p)) == 1
    with pytest.raises(ValueError):
        ThroughPassParams(t_start=3, t_floor=3)


@settings(max_examples=60, deadline=None)
@given(
    st.integers(4, 40),
    st.integers(0, 3),
    st.integers(1, 6),
    st.floats(0.5, 5.0),
    st.booleans(),
    st.floats(-40, 40),
    st.floats(-30, 30),
)
def test_through_target_layout(t_start, t_floor, r_count, step, mirror, x, y):
    p = ThroughPassParams(t_start, t_floor, r_count, step, mirror)
    mate = PlayerState(L, 9, Vec2(x, y))
    pts = generate_through_targets(mate, GOAL, p)
    per_t = r_count * (2 if mirror else 1)
    assert len(pts) == (t_start - t_floor) * per_t
    for b in range(t_start - t_floor):
        block = [q.dist(mate.pos) for q in pts[b * per_t : (b + 1) * per_t]]
        radii = block[:: 2 if mirror else 1]
        assert all(a > c for a, c in zip(radii, radii[1:]))
        for d in block:
            k = round(d / step)
            assert 1 <= k <= r_count and abs(d - k * step) < 1e-12 * max(1.0, d) * 100


def _through_scene(extra_right=None):
    # receiver on the right flank, 1 m behind a back line 10 m from goal
    left = {8: Vec2(33, 4), 9: Vec2(41.5, 12)}
    right = {
        1: Vec2(51, 0),
        2: Vec2(42.5, -4),
        3: Vec2(42.5, -12),
        4: Vec2(42.5, -20),
        5: Vec2(42.5, -28),
    }
    for u in range(6, 12):
        right[u] = Vec2(5.0, -25.0 + 5.0 * (u - 6))
    right.update(extra_right or {})
    return line_up(left, right, Vec2(33.5, 4))


def test_through_pass_to_receiver_behind_the_line():
    w = _through_scene()
    passer = w.player(L, 8)
    cand = find_through_pass(w, passer, ThroughPassParams(), MP)
    assert cand is not None and cand.receiver == 9
    assert cand.target.dist(GOAL) < w.player(L, 9).pos.dist(GOAL)
    assert cand.target.x <= offside_line(w, L) + 0.5
    after = WorldState(0, BallState(w.ball.pos, cand.velocity), w.players, 0, 0, passer.pid)
    assert oracle_interception(after, MP, exclude={passer.pid})[0] == (L, 9)


def test_no_through_pass_without_advanced_teammates():
    w = line_up({8: Vec2(-10, 0)}, _far_right(), Vec2(-9.5, 0))
    assert find_through_pass(w, w.player(L, 8), ThroughPassParams(), MP) is None


def test_shadowed_receiver_gets_no_through_pass():
    # an opponent on the receiver's own spot ties every race and wins it
    w = _through_scene({6: Vec2(41.5, 12)})
    assert find_through_pass(w, w.player(L, 8), ThroughPassParams(), MP) is None


# --------------------------------------------------------------------------
# offside hold
# --------------------------------------------------------------------------


def _line_world(line_x, ball_x=10.0):
    right = {1: Vec2(min(line_x + 2, 52.0), 0), 2: Vec2(line_x, -10)}
    for u in range(3, 12):
        right[u] = Vec2(min(line_x, 0.0) - 5.0, -30 + 5 * u)
    return line_up({9: Vec2(5, -8)}, right, Vec2(ball_x, 0))


def test_offside_hold_examples():
    w = _line_world(30.0)
    assert offside_hold_target(w, w.player(L, 9), 0.7) == Vec2(29.3, -8)
    w = _line_world(-10.0, ball_x=-20.0)
    assert offside_hold_target(w, w.player(L, 9), 0.7) == Vec2(-0.7, -8)
    w = line_up({9: Vec2(5, -8)}, _far_right(), Vec2(52.5, 0))
    assert offside_hold_target(w, w.player(L, 9), 0.7).x == pytest.approx(51.8)
    with pytest.raises(ValueError):
        offside_hold_target(w, w.player(L, 9), 0.0)
