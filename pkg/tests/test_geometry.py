import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from soccer2d.geometry import (
    DEFAULT_FIELD,
    BallState,
    FieldSpec,
    PlayerState,
    TeamSide,
    Vec2,
    WorldState,
    dist_point_to_segment,
    offside_line,
    to_team_frame,
)

from oracles import line_up, random_world

coord = st.floats(-60, 60, allow_nan=False)


def test_vec2_rejects_non_finite():
    with pytest.raises(ValueError):
        Vec2(math.nan, 0.0)
    with pytest.raises(ValueError):
        Vec2(0.0, math.inf)


def test_field_defaults_and_validation():
    f = DEFAULT_FIELD
    assert (f.length, f.width, f.goal_width) == (105.0, 68.0, 14.02)
    assert f.left_goal_center == Vec2(-52.5, 0.0)
    assert f.right_goal_center == Vec2(52.5, 0.0)
    with pytest.raises(ValueError):
        FieldSpec(goal_width=70.0)
    with pytest.raises(ValueError):
        FieldSpec(length=0.0)


def test_player_invariants():
    with pytest.raises(ValueError):
        PlayerState(TeamSide.LEFT, 12, Vec2(0, 0))
    with pytest.raises(ValueError):
        PlayerState(TeamSide.LEFT, 1, Vec2(0, 0), stamina=8000.5)
    with pytest.raises(ValueError):
        PlayerState(TeamSide.LEFT, 1, Vec2(58.0, 0))
    PlayerState(TeamSide.LEFT, 1, Vec2(57.4, 38.9))  # inside the 5 m margin


def test_world_needs_eleven_distinct_per_side():
    w = line_up({}, {}, Vec2(0, 0))
    players = list(w.players)
    players[1] = PlayerState(TeamSide.LEFT, 1, Vec2(0, 0))
    with pytest.raises(ValueError):
        WorldState(0, w.ball, tuple(players))
    with pytest.raises(ValueError):
        WorldState(0, w.ball, w.players[:21])


def test_team_frame_left_is_identity_copy():
    w = line_up({3: Vec2(3, 4)}, {}, Vec2(1, 2))
    t = to_team_frame(w, TeamSide.LEFT)
    assert t == w
    assert t.player(TeamSide.LEFT, 3).pos == Vec2(3, 4)


def test_team_frame_right_reflects_positions_and_velocities():
    w = line_up({}, {}, Vec2(0, 0))
    players = [
        PlayerState(TeamSide.LEFT, 3, Vec2(3, 4), Vec2(1, 0)) if p.pid == (TeamSide.LEFT, 3) else p for p in w.players
    ]
    w = WorldState(0, BallState(Vec2(1, 2), Vec2(0.5, -0.5)), tuple(players))
    t = to_team_frame(w, TeamSide.RIGHT)
    p = t.player(TeamSide.LEFT, 3)
    assert (p.pos, p.vel) == (Vec2(-3, -4), Vec2(-1, 0))
    assert t.ball == BallState(Vec2(-1, -2), Vec2(-0.5, 0.5))
    assert math.isclose(abs(p.body_dir), math.pi)


def test_team_frame_is_an_involution_on_random_worlds():
    rng = np.random.default_rng(11)
    for _ in range(200):
        w = random_world(rng)
        assert to_team_frame(to_team_frame(w, TeamSide.RIGHT), TeamSide.RIGHT) == w


@pytest.mark.parametrize(
    "p, a, b, expected",
    [
        (Vec2(0, 1), Vec2(-1, 0), Vec2(1, 0), 1.0),
        (Vec2(3, 0), Vec2(-1, 0), Vec2(1, 0), 2.0),
        (Vec2(0, 0), Vec2(2, 2), Vec2(2, 2), math.sqrt(8)),
    ],
)
def test_dist_point_to_segment_examples(p, a, b, expected):
    assert dist_point_to_segment(p, a, b) == pytest.approx(expected, abs=1e-12)


@settings(max_examples=300, deadline=None)
@given(coord, coord, coord, coord, coord, coord)
def test_dist_point_to_segment_symmetric_and_bounded(px, py, ax, ay, bx, by):
    p, a, b = Vec2(px, py), Vec2(ax, ay), Vec2(bx, by)
    d = dist_point_to_segment(p, a, b)
    assert d == pytest.approx(dist_point_to_segment(p, b, a), abs=1e-9)
    assert d <= min(p.dist(a), p.dist(b)) + 1e-9


def _offside_world(opp_x, ball_x):
    right = {u: Vec2(x, -20.0 + 3 * u) for u, x in enumerate(opp_x, start=1)}
    for u in range(len(opp_x) + 1, 12):
        right[u] = Vec2(-10.0, -20.0 + 3 * u)
    return line_up({}, right, Vec2(ball_x, 0.0))


def test_offside_line_examples():
    assert offside_line(_offside_world([50, 45, 40], 10.0), TeamSide.LEFT) == 45.0
    assert offside_line(_offside_world([50, 45], 48.0), TeamSide.LEFT) == 48.0
    assert offside_line(_offside_world([-10] * 11, -20.0), TeamSide.LEFT) == 0.0


@settings(max_examples=100, deadline=None)
@given(st.floats(-50, 50), st.floats(-50, 50))
def test_offside_line_monotone_in_ball_x(x1, x2):
    lo, hi = sorted((x1, x2))
    opp = [50, 45, 40, 20, 5]
    assert offside_line(_offside_world(opp, lo), TeamSide.LEFT) <= offside_line(_offside_world(opp, hi), TeamSide.LEFT)
