"""Field geometry, coordinate conventions and the per-cycle world snapshot.

Absolute coordinates put the origin at the pitch centre with +x toward the
right goal. Distances are metres, velocities metres/cycle, time is integer
cycles. Every tactical routine consumes a *team-frame* world, i.e. one in which
the acting side attacks toward +x (see :func:`to_team_frame`).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, Optional, Tuple

STAMINA_MAX = 8000.0
FIELD_MARGIN = 5.0

# body_dir is snapped to this grid so that the pi-rotation in to_team_frame is
# exact in floating point (both d and pi are then multiples of 2**-51).
_ANGLE_GRID = 2.0 ** 51


@dataclass(frozen=True, slots=True)
class Vec2:
    """Immutable 2D vector in metres (or metres/cycle for velocities)."""

    x: float
    y: float

    def __post_init__(self) -> None:
        # x - x is 0 for finite x and nan for inf/nan; cheaper than isfinite on this hot path
        if self.x - self.x != 0.0 or self.y - self.y != 0.0:
            raise ValueError(f"non-finite Vec2 component: ({self.x}, {self.y})")

    def __add__(self, other: Vec2) -> Vec2:
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: Vec2) -> Vec2:
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, k: float) -> Vec2:
        return Vec2(self.x * k, self.y * k)

    __rmul__ = __mul__

    def __neg__(self) -> Vec2:
        return Vec2(-self.x, -self.y)

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    def dot(self, other: Vec2) -> float:
        return self.x * other.x + self.y * other.y

    def norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y)

    def dist(self, other: Vec2) -> float:
        dx = self.x - other.x
        dy = self.y - other.y
        return math.sqrt(dx * dx + dy * dy)

    def unit(self) -> Vec2:
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalise a zero vector")
        return Vec2(self.x / n, self.y / n)

    def rotated(self, radians: float) -> Vec2:
        c = math.cos(radians)
        s = math.sin(radians)
        return Vec2(self.x * c - self.y * s, self.x * s + self.y * c)

    def angle(self) -> float:
        return math.atan2(self.y, self.x)

    @staticmethod
    def zero() -> Vec2:
        return Vec2(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class FieldSpec:
    """Pitch dimensions; goals sit on the x = +/- length/2 lines."""

    length: float = 105.0
    width: float = 68.0
    goal_width: float = 14.02

    def __post_init__(self) -> None:
        if not (self.length > 0 and self.width > 0 and 0 < self.goal_width < self.width):
            raise ValueError(f"invalid field dimensions: {self}")

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    @property
    def half_width(self) -> float:
        return self.width / 2.0

    @property
    def left_goal_center(self) -> Vec2:
        return Vec2(-self.length / 2.0, 0.0)

    @property
    def right_goal_center(self) -> Vec2:
        return Vec2(self.length / 2.0, 0.0)

    def contains(self, p: Vec2, margin: float = 0.0) -> bool:
        return abs(p.x) <= self.half_length + margin and abs(p.y) <= self.half_width + margin


DEFAULT_FIELD = FieldSpec()


class TeamSide(str, enum.Enum):
    """Left attacks toward +x, Right toward -x (absolute coordinates)."""

    LEFT = "left"
    RIGHT = "right"

    @property
    def opponent(self) -> TeamSide:
        return TeamSide.RIGHT if self is TeamSide.LEFT else TeamSide.LEFT


PlayerId = Tuple[TeamSide, int]


def _snap_angle(d: float) -> float:
    if not math.isfinite(d):
        raise ValueError(f"non-finite body_dir {d}")
    d = math.remainder(d, math.tau)
    if d <= -math.pi:
        d += math.tau
    return round(d * _ANGLE_GRID) / _ANGLE_GRID


@dataclass(frozen=True, slots=True)
class PlayerState:
    side: TeamSide
    uniform: int
    pos: Vec2
    vel: Vec2 = Vec2(0.0, 0.0)
    body_dir: float = 0.0
    stamina: float = STAMINA_MAX

    def __post_init__(self) -> None:
        if not 1 <= self.uniform <= 11:
            raise ValueError(f"uniform number out of range: {self.uniform}")
        if not 0.0 <= self.stamina <= STAMINA_MAX:
            raise ValueError(f"stamina out of range: {self.stamina}")
        if not DEFAULT_FIELD.contains(self.pos, FIELD_MARGIN):
            raise ValueError(f"player {self.side.value} {self.uniform} off the field at {self.pos}")
        object.__setattr__(self, "body_dir", _snap_angle(self.body_dir))

    @property
    def pid(self) -> PlayerId:
        return (self.side, self.uniform)


@dataclass(frozen=True, slots=True)
class BallState:
    pos: Vec2
    vel: Vec2 = Vec2(0.0, 0.0)


@dataclass(frozen=True, slots=True)
class WorldState:
    """Snapshot of one cycle. ``players`` holds 11 Left then 11 Right entries."""

    cycle: int
    ball: BallState
    players: Tuple[PlayerState, ...]
    score_left: int = 0
    score_right: int = 0
    last_kicker: Optional[PlayerId] = None

    def __post_init__(self) -> None:
        if self.cycle < 0:
            raise ValueError("cycle must be non-negative")
        if not isinstance(self.players, tuple):
            object.__setattr__(self, "players", tuple(self.players))
        for side in TeamSide:
            nums = [p.uniform for p in self.players if p.side is side]
            if len(nums) != 11 or len(set(nums)) != 11:
                raise ValueError(f"{side.value} side must field 11 distinct uniforms, got {sorted(nums)}")
        if len(self.players) != 22:
            raise ValueError("world must contain exactly 22 players")

    def team(self, side: TeamSide) -> Tuple[PlayerState, ...]:
        return tuple(p for p in self.players if p.side is side)

    def player(self, side: TeamSide, uniform: int) -> PlayerState:
        for p in self.players:
            if p.side is side and p.uniform == uniform:
                return p
        raise KeyError((side, uniform))


def _flip_angle(d: float) -> float:
    return d - math.pi if d > 0.0 else d + math.pi


def _mirror_player(p: PlayerState) -> PlayerState:
    return PlayerState(p.side, p.uniform, -p.pos, -p.vel, _flip_angle(p.body_dir), p.stamina)


def to_team_frame(world: WorldState, side: TeamSide) -> WorldState:
    """Return a copy of ``world`` in which ``side`` attacks toward +x.

    For Right this is a point reflection through the origin; it is its own
    inverse, so the same call also maps a team-frame world back.
    """
    if side is TeamSide.LEFT:
        return replace(world)
    return replace(
        world,
        ball=BallState(-world.ball.pos, -world.ball.vel),
        players=tuple(_mirror_player(p) for p in world.players),
    )


def to_team_point(p: Vec2, side: TeamSide) -> Vec2:
    """Map a single point (or velocity) between absolute and team frame."""
    return p if side is TeamSide.LEFT else -p


def dist_point_to_segment(p: Vec2, a: Vec2, b: Vec2) -> float:
    abx = b.x - a.x
    aby = b.y - a.y
    apx = p.x - a.x
    apy = p.y - a.y
    denom = abx * abx + aby * aby
    if denom == 0.0:
        return math.sqrt(apx * apx + apy * apy)
    t = (apx * abx + apy * aby) / denom
    if t <= 0.0:
        return math.sqrt(apx * apx + apy * apy)
    if t >= 1.0:
        bpx = p.x - b.x
        bpy = p.y - b.y
        return math.sqrt(bpx * bpx + bpy * bpy)
    dx = apx - t * abx
    dy = apy - t * aby
    return math.sqrt(dx * dx + dy * dy)


def closest_point_on_polyline(p: Vec2, points: Iterable[Vec2]) -> float:
    """Distance from ``p`` to the nearest point of a polyline."""
    pts = list(points)
    if len(pts) == 1:
        return p.dist(pts[0])
    return min(dist_point_to_segment(p, a, b) for a, b in zip(pts, pts[1:]))


def offside_line(world: WorldState, side: TeamSide, field: FieldSpec = DEFAULT_FIELD) -> float:
    """Offside x for ``side`` attacking toward +x in a team-frame ``world``.

    The deeper of the ball and the second-rearmost opponent, never inside the
    attacking side's own half.
    """
    xs = sorted((p.pos.x for p in world.players if p.side is not side), reverse=True)
    second = xs[1] if len(xs) > 1 else -math.inf
    line = max(world.ball.pos.x, second)
    return min(max(line, 0.0), field.half_length)
