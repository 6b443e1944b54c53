"""Dribbling along predetermined paths.

Paths are polylines in team frame, loaded from YAML. The carrier sticks to
its current path while it is clear; when blocked it switches to the free path
nearest the main path (and farthest from opponents), or gives up and passes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from importlib import resources
from typing import List, Optional, Tuple

import yaml

from .configtext import ConfigError, check_version, compose, line_of, mapping, point, reject_unknown, scalar
from .geometry import (
    DEFAULT_FIELD,
    FieldSpec,
    PlayerState,
    Vec2,
    WorldState,
    closest_point_on_polyline,
    dist_point_to_segment,
)
from .kinematics import MotionParams, has_ball

OPPONENT_WINDOW = 10.0
DETOUR_WINDOW = 10.0
DETOUR_PENALTY = 0.2


@dataclass(frozen=True)
class DribblePath:
    id: int
    waypoints: Tuple[Vec2, ...]
    is_main: bool = False

    def __post_init__(self) -> None:
        if len(self.waypoints) < 2:
            raise ValueError(f"path {self.id}: needs at least two waypoints")
        for a, b in zip(self.waypoints, self.waypoints[1:]):
            if a == b:
                raise ValueError(f"path {self.id}: repeated waypoint {a}")
        goal = DEFAULT_FIELD.right_goal_center
        if not self.waypoints[-1].dist(goal) < self.waypoints[0].dist(goal):
            raise ValueError(f"path {self.id}: must end closer to the opponent goal than it starts")


@dataclass(frozen=True)
class DribbleConfig:
    paths: Tuple[DribblePath, ...]
    block_radius: float = 4.0
    lookahead: float = 10.0
    opponent_weight: float = 1.0
    progress_weight: float = 1.0

    def __post_init__(self) -> None:
        if not self.paths:
            raise ValueError("dribble config needs at least one path")
        mains = [p.id for p in self.paths if p.is_main]
        if len(mains) != 1:
            raise ValueError(f"exactly one main path required, found {len(mains)}")
        ids = [p.id for p in self.paths]
        if len(set(ids)) != len(ids):
            raise ValueError("path ids must be unique")

    @property
    def main(self) -> DribblePath:
        return next(p for p in self.paths if p.is_main)

    def path(self, path_id: int) -> DribblePath:
        for p in self.paths:
            if p.id == path_id:
                return p
        raise KeyError(path_id)


class DribbleKind(str, enum.Enum):
    ADVANCE = "advance"
    SWITCH_PATH = "switch_path"
    PASS_OUT = "pass_out"


@dataclass(frozen=True)
class DribbleDecision:
    kind: DribbleKind
    path_id: Optional[int] = None
    next_waypoint: Optional[Vec2] = None


def parse_paths_node(root: yaml.Node) -> DribbleConfig:
    top = mapping(root, "dribble config")
    reject_unknown(top, {"version", "block_radius", "lookahead", "opponent_weight", "progress_weight", "paths"}, "dribble config")
    check_version(top, 1, "dribble config")
    knobs = {}
    for key in ("block_radius", "lookahead", "opponent_weight", "progress_weight"):
        if key in top:
            knobs[key] = scalar(top[key], float, key)
    if "paths" not in top:
        raise ConfigError("missing 'paths' list", line_of(root))
    seq = top["paths"]
    if not isinstance(seq, yaml.SequenceNode):
        raise ConfigError("'paths' must be a list", line_of(seq))
    if not seq.value:
        raise ConfigError("'paths' is empty; at least one path is required", line_of(seq))
    paths: List[DribblePath] = []
    main_lines: List[int] = []
    seen = {}
    for item in seq.value:
        rec = mapping(item, "path record")
        reject_unknown(rec, {"id", "main", "waypoints"}, "path record")
        for key in ("id", "waypoints"):
            if key not in rec:
                raise ConfigError(f"path record missing '{key}'", line_of(item))
        pid = scalar(rec["id"], int, "id")
        if pid in seen:
            raise ConfigError(f"duplicate path id {pid} (first at line {seen[pid]})", line_of(item))
        seen[pid] = line_of(item)
        is_main = scalar(rec["main"], bool, "main") if "main" in rec else False
        wps = rec["waypoints"]
        if not isinstance(wps, yaml.SequenceNode):
            raise ConfigError("waypoints must be a list", line_of(wps))
        points = tuple(point(w, "waypoint") for w in wps.value)
        try:
            paths.append(DribblePath(pid, points, is_main))
        except ValueError as exc:
            raise ConfigError(str(exc), line_of(item)) from None
        if is_main:
            main_lines.append(line_of(item))
    if len(main_lines) != 1:
        where = main_lines[1] if len(main_lines) > 1 else line_of(seq)
        raise ConfigError(f"exactly one path must have main: true, found {len(main_lines)}", where)
    try:
        return DribbleConfig(tuple(paths), **knobs)
    except ValueError as exc:
        raise ConfigError(str(exc), line_of(root)) from None


def load_paths(source: str) -> DribbleConfig:
    """Parse dribble-path YAML text into a validated :class:`DribbleConfig`."""
    return parse_paths_node(compose(source))


def default_dribble_config() -> DribbleConfig:
    text = resources.files("soccer2d.data").joinpath("dribble_paths.yaml").read_text()
    return load_paths(text)


# --------------------------------------------------------------------------
# geometry on paths
# --------------------------------------------------------------------------


def next_waypoint(path: DribblePath, pos: Vec2) -> Vec2:
    for wp in path.waypoints:
        if wp.x - pos.x >= 1.0:
            return wp
    return path.waypoints[-1]


def lookahead_segment(path: DribblePath, pos: Vec2, lookahead: float) -> Tuple[Vec2, Vec2]:
    """Straight probe from ``pos`` toward the path's next waypoint.

    Its length is ``lookahead`` unless the remaining path (next waypoint plus
    the waypoints after it) is shorter.
    """
    nw = next_waypoint(path, pos)
    d = nw - pos
    dist = d.norm()
    if dist == 0.0:
        return pos, pos
    i = path.waypoints.index(nw)
    remaining = dist + sum(a.dist(b) for a, b in zip(path.waypoints[i:], path.waypoints[i + 1 :]))
    length = min(lookahead, remaining)
    return pos, pos + d * (length / dist)


def _opponents(world: WorldState, player: PlayerState) -> List[Vec2]:
    return [p.pos for p in world.players if p.side is not player.side]


def min_opponent_distance(world: WorldState, player: PlayerState, path: DribblePath, cfg: DribbleConfig) -> float:
    a, b = lookahead_segment(path, player.pos, cfg.lookahead)
    opps = _opponents(world, player)
    return min((dist_point_to_segment(o, a, b) for o in opps), default=math.inf)


def is_path_blocked(world: WorldState, player: PlayerState, path: DribblePath, cfg: DribbleConfig) -> bool:
    return min_opponent_distance(world, player, path, cfg) <= cfg.block_radius


@dataclass(frozen=True)
class PathRating:
    path_id: int
    progress: float
    opponent: float
    detour: float
    score: float
    blocked: bool


def rate_path_terms(
    world: WorldState,
    player: PlayerState,
    path: DribblePath,
    cfg: DribbleConfig,
    field: FieldSpec = DEFAULT_FIELD,
) -> PathRating:
    goal = field.right_goal_center
    nw = next_waypoint(path, player.pos)
    gain = (player.pos.dist(goal) - nw.dist(goal)) / cfg.lookahead
    progress = min(max(gain, 0.0), 1.0)
    opp_dist = min_opponent_distance(world, player, path, cfg)
    opponent = min(opp_dist / OPPONENT_WINDOW, 1.0)
    detour = min(closest_point_on_polyline(player.pos, path.waypoints) / DETOUR_WINDOW, 1.0)
    score = cfg.progress_weight * progress + cfg.opponent_weight * opponent - DETOUR_PENALTY * detour
    return PathRating(path.id, progress, opponent, detour, score, opp_dist <= cfg.block_radius)


def rate_path(
    world: WorldState,
    player: PlayerState,
    path: DribblePath,
    cfg: DribbleConfig,
    field: FieldSpec = DEFAULT_FIELD,
) -> float:
    return rate_path_terms(world, player, path, cfg, field).score


def choose_dribble(
    world: WorldState,
    player: PlayerState,
    cfg: DribbleConfig,
    params: MotionParams,
    current_path: Optional[int] = None,
) -> DribbleDecision:
    """Advance on the committed path, switch when it is blocked, else pass out.

    ``current_path`` is the path the carrier committed to earlier (main path
    when ``None``). On ``PASS_OUT`` the caller looks for the safest teammate
    with lane-only pass weights.
    """
    if not has_ball(player, world, params):
        raise ValueError("player does not have the ball")
    try:
        current = cfg.path(current_path) if current_path is not None else cfg.main
    except KeyError:
        current = cfg.main
    if not is_path_blocked(world, player, current, cfg):
        return DribbleDecision(DribbleKind.ADVANCE, current.id, next_waypoint(current, player.pos))
    main_wp = next_waypoint(cfg.main, player.pos)
    best: Optional[Tuple[Tuple[float, float, int], DribblePath, Vec2]] = None
    for path in cfg.paths:
        if path.id == current.id:
            continue
        clearance = min_opponent_distance(world, player, path, cfg)
        if clearance <= cfg.block_radius:
            continue
        wp = next_waypoint(path, player.pos)
        key = (wp.dist(main_wp), -clearance, path.id)
        if best is None or key < best[0]:
            best = (key, path, wp)
    if best is None:
        return DribbleDecision(DribbleKind.PASS_OUT)
    return DribbleDecision(DribbleKind.SWITCH_PATH, best[1].id, best[2])


def paths_to_yaml(cfg: DribbleConfig) -> str:
    doc = {
        "block_radius": cfg.block_radius,
        "lookahead": cfg.lookahead,
        "opponent_weight": cfg.opponent_weight,
        "progress_weight": cfg.progress_weight,
        "paths": [
            {"id": p.id, "main": p.is_main, "waypoints": [[w.x, w.y] for w in p.waypoints]}
            for p in cfg.paths
        ],
    }
    return yaml.safe_dump(doc, sort_keys=False)
