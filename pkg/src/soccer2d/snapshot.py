"""Snapshot documents: one world state plus the side to analyze, as JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Union

from .geometry import BallState, PlayerState, TeamSide, Vec2, WorldState

SNAPSHOT_VERSION = 1


class SnapshotError(ValueError):
    pass


@dataclass(frozen=True)
class Snapshot:
    world: WorldState
    side: TeamSide


def _pair(v: Vec2) -> List[float]:
    return [v.x, v.y]


def snapshot_to_dict(snap: Snapshot) -> Dict[str, Any]:
    w = snap.world
    return {
        "version": SNAPSHOT_VERSION,
        "side": snap.side.value,
        "cycle": w.cycle,
        "score": [w.score_left, w.score_right],
        "last_kicker": [w.last_kicker[0].value, w.last_kicker[1]] if w.last_kicker else None,
        "ball": {"pos": _pair(w.ball.pos), "vel": _pair(w.ball.vel)},
        "players": [
            {
                "side": p.side.value,
                "uniform": p.uniform,
                "pos": _pair(p.pos),
                "vel": _pair(p.vel),
                "body_dir": p.body_dir,
                "stamina": p.stamina,
            }
            for p in w.players
        ],
    }


def dump_snapshot(snap: Snapshot) -> str:
    return json.dumps(snapshot_to_dict(snap), indent=2) + "\n"


def _vec(v: Any, what: str) -> Vec2:
    if not (isinstance(v, list) and len(v) == 2 and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in v)):
        raise SnapshotError(f"{what} must be an [x, y] number pair")
    return Vec2(float(v[0]), float(v[1]))


def _side(v: Any, what: str) -> TeamSide:
    try:
        return TeamSide(v)
    except ValueError:
        raise SnapshotError(f"{what} must be 'left' or 'right', got {v!r}") from None


def snapshot_from_dict(doc: Any) -> Snapshot:
    if not isinstance(doc, dict):
        raise SnapshotError("snapshot must be a JSON object")
    if doc.get("version") != SNAPSHOT_VERSION:
        raise SnapshotError(f"unsupported snapshot version {doc.get('version')!r}")
    allowed = {"version", "side", "cycle", "score", "last_kicker", "ball", "players"}
    extra = sorted(set(doc) - allowed)
    if extra:
        raise SnapshotError(f"unknown snapshot keys: {', '.join(extra)}")
    try:
        ball = doc["ball"]
        players = []
        for i, p in enumerate(doc["players"]):
            players.append(
                PlayerState(
                    _side(p["side"], f"players[{i}].side"),
                    int(p["uniform"]),
                    _vec(p["pos"], f"players[{i}].pos"),
                    _vec(p.get("vel", [0.0, 0.0]), f"players[{i}].vel"),
                    float(p.get("body_dir", 0.0)),
                    float(p.get("stamina", 8000.0)),
                )
            )
        score = doc.get("score", [0, 0])
        lk = doc.get("last_kicker")
        world = WorldState(
            int(doc.get("cycle", 0)),
            BallState(_vec(ball["pos"], "ball.pos"), _vec(ball.get("vel", [0.0, 0.0]), "ball.vel")),
            tuple(players),
            int(score[0]),
            int(score[1]),
            (_side(lk[0], "last_kicker"), int(lk[1])) if lk is not None else None,
        )
        return Snapshot(world, _side(doc["side"], "side"))
    except SnapshotError:
        raise
    except KeyError as exc:
        raise SnapshotError(f"missing snapshot field {exc}") from None
    except (TypeError, ValueError, IndexError) as exc:
        raise SnapshotError(f"invalid snapshot: {exc}") from None


def load_snapshot(path: Union[str, Path]) -> Snapshot:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise SnapshotError(f"malformed JSON at line {exc.lineno}: {exc.msg}") from None
    return snapshot_from_dict(doc)
