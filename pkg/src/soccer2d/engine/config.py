"""Match configuration and its YAML loader."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, Union

from ..configtext import ConfigError, compose, line_of, mapping, reject_unknown, scalar
from ..defense import BlockParams, FormationSpec, default_formation, parse_formation_node
from ..dribbling import DribbleConfig, default_dribble_config, parse_paths_node
from ..geometry import DEFAULT_FIELD, FieldSpec
from ..kinematics import MotionParams
from ..passing import PassFactorWeights, ThroughPassParams

CONFIG_VERSION = 1


class AttackerLevel(str, enum.Enum):
    WEAK = "weak"
    MEDIUM = "medium"
    STRONG = "strong"


@dataclass(frozen=True)
class MatchConfig:
    cycles: int = 3000
    seed: int = 0
    motion: MotionParams = field(default_factory=MotionParams)
    weights: PassFactorWeights = field(default_factory=PassFactorWeights)
    through: ThroughPassParams = field(default_factory=ThroughPassParams)
    dribble: DribbleConfig = field(default_factory=default_dribble_config)
    formation: FormationSpec = field(default_factory=default_formation)
    blocking_enabled: bool = True
    attacker_level: AttackerLevel = AttackerLevel.STRONG
    block: BlockParams = field(default_factory=BlockParams)
    hold_margin: float = 0.7
    turn_threshold_deg: float = 90.0
    field: FieldSpec = DEFAULT_FIELD

    def __post_init__(self) -> None:
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if not self.hold_margin > 0:
            raise ValueError("hold_margin must be positive")

    def with_(self, **changes: Any) -> MatchConfig:
        from dataclasses import replace

        return replace(self, **changes)

    def summary(self) -> Dict[str, Any]:
        return {
            "cycles": self.cycles,
            "seed": self.seed,
            "blocking_enabled": self.blocking_enabled,
            "attacker_level": self.attacker_level.value,
        }


def _section(top: Dict, name: str, cls: type, kinds: Dict[str, type]) -> Any:
    if name not in top:
        return cls()
    rec = mapping(top[name], name)
    reject_unknown(rec, set(kinds), name)
    kwargs = {k: scalar(v, kinds[k], f"{name}.{k}") for k, v in rec.items()}
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{name}: {exc}", line_of(top[name])) from None


def _kinds(cls: type) -> Dict[str, type]:
    out = {}
    for f in fields(cls):
        t = f.type if isinstance(f.type, type) else {"float": float, "int": int, "bool": bool}[f.type]
        out[f.name] = t
    return out


_TOP_KEYS = {
    "version",
    "cycles",
    "seed",
    "blocking_enabled",
    "attacker_level",
    "hold_margin",
    "turn_threshold_deg",
    "motion",
    "weights",
    "through",
    "blocking",
    "dribble",
    "formation",
}


def parse_match_config(text: str) -> MatchConfig:
    root = compose(text)
    top = mapping(root, "match config")
    reject_unknown(top, _TOP_KEYS, "match config")
    if "version" in top:
        v = scalar(top["version"], int, "version")
        if v != CONFIG_VERSION:
            raise ConfigError(f"unsupported config version {v}", line_of(top["version"]))
    kw: Dict[str, Any] = {}
    for key, kind in (("cycles", int), ("seed", int), ("blocking_enabled", bool), ("hold_margin", float), ("turn_threshold_deg", float)):
        if key in top:
            kw[key] = scalar(top[key], kind, key)
    if "attacker_level" in top:
        level = scalar(top["attacker_level"], str, "attacker_level")
        try:
            kw["attacker_level"] = AttackerLevel(level.lower())
        except ValueError:
            raise ConfigError(f"attacker_level must be weak|medium|strong, got {level!r}", line_of(top["attacker_level"])) from None
    kw["motion"] = _section(top, "motion", MotionParams, _kinds(MotionParams))
    kw["weights"] = _section(top, "weights", PassFactorWeights, _kinds(PassFactorWeights))
    kw["through"] = _section(top, "through", ThroughPassParams, _kinds(ThroughPassParams))
    kw["block"] = _section(top, "blocking", BlockParams, _kinds(BlockParams))
    if "dribble" in top:
        kw["dribble"] = parse_paths_node(top["dribble"])
    if "formation" in top:
        kw["formation"] = parse_formation_node(top["formation"])
    try:
        return MatchConfig(**kw)
    except ValueError as exc:
        raise ConfigError(str(exc), line_of(root)) from None


def load_match_config(path: Union[str, Path]) -> MatchConfig:
    return parse_match_config(Path(path).read_text())
