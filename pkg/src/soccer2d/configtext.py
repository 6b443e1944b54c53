"""Helpers for validating YAML config text with line-accurate errors."""

from __future__ import annotations

import math
from typing import Any, Dict, Optional

import yaml

from .geometry import Vec2


class ConfigError(ValueError):
    """Malformed configuration text; ``line`` is 1-based when known."""

    def __init__(self, message: str, line: Optional[int] = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


def line_of(node: yaml.Node) -> int:
    return node.start_mark.line + 1


def compose(text: str) -> yaml.Node:
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError(
            f"malformed YAML: {getattr(exc, 'problem', None) or exc}", mark.line + 1 if mark else None
        ) from None
    if root is None:
        raise ConfigError("empty document", 1)
    return root


def mapping(node: yaml.Node, what: str) -> Dict[str, yaml.Node]:
    if not isinstance(node, yaml.MappingNode):
        raise ConfigError(f"{what} must be a mapping", line_of(node))
    return {k.value: v for k, v in node.value}


def scalar(node: yaml.Node, kind: type, what: str) -> Any:
    if not isinstance(node, yaml.ScalarNode):
        raise ConfigError(f"{what} must be a scalar", line_of(node))
    value = yaml.constructor.SafeConstructor().construct_object(node)
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ConfigError(f"{what} must be {kind.__name__}, got {node.value!r}", line_of(node))
    if kind is float and not math.isfinite(value):
        raise ConfigError(f"{what} must be finite", line_of(node))
    return value


def point(node: yaml.Node, what: str) -> Vec2:
    if not isinstance(node, yaml.SequenceNode) or len(node.value) != 2:
        raise ConfigError(f"{what} must be an [x, y] pair", line_of(node))
    return Vec2(scalar(node.value[0], float, what), scalar(node.value[1], float, what))


def reject_unknown(fields: Dict[str, yaml.Node], allowed: set, what: str) -> None:
    for key, node in fields.items():
        if key not in allowed:
            raise ConfigError(f"unknown {what} key '{key}'", line_of(node))


def check_version(top: Dict[str, yaml.Node], expected: int, what: str) -> None:
    if "version" in top:
        v = scalar(top["version"], int, f"{what} version")
        if v != expected:
            raise ConfigError(f"unsupported {what} version {v}", line_of(top["version"]))
