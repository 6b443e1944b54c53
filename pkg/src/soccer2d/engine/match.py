"""Match loop, replay stream, replay auditor and the blocking ablation."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np

from ..geometry import STAMINA_MAX, TeamSide, Vec2
from .config import AttackerLevel, MatchConfig
from .policies import attack_homes, attacker_policy, skill_policy
from .sim import MatchState, kickoff_world, step_match

REPLAY_VERSION = 1
REPORT_VERSION = 1


@dataclass(frozen=True)
class MatchResult:
    score_left: int
    score_right: int
    conceded_by_left: int
    cycles_played: int
    seed: int

    def __post_init__(self) -> None:
        if self.conceded_by_left != self.score_right:
            raise ValueError("conceded_by_left must equal score_right")


def _r(v: float, nd: int = 4) -> float:
    out = round(v, nd)
    return out + 0.0  # folds -0.0 into 0.0


def replay_header(config: MatchConfig) -> str:
    doc = {"type": "header", "version": REPLAY_VERSION, "kickable_dist": config.motion.kickable_dist}
    doc.update(config.summary())
    return json.dumps(doc, separators=(",", ":"))


def replay_record(state: MatchState) -> str:
    w = state.world
    rec = {
        "type": "cycle",
        "cycle": w.cycle,
        "ball": [_r(w.ball.pos.x), _r(w.ball.pos.y), _r(w.ball.vel.x), _r(w.ball.vel.y)],
        "players": [[_r(p.pos.x), _r(p.pos.y), _r(p.stamina, 2)] for p in w.players],
        "score": [w.score_left, w.score_right],
        "event": state.event,
        "kick": [state.kick[0], state.kick[1], _r(state.kick[2], 6)] if state.kick else None,
    }
    return json.dumps(rec, separators=(",", ":"))


def replay_footer(result: MatchResult) -> str:
    return json.dumps({"type": "result", **asdict(result)}, separators=(",", ":"))


def attacker_streams(seed: int) -> Dict[int, np.random.Generator]:
    # one PCG64 substream per right-side uniform, keyed on (seed, side, uniform)
    return {u: np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 1, u]))) for u in range(1, 12)}


def run_match(config: MatchConfig) -> Tuple[MatchResult, List[str]]:
    """Play ``config.cycles`` cycles: full skill stack on the left, scripted attackers on the right."""
    homes = {
        TeamSide.LEFT: {u: s.home for u, s in config.formation.slots},
        TeamSide.RIGHT: attack_homes(),
    }
    state = MatchState(kickoff_world(config, TeamSide.RIGHT, homes), event="kickoff")
    rngs = attacker_streams(config.seed)
    feint: Dict[int, Tuple[int, float]] = {}
    lines = [replay_header(config), replay_record(state)]
    for _ in range(config.cycles):
        w = state.world
        left = skill_policy(w, TeamSide.LEFT, state.memory, config)
        right = attacker_policy(w, TeamSide.RIGHT, config.attacker_level, rngs, config, feint)
        state = step_match(state, left + right, config, homes)
        lines.append(replay_record(state))
    w = state.world
    result = MatchResult(w.score_left, w.score_right, w.score_right, config.cycles, config.seed)
    lines.append(replay_footer(result))
    return result, lines


def replay_digest(lines: Iterable[str]) -> str:
    h = hashlib.sha256()
    for line in lines:
        h.update(line.encode())
        h.update(b"\n")
    return h.hexdigest()


@dataclass
class AuditReport:
    cycles: int = 0
    kicks: int = 0
    problems: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.problems


def audit_replay(lines: Iterable[str]) -> AuditReport:
    """Check a replay for illegal kicks, out-of-range stamina and bad bookkeeping."""
    report = AuditReport()
    kickable = None
    last_score = None
    result = None
    for n, line in enumerate(lines, 1):
        rec = json.loads(line)
        kind = rec.get("type")
        if kind == "header":
            if rec.get("version") != REPLAY_VERSION:
                report.problems.append(f"line {n}: unsupported replay version {rec.get('version')}")
            kickable = rec["kickable_dist"]
        elif kind == "cycle":
            report.cycles += 1
            if len(rec["players"]) != 22:
                report.problems.append(f"line {n}: {len(rec['players'])} players")
            for i, p in enumerate(rec["players"]):
                if not 0.0 <= p[2] <= STAMINA_MAX:
                    report.problems.append(f"line {n}: player {i} stamina {p[2]}")
            if rec["kick"] is not None:
                report.kicks += 1
                if kickable is None or rec["kick"][2] > kickable:
                    report.problems.append(f"line {n}: kick from {rec['kick'][2]} m by {rec['kick'][:2]}")
            last_score = rec["score"]
        elif kind == "result":
            result = rec
        else:
            report.problems.append(f"line {n}: unknown record type {kind!r}")
    if result is None:
        report.problems.append("missing result record")
    else:
        if result["conceded_by_left"] != result["score_right"]:
            report.problems.append("conceded_by_left differs from score_right")
        if last_score is not None and last_score != [result["score_left"], result["score_right"]]:
            report.problems.append("final cycle score differs from result")
    return report


# --------------------------------------------------------------------------
# experiment
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MatchRow:
    seed: int
    score_left: int
    score_right: int
    replay_sha256: str
    audit_ok: bool


@dataclass(frozen=True)
class ArmSummary:
    matches: Tuple[MatchRow, ...]
    total_for: int
    total_against: int
    average_conceded: float


@dataclass(frozen=True)
class ExperimentReport:
    seed: int
    matches_per_arm: int
    cycles: int
    levels: Dict[str, Dict[str, ArmSummary]]
    pooled_on_average: float
    pooled_off_average: float

    def to_json(self) -> str:
        doc = {"version": REPORT_VERSION, **asdict(self)}
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> ExperimentReport:
        doc = json.loads(text)
        if doc.pop("version", None) != REPORT_VERSION:
            raise ValueError("unsupported report version")
        levels = {
            lvl: {
                arm: ArmSummary(
                    tuple(MatchRow(**m) for m in s["matches"]),
                    s["total_for"],
                    s["total_against"],
                    s["average_conceded"],
                )
                for arm, s in arms.items()
            }
            for lvl, arms in doc["levels"].items()
        }
        return cls(
            doc["seed"],
            doc["matches_per_arm"],
            doc["cycles"],
            levels,
            doc["pooled_on_average"],
            doc["pooled_off_average"],
        )

    def table(self) -> str:
        """Plain-text summary: one row per attacker level, then pooled averages."""
        head = f"{'attacker':<10}{'on total':>10}{'on avg':>9}{'off total':>11}{'off avg':>9}"
        rows = [head, "-" * len(head)]
        for lvl in (l.value for l in AttackerLevel):
            on = self.levels[lvl]["on"]
            off = self.levels[lvl]["off"]
            rows.append(
                f"{lvl:<10}{on.total_for:>5}:{on.total_against:<4}{on.average_conceded:>9.2f}"
                f"{off.total_for:>6}:{off.total_against:<4}{off.average_conceded:>9.2f}"
            )
        rows.append("-" * len(head))
        rows.append(
            f"{'pooled':<10}{'':>10}{self.pooled_on_average:>9.2f}{'':>11}{self.pooled_off_average:>9.2f}"
        )
        rows.append(
            f"average conceded per match: {self.pooled_off_average:.2f} without blocking -> "
            f"{self.pooled_on_average:.2f} with blocking"
        )
        return "\n".join(rows) + "\n"


def _play(job: Tuple[MatchConfig, str, str]) -> Tuple[str, str, MatchRow]:
    config, level, arm = job
    result, lines = run_match(config)
    audit = audit_replay(lines)
    row = MatchRow(config.seed, result.score_left, result.score_right, replay_digest(lines), audit.ok)
    return level, arm, row


def experiment_jobs(base: MatchConfig, matches_per_arm: int, seed: int) -> List[Tuple[MatchConfig, str, str]]:
    if matches_per_arm < 1:
        raise ValueError("matches_per_arm must be >= 1")
    jobs = []
    for level in AttackerLevel:
        for arm, enabled in (("on", True), ("off", False)):
            for i in range(matches_per_arm):
                cfg = base.with_(seed=seed + i, attacker_level=level, blocking_enabled=enabled)
                jobs.append((cfg, level.value, arm))
    return jobs


def summarize(rows: Dict[Tuple[str, str], List[MatchRow]], seed: int, matches_per_arm: int, cycles: int) -> ExperimentReport:
    levels: Dict[str, Dict[str, ArmSummary]] = {}
    pooled: Dict[str, List[int]] = {"on": [0, 0], "off": [0, 0]}
    for level in AttackerLevel:
        levels[level.value] = {}
        for arm in ("on", "off"):
            ms = tuple(sorted(rows.get((level.value, arm), []), key=lambda r: r.seed))
            against = sum(m.score_right for m in ms)
            levels[level.value][arm] = ArmSummary(
                ms, sum(m.score_left for m in ms), against, against / len(ms) if ms else 0.0
            )
            pooled[arm][0] += against
            pooled[arm][1] += len(ms)
    return ExperimentReport(
        seed,
        matches_per_arm,
        cycles,
        levels,
        pooled["on"][0] / pooled["on"][1],
        pooled["off"][0] / pooled["off"][1],
    )


def run_experiment(base: MatchConfig, matches_per_arm: int, seed: int, jobs: int = 1) -> ExperimentReport:
    """Paired blocking on/off ablation over every attacker level.

    Both arms use seeds ``seed .. seed + matches_per_arm - 1``. Results are
    keyed by seed and sorted before reduction, so ``jobs`` never changes the
    report.
    """
    work = experiment_jobs(base, matches_per_arm, seed)
    rows: Dict[Tuple[str, str], List[MatchRow]] = {}
    if jobs <= 1:
        done = map(_play, work)
    else:
        pool = ProcessPoolExecutor(max_workers=jobs)
        done = pool.map(_play, work)
    try:
        for level, arm, row in done:
            rows.setdefault((level, arm), []).append(row)
    finally:
        if jobs > 1:
            pool.shutdown()
    return summarize(rows, seed, matches_per_arm, base.cycles)
