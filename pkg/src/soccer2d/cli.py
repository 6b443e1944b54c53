"""Command-line entry point: match, experiment, analyze, validate."""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path
from typing import List, Optional, Sequence

from .configtext import ConfigError
from .defense import assign_blocker_scans, ball_owner
from .dribbling import choose_dribble, rate_path_terms
from .engine.config import AttackerLevel, MatchConfig, load_match_config
from .engine.match import run_experiment, run_match
from .geometry import Vec2, to_team_frame, to_team_point
from .passing import evaluate_direct_passes, explain_through_pass
from .snapshot import SnapshotError, load_snapshot

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; route it to our usage code instead
    def error(self, message: str) -> None:
        raise UsageError(f"{self.prog}: {message}")


def _fmt(v: float) -> str:
    return f"{v + 0.0:.4f}"


def _pt(v: Vec2) -> str:
    return f"({_fmt(v.x)}, {_fmt(v.y)})"


def _load_config(path: str) -> MatchConfig:
    return load_match_config(path)


def cmd_match(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.blocking is not None:
        changes["blocking_enabled"] = args.blocking == "on"
    if args.attacker is not None:
        changes["attacker_level"] = AttackerLevel(args.attacker)
    if args.cycles is not None:
        changes["cycles"] = args.cycles
    if args.cycles is not None and args.cycles < 1:
        raise UsageError("--cycles must be >= 1")
    if args.seed is not None and args.seed < 0:
        raise UsageError("--seed must be non-negative")
    config = config.with_(**changes)
    result, lines = run_match(config)
    if args.replay:
        Path(args.replay).write_text("\n".join(lines) + "\n")
    print(f"score {result.score_left}-{result.score_right} conceded={result.conceded_by_left} seed={result.seed}")
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    if args.matches_per_arm < 1:
        raise UsageError("--matches-per-arm must be >= 1")
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    if args.seed is not None and args.seed < 0:
        raise UsageError("--seed must be non-negative")
    seed = args.seed if args.seed is not None else config.seed
    t0 = time.perf_counter()
    report = run_experiment(config, args.matches_per_arm, seed, jobs=args.jobs)
    print(f"elapsed {time.perf_counter() - t0:.1f}s with {args.jobs} job(s)", file=sys.stderr)
    if args.out:
        Path(args.out).write_text(report.to_json())
    sys.stdout.write(report.table())
    return EXIT_OK


def analyze(snapshot_path: str, skill: str, explain: bool, config: MatchConfig) -> List[str]:
    """Decision text for ``skill`` on the snapshot; raises SnapshotError on unmet preconditions."""
    snap = load_snapshot(snapshot_path)
    side = snap.side
    tw = to_team_frame(snap.world, side)
    mp = config.motion
    f = config.field
    out: List[str] = []

    def absolute(p: Vec2) -> str:
        return _pt(to_team_point(p, side))

    if skill == "block":
        scans, plan = assign_blocker_scans(tw, side, mp, config.block, f)
        if ball_owner(tw, side.opponent, mp) is None:
            raise SnapshotError(f"no {side.opponent.value} player owns the ball; nothing to block")
        if plan is None:
            out.append("decision: no feasible block")
        else:
            out.append(
                f"decision: block by {plan.blocker} at {absolute(plan.block_point)} mode {plan.mode.value} "
                f"blocker_cycles {plan.blocker_cycles} opponent_cycles {plan.opponent_cycles}"
            )
        if explain:
            for s in sorted(scans, key=lambda s: s.defender):
                if s.plan is None:
                    out.append(f"defender {s.defender} gate {s.reason}")
                else:
                    out.append(
                        f"defender {s.defender} gate ok point {absolute(s.plan.block_point)} "
                        f"blocker_cycles {s.plan.blocker_cycles} opponent_cycles {s.plan.opponent_cycles}"
                    )
        return out

    owner = ball_owner(tw, side, mp)
    if owner is None:
        raise SnapshotError(f"no {side.value} player is within kickable range of the ball")

    if skill == "pass":
        rows, best = evaluate_direct_passes(tw, owner, config.weights, mp, field=f)
        if best is None:
            out.append("decision: no safe direct pass")
        else:
            out.append(
                f"decision: pass to {best.receiver} at {absolute(best.target)} "
                f"speed {_fmt(best.initial_speed)} arrival {best.arrival_cycles} score {_fmt(best.score)}"
            )
        if explain:
            for r in sorted(rows, key=lambda r: r.receiver):
                if r.factors is None:
                    out.append(f"teammate {r.receiver} infeasible")
                    continue
                e = r.factors
                reacher = f"{r.first_reacher[0]}:{r.first_reacher[1]}" if r.first_reacher else "none"
                out.append(
                    f"teammate {r.receiver} e_lane {_fmt(e.e_lane)} e_progress {_fmt(e.e_progress)} "
                    f"e_receiver_space {_fmt(e.e_receiver_space)} e_length {_fmt(e.e_length)} "
                    f"score {_fmt(r.score)} first_reacher {reacher} safe {'yes' if r.feasible else 'no'}"
                )
    elif skill == "through":
        log, best = explain_through_pass(tw, owner, config.through, mp, field=f)
        if best is None:
            out.append("decision: no through pass")
        else:
            out.append(
                f"decision: through pass to {best.receiver} at {absolute(best.target)} "
                f"speed {_fmt(best.initial_speed)} arrival {best.arrival_cycles}"
            )
        if explain:
            # the search order is deterministic, so the log is already stable
            for e in log:
                n = "-" if e.arrival_cycles is None else str(e.arrival_cycles)
                out.append(f"candidate {e.receiver} {absolute(e.target)} arrival {n} verdict {e.verdict}")
    elif skill == "dribble":
        dec = choose_dribble(tw, owner, config.dribble, mp)
        if dec.next_waypoint is None:
            out.append(f"decision: {dec.kind.value}")
        else:
            out.append(f"decision: {dec.kind.value} path {dec.path_id} toward {absolute(dec.next_waypoint)}")
        if explain:
            for path in sorted(config.dribble.paths, key=lambda p: p.id):
                r = rate_path_terms(tw, owner, path, config.dribble, f)
                out.append(
                    f"path {r.path_id} progress {_fmt(r.progress)} opponent {_fmt(r.opponent)} "
                    f"detour {_fmt(r.detour)} score {_fmt(r.score)} blocked {'yes' if r.blocked else 'no'}"
                )
    else:
        raise UsageError(f"unknown skill {skill!r}")
    return out


def cmd_analyze(args: argparse.Namespace) -> int:
    config = _load_config(args.config) if args.config else MatchConfig()
    for line in analyze(args.snapshot, args.skill, args.explain, config):
        print(line)
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    _load_config(args.config)
    print(f"{args.config}: ok")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="soccer2d", description="2D soccer team simulator and blocking ablation harness.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    m = sub.add_parser("match", help="play one match and optionally write its replay")
    m.add_argument("--config", required=True)
    m.add_argument("--seed", type=int)
    m.add_argument("--blocking", choices=("on", "off"))
    m.add_argument("--attacker", choices=[lvl.value for lvl in AttackerLevel])
    m.add_argument("--replay")
    m.add_argument("--cycles", type=int)
    m.set_defaults(func=cmd_match)

    e = sub.add_parser("experiment", help="blocking on/off ablation over every attacker level")
    e.add_argument("--config", required=True)
    e.add_argument("--seed", type=int)
    e.add_argument("--matches-per-arm", type=int, default=20)
    e.add_argument("--out")
    e.add_argument("--jobs", type=int, default=1)
    e.set_defaults(func=cmd_experiment)

    a = sub.add_parser("analyze", help="run one skill on a snapshot")
    a.add_argument("--snapshot", required=True)
    a.add_argument("--skill", required=True, choices=("pass", "through", "dribble", "block"))
    a.add_argument("--explain", action="store_true")
    a.add_argument("--config", help="tuning to use (built-in defaults when omitted)")
    a.set_defaults(func=cmd_analyze)

    v = sub.add_parser("validate", help="check a match config file")
    v.add_argument("--config", required=True)
    v.set_defaults(func=cmd_validate)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, SnapshotError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001 - last-resort runtime failure
        print(f"runtime failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
