"""Command-line front end: validate, schedule, plan, simulate, report."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path

from . import report as rep
from .executor import (DEFAULT_HORIZON, DEFAULT_ITERATIONS, InfeasibleError, prepare, simulate)
from .planner import PlanningError, build_psi
from .schedule import ScheduleError, build_sequence, build_team_graph, construct_schedules
from .ts import ScenarioError, load_scenario

EXIT_OK, EXIT_INVALID, EXIT_INFEASIBLE, EXIT_INVARIANT = 0, 1, 2, 3


def _load(args):
    s = load_scenario(Path(args.scenario))
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "max_candidates", None) is not None:
        changes["max_candidates"] = args.max_candidates
    return dataclasses.replace(s, **changes) if changes else s


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _schedules_json(schedules) -> dict:
    return {str(i): list(sc.slots) for i, sc in schedules.items()}


def cmd_validate(args) -> int:
    s = _load(args)
    g = build_team_graph(s.teams)
    print(f"ok: {len(s.workspace.locations)} locations, {len(s.robots)} robots, "
          f"{len(s.teams.teams)} teams, max team degree {g.max_degree}")
    return EXIT_OK


def cmd_schedule(args) -> int:
    s = _load(args)
    g = build_team_graph(s.teams)
    seq = s.sequence if s.sequence is not None else build_sequence(g)
    schedules = construct_schedules(s.teams, g, seq)
    print(f"sequence: {', '.join(f'T{m}' for m in seq)}")
    for sc in schedules.values():
        print(sc)
    doc = {"sequence": list(seq), "length": g.max_degree + 1, "schedules": _schedules_json(schedules)}
    if args.out:
        (_out_dir(args) / "schedules.json").write_text(json.dumps(doc, indent=2), encoding="utf-8")
    else:
        print(json.dumps(doc))
    return EXIT_OK


def cmd_plan(args) -> int:
    s = _load(args)
    setup = prepare(s)
    init = setup.init
    print("assignment: " + ", ".join(f"T{m}->{v}" for m, v in sorted(init.assignment.items())))
    for i, plan in sorted(init.plans.items()):
        rp = setup.planners[i]
        psi = build_psi(rp.task, {m: init.assignment[m] for m in rp.teams})
        print(f"robot {i}: J(pre)={plan.prefix_cost:.4g} J(suf)={plan.suffix_cost:.4g} "
              f"|B|={rp.nba.num_states} psi = {psi}")
    if args.out:
        out = _out_dir(args)
        _write_setup(setup, out)
    return EXIT_OK


def _write_setup(setup, out: Path) -> None:
    (out / "schedules.json").write_text(json.dumps(
        {"sequence": list(setup.sequence), "schedules": _schedules_json(setup.schedules)}, indent=2),
        encoding="utf-8")
    plans = {}
    for i, plan in sorted(setup.init.plans.items()):
        wts = setup.planners[i].wts
        plans[str(i)] = {"prefix": [wts.states[k] for k in plan.prefix_path],
                         "suffix": [wts.states[k] for k in plan.suffix_path],
                         "prefix_cost": plan.prefix_cost, "suffix_cost": plan.suffix_cost}
    (out / "assignment.json").write_text(json.dumps(
        {"assignment": {str(m): v for m, v in sorted(setup.init.assignment.items())},
         "plans": plans}, indent=2), encoding="utf-8")


def cmd_simulate(args) -> int:
    s = _load(args)
    setup = prepare(s)
    result = simulate(setup, seed=s.seed, horizon=args.horizon, max_iterations=args.max_iterations)
    out = _out_dir(args)
    _write_setup(setup, out)
    rep.write_events(result.events, out / "events.jsonl")
    summary, text = rep.report(out / "events.jsonl", out, figures=not args.no_figures)
    sys.stdout.write(text)
    if result.deadlock is not None:
        print(f"error: deadlock watchdog fired: {result.deadlock}", file=sys.stderr)
        return EXIT_INVARIANT
    bad = rep.cost_violations(summary.cost_series)
    if bad:
        print(f"error: total cost increased between iterations {bad}", file=sys.stderr)
        return EXIT_INVARIANT
    return EXIT_OK


def cmd_report(args) -> int:
    out = Path(args.out) if args.out else None
    _, text = rep.report(args.log, out, figures=not args.no_figures)
    sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="inp", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_cmd(name, helptext):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("scenario", help="scenario JSON file")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--max-candidates", type=int, default=None)
        sp.add_argument("--out", default=None, help="output directory")
        return sp

    scenario_cmd("validate", "check a scenario file").set_defaults(func=cmd_validate)
    scenario_cmd("schedule", "print communication schedules").set_defaults(func=cmd_schedule)
    scenario_cmd("plan", "initial assignment and plans").set_defaults(func=cmd_plan)
    sp = scenario_cmd("simulate", "run the asynchronous execution")
    sp.add_argument("--horizon", type=float, default=DEFAULT_HORIZON)
    sp.add_argument("--max-iterations", type=int, default=DEFAULT_ITERATIONS)
    sp.add_argument("--no-figures", action="store_true")
    sp.set_defaults(func=cmd_simulate, out="out")
    rp = sub.add_parser("report", help="summarise an event log")
    rp.add_argument("log", help="events.jsonl or the directory containing it")
    rp.add_argument("--out", default=None)
    rp.add_argument("--no-figures", action="store_true")
    rp.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    level = os.environ.get("INP_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ScenarioError, OSError) as exc:
        print(f"error: invalid scenario: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except rep.LogError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except InfeasibleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (PlanningError, ScheduleError) as exc:
        print(f"error: invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
