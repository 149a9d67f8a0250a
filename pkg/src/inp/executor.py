"""Asynchronous execution of the planned paths as a seeded discrete-event simulation."""
from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass, field

import numpy as np

from .planner import OnlinePlanner, PathSegment, RobotPlanner, find_initial_assignment
from .schedule import build_sequence, build_team_graph, construct_schedules
from .ts import Scenario

log = logging.getLogger(__name__)

DEFAULT_HORIZON = 10_000.0
DEFAULT_ITERATIONS = 20


class InfeasibleError(RuntimeError):
    """No assignment of meeting points admits plans for every robot."""


class DeadlockError(RuntimeError):
    def __init__(self, report: dict):
        super().__init__(f"deadlock: {report}")
        self.report = report


def consensus_update(members, values: dict) -> dict:
    """Every member takes the team average; other values are untouched."""
    out = dict(values)
    avg = sum(values[i] for i in members) / len(members)
    for i in members:
        out[i] = avg
    return out


def deadlock_watchdog(waiting: dict, teams) -> dict | None:
    """Report a stationary configuration: everyone waits and no team is assembled.

    ``waiting`` maps each robot to ``(team, location)`` or ``None`` while it moves.
    """
    if any(w is None for w in waiting.values()):
        return None
    for t in teams.teams:
        spots = {waiting.get(i) for i in t.members}
        if len(spots) == 1 and next(iter(spots)) is not None and next(iter(spots))[0] == t.id:
            return None
    return {"waiting": {str(i): list(w) for i, w in sorted(waiting.items())}}


@dataclass
class Setup:
    scenario: Scenario
    graph: object
    sequence: tuple
    schedules: dict
    planners: dict
    init: object


def prepare(s: Scenario) -> Setup:
    """Schedules, planners and the initial assignment; raises when infeasible."""
    g = build_team_graph(s.teams)
    seq = s.sequence if s.sequence is not None else build_sequence(g)
    schedules = construct_schedules(s.teams, g, seq)
    planners = {r.id: RobotPlanner(s, r.id, schedules[r.id]) for r in s.robots}
    init = find_initial_assignment(s, planners)
    if init is None:
        raise InfeasibleError("initialization infeasible: no consistent choice of meeting points")
    return Setup(s, g, tuple(seq), schedules, planners, init)


@dataclass
class SimResult:
    events: list
    planner: OnlinePlanner
    values: dict
    meetings: dict  # team -> count
    time: float
    stop_reason: str
    deadlock: dict | None = None
    iterations: dict = field(default_factory=dict)


def _seg_record(t, i, seg: PathSegment, wts) -> dict:
    return {"t": t, "kind": "iteration", "robot": i, "n": seg.iteration, "cost": seg.cost,
            "states": [wts.states[k] for k in seg.states], "kappa": list(seg.kappa),
            "events": list(seg.events), "assignment": [list(x) for x in seg.assignment],
            "copies": seg.copies}


def simulate(setup: Setup, *, seed: int | None = None, horizon: float = DEFAULT_HORIZON,
             max_iterations: int | None = DEFAULT_ITERATIONS,
             initial_values: dict | None = None) -> SimResult:
    """Run the meeting protocol until ``horizon`` or until every robot starts
    iteration ``max_iterations``.

    Every hop, staying put included, takes a travel time drawn uniformly from
    the scenario's range when the robot departs.  A robot that reaches a
    designated meeting visit waits until its whole team is there; the last
    arrival triggers averaging and replanning, after which all members leave.
    """
    s = setup.scenario
    seed = s.seed if seed is None else seed
    rng_travel, rng_values = (np.random.default_rng(x) for x in np.random.SeedSequence(seed).spawn(2))
    lo, hi = s.travel_time
    planner = OnlinePlanner(s, setup.schedules, setup.planners, setup.init)
    robots = sorted(setup.planners)
    if initial_values is None:
        draws = rng_values.uniform(0.0, 1.0, size=len(robots))
        values = {i: float(v) for i, v in zip(robots, draws)}
    else:
        values = dict(initial_values)
    wts = {i: setup.planners[i].wts for i in robots}
    events = []
    pos = {i: 0 for i in robots}
    waiting = {i: None for i in robots}
    rooms = {}  # (team, location) -> set of robots waiting there
    meetings = {m: 0 for m in s.teams.team_ids}
    heap = []
    seq = 0
    now = 0.0
    for i in robots:
        events.append(_seg_record(0.0, i, planner.current[i], wts[i]))
        heapq.heappush(heap, (0.0, i, seq))
        seq += 1

    def depart(i, t):
        nonlocal seq
        seg = planner.current[i]
        if pos[i] + 1 < len(seg.states):
            pos[i] += 1
        else:
            seg = planner.advance(i)
            pos[i] = 0
            events.append(_seg_record(t, i, seg, wts[i]))
        dt = float(rng_travel.uniform(lo, hi))
        heapq.heappush(heap, (t + dt, i, seq))
        seq += 1

    def done():
        return (max_iterations is not None
                and all(planner.current[i].iteration >= max_iterations for i in robots))

    stop = "horizon"
    while True:
        if done():
            stop = "iterations"
            break
        if not heap:
            report = deadlock_watchdog(waiting, s.teams)
            report = report or {"waiting": {str(i): w for i, w in waiting.items()}}
            report["t"] = now
            events.append({"t": now, "kind": "deadlock", **report})
            return SimResult(events, planner, values, meetings, now, "deadlock", report,
                             {i: planner.current[i].iteration for i in robots})
        t, i, _ = heap[0]
        if t > horizon:
            break
        heapq.heappop(heap)
        now = t
        seg = planner.current[i]
        here = seg.states[pos[i]]
        loc = wts[i].states[here]
        events.append({"t": t, "kind": "arrive", "robot": i, "loc": loc, "n": seg.iteration,
                       "pos": pos[i]})
        m = seg.event_at(pos[i])
        if m is None:
            depart(i, t)
            continue
        waiting[i] = (m, loc)
        room = rooms.setdefault((m, loc), set())
        room.add(i)
        events.append({"t": t, "kind": "wait", "robot": i, "team": m, "loc": loc})
        team = s.teams.team(m)
        if not room >= set(team.members):
            continue
        values = consensus_update(team.members, values)
        decision = planner.communicate(m)
        meetings[m] += 1
        spread = max(values.values()) - min(values.values())
        events.append({"t": t, "kind": "meet", "team": m, "loc": loc,
                       "participants": list(team.members), "count": meetings[m],
                       "chosen": decision.chosen, "previous": decision.previous,
                       "cost": decision.chosen_cost,
                       "candidates": [[v, c] for v, c in decision.costs],
                       "values": {str(k): v for k, v in sorted(values.items())},
                       "spread": spread})
        log.debug("t=%.3f team %d met at %s -> %s", t, m, loc, decision.chosen)
        del rooms[(m, loc)]
        for r in team.members:
            waiting[r] = None
            depart(r, t)
    events.append({"t": now, "kind": "stop", "reason": stop})
    return SimResult(events, planner, values, meetings, now, stop, None,
                     {i: planner.current[i].iteration for i in robots})
