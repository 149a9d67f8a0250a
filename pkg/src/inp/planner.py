"""Initial communication-point assignment, path construction and online replanning.

Each robot gets one automaton for ``task && []<> @m && ...`` where ``@m`` is a
placeholder proposition for "at team m's meeting point".  A concrete
assignment only changes which locations carry which placeholder, so the
automaton, and with it the anchor state of the initial lasso, stays the same
across every replan.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .ltl.buchi import Nba, translate
from .ltl.syntax import Always, Atom, Eventually, Formula, conjoin
from .product import (PrefixSuffixPlan, ProductAutomaton, SuffixLoop, find_feasible_plan,
                      optimal_suffix_loop)
from .schedule import Schedule
from .ts import Scenario, WeightedTransitionSystem, build_wts, path_cost


class PlanningError(RuntimeError):
    """A planning invariant failed (for example the suffix-copy bound)."""


def meeting_prop(m: int) -> str:
    return f"@{m}"


def build_psi(task: Formula, assignment: dict) -> Formula:
    """The task conjoined with infinitely-often visits of each assigned point."""
    return conjoin([task] + [Always(Eventually(Atom(assignment[m]))) for m in sorted(assignment)])


def template_formula(task: Formula, teams) -> Formula:
    return conjoin([task] + [Always(Eventually(Atom(meeting_prop(m)))) for m in teams])


@dataclass(frozen=True)
class PathSegment:
    robot: int
    iteration: int
    states: tuple  # wTS state indices
    events: tuple  # team ids in visiting order
    kappa: tuple  # kappa[k] = position of the visit for events[k]
    cost: float  # suffix cost of the loop this path repeats
    assignment: tuple  # ((team, location id), ...) the path was built for
    copies: int
    loop: tuple

    def event_at(self, pos: int):
        """Team whose meeting is designated at ``pos``, or ``None``."""
        for m, k in zip(self.events, self.kappa):
            if k == pos:
                return m
        return None


def designate(states, order, targets) -> tuple | None:
    """Earliest strictly increasing positions visiting ``targets[m]`` for ``m`` in ``order``."""
    kappa = []
    pos = -1
    for m in order:
        nxt = next((k for k in range(pos + 1, len(states)) if states[k] == targets[m]), None)
        if nxt is None:
            return None
        kappa.append(nxt)
        pos = nxt
    return tuple(kappa)


def build_path(head, loop, order, targets, *, max_copies: int | None = None):
    """``head | loop | loop ...`` with the fewest loop copies admitting designated visits."""
    limit = max(1, len(order)) if max_copies is None else max_copies
    for copies in range(1, limit + 1):
        states = tuple(head) + tuple(loop) * copies
        kappa = designate(states, order, targets)
        if kappa is not None:
            return states, kappa, copies
    raise PlanningError(f"more than {limit} loop copies needed to respect the schedule")


def build_initial_path(plan: PrefixSuffixPlan, sched: Schedule, assignment: dict,
                       wts: WeightedTransitionSystem, robot: int | None = None) -> PathSegment:
    order = sched.order
    targets = {m: wts.index(assignment[m]) for m in order}
    states, kappa, copies = build_path(plan.prefix_path, plan.suffix_path, order, targets)
    return PathSegment(sched.robot if robot is None else robot, 0, states, order, kappa,
                       plan.suffix_cost, tuple((m, assignment[m]) for m in sorted(order)),
                       copies, plan.suffix_path)


class RobotPlanner:
    """Per-robot synthesis against one template automaton, memoised by assignment."""

    def __init__(self, scenario: Scenario, robot: int, schedule: Schedule):
        self.robot = robot
        self.schedule = schedule
        self.teams = tuple(sorted(scenario.teams.teams_of(robot)))
        self.wts = build_wts(scenario, robot)
        self.task = scenario.task(robot)
        alphabet = set(self.wts.states) | {meeting_prop(m) for m in self.teams}
        self.nba: Nba = translate(template_formula(self.task, self.teams), alphabet)
        self.anchor = None
        self._loops = {}
        self._products = {}

    def key(self, assignment: dict) -> tuple:
        return tuple(assignment[m] for m in self.teams)

    def labels(self, assignment: dict) -> tuple:
        marks = {}
        for m in self.teams:
            marks.setdefault(assignment[m], set()).add(meeting_prop(m))
        return tuple(frozenset({v} | marks.get(v, set())) for v in self.wts.states)

    def product(self, assignment: dict) -> ProductAutomaton:
        key = self.key(assignment)
        p = self._products.get(key)
        if p is None:
            p = ProductAutomaton(self.wts, self.nba, self.labels(assignment))
            self._products[key] = p
        return p

    def feasible(self, assignment: dict) -> PrefixSuffixPlan | None:
        return find_feasible_plan(self.product(assignment))

    def loop(self, assignment: dict) -> SuffixLoop | None:
        """Cheapest loop through the anchor under ``assignment`` (needs the anchor fixed)."""
        if self.anchor is None:
            raise PlanningError(f"robot {self.robot}: anchor not fixed yet")
        key = self.key(assignment)
        if key not in self._loops:
            self._loops[key] = optimal_suffix_loop(self.product(assignment), self.anchor)
        return self._loops[key]

    def path_for(self, loop: SuffixLoop, assignment: dict, iteration: int) -> PathSegment:
        order = self.schedule.order
        targets = {m: self.wts.index(assignment[m]) for m in order}
        states, kappa, copies = build_path((), loop.path, order, targets)
        return PathSegment(self.robot, iteration, states, order, kappa, loop.cost,
                           tuple((m, assignment[m]) for m in sorted(order)), copies, loop.path)


def local_combinations(scenario: Scenario, robot: int) -> list:
    """Every choice of points for the robot's teams, in lexicographic order of C_m indices."""
    teams = sorted(scenario.teams.teams_of(robot))
    options = [scenario.teams.team(m).comm_set for m in teams]
    return [dict(zip(teams, combo)) for combo in itertools.product(*options)]


@dataclass
class Initialization:
    assignment: dict
    plans: dict  # robot -> PrefixSuffixPlan
    local_feasible: dict = field(default_factory=dict)  # robot -> set of feasible keys
    syntheses: int = 0


def find_initial_assignment(scenario: Scenario, planners: dict) -> Initialization | None:
    """Local feasibility per robot, then the first globally consistent assignment.

    Teams are assigned in ascending id, each trying its points in listed order,
    with a robot's partial choice pruned as soon as no feasible local
    combination extends it.  The result is the lexicographically first global
    assignment all of whose restrictions are locally feasible.
    """
    feasible = {}
    count = 0
    for i, rp in planners.items():
        feasible[i] = {}
        for combo in local_combinations(scenario, i):
            count += 1
            plan = rp.feasible(combo)
            if plan is not None:
                feasible[i][rp.key(combo)] = plan
    team_ids = sorted(scenario.teams.team_ids)
    prefixes = {i: {k[:n] for k in feasible[i] for n in range(len(k) + 1)} for i in planners}

    def consistent(partial):
        for i, rp in planners.items():
            got = []
            for m in rp.teams:
                if m not in partial:
                    break
                got.append(partial[m])
            if tuple(got) not in prefixes[i]:
                return False
        return True

    def search(k, partial):
        if k == len(team_ids):
            return dict(partial)
        m = team_ids[k]
        for v in scenario.teams.team(m).comm_set:
            partial[m] = v
            if consistent(partial):
                found = search(k + 1, partial)
                if found is not None:
                    return found
            del partial[m]
        return None

    assignment = search(0, {})
    if assignment is None:
        return None
    chosen = {i: feasible[i][rp.key(assignment)] for i, rp in planners.items()}
    return Initialization(assignment, chosen, {i: set(f) for i, f in feasible.items()}, count)


def brute_force_assignment(scenario: Scenario, planners: dict) -> dict | None:
    """Reference search over the whole product of communication sets."""
    team_ids = sorted(scenario.teams.team_ids)
    options = [scenario.teams.team(m).comm_set for m in team_ids]
    for combo in itertools.product(*options):
        assignment = dict(zip(team_ids, combo))
        if all(rp.feasible(assignment) is not None for rp in planners.values()):
            return assignment
    return None


def candidate_points(comm_set, incumbent, limit: int | None = None) -> tuple:
    """The incumbent followed by the next points of ``comm_set`` (cyclically)."""
    k = comm_set.index(incumbent)
    ring = tuple(comm_set[k:]) + tuple(comm_set[:k])
    return ring if limit is None else ring[:max(1, limit)]


@dataclass(frozen=True)
class TeamDecision:
    team: int
    chosen: str
    previous: str
    costs: tuple  # ((point, summed cost or None), ...) per candidate
    loops: dict  # robot -> SuffixLoop at the chosen point

    @property
    def chosen_cost(self) -> float:
        return dict(self.costs)[self.chosen]


def decide(team, planners: dict, assignment: dict, location_order: dict,
           limit: int | None = None) -> TeamDecision:
    """Pick the point of ``team`` minimising the members' summed loop costs."""
    incumbent = assignment[team.id]
    costs = []
    loops_at = {}
    for v in candidate_points(team.comm_set, incumbent, limit):
        trial = dict(assignment)
        trial[team.id] = v
        loops = {i: planners[i].loop(trial) for i in team.members}
        if any(lp is None for lp in loops.values()):
            costs.append((v, None))
            continue
        costs.append((v, sum(lp.cost for lp in loops.values())))
        loops_at[v] = loops
    ok = [(c, location_order[v], v) for v, c in costs if c is not None]
    if not ok:
        raise PlanningError(f"team {team.id}: no feasible point, not even the incumbent {incumbent}")
    _, _, chosen = min(ok)
    return TeamDecision(team.id, chosen, incumbent, tuple(costs), loops_at[chosen])


class OnlinePlanner:
    """Planner state shared by all robots during execution.

    ``current[i]`` is the path robot ``i`` is executing, ``working[i]`` the
    latest version of its next path and ``pending[i]`` the number of meetings it
    still has to attend before that next path is final.
    """

    def __init__(self, scenario: Scenario, schedules: dict, planners: dict, init: Initialization):
        self.scenario = scenario
        self.schedules = schedules
        self.planners = planners
        self.assignment = dict(init.assignment)
        self.location_order = {v: k for k, v in enumerate(scenario.workspace.ids)}
        self.limit = scenario.max_candidates
        self.current = {}
        self.working = {}
        self.final = {}
        self.attended = {i: 0 for i in planners}
        self.history = {i: [] for i in planners}
        for i, rp in planners.items():
            plan = init.plans[i]
            rp.anchor = plan.anchor
            seg = build_initial_path(plan, schedules[i], self.assignment, rp.wts, i)
            self.current[i] = seg
            self.history[i].append(seg)

    def communicate(self, m: int) -> TeamDecision:
        team = self.scenario.teams.team(m)
        decision = decide(team, self.planners, self.assignment, self.location_order, self.limit)
        self.assignment[m] = decision.chosen
        for i in team.members:
            rp = self.planners[i]
            seg = rp.path_for(decision.loops[i], self.assignment, self.current[i].iteration + 1)
            self.working[i] = seg
            self.attended[i] += 1
            if self.attended[i] == len(rp.teams):
                self.final[i] = seg
                self.attended[i] = 0
        return decision

    def advance(self, i: int) -> PathSegment:
        """Robot ``i`` finished its path; switch to the finalised next one."""
        seg = self.final.pop(i, None)
        if seg is None:
            raise PlanningError(f"robot {i} finished path {self.current[i].iteration} "
                                "before attending all its meetings")
        self.current[i] = seg
        self.history[i].append(seg)
        return seg

    def total_cost(self, n: int) -> float | None:
        """Sum over robots of the loop cost behind their n-th path, once all exist."""
        if any(len(h) <= n for h in self.history.values()):
            return None
        return sum(h[n].cost for h in self.history.values())


def hop_cost(seg: PathSegment, wts: WeightedTransitionSystem) -> float:
    """Distance actually travelled along a path, copies included."""
    return path_cost(seg.states, wts)
