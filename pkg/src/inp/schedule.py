"""Team overlap graph, team sequences and conflict-free communication schedules."""
from __future__ import annotations

from dataclasses import dataclass

from .ts import ScenarioError, TeamStructure, team_components

IDLE = "X"


class ScheduleError(RuntimeError):
    """An event could not be placed; the length bound guarantees this never happens."""


@dataclass(frozen=True)
class TeamGraph:
    nodes: tuple
    adj: dict  # team id -> sorted tuple of neighbouring team ids

    def degree(self, m: int) -> int:
        return len(self.adj[m])

    @property
    def max_degree(self) -> int:
        return max((len(v) for v in self.adj.values()), default=0)

    @property
    def edges(self) -> list:
        return [(m, n) for m in self.nodes for n in self.adj[m] if m < n]


@dataclass(frozen=True)
class Schedule:
    robot: int
    slots: tuple  # team ids or IDLE

    def index_of(self, m: int) -> int:
        """0-based position of team ``m``'s event."""
        return self.slots.index(m)

    @property
    def order(self) -> tuple:
        """Team events in the order the robot attends them."""
        return tuple(x for x in self.slots if x != IDLE)

    def __str__(self):
        return f"robot {self.robot}: [{', '.join(str(x) for x in self.slots)}]^w"


def build_team_graph(teams: TeamStructure) -> TeamGraph:
    comps = team_components(teams.teams)
    if len(comps) > 1:
        raise ScenarioError(f"team graph is disconnected; components: {comps}")
    members = {t.id: set(t.members) for t in teams.teams}
    nodes = tuple(sorted(members))
    adj = {m: tuple(n for n in nodes if n != m and members[m] & members[n]) for m in nodes}
    return TeamGraph(nodes, adj)


def build_sequence(g: TeamGraph, start: int | None = None) -> tuple:
    """Depth-first walk listing every team; backtracking steps are written out so
    consecutive entries stay adjacent.  The walk is cut after the last new team."""
    start = g.nodes[0] if start is None else start
    walk = [start]
    seen = {start}
    stack = [start]
    while stack:
        m = stack[-1]
        nxt = next((n for n in g.adj[m] if n not in seen), None)
        if nxt is None:
            stack.pop()
            if stack:
                walk.append(stack[-1])
            continue
        seen.add(nxt)
        stack.append(nxt)
        walk.append(nxt)
    if len(seen) != len(g.nodes):
        raise ScenarioError("team graph is disconnected")
    last_new = max(walk.index(m) for m in g.nodes)
    return tuple(walk[:last_new + 1])


def check_sequence(g: TeamGraph, seq) -> list:
    problems = []
    missing = set(g.nodes) - set(seq)
    if missing:
        problems.append(f"teams {sorted(missing)} never appear")
    for a, b in zip(seq, seq[1:]):
        if b not in g.adj[a]:
            problems.append(f"consecutive teams {a} and {b} are not adjacent")
    return problems


def construct_schedules(teams: TeamStructure, g: TeamGraph, seq=None, *,
                        length: int | None = None, seeds: dict | None = None) -> dict:
    """Build one schedule per robot by walking ``seq`` team by team.

    Members of a team visited for the first time construct their schedules in
    ascending robot id.  An event whose team already has a fixed slot (some
    constructed member placed it) copies that slot; otherwise it takes the
    lowest free slot that no already-fixed event of a neighbouring team
    occupies.  ``seeds`` maps robot ids to schedules fixed in advance.
    """
    seq = build_sequence(g) if seq is None else tuple(seq)
    problems = check_sequence(g, seq)
    if problems:
        raise ValueError("invalid team sequence: " + "; ".join(problems))
    ell = g.max_degree + 1 if length is None else length
    slot_of = {}  # team id -> fixed slot
    built = {}
    for i, slots in (seeds or {}).items():
        if len(slots) != ell:
            raise ValueError(f"seed for robot {i} has length {len(slots)}, expected {ell}")
        built[i] = Schedule(i, tuple(slots))
        for k, h in enumerate(slots):
            if h != IDLE:
                slot_of[h] = k
    done_teams = set()
    for m in seq:
        if m in done_teams:
            continue
        done_teams.add(m)
        for i in teams.team(m).members:
            if i in built:
                continue
            mine = teams.teams_of(i)
            slots = [IDLE] * ell
            fresh = []
            for h in mine:
                if h in slot_of:
                    k = slot_of[h]
                    if slots[k] != IDLE:
                        raise ScheduleError(f"robot {i}: teams {slots[k]} and {h} share slot {k}")
                    slots[k] = h
                else:
                    fresh.append(h)
            for h in fresh:
                taken = {slot_of[n] for n in g.adj[h] if n in slot_of}
                k = next((k for k in range(ell) if slots[k] == IDLE and k not in taken), None)
                if k is None:
                    raise ScheduleError(f"robot {i}: no free slot for team {h} within length {ell}")
                slots[k] = h
                slot_of[h] = k
            built[i] = Schedule(i, tuple(slots))
    return {i: built[i] for i in sorted(built)}


def verify_schedules(schedules: dict, teams: TeamStructure, g: TeamGraph,
                     length: int | None = None) -> list:
    """Human-readable violations; empty when every schedule rule holds."""
    ell = g.max_degree + 1 if length is None else length
    out = []
    for i in teams.robots:
        if i not in schedules:
            out.append(f"robot {i}: no schedule")
            continue
        slots = schedules[i].slots
        mine = set(teams.teams_of(i))
        if len(slots) != ell:
            out.append(f"robot {i}: length {len(slots)} != {ell}")
        events = [x for x in slots if x != IDLE]
        for h in sorted(mine):
            c = events.count(h)
            if c != 1:
                out.append(f"robot {i}: team {h} appears {c} times")
        for h in sorted(set(events) - mine, key=str):
            out.append(f"robot {i}: team {h} is not one of its teams")
        if slots.count(IDLE) != len(slots) - len(events):
            out.append(f"robot {i}: unexpected entries")
    for t in teams.teams:
        where = {}
        for i in t.members:
            if i in schedules and t.id in schedules[i].slots:
                where[i] = schedules[i].slots.index(t.id)
        if len(set(where.values())) > 1:
            out.append(f"team {t.id}: members disagree on its slot {where}")
    # neighbouring teams must never share a slot, as seen by any pair of teammates
    for i in teams.robots:
        if i not in schedules:
            continue
        for j in (i,) + teams.teammates(i):
            if j not in schedules or j < i:
                continue
            for a, x in enumerate(schedules[i].slots):
                y = schedules[j].slots[a] if a < len(schedules[j].slots) else IDLE
                if x == IDLE or y == IDLE:
                    continue
                if x != y and y in g.adj.get(x, ()):
                    out.append(f"robots {i},{j}: neighbouring teams {x} and {y} share slot {a}")
    return out


def compact_schedules(schedules: dict) -> dict:
    """Drop slots that are idle for every robot; event order and slot sharing are kept."""
    width = max(len(sc.slots) for sc in schedules.values())
    used = [k for k in range(width) if any(sc.slots[k] != IDLE for sc in schedules.values())]
    return {i: Schedule(i, tuple(sc.slots[k] for k in used)) for i, sc in schedules.items()}
