"""Workspace, per-robot weighted transition systems, teams and scenario files."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .ltl.syntax import RESERVED, LtlSyntaxError, NextInTaskError, atoms, parse

FORMAT_VERSION = 1


class ScenarioError(ValueError):
    """The scenario document is malformed or violates a model invariant."""


@dataclass(frozen=True)
class Location:
    id: str
    pos: tuple


@dataclass(frozen=True)
class Workspace:
    locations: tuple
    comm_points: frozenset
    edges: tuple  # (u, v, length), undirected

    def __post_init__(self):
        ids = [loc.id for loc in self.locations]
        if len(set(ids)) != len(ids):
            raise ScenarioError("location ids must be unique")
        known = set(ids)
        if not self.comm_points <= known:
            raise ScenarioError(f"unknown communication points: {sorted(self.comm_points - known)}")
        for u, v, length in self.edges:
            if u not in known or v not in known:
                raise ScenarioError(f"edge {u}-{v} refers to an unknown location")
            if not length > 0:
                raise ScenarioError(f"edge {u}-{v} must have positive length, got {length}")

    @property
    def ids(self) -> tuple:
        return tuple(loc.id for loc in self.locations)

    def index(self, loc_id: str) -> int:
        return self.ids.index(loc_id)


@dataclass(frozen=True)
class Robot:
    id: int
    initial: str
    task: str = "true"
    blocked: frozenset = frozenset()  # undirected edges this robot cannot use


@dataclass(frozen=True)
class Team:
    id: int
    members: tuple
    comm_set: tuple  # candidate points, in preference order


@dataclass(frozen=True)
class TeamStructure:
    teams: tuple
    robots: tuple  # robot ids

    def team(self, m: int) -> Team:
        for t in self.teams:
            if t.id == m:
                return t
        raise KeyError(m)

    @property
    def team_ids(self) -> tuple:
        return tuple(t.id for t in self.teams)

    def teams_of(self, i: int) -> tuple:
        return tuple(t.id for t in self.teams if i in t.members)

    def teammates(self, i: int) -> tuple:
        mates = set()
        for t in self.teams:
            if i in t.members:
                mates.update(t.members)
        mates.discard(i)
        return tuple(sorted(mates))


@dataclass(frozen=True)
class Scenario:
    workspace: Workspace
    robots: tuple
    teams: TeamStructure
    alpha: float = 0.5
    travel_time: tuple = (1.0, 2.0)
    seed: int = 0
    epsilon: float = 0.0
    sequence: tuple | None = None
    max_candidates: int | None = None
    name: str = ""

    def robot(self, i: int) -> Robot:
        for r in self.robots:
            if r.id == i:
                return r
        raise KeyError(i)

    def task(self, i: int):
        return parse(self.robot(i).task, task=True)


@dataclass(frozen=True)
class WeightedTransitionSystem:
    robot: int
    states: tuple  # location ids; state k labels location states[k]
    initial: int
    succ: tuple  # succ[k] = ((dst, weight), ...) sorted by dst
    _weights: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_weights",
                           {(k, d): w for k, out in enumerate(self.succ) for d, w in out})

    def weight(self, a: int, b: int) -> float:
        try:
            return self._weights[(a, b)]
        except KeyError:
            raise ValueError(f"no transition {a} -> {b}") from None

    def has_transition(self, a: int, b: int) -> bool:
        return (a, b) in self._weights

    def label(self, k: int) -> str:
        """The proposition that holds at state ``k``: the location id."""
        return self.states[k]

    def index(self, loc_id: str) -> int:
        return self.states.index(loc_id)

    def __len__(self):
        return len(self.states)


def build_wts(s: Scenario, i: int) -> WeightedTransitionSystem:
    ws = s.workspace
    robot = s.robot(i)
    ids = ws.ids
    pos = {v: k for k, v in enumerate(ids)}
    out = [{k: 0.0} for k in range(len(ids))]  # staying put is free
    for u, v, length in ws.edges:
        if frozenset((u, v)) in robot.blocked:
            continue
        a, b = pos[u], pos[v]
        if a == b:
            continue
        for x, y in ((a, b), (b, a)):
            out[x][y] = min(out[x].get(y, math.inf), float(length))
    succ = tuple(tuple(sorted(o.items())) for o in out)
    return WeightedTransitionSystem(i, ids, pos[robot.initial], succ)


def path_cost(path, wts: WeightedTransitionSystem) -> float:
    """Total weight of consecutive hops along ``path`` (state indices)."""
    total = 0.0
    for a, b in zip(path, path[1:]):
        total += wts.weight(a, b)
    return total


def plan_cost(plan, alpha: float) -> float:
    """Weighted combination of prefix and suffix cost of a prefix-suffix plan."""
    return alpha * plan.prefix_cost + (1.0 - alpha) * plan.suffix_cost


# loading --------------------------------------------------------------------

def _require(doc, key, kind=None):
    if key not in doc:
        raise ScenarioError(f"missing key {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ScenarioError(f"{key!r} must be {kind.__name__ if isinstance(kind, type) else kind}")
    return value


def team_components(teams) -> list:
    """Connected components of the team overlap graph, as sorted lists of team ids."""
    ids = [t.id for t in teams]
    members = {t.id: set(t.members) for t in teams}
    seen, comps = set(), []
    for start in ids:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            m = stack.pop()
            comp.append(m)
            for n in ids:
                if n not in seen and members[m] & members[n]:
                    seen.add(n)
                    stack.append(n)
        comps.append(sorted(comp))
    return comps


def load_scenario(document) -> Scenario:
    """Build a validated :class:`Scenario` from JSON text, a path or a parsed dict."""
    if isinstance(document, Path):
        document = document.read_text(encoding="utf-8")
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ScenarioError(f"invalid JSON: {exc}") from None
    if not isinstance(document, dict):
        raise ScenarioError("scenario must be a JSON object")
    doc = document
    if doc.get("format", FORMAT_VERSION) != FORMAT_VERSION:
        raise ScenarioError(f"unsupported format {doc.get('format')!r}")

    locations = []
    for entry in _require(doc, "locations", list):
        loc_id = str(_require(entry, "id"))
        if loc_id in RESERVED or not loc_id.replace("_", "a").isalnum() or not loc_id[0].isalpha():
            raise ScenarioError(f"location id {loc_id!r} is not a valid proposition name")
        pos = tuple(float(x) for x in entry.get("pos", (0.0, 0.0)))
        locations.append(Location(loc_id, pos))
    coords = {loc.id: loc.pos for loc in locations}
    edges = []
    for entry in _require(doc, "edges", list):
        if len(entry) not in (2, 3):
            raise ScenarioError(f"edge {entry!r} must be [u, v] or [u, v, length]")
        u, v = str(entry[0]), str(entry[1])
        if u not in coords or v not in coords:
            raise ScenarioError(f"edge {u}-{v} refers to an unknown location")
        length = float(entry[2]) if len(entry) == 3 else math.dist(coords[u], coords[v])
        edges.append((u, v, length))
    ws = Workspace(tuple(locations), frozenset(map(str, _require(doc, "comm_points", list))),
                   tuple(edges))

    robots = []
    for entry in _require(doc, "robots", list):
        rid = int(_require(entry, "id"))
        initial = str(_require(entry, "initial"))
        if initial not in coords:
            raise ScenarioError(f"robot {rid}: unknown initial location {initial!r}")
        task = str(entry.get("task", "true"))
        try:
            f = parse(task, task=True)
        except (LtlSyntaxError, NextInTaskError) as exc:
            raise ScenarioError(f"robot {rid}: bad task: {exc}") from None
        unknown = atoms(f) - set(coords)
        if unknown:
            raise ScenarioError(f"robot {rid}: task mentions unknown locations {sorted(unknown)}")
        blocked = frozenset(frozenset(map(str, e)) for e in entry.get("blocked", ()))
        robots.append(Robot(rid, initial, task, blocked))
    robot_ids = [r.id for r in robots]
    if len(set(robot_ids)) != len(robot_ids):
        raise ScenarioError("robot ids must be unique")
    if not robots:
        raise ScenarioError("scenario has no robots")

    teams = []
    for k, entry in enumerate(_require(doc, "teams", list), start=1):
        tid = int(entry.get("id", k))
        members = tuple(sorted(int(x) for x in _require(entry, "members", list)))
        comm_set = tuple(str(x) for x in _require(entry, "comm_set", list))
        if not members:
            raise ScenarioError(f"team {tid} has no members")
        if not set(members) <= set(robot_ids):
            raise ScenarioError(f"team {tid} has unknown members {sorted(set(members) - set(robot_ids))}")
        if not comm_set:
            raise ScenarioError(f"team {tid} has an empty communication set")
        if not set(comm_set) <= ws.comm_points:
            raise ScenarioError(f"team {tid}: {sorted(set(comm_set) - ws.comm_points)} are not communication points")
        teams.append(Team(tid, members, comm_set))
    if len({t.id for t in teams}) != len(teams):
        raise ScenarioError("team ids must be unique")
    if not teams:
        raise ScenarioError("scenario has no teams")
    lonely = set(robot_ids) - {i for t in teams for i in t.members}
    if lonely:
        raise ScenarioError(f"robots {sorted(lonely)} belong to no team")
    comps = team_components(teams)
    if len(comps) > 1:
        raise ScenarioError(f"team graph is disconnected; components: {comps}")

    alpha = float(doc.get("alpha", 0.5))
    if not 0.0 <= alpha <= 1.0:
        raise ScenarioError(f"alpha must lie in [0, 1], got {alpha}")
    tt = doc.get("travel_time", {"lo": 1.0, "hi": 2.0})
    lo, hi = float(tt.get("lo", 1.0)), float(tt.get("hi", 2.0))
    if not 0.0 < lo <= hi:
        raise ScenarioError(f"travel_time needs 0 < lo <= hi, got [{lo}, {hi}]")
    sequence = doc.get("sequence")
    if sequence is not None:
        sequence = tuple(int(x) for x in sequence)
        if not set(sequence) <= {t.id for t in teams}:
            raise ScenarioError("sequence mentions unknown teams")
    max_candidates = doc.get("max_candidates")
    if max_candidates is not None:
        max_candidates = int(max_candidates)
        if max_candidates < 1:
            raise ScenarioError("max_candidates must be at least 1")
    return Scenario(ws, tuple(sorted(robots, key=lambda r: r.id)),
                    TeamStructure(tuple(sorted(teams, key=lambda t: t.id)), tuple(sorted(robot_ids))),
                    alpha, (lo, hi), int(doc.get("seed", 0)), float(doc.get("epsilon", 0.0)),
                    sequence, max_candidates, str(doc.get("name", "")))


def serialize(s: Scenario) -> dict:
    """Inverse of :func:`load_scenario`; edge lengths are written explicitly."""
    doc = {
        "format": FORMAT_VERSION,
        "name": s.name,
        "locations": [{"id": loc.id, "pos": list(loc.pos)} for loc in s.workspace.locations],
        "edges": [[u, v, length] for u, v, length in s.workspace.edges],
        "comm_points": sorted(s.workspace.comm_points),
        "robots": [{"id": r.id, "initial": r.initial, "task": r.task,
                    **({"blocked": sorted(sorted(e) for e in r.blocked)} if r.blocked else {})}
                   for r in s.robots],
        "teams": [{"id": t.id, "members": list(t.members), "comm_set": list(t.comm_set)}
                  for t in s.teams.teams],
        "alpha": s.alpha,
        "travel_time": {"lo": s.travel_time[0], "hi": s.travel_time[1]},
        "seed": s.seed,
        "epsilon": s.epsilon,
    }
    if s.sequence is not None:
        doc["sequence"] = list(s.sequence)
    if s.max_candidates is not None:
        doc["max_candidates"] = s.max_candidates
    return doc
