"""Scenario builders: the small bundled examples and random generators for fuzzing."""
from __future__ import annotations

import math
import random

from .ts import Scenario, ScenarioError, load_scenario

# Twelve robots in twelve overlapping teams (maximum team degree 7): team id -> members.
TWELVE_TEAMS = {
    1: (1, 2, 9), 2: (3, 4, 5), 3: (3, 6), 4: (1, 3), 5: (2, 5, 6, 11), 6: (4, 12),
    7: (5, 9), 8: (4, 9, 12), 9: (6, 7, 10), 10: (7, 8, 11), 11: (8, 10, 11, 12), 12: (7, 10),
}


def _geometric_graph(rng: random.Random, n: int, size: float, k: int = 3, *, integer=False):
    pts = [(round(rng.uniform(0, size), 2), round(rng.uniform(0, size), 2)) for _ in range(n)]
    ids = [f"v{j + 1}" for j in range(n)]

    def length(a, b):
        d = math.dist(pts[a], pts[b])
        return float(max(1, round(d))) if integer else round(max(d, 0.01), 3)

    pairs = set()
    for a in range(n):
        near = sorted(range(n), key=lambda b: (math.dist(pts[a], pts[b]), b))[1:k + 1]
        pairs.update(tuple(sorted((a, b))) for b in near)
    # join components through their closest pair
    while True:
        comp = {0}
        stack = [0]
        adj = {a: set() for a in range(n)}
        for a, b in pairs:
            adj[a].add(b)
            adj[b].add(a)
        while stack:
            a = stack.pop()
            for b in adj[a] - comp:
                comp.add(b)
                stack.append(b)
        if len(comp) == n:
            break
        rest = set(range(n)) - comp
        a, b = min(((a, b) for a in comp for b in rest), key=lambda p: math.dist(pts[p[0]], pts[p[1]]))
        pairs.add((min(a, b), max(a, b)))
    locations = [{"id": ids[j], "pos": list(pts[j])} for j in range(n)]
    edges = [[ids[a], ids[b], length(a, b)] for a, b in sorted(pairs)]
    return ids, locations, edges


def random_team_structure(rng: random.Random, n_robots: int, n_teams: int, max_size: int = 3):
    """Teams over robots ``1..n_robots`` whose overlap graph is connected."""
    robots = list(range(1, n_robots + 1))
    teams = []
    for m in range(n_teams):
        size = rng.randint(1, min(max_size, n_robots))
        if teams:
            anchor = rng.choice(sorted(set().union(*teams)))
            others = rng.sample([r for r in robots if r != anchor], min(size - 1, n_robots - 1))
            teams.append({anchor, *others})
        else:
            teams.append(set(rng.sample(robots, size)))
    for r in robots:
        if not any(r in t for t in teams):
            rng.choice(teams).add(r)
    return [tuple(sorted(t)) for t in teams]


_TASKS = (
    "true",
    "[]<> {a} && []<> {b}",
    "[]<> {a} && [] ({b} -> <> {c})",
    "[]<> ({a} || {b}) && [] !{c}",
    "<> {a} && []<> {b}",
    "!{c} U {a} && []<> {b}",
    "[]<> {a} && []<> {b} && []<> {c}",
)


def random_task(rng: random.Random, plain: list, initial: str) -> str:
    a, b, c = rng.sample(plain, 3)
    if c == initial:
        c = next(x for x in plain if x not in (a, b, initial))
    return rng.choice(_TASKS).format(a=a, b=b, c=c)


def random_scenario_doc(seed: int, *, locations=(12, 24), robots=(2, 5), teams=(1, 5),
                        max_comm: int = 3, integer_weights: bool = False) -> dict:
    rng = random.Random(seed)
    n = rng.randint(*locations)
    ids, locs, edges = _geometric_graph(rng, n, size=10.0, integer=integer_weights)
    n_robots = rng.randint(*robots)
    n_teams = rng.randint(*teams)
    structure = random_team_structure(rng, n_robots, n_teams)
    pool = rng.sample(ids, min(len(ids) // 3, max(3, n_teams + 1)))
    plain = [v for v in ids if v not in pool]
    robot_docs = []
    for r in range(1, n_robots + 1):
        initial = rng.choice(ids)
        robot_docs.append({"id": r, "initial": initial, "task": random_task(rng, plain, initial)})
    team_docs = [{"id": m + 1, "members": list(t),
                  "comm_set": rng.sample(pool, rng.randint(1, min(max_comm, len(pool))))}
                 for m, t in enumerate(structure)]
    return {"format": 1, "name": f"random-{seed}", "locations": locs, "edges": edges,
            "comm_points": sorted(pool), "robots": robot_docs, "teams": team_docs,
            "alpha": 0.5, "travel_time": {"lo": 1.0, "hi": 2.0}, "seed": seed}


def random_scenario(seed: int, *, tries: int = 50, **kw) -> Scenario:
    """A random scenario whose initialization succeeds (seeds are retried deterministically)."""
    from .executor import InfeasibleError, prepare

    for attempt in range(tries):
        doc = random_scenario_doc(seed * 1000 + attempt, **kw)
        doc["seed"] = seed
        try:
            s = load_scenario(doc)
            prepare(s)
        except (ScenarioError, InfeasibleError):
            continue
        return s
    raise RuntimeError(f"no feasible random scenario for seed {seed}")


def triangle_doc() -> dict:
    """Three robots on twelve locations; teams {1,2}, {2,3}, {3,1}."""
    coords = {
        "v1": (0, 0), "v2": (2, 0), "v3": (4, 0), "v4": (6, 0),
        "v5": (0, 3), "v6": (6, 3), "v7": (0, 6), "v8": (6, 6),
        "v9": (2, 2), "v10": (3, 4), "v11": (4, 2), "v12": (3, 6),
    }
    edges = [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v1", "v5"), ("v5", "v7"), ("v4", "v6"),
             ("v6", "v8"), ("v7", "v12"), ("v12", "v8"), ("v2", "v9"), ("v9", "v10"),
             ("v10", "v11"), ("v11", "v3"), ("v5", "v9"), ("v11", "v6"), ("v10", "v12")]
    return {
        "format": 1, "name": "triangle",
        "locations": [{"id": k, "pos": list(v)} for k, v in coords.items()],
        "edges": [list(e) for e in edges],
        "comm_points": ["v9", "v10", "v11", "v12"],
        "robots": [
            {"id": 1, "initial": "v1", "task": "[]<> v5 && []<> v2"},
            {"id": 2, "initial": "v4", "task": "[]<> v3 && [] !v1"},
            {"id": 3, "initial": "v8", "task": "[]<> v7 && []<> v6 && [] (v7 -> <> v8)"},
        ],
        "teams": [
            {"id": 1, "members": [1, 2], "comm_set": ["v9", "v10"]},
            {"id": 2, "members": [2, 3], "comm_set": ["v10", "v11"]},
            {"id": 3, "members": [3, 1], "comm_set": ["v12"]},
        ],
        "sequence": [1, 2, 3],
        "alpha": 0.5, "travel_time": {"lo": 1.0, "hi": 2.0}, "seed": 7, "epsilon": 0.1,
    }


def desk_doc(seed: int = 2024) -> dict:
    """Six robots, six teams, fifty locations, at most three candidate points per team."""
    rng = random.Random(seed)
    ids, locs, edges = _geometric_graph(rng, 50, size=20.0, k=3)
    teams = [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (1, 3, 6)]
    pool = rng.sample(ids, 10)
    plain = [v for v in ids if v not in pool]
    comm = [rng.sample(pool, 3) for _ in teams]
    comm[2] = comm[2][:2]
    comm[4] = comm[4][:1]
    spots = rng.sample(plain, 14)
    tasks = [
        f"[]<> {spots[0]} && []<> {spots[1]}",
        f"[]<> {spots[2]} && [] ({spots[3]} -> <> {spots[4]})",
        f"[]<> ({spots[5]} || {spots[6]}) && [] !{spots[7]}",
        f"<> {spots[8]} && []<> {spots[9]}",
        f"[]<> {spots[10]} && []<> {spots[11]}",
        f"!{spots[12]} U {spots[13]} && []<> {spots[0]}",
    ]
    robots = [{"id": r + 1, "initial": rng.choice(plain), "task": tasks[r]} for r in range(6)]
    return {
        "format": 1, "name": "desk", "locations": locs, "edges": edges,
        "comm_points": sorted(pool), "robots": robots,
        "teams": [{"id": m + 1, "members": list(t), "comm_set": comm[m]} for m, t in enumerate(teams)],
        "alpha": 0.5, "travel_time": {"lo": 1.0, "hi": 2.0}, "seed": seed, "epsilon": 0.1,
    }


def twelve_robot_doc(seed: int = 12, n_locations: int = 300) -> dict:
    """The twelve-team structure on a large random workspace."""
    rng = random.Random(seed)
    ids, locs, edges = _geometric_graph(rng, n_locations, size=50.0, k=4)
    pool = rng.sample(ids, 30)
    plain = [v for v in ids if v not in pool]
    robots = []
    for r in range(1, 13):
        a, b, c = rng.sample(plain, 3)
        robots.append({"id": r, "initial": rng.choice(plain),
                       "task": f"[]<> {a} && [] ({b} -> <> {c})"})
    teams = [{"id": m, "members": list(members), "comm_set": rng.sample(pool, 3)}
             for m, members in TWELVE_TEAMS.items()]
    return {"format": 1, "name": "twelve", "locations": locs, "edges": edges,
            "comm_points": sorted(pool), "robots": robots, "teams": teams,
            "alpha": 0.5, "travel_time": {"lo": 1.0, "hi": 2.0}, "seed": seed}
