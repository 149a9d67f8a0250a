"""Random inputs shared by the property tests."""
import random

from inp.ltl.syntax import (FALSE, TRUE, And, Always, Atom, Eventually, Next, Not, Or, Until)
from inp.ts import Team, TeamStructure, team_components

PROPS = ("p", "q", "r")


def random_formula(rng: random.Random, depth: int, props=PROPS, *, allow_next=True):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([Atom(x) for x in props] + [TRUE, FALSE])
    ops = ["!", "&", "|", "U", "F", "G"] + (["X"] if allow_next else [])
    op = rng.choice(ops)
    if op == "!":
        return Not(random_formula(rng, depth - 1, props, allow_next=allow_next))
    if op == "X":
        return Next(random_formula(rng, depth - 1, props, allow_next=allow_next))
    if op == "F":
        return Eventually(random_formula(rng, depth - 1, props, allow_next=allow_next))
    if op == "G":
        return Always(random_formula(rng, depth - 1, props, allow_next=allow_next))
    a = random_formula(rng, depth - 1, props, allow_next=allow_next)
    b = random_formula(rng, depth - 1, props, allow_next=allow_next)
    return {"&": And, "|": Or, "U": Until}[op](a, b)


def random_teams(rng: random.Random, max_robots=10, max_teams=8, max_size=4) -> TeamStructure:
    """A connected team structure drawn by rejection."""
    while True:
        nr = rng.randint(1, max_robots)
        nt = rng.randint(1, max_teams)
        teams = []
        for m in range(1, nt + 1):
            k = rng.randint(1, min(max_size, nr))
            teams.append(Team(m, tuple(sorted(rng.sample(range(1, nr + 1), k))), ("c",)))
        used = sorted({i for t in teams for i in t.members})
        if len(team_components(teams)) == 1:
            return TeamStructure(tuple(teams), tuple(used))


def small_doc(edges, *, robots, teams, comm_points, locations=None, **extra) -> dict:
    """Scenario document with unit-spaced locations ``v1..`` unless given."""
    if locations is None:
        names = sorted({x for e in edges for x in e[:2]} | set(comm_points),
                       key=lambda v: int(v[1:]))
        locations = [{"id": v, "pos": [float(k), 0.0]} for k, v in enumerate(names)]
    doc = {"format": 1, "locations": locations, "edges": [list(e) for e in edges],
           "comm_points": list(comm_points), "robots": robots, "teams": teams,
           "alpha": 0.5, "travel_time": {"lo": 1.0, "hi": 2.0}, "seed": 1}
    doc.update(extra)
    return doc


def random_wts(rng: random.Random, n: int, *, extra_edges: int = 2, max_weight: int = 9):
    """Connected undirected graph on ``l0..`` with integer weights and free self-loops."""
    from inp.ts import WeightedTransitionSystem

    out = [{k: 0.0} for k in range(n)]
    pairs = [(rng.randrange(k), k) for k in range(1, n)]
    pairs += [tuple(rng.sample(range(n), 2)) for _ in range(extra_edges) if n > 1]
    for a, b in pairs:
        w = float(rng.randint(1, max_weight))
        out[a][b] = out[b][a] = w
    states = tuple(f"l{k}" for k in range(n))
    return WeightedTransitionSystem(1, states, rng.randrange(n),
                                    tuple(tuple(sorted(o.items())) for o in out))


def min_cycle_brute(p, anchor):
    """Cheapest simple cycle through ``anchor`` by exhaustive depth-first enumeration."""
    best = None

    def dfs(s, cost, seen):
        nonlocal best
        for t, w in p.successors(s):
            if best is not None and cost + w >= best:
                continue  # weights are nonnegative, so this branch cannot improve
            if t == anchor:
                if best is None or cost + w < best:
                    best = cost + w
            elif t not in seen:
                seen.add(t)
                dfs(t, cost + w, seen)
                seen.discard(t)

    dfs(anchor, 0.0, {anchor})
    return best
