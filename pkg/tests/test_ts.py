import copy
import json

import pytest

from gen import small_doc
from inp.product import PrefixSuffixPlan
from inp.scenarios import triangle_doc
from inp.ts import ScenarioError, build_wts, load_scenario, path_cost, plan_cost, serialize


def single():
    return small_doc([("v1", "v2", 5.0)], comm_points=["v2"],
                     robots=[{"id": 1, "initial": "v1"}],
                     teams=[{"id": 1, "members": [1], "comm_set": ["v2"]}])


def test_triangle_structure():
    s = load_scenario(triangle_doc())
    assert s.teams.teams_of(1) == (1, 3)
    assert s.teams.teammates(2) == (1, 3)
    assert s.teams.team(1).comm_set == ("v9", "v10")
    assert s.teams.team(2).comm_set == ("v10", "v11")
    assert s.teams.team(3).comm_set == ("v12",)


def test_degenerate_single_robot():
    s = load_scenario(single())
    assert len(s.robots) == 1 and s.teams.team_ids == (1,)


def test_disconnected_teams_named():
    doc = small_doc([("v1", "v2", 1.0)], comm_points=["v2"],
                    robots=[{"id": 1, "initial": "v1"}, {"id": 2, "initial": "v1"}],
                    teams=[{"id": 1, "members": [1], "comm_set": ["v2"]},
                           {"id": 2, "members": [2], "comm_set": ["v2"]}])
    with pytest.raises(ScenarioError, match=r"components: \[\[1\], \[2\]\]"):
        load_scenario(doc)


@pytest.mark.parametrize("mutate, message", [
    (lambda d: d["edges"].append(["v1", "v9", 1.0]), "unknown location"),
    (lambda d: d["edges"].__setitem__(0, ["v1", "v2", 0.0]), "positive length"),
    (lambda d: d["robots"][0].__setitem__("initial", "v7"), "unknown initial"),
    (lambda d: d["robots"][0].__setitem__("task", "[] X v1"), "bad task"),
    (lambda d: d["robots"][0].__setitem__("task", "<> v8"), "unknown locations"),
    (lambda d: d["teams"][0].__setitem__("comm_set", ["v1"]), "not communication points"),
    (lambda d: d["teams"][0].__setitem__("members", [1, 4]), "unknown members"),
    (lambda d: d.__setitem__("alpha", 2.0), "alpha"),
    (lambda d: d["locations"].append({"id": "U", "pos": [0, 0]}), "proposition name"),
    (lambda d: d["locations"].append({"id": "v1", "pos": [0, 0]}), "unique"),
    (lambda d: d.__setitem__("format", 7), "format"),
])
def test_invalid_documents(mutate, message):
    doc = copy.deepcopy(single())
    mutate(doc)
    with pytest.raises(ScenarioError, match=message):
        load_scenario(doc)


def test_bad_json():
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario("{")


def test_round_trip():
    s = load_scenario(triangle_doc())
    assert load_scenario(json.dumps(serialize(s))) == s


def test_two_location_wts():
    wts = build_wts(load_scenario(single()), 1)
    assert len(wts) == 2 and wts.initial == 0
    assert wts.weight(0, 1) == wts.weight(1, 0) == 5.0
    assert wts.weight(0, 0) == wts.weight(1, 1) == 0.0
    assert sum(len(o) for o in wts.succ) == 4


def test_triangle_wts_follows_edges():
    s = load_scenario(triangle_doc())
    wts = build_wts(s, 2)
    assert len(wts) == 12 and wts.states[wts.initial] == "v4"
    pairs = {frozenset(e[:2]) for e in s.workspace.edges}
    for a in range(12):
        for b, _ in wts.succ[a]:
            assert a == b or frozenset((wts.states[a], wts.states[b])) in pairs


def test_blocked_edge_is_robot_specific():
    doc = single()
    doc["robots"].append({"id": 2, "initial": "v1", "blocked": [["v1", "v2"]]})
    doc["teams"][0]["members"] = [1, 2]
    s = load_scenario(doc)
    assert build_wts(s, 1).has_transition(0, 1)
    assert not build_wts(s, 2).has_transition(0, 1)


def test_path_cost():
    wts = build_wts(load_scenario(single()), 1)
    assert path_cost([0], wts) == 0
    assert path_cost([], wts) == 0
    assert path_cost([0, 1], wts) == 5
    with pytest.raises(ValueError):
        path_cost([0, 1, 1, 0, 2], wts)


def test_path_cost_matches_naive_sum():
    s = load_scenario(triangle_doc())
    wts = build_wts(s, 1)
    lengths = {frozenset(e[:2]): e[2] for e in s.workspace.edges}
    route = ["v1", "v2", "v9", "v10", "v12", "v7", "v5", "v1"]
    expect = 0.0
    for a, b in zip(route, route[1:]):
        expect += lengths[frozenset((a, b))]
    assert path_cost([wts.index(v) for v in route], wts) == pytest.approx(expect)


@pytest.mark.parametrize("alpha, expect", [(1.0, 4.0), (0.0, 6.0), (0.5, 5.0)])
def test_plan_cost(alpha, expect):
    plan = PrefixSuffixPlan((), ((0, 0),), 4.0, 6.0)
    assert plan_cost(plan, alpha) == expect
