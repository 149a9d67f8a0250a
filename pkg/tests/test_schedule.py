import random

import pytest

from gen import random_teams
from inp.scenarios import TWELVE_TEAMS, triangle_doc
from inp.schedule import (IDLE, Schedule, build_sequence, build_team_graph, check_sequence,
                          compact_schedules, construct_schedules, verify_schedules)
from inp.ts import ScenarioError, Team, TeamStructure, load_scenario

X = IDLE


def structure(teams: dict) -> TeamStructure:
    robots = sorted({i for m in teams.values() for i in m})
    return TeamStructure(tuple(Team(m, tuple(v), ("c",)) for m, v in teams.items()), tuple(robots))


def triangle():
    return load_scenario(triangle_doc()).teams


def test_triangle_graph():
    g = build_team_graph(triangle())
    assert all(g.degree(m) == 2 for m in g.nodes)
    assert g.edges == [(1, 2), (1, 3), (2, 3)]


def test_single_team_graph():
    g = build_team_graph(structure({1: (1,)}))
    assert g.nodes == (1,) and g.degree(1) == 0


def test_twelve_team_graph():
    g = build_team_graph(structure(TWELVE_TEAMS))
    assert g.max_degree == 7


def test_disconnected_graph():
    with pytest.raises(ScenarioError):
        build_team_graph(structure({1: (1,), 2: (2,)}))


def test_sequences():
    assert build_sequence(build_team_graph(triangle())) == (1, 2, 3)
    assert build_sequence(build_team_graph(structure({1: (1,)}))) == (1,)
    path = build_team_graph(structure({1: (1, 2), 2: (2, 3), 3: (3, 4)}))
    seq = build_sequence(path)
    assert seq == (1, 2, 3) and check_sequence(path, seq) == []


def test_sequence_backtracks_through_hub():
    g = build_team_graph(structure({1: (1, 2, 3), 2: (2, 4), 3: (3, 5)}))
    seq = build_sequence(g)
    assert seq == (1, 2, 1, 3)
    assert check_sequence(g, seq) == []


def test_check_sequence_reports_problems():
    g = build_team_graph(structure({1: (1, 2), 2: (2, 3), 3: (3, 4)}))
    assert any("never appear" in p for p in check_sequence(g, (1, 2)))
    assert any("not adjacent" in p for p in check_sequence(g, (1, 3, 2)))


def test_triangle_schedules_exact():
    ts = triangle()
    g = build_team_graph(ts)
    sc = construct_schedules(ts, g, (1, 2, 3))
    assert sc[1].slots == (1, 3, X)
    assert sc[2].slots == (1, X, 2)
    assert sc[3].slots == (X, 3, 2)
    assert verify_schedules(sc, ts, g) == []


def test_seeded_robot_kept():
    ts = triangle()
    g = build_team_graph(ts)
    sc = construct_schedules(ts, g, (1, 2, 3), seeds={1: (1, 3, X)})
    assert [sc[i].slots for i in (1, 2, 3)] == [(1, 3, X), (1, X, 2), (X, 3, 2)]


def test_single_robot_schedule():
    ts = structure({1: (1,)})
    assert construct_schedules(ts, build_team_graph(ts))[1].slots == (1,)


def test_duplicate_event_reported():
    ts = triangle()
    g = build_team_graph(ts)
    sc = construct_schedules(ts, g, (1, 2, 3))
    sc[3] = Schedule(3, (3, 3, 2))
    assert any("team 3 appears 2 times" in p for p in verify_schedules(sc, ts, g))


def test_team_slot_disagreement_reported():
    ts = triangle()
    g = build_team_graph(ts)
    sc = construct_schedules(ts, g, (1, 2, 3))
    sc[2] = Schedule(2, (X, 1, 2))
    problems = verify_schedules(sc, ts, g)
    assert any("team 1: members disagree" in p for p in problems)


def test_order_and_index():
    s = Schedule(7, (2, 3, X, 4, 5))
    assert s.order == (2, 3, 4, 5)
    assert s.index_of(4) == 3


def test_random_structures_meet_length_bound():
    rng = random.Random(2)
    for _ in range(300):
        ts = random_teams(rng)
        g = build_team_graph(ts)
        sc = construct_schedules(ts, g)
        assert all(len(s.slots) == g.max_degree + 1 for s in sc.values())
        assert verify_schedules(sc, ts, g) == []


def test_deterministic():
    ts = structure(TWELVE_TEAMS)
    g = build_team_graph(ts)
    assert construct_schedules(ts, g) == construct_schedules(ts, g)


def test_twelve_team_schedules_compact_to_four_slots():
    ts = structure(TWELVE_TEAMS)
    g = build_team_graph(ts)
    sc = construct_schedules(ts, g)
    assert verify_schedules(sc, ts, g) == []
    short = compact_schedules(sc)
    assert {len(s.slots) for s in short.values()} == {4}
    assert verify_schedules(short, ts, g, length=4) == []
    assert all(short[i].order == sc[i].order for i in sc)
