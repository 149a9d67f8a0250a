import csv

import pytest

from inp.executor import prepare, simulate
from inp.report import (LogError, cost_violations, detect_cycle, metrics, read_events, report,
                        summary_text, write_events)
from inp.scenarios import triangle_doc
from inp.ts import load_scenario


def it(robot, n, states, t=0.0, cost=1.0):
    return {"t": t, "kind": "iteration", "robot": robot, "n": n, "cost": cost,
            "states": states, "assignment": [[1, "a"]]}


def test_cycle_found_at_first_repeat():
    events = [it(1, 0, ["a", "b"]), it(1, 1, ["b"]), it(1, 2, ["c"]), it(1, 3, ["b"])]
    s = metrics(events)
    assert s.cycle == (1, 2)


def test_no_cycle():
    events = [it(1, n, [str(n)]) for n in range(4)]
    s = metrics(events)
    assert s.cycle is None
    assert summary_text(s).startswith("no cycle detected within horizon")


def test_cycle_needs_all_robots():
    paths = {(1, 0): it(1, 0, ["a"]), (1, 1): it(1, 1, ["a"]), (2, 0): it(2, 0, ["x"])}
    assert detect_cycle(paths, [1, 2]) is None


def test_cost_violations():
    assert cost_violations([(0, 5.0), (1, 4.0), (2, 4.0)]) == []
    assert cost_violations([(0, 5.0), (1, 6.0)]) == [(0, 1)]


def test_bad_logs(tmp_path):
    with pytest.raises(LogError):
        read_events(tmp_path / "missing.jsonl")
    bad = tmp_path / "events.jsonl"
    bad.write_text('{"kind": "stop"}\nnot json\n')
    with pytest.raises(LogError, match=":2:"):
        read_events(tmp_path)


def test_report_writes_tables_and_figures(tmp_path):
    setup = prepare(load_scenario(triangle_doc()))
    res = simulate(setup, max_iterations=12)
    write_events(res.events, tmp_path / "events.jsonl")
    s, text = report(tmp_path / "events.jsonl")
    assert "repeating cycle detected: P=" in text
    for name in ("costs.csv", "consensus.csv", "meetings.csv", "summary.txt",
                 "cost.png", "consensus.png", "meetings.png"):
        assert (tmp_path / name).stat().st_size > 0
    with open(tmp_path / "costs.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [float(r["total_cost"]) for r in rows] == [c for _, c in s.cost_series]
    assert read_events(tmp_path) == res.events


def test_converged_series_is_flat_after_cycle():
    setup = prepare(load_scenario(triangle_doc()))
    s = metrics(simulate(setup, max_iterations=15).events)
    p, _ = s.cycle
    tail = [c for n, c in s.cost_series if n >= p]
    assert max(tail) == min(tail)
