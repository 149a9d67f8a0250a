"""Run metrics, delimited outputs and figures."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path


class LogError(ValueError):
    """An event log is missing or cannot be parsed."""


@dataclass
class Summary:
    robots: list
    cost_series: list  # [(n, total J)] for iterations every robot reached
    cycle: tuple | None  # (P, C)
    meetings: dict  # team -> [times]
    sync: dict  # n -> witness time
    spread: list  # [(t, max - min of consensus values)]
    waiting: dict  # robot -> total waiting time
    stop: str = ""
    deadlock: dict | None = None
    paths: dict = field(default_factory=dict)  # (robot, n) -> iteration record

    @property
    def final_cost(self):
        return self.cost_series[-1][1] if self.cost_series else None

    def gaps(self, m) -> list:
        ts = self.meetings.get(m, [])
        return [b - a for a, b in zip(ts, ts[1:])]


def detect_cycle(paths: dict, robots) -> tuple | None:
    """First recurrence of the joint (assignment, path) state across iterations.

    Returns ``(P, C)`` with iteration ``C + 1`` identical to iteration ``P``.
    """
    seen = {}
    n = 0
    while all((i, n) in paths for i in robots):
        key = tuple((tuple(paths[i, n]["states"]), tuple(map(tuple, paths[i, n]["assignment"])))
                    for i in robots)
        if key in seen:
            return seen[key], n - 1
        seen[key] = n
        n += 1
    return None


def metrics(events) -> Summary:
    paths = {}
    robots = set()
    meetings = {}
    spread = []
    waiting = {}
    wait_start = {}
    starts = {}
    stop = ""
    deadlock = None
    for e in events:
        kind = e.get("kind")
        if kind == "iteration":
            i, n = e["robot"], e["n"]
            robots.add(i)
            paths[i, n] = e
            starts[i, n] = e["t"]
        elif kind == "wait":
            wait_start[e["robot"]] = e["t"]
        elif kind == "meet":
            meetings.setdefault(e["team"], []).append(e["t"])
            spread.append((e["t"], e["spread"]))
            for i in e["participants"]:
                waiting[i] = waiting.get(i, 0.0) + e["t"] - wait_start.pop(i, e["t"])
        elif kind == "stop":
            stop = e["reason"]
        elif kind == "deadlock":
            stop = "deadlock"
            deadlock = e
    robots = sorted(robots)
    series = []
    n = 0
    while robots and all((i, n) in paths for i in robots):
        series.append((n, sum(paths[i, n]["cost"] for i in robots)))
        n += 1
    sync = {}
    for n, _ in series:
        latest_start = max(starts[i, n] for i in robots)
        ends = [starts[i, n + 1] for i in robots if (i, n + 1) in starts]
        if not ends or latest_start < min(ends):
            sync[n] = latest_start
    return Summary(robots, series, detect_cycle(paths, robots), meetings, sync, spread,
                   {i: waiting.get(i, 0.0) for i in robots}, stop, deadlock, paths)


def cost_violations(series, tol: float = 1e-9) -> list:
    """Iterations whose total cost rose above the previous one."""
    return [(a[0], b[0]) for a, b in zip(series, series[1:]) if b[1] > a[1] + tol]


def summary_text(s: Summary) -> str:
    lines = []
    if s.cycle is not None:
        lines.append(f"repeating cycle detected: P={s.cycle[0]}, C={s.cycle[1]}")
    else:
        lines.append("no cycle detected within horizon")
    if s.final_cost is not None:
        lines.append(f"final total cost: {s.final_cost:.6g}")
    lines.append(f"iterations completed by all robots: {len(s.cost_series)}")
    for m in sorted(s.meetings):
        gaps = s.gaps(m)
        mean = sum(gaps) / len(gaps) if gaps else float("nan")
        lines.append(f"team {m}: {len(s.meetings[m])} meetings, mean gap {mean:.4g}")
    final = s.spread[-1][1] if s.spread else 0.0
    lines.append(f"consensus error at end: {final:.3e}")
    for i in s.robots:
        lines.append(f"robot {i}: waited {s.waiting[i]:.4g}")
    if s.stop:
        lines.append(f"stopped: {s.stop}")
    return "\n".join(lines) + "\n"


def read_events(path) -> list:
    path = Path(path)
    if path.is_dir():
        path = path / "events.jsonl"
    if not path.exists():
        raise LogError(f"no event log at {path}")
    events = []
    with path.open(encoding="utf-8") as fh:
        for k, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                events.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise LogError(f"{path}:{k}: {exc}") from None
    return events


def write_events(events, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in events:
            fh.write(json.dumps(e, sort_keys=True) + "\n")


def write_tables(s: Summary, out: Path) -> None:
    with open(out / "costs.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "total_cost"])
        for n, c in s.cost_series:
            w.writerow([n, repr(c)])
    with open(out / "consensus.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["time", "spread"])
        for t, v in s.spread:
            w.writerow([repr(t), repr(v)])
    with open(out / "meetings.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["team", "time"])
        for m in sorted(s.meetings):
            for t in s.meetings[m]:
                w.writerow([m, repr(t)])


def plot(s: Summary, out: Path) -> list:
    """Cost, consensus and meeting-time figures as PNG files; returns their paths."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    written = []

    fig, ax = plt.subplots(figsize=(5, 3.2))
    if s.cost_series:
        ns, cs = zip(*s.cost_series)
        ax.plot(ns, cs, marker="o", ms=3)
    ax.set_xlabel("iteration n")
    ax.set_ylabel("total suffix cost")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / "cost.png", dpi=120)
    plt.close(fig)
    written.append(out / "cost.png")

    fig, ax = plt.subplots(figsize=(5, 3.2))
    if s.spread:
        ts, vs = zip(*s.spread)
        ax.semilogy(ts, [max(v, 1e-17) for v in vs], drawstyle="steps-post")
    ax.set_xlabel("time")
    ax.set_ylabel("max |v_i - v_j|")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / "consensus.png", dpi=120)
    plt.close(fig)
    written.append(out / "consensus.png")

    fig, ax = plt.subplots(figsize=(5, 0.6 + 0.35 * max(1, len(s.meetings))))
    for row, m in enumerate(sorted(s.meetings)):
        ax.scatter(s.meetings[m], [row] * len(s.meetings[m]), s=8)
    ax.set_yticks(range(len(s.meetings)))
    ax.set_yticklabels([f"T{m}" for m in sorted(s.meetings)])
    ax.set_xlabel("time")
    fig.tight_layout()
    fig.savefig(out / "meetings.png", dpi=120)
    plt.close(fig)
    written.append(out / "meetings.png")
    return written


def report(log_path, out: Path | None = None, *, figures: bool = True) -> tuple:
    """Summarise an event log; tables and figures go next to it unless ``out`` says otherwise."""
    events = read_events(log_path)
    s = metrics(events)
    base = Path(log_path)
    out = Path(out) if out is not None else (base if base.is_dir() else base.parent)
    out.mkdir(parents=True, exist_ok=True)
    write_tables(s, out)
    text = summary_text(s)
    (out / "summary.txt").write_text(text, encoding="utf-8")
    if figures:
        plot(s, out)
    return s, text
