"""Product of a weighted transition system with a Buchi automaton, and lasso search."""
from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

from .graph import strongly_connected_components
from .ltl.buchi import Nba
from .ts import WeightedTransitionSystem


class ProductAutomaton:
    """Lazily explored product; states are ``(wts_state, nba_state)`` pairs.

    ``labels[k]`` is the letter read at wTS state ``k``; by default it is just
    the location id.  A move ``(k, b) -> (k2, b2)`` needs a wTS transition
    ``k -> k2`` and an automaton edge ``b -> b2`` whose guard holds on
    ``labels[k]``.
    """

    def __init__(self, wts: WeightedTransitionSystem, nba: Nba, labels=None):
        self.wts = wts
        self.nba = nba
        if labels is None:
            labels = tuple(frozenset({wts.label(k)}) for k in range(len(wts)))
        self.labels = tuple(labels)
        self._succ = {}

    @property
    def initial(self) -> list:
        return [(self.wts.initial, b) for b in sorted(self.nba.initial)]

    def is_accepting(self, state) -> bool:
        return state[1] in self.nba.accepting

    def successors(self, state) -> list:
        """``[(next_state, weight), ...]`` in ascending state order."""
        hit = self._succ.get(state)
        if hit is None:
            k, b = state
            nexts = self.nba.step(b, self.labels[k])
            hit = [((k2, b2), w) for k2, w in self.wts.succ[k] for b2 in nexts]
            self._succ[state] = hit
        return hit

    def weight(self, a, b) -> float:
        for s, w in self.successors(a):
            if s == b:
                return w
        raise ValueError(f"no product transition {a} -> {b}")

    def reachable(self) -> list:
        """Reachable states in breadth-first order from the initial states."""
        order = list(self.initial)
        seen = set(order)
        queue = deque(order)
        while queue:
            s = queue.popleft()
            for t, _ in self.successors(s):
                if t not in seen:
                    seen.add(t)
                    order.append(t)
                    queue.append(t)
        return order


def build_product(wts: WeightedTransitionSystem, nba: Nba, labels=None) -> ProductAutomaton:
    return ProductAutomaton(wts, nba, labels)


@dataclass(frozen=True)
class PrefixSuffixPlan:
    """``prefix`` runs from an initial state to the anchor (inclusive);
    ``suffix`` starts at the anchor and its last state steps back to it."""

    prefix: tuple
    suffix: tuple
    prefix_cost: float
    suffix_cost: float

    @property
    def anchor(self):
        return self.suffix[0]

    @property
    def prefix_path(self) -> tuple:
        return tuple(k for k, _ in self.prefix)

    @property
    def suffix_path(self) -> tuple:
        return tuple(k for k, _ in self.suffix)


@dataclass(frozen=True)
class SuffixLoop:
    states: tuple  # starts at the anchor, closes back to it
    cost: float

    @property
    def path(self) -> tuple:
        return tuple(k for k, _ in self.states)


def run_cost(p: ProductAutomaton, states, closed: bool = False) -> float:
    """Weight of a product path; ``closed`` adds the hop from the last state back to the first."""
    total = 0.0
    seq = list(states) + ([states[0]] if closed else [])
    for a, b in zip(seq, seq[1:]):
        total += p.weight(a, b)
    return total


def _bfs_path(p: ProductAutomaton, sources, target, parents=None):
    """Fewest-hop path from any of ``sources`` to ``target``; sources are tried in order."""
    parent = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        s = queue.popleft()
        if s == target:
            break
        for t, _ in p.successors(s):
            if t not in parent:
                parent[t] = s
                queue.append(t)
    if target not in parent:
        return None
    path = [target]
    while parent[path[-1]] is not None:
        path.append(parent[path[-1]])
    return path[::-1]


def find_feasible_plan(p: ProductAutomaton) -> PrefixSuffixPlan | None:
    """Some accepting lasso, or ``None`` when the language of the product is empty.

    The anchor is the first accepting state, in breadth-first order, that lies
    on a cycle; prefix and loop are fewest-hop paths.
    """
    order = p.reachable()
    index = {s: k for k, s in enumerate(order)}
    succ = [[index[t] for t, _ in p.successors(s)] for s in order]
    on_cycle = set()
    for comp in strongly_connected_components(len(order), succ):
        if len(comp) > 1 or comp[0] in succ[comp[0]]:
            on_cycle.update(comp)
    anchor = next((s for k, s in enumerate(order) if k in on_cycle and p.is_accepting(s)), None)
    if anchor is None:
        return None
    prefix = _bfs_path(p, p.initial, anchor)
    if anchor in dict(p.successors(anchor)):
        suffix = [anchor]
    else:
        firsts = [t for t, _ in p.successors(anchor)]
        back = _bfs_path(p, firsts, anchor)
        suffix = [anchor] + back[:-1]
    return PrefixSuffixPlan(tuple(prefix), tuple(suffix),
                            run_cost(p, prefix), run_cost(p, suffix, closed=True))


def optimal_suffix_loop(p: ProductAutomaton, anchor) -> SuffixLoop | None:
    """Cheapest cycle through ``anchor`` (Dijkstra from its successors back to it)."""
    best = {}
    parent = {}
    heap = []
    for t, w in p.successors(anchor):
        if w < best.get(t, float("inf")):
            best[t] = w
            parent[t] = anchor
            heapq.heappush(heap, (w, t))
    done = set()
    while heap:
        d, s = heapq.heappop(heap)
        if s in done:
            continue
        done.add(s)
        if s == anchor:
            break
        for t, w in p.successors(s):
            nd = d + w
            if t not in done and nd < best.get(t, float("inf")):
                best[t] = nd
                parent[t] = s
                heapq.heappush(heap, (nd, t))
    if anchor not in done:
        return None
    loop = []
    cur = parent[anchor]
    while cur != anchor:
        loop.append(cur)
        cur = parent[cur]
    loop.append(anchor)
    return SuffixLoop(tuple(reversed(loop)), best[anchor])
