"""LTL to nondeterministic Buchi automata by tableau expansion.

Formulas in negation normal form are expanded the way the Gerth-Peled-Vardi-
Wolper tableau expands a node: boolean structure and the fixpoint unfoldings
``a U b = b | (a & X(a U b))`` and ``a R b = b & (a | X(a R b))`` split a set of
obligations into *covers*, each holding the literals required now and the
obligations passed to the next position.  Unlike the node graph of the
original, automaton states here are only the obligation sets; the literals of a
cover become the guard of a transition.  Acceptance is transition based (one
mark per Until subformula, set when the Until is not postponed) and is
degeneralized with a counter.
"""
from __future__ import annotations

from collections import deque
from functools import lru_cache
from dataclasses import dataclass, field

from ..graph import strongly_connected_components as _sccs
from .syntax import (And, Atom, FalseF, Formula, Next, Not, Or, Release, TrueF, Until,
                     atoms, subformulas, to_nnf, to_text)


@dataclass(frozen=True, order=True)
class Guard:
    """Conjunction of literals over atomic propositions."""

    pos: frozenset = frozenset()
    neg: frozenset = frozenset()

    def holds(self, letter) -> bool:
        return self.pos <= letter and not (self.neg & letter)

    @property
    def props(self) -> frozenset:
        return self.pos | self.neg

    def sort_key(self):
        return (tuple(sorted(self.pos)), tuple(sorted(self.neg)))

    def __str__(self):
        lits = sorted(self.pos) + ["!" + p for p in sorted(self.neg)]
        return " && ".join(lits) if lits else "true"


TOP = Guard()


@dataclass(frozen=True)
class Nba:
    num_states: int
    initial: frozenset
    accepting: frozenset
    transitions: tuple  # (src, Guard, dst)
    alphabet: frozenset = frozenset()
    _out: dict = field(default=None, compare=False, repr=False)
    _step: dict = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        states = set(range(self.num_states))
        if not (self.initial <= states and self.accepting <= states):
            raise ValueError("initial and accepting states must be automaton states")
        out = {q: [] for q in range(self.num_states)}
        for src, guard, dst in self.transitions:
            if src not in states or dst not in states:
                raise ValueError(f"transition {src}->{dst} leaves the state set")
            if not guard.props <= self.alphabet:
                raise ValueError(f"guard {guard} uses propositions outside the alphabet")
            out[src].append((guard, dst))
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_step", {})

    @property
    def states(self):
        return range(self.num_states)

    def successors(self, q):
        return self._out[q]

    def step(self, q, letter: frozenset) -> tuple:
        """Sorted states reachable from ``q`` by reading ``letter`` (cached)."""
        key = (q, letter)
        hit = self._step.get(key)
        if hit is None:
            hit = tuple(sorted({d for g, d in self._out[q] if g.holds(letter)}))
            self._step[key] = hit
        return hit

    def __str__(self):
        lines = [f"states={self.num_states} initial={sorted(self.initial)} "
                 f"accepting={sorted(self.accepting)}"]
        for src, guard, dst in self.transitions:
            lines.append(f"  {src} --[{guard}]--> {dst}")
        return "\n".join(lines)


@lru_cache(maxsize=None)
def _key(f: Formula) -> str:
    return to_text(f)


@dataclass(frozen=True)
class _Hit:
    """Marker placed in a cover when a recurrence obligation is met this step."""

    formula: Formula


def _propositional(f) -> bool:
    return all(isinstance(g, (Atom, TrueF, FalseF, Not, And, Or)) for g in subformulas(f))


def _recurrence(f) -> bool:
    """``false R (true U psi)`` with propositional ``psi``, i.e. infinitely often psi."""
    return (isinstance(f, Release) and isinstance(f.left, FalseF) and isinstance(f.right, Until)
            and isinstance(f.right.left, TrueF) and _propositional(f.right.right))


def _is_literal(f):
    return isinstance(f, (Atom, TrueF, FalseF)) or (isinstance(f, Not) and isinstance(f.arg, Atom))


def _negated(f):
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def _expand_one(formula: Formula):
    """Covers of a single obligation as (pos, neg, next, fulfilled) tuples."""
    result = set()
    work = [({formula}, set(), set())]
    while work:
        new, old, nxt = work.pop()
        if not new:
            result.add((frozenset(f.name for f in old if isinstance(f, Atom)),
                        frozenset(f.arg.name for f in old if isinstance(f, Not)),
                        frozenset(nxt),
                        frozenset([u for u in old if isinstance(u, Until) and u.right in old]
                                  + [h.formula for h in old if isinstance(h, _Hit)])))
            continue
        eta = min(new, key=_key)
        new.discard(eta)
        if eta in old:
            work.append((new, old, nxt))
            continue
        if _is_literal(eta):
            if isinstance(eta, FalseF) or _negated(eta) in old:
                continue
            work.append((new, old | {eta}, nxt))
        elif isinstance(eta, And):
            old2 = old | {eta}
            work.append((new | ({eta.left, eta.right} - old2), old2, nxt))
        elif isinstance(eta, Next):
            work.append((new, old | {eta}, nxt | {eta.arg}))
        elif _recurrence(eta):
            # no pending eventuality: the step is marked whenever psi holds now
            old2 = old | {eta}
            psi = eta.right.right
            work.append((new, old2, nxt | {eta}))
            work.append((new | ({psi} - old2), old2 | {_Hit(eta)}, nxt | {eta}))
        elif isinstance(eta, (Or, Until, Release)):
            if isinstance(eta, Or):
                new1, next1, new2 = {eta.left}, set(), {eta.right}
            elif isinstance(eta, Until):
                new1, next1, new2 = {eta.left}, {eta}, {eta.right}
            else:
                new1, next1, new2 = {eta.right}, {eta}, {eta.left, eta.right}
            old2 = old | {eta}
            work.append((new | (new2 - old2), old2, set(nxt)))
            work.append((new | (new1 - old2), old2, nxt | next1))
        else:
            raise TypeError(f"formula not in negation normal form: {eta!r}")
    return list(result)


def _marks(cover, conds):
    _, _, nxt, done = cover
    return frozenset(k for k, c in enumerate(conds)
                     if c in done or c not in nxt)


def _prune(covers, conds):
    """Drop covers implied by another with a weaker guard, fewer obligations and more marks."""
    covers = sorted(set(covers), key=lambda c: (len(c[0]) + len(c[1]), len(c[2])))
    marks = [_marks(c, conds) for c in covers]
    kept = []
    for i, c in enumerate(covers):
        if not any(d[0] <= c[0] and d[1] <= c[1] and d[2] <= c[2] and marks[j] >= marks[i]
                   for j, d in kept):
            kept.append((i, c))
    return [c for _, c in kept]


class _Expander:
    """Covers of obligation sets, built as pruned products of per-formula covers."""

    def __init__(self, conds):
        self.conds = conds
        self.single = {}

    def one(self, f):
        if f not in self.single:
            self.single[f] = _prune(_expand_one(f), self.conds)
        return self.single[f]

    def covers(self, obligations: frozenset):
        acc = [(frozenset(), frozenset(), frozenset(), frozenset())]
        for f in sorted(obligations, key=_key):
            step = []
            for pos, neg, nxt, done in acc:
                for p2, n2, x2, d2 in self.one(f):
                    pos2, neg2 = pos | p2, neg | n2
                    if pos2 & neg2:
                        continue
                    step.append((pos2, neg2, nxt | x2, done | d2))
            acc = _prune(step, self.conds)
        out = [(Guard(pos, neg), nxt, _marks((pos, neg, nxt, done), self.conds))
               for pos, neg, nxt, done in acc]
        return sorted(out, key=lambda c: (c[0].sort_key(), sorted(map(_key, c[1])), sorted(c[2])))


def _tgba(formula: Formula):
    """Transition-based generalized automaton over obligation sets."""
    conds = sorted((g for g in subformulas(formula)
                     if isinstance(g, Until) or _recurrence(g)), key=_key)
    expander = _Expander(conds)
    start = frozenset({formula})
    index = {start: 0}
    order = [start]
    edges = []
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for guard, nxt, marks in expander.covers(s):
            if nxt not in index:
                index[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            edges.append((index[s], guard, index[nxt], marks))
    # conditions met on every edge constrain nothing
    live = [k for k in range(len(conds)) if not all(k in e[3] for e in edges)]
    rename = {k: i for i, k in enumerate(live)}
    edges = [(s, g, d, frozenset(rename[k] for k in m if k in rename)) for s, g, d, m in edges]
    return len(order), edges, len(live)


def _degeneralize(n, edges, k):
    """Counter construction; level ``k`` marks a completed round and is accepting."""
    if k == 0:
        return n, {0}, set(range(n)), [(s, g, d) for s, g, d, _ in edges]
    out = {}
    for s, g, d, marks in edges:
        out.setdefault(s, []).append((g, d, marks))
    index = {(0, 0): 0}
    order = [(0, 0)]
    queue = deque(order)
    trans = []
    while queue:
        q, level = queue.popleft()
        j = 0 if level == k else level
        for g, d, marks in out.get(q, ()):
            nj = j
            while nj < k and nj in marks:
                nj += 1
            target = (d, nj)
            if target not in index:
                index[target] = len(order)
                order.append(target)
                queue.append(target)
            trans.append((index[(q, level)], g, index[target]))
    accepting = {i for i, (_, level) in enumerate(order) if level == k}
    return len(order), {0}, accepting, trans


class _Ba:
    def __init__(self, n, initial, accepting, trans):
        self.n = n
        self.initial = set(initial)
        self.accepting = set(accepting)
        self.trans = sorted(set(trans), key=lambda t: (t[0], t[1].sort_key(), t[2]))

    def succ_states(self):
        succ = [set() for _ in range(self.n)]
        for s, _, d in self.trans:
            succ[s].add(d)
        return [sorted(x) for x in succ]

    def restrict(self, keep, order=None):
        order = sorted(keep) if order is None else order
        remap = {old: new for new, old in enumerate(order)}
        return _Ba(len(order), {remap[q] for q in self.initial if q in remap},
                   {remap[q] for q in self.accepting if q in remap},
                   [(remap[s], g, remap[d]) for s, g, d in self.trans if s in remap and d in remap])


def _trim(ba: _Ba) -> _Ba:
    succ = ba.succ_states()
    seen = set(ba.initial)
    queue = deque(sorted(ba.initial))
    while queue:
        q = queue.popleft()
        for s in succ[q]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    fair = set()
    for comp in _sccs(ba.n, succ):
        nontrivial = len(comp) > 1 or comp[0] in succ[comp[0]]
        if nontrivial and ba.accepting & set(comp):
            fair |= set(comp)
    pred = [[] for _ in range(ba.n)]
    for q in range(ba.n):
        for s in succ[q]:
            pred[s].append(q)
    good = set(fair)
    queue = deque(sorted(fair))
    while queue:
        q = queue.popleft()
        for p in pred[q]:
            if p not in good:
                good.add(p)
                queue.append(p)
    return ba.restrict(seen & good)


def _merge_bisimilar(ba: _Ba) -> _Ba:
    """Quotient by the coarsest bisimulation that respects guards and acceptance."""
    if ba.n == 0:
        return ba
    out = [[] for _ in range(ba.n)]
    for s, g, d in ba.trans:
        out[s].append((g, d))
    block = _renumber([q in ba.accepting for q in range(ba.n)])
    while True:
        sig = [(block[q], tuple(sorted({(g.sort_key(), block[d]) for g, d in out[q]})))
               for q in range(ba.n)]
        new_block = _renumber(sig)
        stable = len(set(new_block)) == len(set(block))
        block = new_block
        if stable:
            break
    trans = [(block[s], g, block[d]) for s, g, d in ba.trans]
    return _Ba(max(block) + 1, {block[q] for q in ba.initial},
               {block[q] for q in ba.accepting}, trans)


def _drop_implied_edges(ba: _Ba) -> _Ba:
    """Remove an edge when a parallel edge has a weaker guard."""
    groups = {}
    for s, g, d in ba.trans:
        groups.setdefault((s, d), []).append(g)
    trans = []
    for (s, d), guards in groups.items():
        guards.sort(key=lambda g: len(g.props))
        kept = []
        for g in guards:
            if not any(k.pos <= g.pos and k.neg <= g.neg for k in kept):
                kept.append(g)
        trans.extend((s, g, d) for g in kept)
    return _Ba(ba.n, ba.initial, ba.accepting, trans)


def _renumber(signatures):
    ids = {}
    return [ids.setdefault(s, len(ids)) for s in signatures]


def _bfs_order(ba: _Ba) -> _Ba:
    succ = ba.succ_states()
    order, seen = [], set(ba.initial)
    queue = deque(sorted(ba.initial))
    while queue:
        q = queue.popleft()
        order.append(q)
        for s in succ[q]:
            if s not in seen:
                seen.add(s)
                queue.append(s)
    return ba.restrict(set(order), order)


def translate(f: Formula, alphabet=None) -> Nba:
    """Build a Buchi automaton accepting exactly the words satisfying ``f``.

    A transition ``(q, guard, q')`` reads the current letter: a run
    ``q0 q1 ...`` over ``s0 s1 ...`` needs the guard of ``q_k -> q_k+1`` to
    hold on ``s_k``.  Unsatisfiable formulas give an automaton with no states.
    """
    nnf = to_nnf(f)
    n, edges, k = _tgba(nnf)
    ba = _Ba(*_degeneralize(n, edges, k))
    ba = _drop_implied_edges(_trim(ba))
    ba = _bfs_order(_drop_implied_edges(_merge_bisimilar(ba)))
    alphabet = frozenset(atoms(f)) if alphabet is None else frozenset(alphabet)
    return Nba(ba.n, frozenset(ba.initial), frozenset(ba.accepting), tuple(ba.trans), alphabet)
