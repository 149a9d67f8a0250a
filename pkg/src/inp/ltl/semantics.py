"""Satisfaction of LTL formulas and Buchi acceptance on ultimately periodic words.

A :class:`LassoWord` ``u v^w`` has ``len(u) + len(v)`` distinct positions; the
successor of the last position wraps to ``len(u)``.  Truth of every subformula
is a function of position only, so Until/Release reduce to least/greatest
fixpoints over that finite position graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product as _cartesian

import numpy as np

from .syntax import (And, Atom, FalseF, Formula, Next, Not, Or, Release, TrueF, Until,
                     subformulas)


@dataclass(frozen=True)
class LassoWord:
    prefix: tuple
    suffix: tuple

    def __post_init__(self):
        if len(self.suffix) < 1:
            raise ValueError("lasso suffix must be nonempty")
        object.__setattr__(self, "prefix", tuple(frozenset(x) for x in self.prefix))
        object.__setattr__(self, "suffix", tuple(frozenset(x) for x in self.suffix))

    @property
    def letters(self):
        return self.prefix + self.suffix

    def successor(self, i: int) -> int:
        n = len(self.prefix) + len(self.suffix)
        return i + 1 if i + 1 < n else len(self.prefix)


def evaluate_lasso(f: Formula, w: LassoWord) -> bool:
    """Truth of ``w |= f`` by structural recursion, memoised per subformula."""
    letters = w.letters
    n = len(letters)
    succ = [w.successor(i) for i in range(n)]
    val = {}
    for g in subformulas(f):
        if isinstance(g, TrueF):
            v = [True] * n
        elif isinstance(g, FalseF):
            v = [False] * n
        elif isinstance(g, Atom):
            v = [g.name in letters[i] for i in range(n)]
        elif isinstance(g, Not):
            v = [not x for x in val[g.arg]]
        elif isinstance(g, And):
            a, b = val[g.left], val[g.right]
            v = [x and y for x, y in zip(a, b)]
        elif isinstance(g, Or):
            a, b = val[g.left], val[g.right]
            v = [x or y for x, y in zip(a, b)]
        elif isinstance(g, Next):
            a = val[g.arg]
            v = [a[succ[i]] for i in range(n)]
        elif isinstance(g, Until):
            v = _fixpoint(val[g.left], val[g.right], succ, until=True)
        elif isinstance(g, Release):
            v = _fixpoint(val[g.left], val[g.right], succ, until=False)
        else:
            raise TypeError(f"not a formula: {g!r}")
        val[g] = v
    return val[f][0]


def _fixpoint(a, b, succ, until):
    n = len(a)
    v = [not until] * n
    changed = True
    while changed:
        changed = False
        for i in reversed(range(n)):
            if until:
                new = b[i] or (a[i] and v[succ[i]])
            else:
                new = b[i] and (a[i] or v[succ[i]])
            if new != v[i]:
                v[i] = new
                changed = True
    return v


def all_letters(props) -> list:
    props = sorted(props)
    return [frozenset(p for p, bit in zip(props, bits) if bit)
            for bits in _cartesian((False, True), repeat=len(props))]


def enumerate_lassos(props, max_prefix: int, max_suffix: int):
    """Every lasso over ``2^props`` with ``|u| <= max_prefix`` and ``1 <= |v| <= max_suffix``."""
    letters = all_letters(props)
    for lp in range(max_prefix + 1):
        for u in _cartesian(letters, repeat=lp):
            for ls in range(1, max_suffix + 1):
                for v in _cartesian(letters, repeat=ls):
                    yield LassoWord(u, v)


def nba_accepts_lasso(a, w: LassoWord) -> bool:
    """Does the automaton ``a`` have an accepting run on ``w``?

    Runs are explored in the product of automaton states with lasso positions;
    the word is accepted iff a reachable product node carrying an accepting
    automaton state lies on a cycle.
    """
    letters = w.letters

    def successors(node):
        pos, q = node
        nxt = w.successor(pos)
        for guard, q2 in a.successors(q):
            if guard.holds(letters[pos]):
                yield (nxt, q2)

    start = [(0, q) for q in sorted(a.initial)]
    reached = set(start)
    stack = list(start)
    while stack:
        node = stack.pop()
        for s in successors(node):
            if s not in reached:
                reached.add(s)
                stack.append(s)
    for node in sorted(reached):
        if node[1] not in a.accepting or node[0] < len(w.prefix):
            continue
        seen = set()
        stack = list(successors(node))
        while stack:
            s = stack.pop()
            if s == node:
                return True
            if s in seen:
                continue
            seen.add(s)
            stack.extend(successors(s))
    return False


# batched variants ------------------------------------------------------------
#
# Exhaustive cross-checks touch tens of thousands of lassos per formula, so
# both routes also exist in vectorised form.  They compute the same relations
# as the scalar functions above and are tested against them.

class LassoBatch:
    """A set of lassos over one alphabet, padded into position arrays."""

    def __init__(self, props, lassos):
        self.props = sorted(props)
        self.lassos = list(lassos)
        width = max(len(w.prefix) + len(w.suffix) for w in self.lassos)
        count = len(self.lassos)
        self.width = width
        self.succ = np.zeros((count, width), dtype=np.intp)
        self.letters = {p: np.zeros((count, width), dtype=bool) for p in self.props}
        for k, w in enumerate(self.lassos):
            n = len(w.prefix) + len(w.suffix)
            for i, letter in enumerate(w.letters):
                self.succ[k, i] = w.successor(i)
                for p in letter:
                    self.letters[p][k, i] = True
            for i in range(n, width):
                self.succ[k, i] = i
        self.rows = np.arange(count)[:, None]

    @classmethod
    def exhaustive(cls, props, max_prefix, max_suffix):
        return cls(props, enumerate_lassos(props, max_prefix, max_suffix))


def evaluate_lasso_batch(f: Formula, batch: LassoBatch) -> np.ndarray:
    """Vectorised :func:`evaluate_lasso` over every lasso in ``batch``."""
    shape = batch.succ.shape
    val = {}

    def shift(v):
        return v[batch.rows, batch.succ]

    for g in subformulas(f):
        if isinstance(g, TrueF):
            v = np.ones(shape, dtype=bool)
        elif isinstance(g, FalseF):
            v = np.zeros(shape, dtype=bool)
        elif isinstance(g, Atom):
            v = batch.letters.get(g.name, np.zeros(shape, dtype=bool))
        elif isinstance(g, Not):
            v = ~val[g.arg]
        elif isinstance(g, And):
            v = val[g.left] & val[g.right]
        elif isinstance(g, Or):
            v = val[g.left] | val[g.right]
        elif isinstance(g, Next):
            v = shift(val[g.arg])
        elif isinstance(g, (Until, Release)):
            a, b = val[g.left], val[g.right]
            until = isinstance(g, Until)
            v = np.zeros(shape, dtype=bool) if until else np.ones(shape, dtype=bool)
            while True:
                new = (b | (a & shift(v))) if until else (b & (a | shift(v)))
                if np.array_equal(new, v):
                    break
                v = new
        else:
            raise TypeError(f"not a formula: {g!r}")
        val[g] = v
    return val[f][:, 0].copy()


def nba_accepts_lasso_batch(a, props, max_prefix, max_suffix) -> tuple:
    """Acceptance of every lasso from :func:`enumerate_lassos`, in that order.

    Works on boolean transition matrices: for each suffix ``v`` the states from
    which ``v^w`` is accepted are computed once, then combined with the set of
    states reachable by each prefix.
    """
    letters = all_letters(props)
    n = a.num_states
    if n == 0:
        total = sum(len(letters) ** lp for lp in range(max_prefix + 1)) * \
            sum(len(letters) ** ls for ls in range(1, max_suffix + 1))
        return np.zeros(total, dtype=bool)
    mats = []
    for letter in letters:
        m = np.zeros((n, n), dtype=bool)
        for q in range(n):
            for guard, q2 in a.successors(q):
                if guard.holds(letter):
                    m[q, q2] = True
        mats.append(m)
    acc = np.zeros(n, dtype=bool)
    acc[list(a.accepting)] = True
    init = np.zeros(n, dtype=bool)
    init[list(a.initial)] = True

    def bmm(x, y):
        return (x.astype(np.uint8) @ y.astype(np.uint8)) > 0

    def closure(g):
        c = g | np.eye(n, dtype=bool)
        while True:
            c2 = bmm(c, c)
            if np.array_equal(c2, c):
                return c
            c = c2

    # states reached after each prefix
    prefix_sets = []
    for lp in range(max_prefix + 1):
        for u in _cartesian(range(len(letters)), repeat=lp):
            cur = init.copy()
            for x in u:
                cur = (cur.astype(np.uint8) @ mats[x].astype(np.uint8)) > 0
            prefix_sets.append(cur)
    # states from which each suffix^w is accepted
    suffix_sets = []
    for ls in range(1, max_suffix + 1):
        for v in _cartesian(range(len(letters)), repeat=ls):
            reach = np.eye(n, dtype=bool)
            seen_acc = np.zeros((n, n), dtype=bool)
            for x in v:
                seen_acc = bmm(seen_acc | (reach & acc[None, :]), mats[x])
                reach = bmm(reach, mats[x])
            star = closure(reach)
            good = np.diag(bmm(seen_acc, star))
            suffix_sets.append((star.astype(np.uint8) @ good.astype(np.uint8)) > 0)
    pre = np.array(prefix_sets, dtype=np.uint8)
    suf = np.array(suffix_sets, dtype=np.uint8)
    return ((pre @ suf.T) > 0).reshape(-1)
