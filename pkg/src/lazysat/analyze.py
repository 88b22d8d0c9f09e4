"""First-UIP conflict analysis with lazy-reason awareness, plus clause minimization.

The analysis resolves the conflicting clause against trail reasons until a
single literal remains at the conflict level.  Strategy 2 additionally
consults the lazy reimplication vector: it refuses to stop while the
asserting candidate has a stored missed lower implication, resolving with
that clause instead of the real reason.  Strategy 1 is the classical stop;
with it the caller must tolerate the learned clause conflicting again after
backtracking.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import Clause
from .state import FALSE


@dataclass
class LearnedClause:
    """Result of conflict analysis: fully falsified and implied by the formula."""

    lits: list  # encoded literals, resolution order
    level: int  # max level over the clause
    second_level: int  # second-highest distinct level (0 if |lits| <= 1)
    asserting: int  # the unique literal at `level`
    source: Clause | None = None  # the conflicting clause itself, when returned unchanged
    steps: list = field(default_factory=list)  # (pivot trail literal, "reason" | "lazy")
    mid_chain_lazy: bool = False  # a lazy override fired while n > 1


def resolve(d_lits, c_lits, pivot):
    """Binary resolution (D minus not-pivot) union (C' minus pivot), set semantics.

    ``pivot`` is the literal as it occurs in C'; its negation must occur in
    D.  Order is preserved: D's literals first, then C's new ones.
    """
    neg = pivot ^ 1
    assert neg in d_lits and pivot in c_lits, "resolution pivot missing"
    out = [x for x in d_lits if x != neg]
    seen = set(out)
    for y in c_lits:
        if y != pivot and y not in seen:
            seen.add(y)
            out.append(y)
    return out


def clause_level(state, lits):
    """Max level over the literals; the empty clause has level 0."""
    level = state.level
    best = 0
    for x in lits:
        lx = level[x >> 1]
        if lx > best:
            best = lx
    return best


def second_level(state, lits):
    """Second-highest distinct level over the literals (0 when absent)."""
    levels = sorted({state.level[x >> 1] for x in lits}, reverse=True)
    return levels[1] if len(levels) >= 2 else 0


def count_at_level(state, lits, d):
    level = state.level
    return sum(1 for x in lits if level[x >> 1] == d)


def analyze(state, conflict, strategy=2):
    """Run conflict analysis on a fully falsified clause (or literal list)."""
    if isinstance(conflict, Clause):
        d_lits = list(conflict.lits)
        source = conflict
    else:
        d_lits = list(conflict)
        source = None
    level = state.level
    pos = state.pos
    if state.checked:
        assert all(state.val[x] == FALSE for x in d_lits), "conflict clause must be falsified"
    steps = []
    mid_chain_lazy = False
    guard = 4 * len(state.trail) + 2 * len(d_lits) + 8
    while True:
        guard -= 1
        assert guard > 0, "conflict analysis failed to converge"
        dlev = 0
        for x in d_lits:
            lx = level[x >> 1]
            if lx > dlev:
                dlev = lx
        n = 0
        pivot = -1
        pivot_pos = -1
        for x in d_lits:
            v = x >> 1
            if level[v] == dlev:
                n += 1
                if pos[v] > pivot_pos:
                    pivot_pos = pos[v]
                    pivot = x
        trail_lit = pivot ^ 1  # the satisfied literal on the trail
        lazy = state.lazy_cl[pivot >> 1] if strategy == 2 else None
        if n == 1 and lazy is None:
            return LearnedClause(
                lits=d_lits,
                level=dlev,
                second_level=max(
                    (level[x >> 1] for x in d_lits if x != pivot), default=0
                ),
                asserting=pivot,
                source=source if not steps else None,
                steps=steps,
                mid_chain_lazy=mid_chain_lazy,
            )
        if lazy is not None:
            reason = lazy
            kind = "lazy"
            if n > 1:
                mid_chain_lazy = True
        else:
            reason = state.reason[pivot >> 1]
            kind = "reason"
        assert reason is not None, "analysis pivot has no reason clause"
        steps.append((trail_lit, kind))
        d_lits = resolve(d_lits, reason.lits, trail_lit)
        if state.checked:
            assert all(state.val[x] == FALSE for x in d_lits), "resolvent must stay falsified"


def minimize(state, learned):
    """Drop literals whose falsification is already forced by the rest.

    A literal is removable when one of the two implying clauses of its
    trail complement (the real reason or the stored MLI) has every other
    literal either in the clause already or itself removable.  The
    asserting literal is never dropped.
    """
    dset = set(learned.lits)
    memo = {}

    def removable(trail_lit):
        cached = memo.get(trail_lit)
        if cached is not None:
            return cached
        memo[trail_lit] = False
        v = trail_lit >> 1
        for reason in (state.reason[v], state.lazy_cl[v]):
            if reason is None:
                continue
            ok = True
            for y in reason.lits:
                if y == trail_lit:
                    continue
                if y in dset or removable(y ^ 1):
                    continue
                ok = False
                break
            if ok:
                memo[trail_lit] = True
                return True
        return False

    kept = [
        x for x in learned.lits if x == learned.asserting or not removable(x ^ 1)
    ]
    if len(kept) == len(learned.lits):
        return learned
    return LearnedClause(
        lits=kept,
        level=learned.level,
        second_level=max(
            (state.level[x >> 1] for x in kept if x != learned.asserting), default=0
        ),
        asserting=learned.asserting,
        source=None,
        steps=learned.steps,
        mid_chain_lazy=learned.mid_chain_lazy,
    )
