"""Watched-literal Boolean constraint propagation with MLI detection.

One code path serves all backtracking modes.  The mode only changes the
skip condition when the other watched literal is already satisfied: the
classical modes skip unconditionally, lazy mode additionally requires the
satisfaction (or a stored missed lower implication) to be at a level not
above the literal being propagated.  The lazy bookkeeping is inert outside
lazy mode because the classical skip fires first.
"""

from __future__ import annotations

from .state import FALSE, TRUE


class Propagator:
    def __init__(self, formula, state, mode="lscb", stats=None, blockers=False):
        self.formula = formula
        self.state = state
        self.mode = mode
        self.lazy_mode = mode == "lscb"
        self.blockers = blockers
        self.stats = stats
        self.wl = [[] for _ in range(2 * (formula.num_vars + 1))]

    # -- watch bookkeeping -------------------------------------------------

    def watch_clause(self, clause):
        lits = clause.lits
        self.wl[lits[clause.w0]].append(clause)
        self.wl[lits[clause.w1]].append(clause)
        if self.blockers:
            clause.blocker = lits[clause.w1]

    def init_watches(self):
        """Fill the watch lists from the stored clauses, in clause order."""
        for clause in self.formula.clauses:
            if len(clause.lits) >= 2:
                self.watch_clause(clause)

    def rewatch(self, clause, lit0, lit1):
        """Point the clause's watches at two specific literals, fixing the lists."""
        lits = clause.lits
        targets = {lit0, lit1}
        current = {lits[clause.w0], lits[clause.w1]}
        for old in current - targets:
            bucket = self.wl[old]
            if clause in bucket:
                bucket.remove(clause)
        for new in targets - current:
            self.wl[new].append(clause)
        clause.w0 = lits.index(lit0)
        clause.w1 = lits.index(lit1)

    # -- replacement search --------------------------------------------------

    def _search_idx(self, clause, c1, c2):
        """Index of the replacement candidate for watch c1 (see search_replacement)."""
        lits = clause.lits
        val = self.state.val
        n = len(lits)
        start = clause.search_pos
        for k in range(n):
            i = start + k
            if i >= n:
                i -= n
            x = lits[i]
            if x == c1 or x == c2:
                continue
            if val[x] != FALSE:
                clause.search_pos = i
                return i
        # Everything outside c2 is falsified: pick a literal of maximal level,
        # breaking ties toward the lowest index and away from c1 when possible.
        level = self.state.level
        best_i = -1
        best_lit = c1
        best_lvl = level[c1 >> 1]
        for i in range(n):
            x = lits[i]
            if x == c2 or x == c1:
                continue
            lx = level[x >> 1]
            if lx > best_lvl or (lx == best_lvl and best_lit == c1):
                best_i = i
                best_lit = x
                best_lvl = lx
        if best_i < 0:
            return clause.w0 if lits[clause.w0] == c1 else clause.w1
        return best_i

    def search_replacement(self, clause, c1, c2):
        """Candidate literal to take over the falsified watch c1.

        Returns either a literal not falsified by the current trail, or,
        when the clause minus c2 is fully falsified, a literal of maximal
        level in it (possibly c1 itself when no other attains the maximum).
        """
        return clause.lits[self._search_idx(clause, c1, c2)]

    # -- propagation ---------------------------------------------------------

    def propagate_literal(self, lit):
        """Visit every clause watching the negation of lit.

        Returns a conflicting clause, or None.  Clauses whose falsified
        watch gets replaced move lists even when the replacement is itself
        falsified, so the remaining watch pair always exposes the highest
        falsified level.
        """
        st = self.state
        val = st.val
        level = st.level
        lazy_lvl = st.lazy_lvl
        lazy_mode = self.lazy_mode
        blockers = self.blockers
        c1 = lit ^ 1
        lvl_c1 = level[c1 >> 1]
        watchers = self.wl[c1]
        i = j = 0
        n_w = len(watchers)
        while i < n_w:
            clause = watchers[i]
            i += 1
            if blockers:
                b = clause.blocker
                if b and val[b] == TRUE and level[b >> 1] <= lvl_c1:
                    watchers[j] = clause
                    j += 1
                    continue
            lits = clause.lits
            a = lits[clause.w0]
            c2 = lits[clause.w1] if a == c1 else a
            vc2 = val[c2]
            if vc2 == TRUE:
                if not lazy_mode or level[c2 >> 1] <= lvl_c1 or lazy_lvl[c2 >> 1] <= lvl_c1:
                    if blockers:
                        clause.blocker = c2
                    watchers[j] = clause
                    j += 1
                    continue
            ridx = self._search_idx(clause, c1, c2)
            r = lits[ridx]
            if r == c1:
                watchers[j] = clause
                j += 1
            else:
                if lits[clause.w0] == c1:
                    clause.w0 = ridx
                else:
                    clause.w1 = ridx
                self.wl[r].append(clause)
                if val[r ^ 1] != TRUE:
                    if blockers and val[r] == TRUE:
                        clause.blocker = r
                    continue
            # The clause minus c2 is fully falsified and r has its maximal level.
            if vc2 == FALSE:
                while i < n_w:
                    watchers[j] = watchers[i]
                    j += 1
                    i += 1
                del watchers[j:]
                return clause
            lvl_r = level[r >> 1]
            if vc2 == TRUE:
                if level[c2 >> 1] > lvl_r and lazy_lvl[c2 >> 1] > lvl_r:
                    st.set_lazy(c2, clause)
                    if self.stats is not None:
                        self.stats.mli_detected += 1
                continue
            st.enqueue_implied(c2, clause, lvl_r)
        del watchers[j:]
        return None

    def bcp(self, on_pop=None):
        """Propagate the pending queue to fixpoint.

        On conflict the triggering literal is left in the queue and the
        conflicting clause returned; otherwise the trail ends fully
        propagated.  The propagation counter advances once per head move.
        """
        st = self.state
        stats = self.stats
        while st.head < len(st.trail):
            conflict = self.propagate_literal(st.trail[st.head])
            if conflict is not None:
                return conflict
            st.pop_next()
            if stats is not None:
                stats.propagations += 1
            if on_pop is not None:
                on_pop()
        return None
