"""The CDCL main loop: decisions, propagation, conflict handling, restarts.

One solver instance owns one formula, one trail, and one watch structure;
instances are independent.  All behaviour is deterministic for a fixed
configuration: VSIDS ties break toward the lowest variable index and no
randomness enters the search.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from . import checker
from .analyze import analyze as run_analysis
from .analyze import minimize as minimize_clause
from .backtrack import backtrack as run_backtrack
from .formula import Formula, lit_to_int
from .propagate import Propagator
from .state import FALSE, TRUE, UNDEF, TrailState

MODES = ("ncb", "wcb", "rscb", "lscb")
RESTARTS = ("off", "agility")
CHECK_LEVELS = ("off", "coarse", "fine")

VSIDS_BUMP = 1.0
VSIDS_RESCALE = 1e100


@dataclass
class SolverConfig:
    mode: str = "lscb"
    analyze: int = 2
    cb_threshold: int = 100
    minimize: bool = False
    blockers: bool = False
    restarts: str = "off"
    vsids_decay: float = 0.95
    agility_decay: float = 0.9999
    agility_limit: float = 0.20
    seed: int = 0
    check_level: str = "off"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError("unknown mode %r" % self.mode)
        if self.analyze not in (1, 2):
            raise ValueError("analyze strategy must be 1 or 2")
        if self.cb_threshold < 1:
            raise ValueError("cb_threshold must be >= 1")
        if self.restarts not in RESTARTS:
            raise ValueError("unknown restart policy %r" % self.restarts)
        if not 0.0 < self.vsids_decay < 1.0 or not 0.0 < self.agility_decay < 1.0:
            raise ValueError("decay fractions must lie in (0, 1)")
        if self.check_level not in CHECK_LEVELS:
            raise ValueError("unknown check level %r" % self.check_level)


@dataclass
class Stats:
    propagations: int = 0
    decisions: int = 0
    conflicts: int = 0
    learned: int = 0
    reimplications: int = 0
    mli_detected: int = 0
    restarts: int = 0

    FIELDS = (
        "propagations",
        "decisions",
        "conflicts",
        "learned",
        "reimplications",
        "mli_detected",
        "restarts",
    )

    def as_dict(self):
        return {name: getattr(self, name) for name in self.FIELDS}


@dataclass
class Verdict:
    sat: bool
    model: dict | None = None  # variable -> bool, total on SAT


def choose_backtrack_level(learned, cfg):
    """Destination level for a conflict at learned.level.

    Non-chronological mode always backjumps to the second level.  The
    chronological modes go one level back instead whenever the jump would
    span at least cb_threshold levels, so a threshold of 1 is purely
    chronological.
    """
    if cfg.mode == "ncb":
        return learned.second_level
    gap = (learned.level - 1) - learned.second_level
    if gap >= cfg.cb_threshold:
        return learned.level - 1
    return learned.second_level


class Solver:
    def __init__(self, formula: Formula, cfg: SolverConfig | None = None, trace=None):
        self.formula = formula
        self.cfg = cfg or SolverConfig()
        self.stats = Stats()
        self.trace = trace
        checked = self.cfg.check_level != "off"
        self.state = TrailState(formula.num_vars, checked=checked, trace=trace)
        self.prop = Propagator(
            formula, self.state, self.cfg.mode, self.stats, blockers=self.cfg.blockers
        )
        self.activity = [0.0] * (formula.num_vars + 1)
        self.var_inc = VSIDS_BUMP
        self.agility = 1.0
        self.violations = Counter()  # invariant id -> observed count at checkpoints
        self.on_learn = None  # callback(solver, pre_minimize, post_minimize)
        self.bump_log = []  # (kind, payload) replay log for activity auditing
        self._solved = False
        self._fine = None
        self.last_episode_mid_chain = False
        self.last_episode_lazy = False
        self.verdict = None
        if self.cfg.restarts == "agility":
            self.state.on_assign = self._assign_hook

    # -- small hooks -------------------------------------------------------

    def _assign_hook(self, lit, flipped):
        decay = self.cfg.agility_decay
        self.agility = self.agility * decay + (1.0 - decay) * (1.0 if flipped else 0.0)

    def _emit(self, event):
        if self.trace is not None:
            self.trace(event)

    def _checkpoint(self):
        if self.cfg.check_level == "off":
            return
        found = checker.check_ids(
            self.state, self.formula, checker.ALL_INVARIANTS, blockers=self.cfg.blockers
        )
        for violation in found:
            self.violations[violation.invariant] += 1

    # -- decisions ---------------------------------------------------------

    def decide(self):
        """Unassigned literal of maximal activity, lowest index on ties,
        polarity from phase saving (initially negative)."""
        st = self.state
        val = st.val
        activity = self.activity
        best = -1
        best_act = -1.0
        for v in range(1, self.formula.num_vars + 1):
            if val[v << 1] == UNDEF:
                a = activity[v]
                if a > best_act:
                    best_act = a
                    best = v
        assert best > 0, "decide called with every variable assigned"
        return (best << 1) | st.saved_phase[best]

    def _bump_clause(self, lits):
        inc = self.var_inc
        activity = self.activity
        rescaled = False
        for x in lits:
            v = x >> 1
            activity[v] += inc
            if activity[v] > VSIDS_RESCALE:
                rescaled = True
        self.bump_log.append(("bump", sorted({x >> 1 for x in lits})))
        if rescaled:
            for v in range(1, self.formula.num_vars + 1):
                activity[v] *= 1.0 / VSIDS_RESCALE
            self.var_inc *= 1.0 / VSIDS_RESCALE
            self.bump_log.append(("rescale", None))
        self.var_inc /= self.cfg.vsids_decay
        self.bump_log.append(("decay", None))

    def maybe_restart(self):
        """Restart (backtrack to the root) when the agility average sinks
        below the configured limit.  Only consulted at decision points."""
        if self.cfg.restarts != "agility":
            return False
        if not self.state.decisions:
            return False
        if self.agility >= self.cfg.agility_limit:
            return False
        run_backtrack(self.state, 0, self.cfg.mode, self.stats)
        self.stats.restarts += 1
        self.agility = 1.0
        self._emit({"kind": "restart", "count": self.stats.restarts})
        self._checkpoint()
        return True

    # -- learned clause installation ----------------------------------------

    def install_learned(self, learned):
        """Store the learned clause, watch it, and enqueue its asserting literal.

        A clause identical to the conflicting one is not re-added; its
        watches are repointed at the asserting and a second-level literal
        so that the watch pair keeps exposing the clause level.
        """
        st = self.state
        lit = learned.asserting
        assert st.val[lit] == UNDEF, "asserting literal must be unassigned after backtracking"
        if len(learned.lits) == 1:
            clause = learned.source
            if clause is None:
                clause = self.formula.add_clause([lit_to_int(lit)], learned=True)
                self.stats.learned += 1
        elif learned.source is not None:
            clause = learned.source
            second = self._second_watch_lit(learned)
            watched = {clause.lits[clause.w0], clause.lits[clause.w1]}
            if watched != {lit, second}:
                self.prop.rewatch(clause, lit, second)
        else:
            clause = self.formula.add_clause(
                [lit_to_int(x) for x in learned.lits], learned=True
            )
            assert clause is not None and len(clause.lits) == len(learned.lits)
            second = self._second_watch_lit(learned)
            clause.w0 = clause.lits.index(lit)
            clause.w1 = clause.lits.index(second)
            self.prop.watch_clause(clause)
            self.stats.learned += 1
        st.enqueue_implied(lit, clause, learned.second_level)
        self._emit(
            {
                "kind": "learn",
                "clause": clause.index,
                "lits": [lit_to_int(x) for x in learned.lits],
                "level": learned.second_level,
            }
        )
        return clause

    def _second_watch_lit(self, learned):
        level = self.state.level
        for x in learned.lits:
            if x != learned.asserting and level[x >> 1] == learned.second_level:
                return x
        raise AssertionError("no literal at the second level")

    # -- main loop -----------------------------------------------------------

    def solve(self) -> Verdict:
        assert not self._solved, "a solver instance runs once"
        self._solved = True
        verdict = self.setup()
        while verdict is None:
            kind, payload = self.step()
            if kind == "sat":
                verdict = Verdict(True, payload)
            elif kind == "unsat":
                verdict = Verdict(False)
        self.verdict = verdict
        self._emit({"kind": "result", "sat": verdict.sat})
        return verdict

    def setup(self):
        """Fill watch lists and seed root units; a verdict here is final."""
        st = self.state
        if self.formula.trivially_unsat:
            return Verdict(False)
        self.prop.init_watches()
        for unit in self.formula.root_units:
            lit = unit.lits[0]
            v = st.val[lit]
            if v == FALSE:
                return Verdict(False)
            if v == UNDEF:
                st.enqueue_implied(lit, unit, 0)
        self._fine = self._checkpoint if self.cfg.check_level == "fine" else None
        return None

    def step(self):
        """One macro step of the main loop.

        Returns one of ("sat", model), ("unsat", None), ("decide", literal),
        ("restart", None), or ("learn", (installed lits, episode conflicts)).
        """
        st = self.state
        conflict = self.prop.bcp(on_pop=self._fine)
        if conflict is None:
            self._checkpoint()
            if len(st.trail) == self.formula.num_vars:
                return ("sat", self._model())
            if self.maybe_restart():
                return ("restart", None)
            lit = self.decide()
            st.enqueue_decision(lit)
            self.stats.decisions += 1
            self._checkpoint()
            return ("decide", lit)
        before = self.stats.conflicts
        installed = self._handle_conflict(conflict)
        if installed is False:
            return ("unsat", None)
        return ("learn", (installed, self.stats.conflicts - before))

    def _handle_conflict(self, conflict):
        """Analyze/backtrack/install one conflict episode.

        Returns the installed clause as sorted signed integers, or False
        when the formula is refuted (a level-0 clause was derived).
        """
        cfg = self.cfg
        st = self.state
        stats = self.stats
        episode_mid_chain = False
        episode_lazy = False
        rounds = 0
        while True:
            stats.conflicts += 1
            rounds += 1
            self._emit(
                {
                    "kind": "conflict",
                    "clause": conflict.index if hasattr(conflict, "index") else None,
                    "level": st.decision_level(),
                }
            )
            learned = run_analysis(st, conflict, cfg.analyze)
            for pivot, kind in learned.steps:
                self._emit({"kind": "resolve", "pivot": lit_to_int(pivot), "reason": kind})
            episode_mid_chain = episode_mid_chain or learned.mid_chain_lazy
            episode_lazy = episode_lazy or any(kind == "lazy" for _, kind in learned.steps)
            pre = learned
            if cfg.minimize:
                learned = minimize_clause(st, learned)
            if self.on_learn is not None:
                self.on_learn(self, pre, learned)
            self._bump_clause(learned.lits)
            if learned.level == 0:
                return False
            d = choose_backtrack_level(learned, cfg)
            run_backtrack(st, d, cfg.mode, stats)
            refalsified = all(st.val[x] == FALSE for x in learned.lits)
            if refalsified:
                # Only reachable through lazy reimplication with the classical
                # analysis stop: the asserting literal came back falsified.
                assert cfg.mode == "lscb" and cfg.analyze == 1, (
                    "re-falsified learned clause outside lazy mode with strategy 1"
                )
                conflict = learned.lits
                continue
            self.install_learned(learned)
            self._checkpoint()
            self.last_episode_mid_chain = episode_mid_chain
            self.last_episode_lazy = episode_lazy or rounds > 1
            return sorted(lit_to_int(x) for x in learned.lits)

    def _model(self):
        val = self.state.val
        return {v: val[v << 1] == TRUE for v in range(1, self.formula.num_vars + 1)}


def solve_formula(formula, cfg=None, trace=None):
    """Convenience wrapper: one-shot solve returning (verdict, stats)."""
    solver = Solver(formula, cfg, trace=trace)
    verdict = solver.solve()
    return verdict, solver.stats
