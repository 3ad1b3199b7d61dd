"""Iterative-deepening depth-first proof search with backtracking.

The search is structured around literal closures: for the head literal of the
designated goal it lazily enumerates every way to close it (lemma, reductions,
extensions whose opened subgoals were closed in turn) and backtracks through
that sequence. The optional cut commits to the first closure of each literal,
which prunes heavily but loses completeness.

During the final (successful) deepening round the search can record literal
outcome statistics: a goal literal counts as a success when a reduction
applied or an extension's opened subgoals all closed (the clause literal it
connected to shares that success), and as a failure when every alternative
was exhausted without a closure.
"""

from __future__ import annotations

import sys
import time
from dataclasses import dataclass, field, replace

from .calculus import (
    CalculusOptions,
    Extension,
    LemmaStep,
    ProverState,
    Reduction,
    has_applicable_extension,
    initial_state,
    successors,
)
from .checker import ProofCertificate, certificate_for
from .terms import Matrix, TOP_PREDICATE
from .trainstore import KeyTable, LiteralKey


@dataclass
class DeepeningOptions:
    start_depth: int = 1
    increment: int = 1
    max_depth: int | None = None
    cut: bool = False
    time_budget: float | None = None
    inference_budget: int | None = None
    collect_training: bool = False
    calculus: CalculusOptions = field(default_factory=CalculusOptions)

    def __post_init__(self):
        if self.start_depth < 1 or self.increment < 1:
            raise ValueError("depth schedule requires start >= 1 and increment >= 1")


@dataclass(frozen=True)
class TrainingEvent:
    key: LiteralKey
    success: bool


@dataclass
class Proof:
    certificate: ProofCertificate
    final_state: ProverState
    depth: int


@dataclass
class Saturated:
    depth: int
    complete: bool = True
    reason: str = ""


@dataclass
class Timeout:
    reason: str = "time"


@dataclass
class RunStats:
    extension_inferences: int = 0  # extension successors constructed while enumerating
    reduction_inferences: int = 0
    rounds: int = 0
    max_depth: int = 0


@dataclass
class DeepeningResult:
    outcome: Proof | Saturated | Timeout
    stats: RunStats
    events: list = field(default_factory=list)

    @property
    def proved(self) -> bool:
        return isinstance(self.outcome, Proof)


class _OutOfBudget(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class _Budget:
    __slots__ = ("deadline", "inference_cap", "stats")

    def __init__(self, options: DeepeningOptions, stats: RunStats):
        self.deadline = time.monotonic() + options.time_budget if options.time_budget else None
        self.inference_cap = options.inference_budget
        self.stats = stats

    def tick(self):
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise _OutOfBudget("time")
        if self.inference_cap is not None and self.stats.extension_inferences > self.inference_cap:
            raise _OutOfBudget("inferences")


class _DepthSearch:
    """One depth-bounded exhaustive search over the successor relation."""

    def __init__(self, matrix, options, bound, budget, key_table):
        self.matrix = matrix
        self.calc = replace(options.calculus, depth_bound=bound)
        self.bound = bound
        self.cut = options.cut
        self.budget = budget
        self.keys = key_table
        self.bound_hit = False
        self.events: list = []

    def run(self):
        for final in self._closures_to(initial_state(self.matrix), 0):
            return final
        return None

    def _closures_to(self, state: ProverState, base: int):
        """Descendants of `state` whose goal stack is back down to `base`."""
        if len(state.goals) == base:
            yield state
            return
        for closed in self._literal_closures(state):
            yield from self._closures_to(closed, base)
            if self.cut:
                break

    def _literal_closures(self, state: ProverState):
        """States in which the designated goal's head literal is fully proved."""
        self.budget.tick()
        goal = state.goals[-1]
        succs = successors(state, self.matrix, self.calc)
        stats = self.budget.stats
        for action, _ in succs:
            if isinstance(action, Extension):
                stats.extension_inferences += 1
            elif isinstance(action, Reduction):
                stats.reduction_inferences += 1
        if not self.bound_hit and goal.depth >= self.bound:
            if has_applicable_extension(state, self.matrix):
                self.bound_hit = True

        collect = self.keys is not None
        head_emitted = False
        closed_any = False
        # stack height once the head's own subtree is closed: everything below
        # the goal plus the goal's remainder, if any
        target = len(state.goals) - 1 + (1 if len(goal.clause) > 1 else 0)
        for action, succ in succs:
            if isinstance(action, (LemmaStep, Reduction)):
                closed_any = True
                if collect and isinstance(action, Reduction) and not head_emitted:
                    head_emitted = True
                    self._emit(goal.clause_index, goal.literal_indices[0], True)
                yield succ
            else:
                left_closed = False
                for after in self._closures_to(succ, target):
                    if not left_closed:
                        left_closed = True
                        closed_any = True
                        if collect:
                            if not head_emitted:
                                head_emitted = True
                                self._emit(goal.clause_index, goal.literal_indices[0], True)
                            connected = self.matrix.clauses[action.clause].literals[action.literal]
                            if connected.predicate != TOP_PREDICATE:
                                self._emit(action.clause, action.literal, True)
                    yield after
        if collect and not closed_any:
            self._emit(goal.clause_index, goal.literal_indices[0], False)

    def _emit(self, clause_index: int, literal_index: int, success: bool):
        self.events.append(TrainingEvent(self.keys.key(clause_index, literal_index), success))


def prove_iterative(matrix: Matrix, options: DeepeningOptions | None = None) -> DeepeningResult:
    """Deepening rounds until a proof, exhaustion, or a spent budget."""
    options = options or DeepeningOptions()
    stats = RunStats()
    if not matrix.has_positive_start:
        return DeepeningResult(Saturated(0, complete=True, reason="no positive start clause"), stats)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))
    budget = _Budget(options, stats)
    keys = KeyTable(matrix) if options.collect_training else None
    depth = options.start_depth
    while True:
        stats.rounds += 1
        stats.max_depth = depth
        search = _DepthSearch(matrix, options, depth, budget, keys)
        try:
            final = search.run()
        except _OutOfBudget as spent:
            return DeepeningResult(Timeout(spent.reason), stats)
        if final is not None:
            proof = Proof(certificate_for(final, matrix), final, depth)
            return DeepeningResult(proof, stats, search.events)
        if not search.bound_hit:
            reason = "" if not options.cut else "exhausted under cut"
            return DeepeningResult(Saturated(depth, complete=not options.cut, reason=reason), stats)
        if options.max_depth is not None and depth >= options.max_depth:
            return DeepeningResult(
                Saturated(depth, complete=False, reason="depth cap reached"), stats
            )
        depth += options.increment
