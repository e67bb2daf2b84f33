"""
A bounded left-derivation interpreter.

The oracle is not used to infer anything. It replays looping
conditions against the binary clauses that certify them and runs
queries for fixtures and tests. Derivations select the leftmost atom,
try clauses in program order and rename each input clause apart.

"""
from __future__ import annotations

import enum
import logging
import sys
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import AbstractSet, Iterator, Sequence

from .loops import LoopingCondition
from .settings import ORACLE_DEPTH, ORACLE_NODE_BUDGET, RECURSION_LIMIT
from .terms import (
    Atom,
    Clause,
    Program,
    Substitution,
    Var,
    apply_all,
    canonical_names,
    match,
    mgu,
    render,
    rename_apart,
)

logger = logging.getLogger(__name__)

Query = tuple[Atom, ...]


class Outcome(enum.Enum):
    SUCCESS = "success"
    FAILURE = "failure"
    DEPTH_EXCEEDED = "depth_exceeded"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class DerivationStep:
    selected: Atom
    # the input clause, already renamed apart
    clause: Clause
    mgu: Substitution
    resolvent: Query

    def render(self) -> str:
        names = canonical_names(
            [self.selected, self.clause.head, *self.clause.body, *self.resolvent]
        )
        bindings = ", ".join(
            f"{render(v, names)}/{render(t, names)}" for v, t in self.mgu.items()
        )
        resolvent = render(self.resolvent, names) if self.resolvent else "[]"
        clause = render(self.clause, names)
        return f"{clause} with {{{bindings}}} gives {resolvent}"


@dataclass(frozen=True)
class DerivationTrace:
    """A left derivation of query, and how the search ended."""

    query: Query
    steps: tuple[DerivationStep, ...] = field(default=())
    outcome: Outcome = Outcome.FAILURE

    @property
    def depth(self) -> int:
        return len(self.steps)

    def answer(self) -> Substitution:
        """Return the bindings the derivation computed for the query variables."""
        goal = self.query
        with recursion_limit():
            for step in self.steps:
                goal = apply_all(step.mgu, goal)
            return match(list(self.query), list(goal)) or Substitution()

    def dump(self) -> str:
        """Return the query and one numbered line per step."""
        lines = [f"?- {render(self.query, canonical_names(self.query))}"]
        lines.extend(f"{n}: {step.render()}" for n, step in enumerate(self.steps, 1))
        lines.append(f"{self.outcome.value} after {self.depth} steps")
        return "".join(f"{line}\n" for line in lines)


@contextmanager
def recursion_limit(limit: int | None = None) -> Iterator[None]:
    """Raise the interpreter recursion limit for the duration of the block."""
    limit = RECURSION_LIMIT if limit is None else limit
    previous = sys.getrecursionlimit()
    sys.setrecursionlimit(max(previous, limit))
    try:
        yield
    finally:
        sys.setrecursionlimit(previous)


def _resolve(
    query: Query, clause: Clause, avoid: AbstractSet[Var]
) -> DerivationStep | None:
    selected, rest = query[0], query[1:]
    renamed = rename_apart(clause, avoid)
    theta = mgu(selected, renamed.head)
    if theta is None:
        return None
    resolvent = apply_all(theta, (*renamed.goals, *rest))
    return DerivationStep(selected, renamed, theta, resolvent)


def left_step(
    query: Sequence[Atom], clause: Clause, avoid: AbstractSet[Var] = frozenset()
) -> tuple[Substitution, Query] | None:
    """
    Resolve the leftmost atom of query with a copy of clause.

    The copy shares no variable with avoid. Returns the mgu and the
    resolvent, or None when the heads do not unify.

    """
    if not query:
        raise ValueError("Cannot take a derivation step from the empty query")
    step = _resolve(tuple(query), clause, avoid)
    if step is None:
        return None
    return step.mgu, step.resolvent


@dataclass
class _Frame:
    query: Query
    next_clause: int = 0


def _search(
    clauses: Sequence[Clause],
    query: Query,
    depth: int,
    node_budget: int,
    stop_at_success: bool,
) -> DerivationTrace:
    # steps[i] leads from stack[i] to stack[i + 1]
    stack = [_Frame(query)]
    steps: list[DerivationStep] = []
    nodes = 0
    while stack:
        frame = stack[-1]
        if not frame.query and stop_at_success:
            return DerivationTrace(query, tuple(steps), Outcome.SUCCESS)
        if len(steps) >= depth:
            return DerivationTrace(query, tuple(steps), Outcome.DEPTH_EXCEEDED)
        if not frame.query:
            frame.next_clause = len(clauses)
        pushed = False
        while frame.next_clause < len(clauses):
            clause = clauses[frame.next_clause]
            frame.next_clause += 1
            step = _resolve(frame.query, clause, frozenset())
            if step is None:
                continue
            nodes += 1
            if nodes > node_budget:
                logger.debug(
                    "Oracle gave up after %s nodes at depth %s",
                    node_budget,
                    len(steps),
                )
                return DerivationTrace(query, tuple(steps), Outcome.BUDGET_EXHAUSTED)
            steps.append(step)
            stack.append(_Frame(step.resolvent))
            pushed = True
            break
        if not pushed:
            stack.pop()
            if steps:
                steps.pop()
    return DerivationTrace(query, (), Outcome.FAILURE)


def loops_to_depth(
    clauses: Sequence[Clause],
    query: Atom,
    depth: int | None = None,
    node_budget: int | None = None,
) -> tuple[bool, DerivationTrace]:
    """
    Search for a left derivation of query that is at least depth steps long.

    Clauses are tried in order with backtracking; successful branches
    are backtracked over as well. Gives up, returning False, after
    node_budget derivation steps.

    """
    depth = ORACLE_DEPTH if depth is None else depth
    if depth < 1:
        raise ValueError("depth must be at least 1")
    budget = ORACLE_NODE_BUDGET if node_budget is None else node_budget
    with recursion_limit():
        trace = _search(tuple(clauses), (query,), depth, budget, False)
    return trace.outcome is Outcome.DEPTH_EXCEEDED, trace


def run_query(
    program: Program | Sequence[Clause],
    query: Atom,
    max_steps: int,
    node_budget: int | None = None,
) -> DerivationTrace:
    """Run query depth first and report its first success, failure or cut-off."""
    if max_steps < 1:
        raise ValueError("max_steps must be at least 1")
    clauses = program.clauses if isinstance(program, Program) else tuple(program)
    budget = ORACLE_NODE_BUDGET if node_budget is None else node_budget
    with recursion_limit():
        return _search(clauses, (query,), max_steps, budget, True)


def confirm(
    condition: LoopingCondition,
    depth: int | None = None,
    node_budget: int | None = None,
    query: Atom | None = None,
) -> tuple[bool, DerivationTrace]:
    """
    Replay a looping condition against the clauses of its looping pair.

    query defaults to the atom of the condition; any member of the
    condition can be passed instead.

    """
    return loops_to_depth(
        condition.provenance.bin_seq,
        condition.atom if query is None else query,
        depth,
        node_budget,
    )
