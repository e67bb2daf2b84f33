"""
Binary unfoldings of a logic program.

Each binary clause H <- B computed here records that a call to H leads
to a call to B (or succeeds when B is `true`). The iterates are kept in
a pool deduplicated modulo renaming, each clause stamped with the first
iteration that produced it.

"""
from __future__ import annotations

import logging
from collections import defaultdict
from typing import Iterable, Iterator

from .exceptions import ResourceError
from .settings import POOL_CAP
from .terms import (
    TRUE,
    Atom,
    Clause,
    Predicate,
    Program,
    Term,
    Var,
    apply,
    canonical_form,
    rename_apart,
    solve,
    unify,
)

logger = logging.getLogger(__name__)


class BinClausePool:
    """
    Binary clauses modulo renaming, each with its stamp.

    Clauses are stored under their canonical form, so no two entries
    are variants. Stored clauses are renamed apart from each other and
    from the analyzed program.

    """

    def __init__(self) -> None:
        self._entries: dict[str, tuple[Clause, int]] = {}
        self._by_head: dict[Predicate, list[str]] = defaultdict(list)
        # number of iterations actually computed
        self.iterations = 0
        # k such that T^(k+1) = T^k, when observed
        self.fixpoint_reached: int | None = None

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, item: object) -> bool:
        if isinstance(item, Clause):
            item = canonical_form(item)
        return item in self._entries

    def __iter__(self) -> Iterator[Clause]:
        return iter(self.ordered())

    def add(self, clause: Clause, stamp: int) -> bool:
        """Store clause unless a variant is present; return True if it was new."""
        key = canonical_form(clause)
        if key in self._entries:
            return False
        self._entries[key] = (rename_apart(clause), stamp)
        self._by_head[clause.head.predicate].append(key)
        return True

    def stamp(self, clause: Clause | str) -> int:
        key = clause if isinstance(clause, str) else canonical_form(clause)
        return self._entries[key][1]

    def clause(self, key: str) -> Clause:
        return self._entries[key][0]

    def keys_for(self, predicate: Predicate) -> list[str]:
        return sorted(self._by_head.get(predicate, ()))

    def ordered(self) -> list[Clause]:
        """Return the clauses by ascending stamp, then canonical text."""
        return [self._entries[key][0] for key in self.ordered_keys()]

    def ordered_keys(self) -> list[str]:
        return sorted(self._entries, key=lambda k: (self._entries[k][1], k))

    @property
    def success_patterns(self) -> list[Clause]:
        return [c for c in self.ordered() if c.is_success_pattern]

    @property
    def proper_clauses(self) -> list[Clause]:
        return [c for c in self.ordered() if not c.is_success_pattern]

    @property
    def is_finite(self) -> bool:
        return self.fixpoint_reached is not None

    def dump(self) -> str:
        """Return one '<stamp>: <clause>' line per clause, sorted."""
        return "".join(
            f"{self._entries[key][1]}: {key}\n" for key in self.ordered_keys()
        )


class _Step:
    """
    One application of the binary unfoldings operator.

    When `new_keys` is given, only conclusions using at least one premise
    from it are produced (the other ones exist from earlier iterations).

    """

    def __init__(
        self,
        program: Program,
        premises: BinClausePool,
        new_keys: set[str] | None,
        cap: int | None,
    ) -> None:
        self.program = program
        self.premises = premises
        self.new_keys = new_keys
        self.cap = cap
        self.results: dict[str, Clause] = {}
        self._keys: dict[Predicate, list[str]] = {}

    def keys_for(self, predicate: Predicate) -> list[str]:
        if predicate not in self._keys:
            self._keys[predicate] = self.premises.keys_for(predicate)
        return self._keys[predicate]

    def is_new(self, key: str) -> bool:
        return self.new_keys is None or key in self.new_keys

    def run(self) -> dict[str, Clause]:
        for clause in self.program:
            body = clause.goals or (TRUE,)
            for i in range(1, len(body) + 1):
                self.unfold(clause.head, body, i, 0, {}, False)
        return self.results

    def emit(self, head: Atom, body: Atom, bindings: dict[Var, Term]) -> None:
        theta = solve(bindings)
        result = Clause.binary(apply(theta, head), apply(theta, body))
        key = canonical_form(result)
        if key not in self.results:
            self.results[key] = result
            if self.cap is not None and len(self.results) > self.cap:
                raise ResourceError(
                    "pool cap",
                    self.cap,
                    f"binary unfoldings exceeded the pool cap of {self.cap} clauses",
                )

    def unfold(
        self,
        head: Atom,
        body: tuple[Atom, ...],
        i: int,
        j: int,
        bindings: dict[Var, Term],
        used_new: bool,
    ) -> None:
        goal = body[j]
        if j < i - 1:
            # success patterns for the goals before the i-th one come from X only
            for key in self.keys_for(goal.predicate):
                pattern = self.premises.clause(key)
                if not pattern.is_success_pattern:
                    continue
                renamed = rename_apart(pattern)
                extended = unify(goal, renamed.head, bindings)
                if extended is not None:
                    self.unfold(
                        head, body, i, j + 1, extended, used_new or self.is_new(key)
                    )
            return
        if goal == TRUE:
            # the only premise is true <- true from id
            if self.new_keys is None:
                self.emit(head, TRUE, bindings)
            return
        # the identity clause goal <- goal
        if self.new_keys is None or used_new:
            self.emit(head, goal, bindings)
        for key in self.keys_for(goal.predicate):
            if not (used_new or self.is_new(key)):
                continue
            premise = self.premises.clause(key)
            if i < len(body) and premise.is_success_pattern:
                continue
            renamed = rename_apart(premise)
            extended = unify(goal, renamed.head, bindings)
            if extended is not None:
                self.emit(head, renamed.body[0], extended)


def tp_beta_step(
    program: Program, premises: BinClausePool | Iterable[Clause]
) -> dict[str, Clause]:
    """
    Apply the binary unfoldings operator once to a set of binary clauses.

    Returns the conclusions keyed by canonical form.

    """
    if not isinstance(premises, BinClausePool):
        pool = BinClausePool()
        for clause in premises:
            pool.add(clause, 0)
        premises = pool
    return _Step(program, premises, None, None).run()


def tp_beta_upto(
    program: Program, max_iterations: int, pool_cap: int | None = None
) -> BinClausePool:
    """
    Compute the first max_iterations iterates of the operator.

    Iteration stops early when an iterate adds nothing, in which case
    the pool holds all binary unfoldings of the program and
    `fixpoint_reached` is set. Raises ResourceError when the pool grows
    beyond pool_cap clauses.

    """
    if max_iterations < 0:
        raise ValueError("max_iterations must be non-negative")
    cap = POOL_CAP if pool_cap is None else pool_cap
    pool = BinClausePool()
    new_keys: set[str] | None = None
    for k in range(1, max_iterations + 1):
        derived = _Step(program, pool, new_keys, cap).run()
        fresh = {key: c for key, c in derived.items() if key not in pool}
        if not fresh:
            pool.fixpoint_reached = k - 1
            logger.info("Binary unfoldings reached a fixpoint at iteration %s", k - 1)
            break
        for clause in fresh.values():
            pool.add(clause, k)
        if len(pool) > cap:
            raise ResourceError(
                "pool cap",
                cap,
                f"binary unfoldings exceeded the pool cap of {cap} clauses",
            )
        pool.iterations = k
        new_keys = set(fresh)
        logger.debug("Iteration %s added %s binary clauses", k, len(fresh))
    return pool
