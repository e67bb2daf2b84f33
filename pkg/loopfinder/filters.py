"""
Derivation-neutral argument positions with associated terms.

A PosTermMap assigns to some argument positions of each predicate an
associated term. Together with `delta_more_general` it acts as a
filter on atoms: at a distinguished position an argument only has to
be an instance of the associated term, while the other positions are
compared with the usual more-general test.

`dna` weakens any map until the DN1-DN4 conditions hold for a binary
program, which makes the filter derivation neutral: distinguished
arguments can be replaced without blocking a derivation step.

"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Iterator, Mapping, Sequence

from .terms import (
    TRUE,
    Atom,
    Clause,
    Predicate,
    Substitution,
    Term,
    Var,
    canonical_form,
    fresh_copy,
    fresh_var,
    is_ground,
    is_more_general,
    less_general,
    match_args,
    shares_variables,
    variables,
)

logger = logging.getLogger(__name__)

Positions = Mapping[int, Term]


def render_associated(term: Term) -> str:
    if isinstance(term, Var):
        return "_"
    return canonical_form(term)


class PosTermMap(Mapping[Predicate, Positions]):
    """
    Per-predicate partial maps from argument positions to associated terms.

    Predicates that are absent are mapped to the empty partial map.
    Equality is by domain and by variance of the associated terms.

    """

    __slots__ = ("_entries",)

    def __init__(self, entries: Mapping[Predicate, Positions] | None = None) -> None:
        self._entries: dict[Predicate, dict[int, Term]] = {}
        for predicate, positions in (entries or {}).items():
            for i in positions:
                if not 1 <= i <= predicate.arity:
                    raise ValueError(f"Position {i} is out of range for {predicate}")
            self._entries[predicate] = dict(sorted(positions.items()))

    @classmethod
    def from_positions(
        cls, positions: Mapping[Predicate, Iterable[int]]
    ) -> PosTermMap:
        """Encode plain sets of positions, each with a fresh variable."""
        return cls(
            {
                predicate: {i: fresh_var(f"U{i}") for i in sorted(set(domain))}
                for predicate, domain in positions.items()
            }
        )

    def __getitem__(self, predicate: Predicate) -> Positions:
        return self._entries[predicate]

    def __iter__(self) -> Iterator[Predicate]:
        return iter(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def positions(self, predicate: Predicate) -> dict[int, Term]:
        return dict(self._entries.get(predicate, {}))

    def domain(self, predicate: Predicate) -> frozenset[int]:
        return frozenset(self._entries.get(predicate, ()))

    def as_dict(self) -> dict[Predicate, dict[int, Term]]:
        return {p: dict(positions) for p, positions in self._entries.items()}

    def key(self) -> tuple[tuple[str, int, str], ...]:
        return tuple(
            sorted(
                (str(p), i, canonical_form(t))
                for p, positions in self._entries.items()
                for i, t in positions.items()
            )
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PosTermMap):
            return NotImplemented
        return self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def render_positions(self, predicate: Predicate) -> str:
        positions = self._entries.get(predicate, {})
        inner = ", ".join(
            f"{i} -> {render_associated(t)}" for i, t in positions.items()
        )
        return "{" + inner + "}"

    def render(self, predicates: Iterable[Predicate] | None = None) -> str:
        """Render as 'p: {2 -> [X1|X2], 3 -> _}' per predicate, sorted."""
        selected = sorted(self._entries if predicates is None else predicates)
        return "; ".join(
            f"{p.name}: {self.render_positions(p)}"
            for p in selected
            if self._entries.get(p)
        )

    def __str__(self) -> str:
        return self.render()

    def __repr__(self) -> str:
        return f"PosTermMap({self.render()})"


def tau_max(signature: Iterable[Predicate]) -> PosTermMap:
    """Map every position of every predicate to its own fresh variable."""
    return PosTermMap.from_positions({p: range(1, p.arity + 1) for p in signature})


def delta_more_general(a: Atom, b: Atom, tau: PosTermMap) -> Substitution | None:
    """
    Test whether a is more general than b outside the positions of tau.

    At each distinguished position of a's predicate the argument of a
    must be an instance of the associated term. The remaining positions
    are matched with a single substitution, which is returned.

    """
    if a.predicate != b.predicate:
        return None
    distinguished = tau.positions(a.predicate)
    for i, u in distinguished.items():
        if not is_more_general(fresh_copy(u), a.args[i - 1]):
            return None
    rest = [i for i in range(len(a.args)) if i + 1 not in distinguished]
    return match_args([a.args[i] for i in rest], [b.args[i] for i in rest])


@dataclass(frozen=True)
class DNReport:
    """Outcome of `is_dn`; false when some clause violates a condition."""

    violation: str | None = None
    clause: Clause | None = None
    position: int | None = None

    def __bool__(self) -> bool:
        return self.violation is None

    def __str__(self) -> str:
        if self.violation is None:
            return "DN"
        return f"{self.violation} fails at position {self.position} of {self.clause}"


def _require_binary(bin_prog: Sequence[Clause]) -> None:
    for clause in bin_prog:
        if not clause.is_binary:
            raise ValueError(f"Not a binary clause: {clause}")


def _body_atom(clause: Clause) -> Atom:
    return clause.body[0]


def is_dn(bin_prog: Sequence[Clause], tau: PosTermMap) -> DNReport:
    """Check the DN1-DN4 conditions for every clause of a binary program."""
    _require_binary(bin_prog)
    for clause in bin_prog:
        s = clause.head.args
        body = _body_atom(clause)
        t = body.args
        head_positions = tau.positions(clause.head.predicate)
        body_positions = {} if body == TRUE else tau.positions(body.predicate)
        for i in head_positions:
            others = [s[j] for j in range(len(s)) if j != i - 1]
            if shares_variables(s[i - 1], others):
                return DNReport("DN1", clause, i)
        for i, u in head_positions.items():
            if not is_more_general(s[i - 1], u):
                return DNReport("DN2", clause, i)
        for j, u in body_positions.items():
            if not is_more_general(u, t[j - 1]):
                return DNReport("DN3", clause, j)
        for i in head_positions:
            for j in range(1, len(t) + 1):
                if j not in body_positions and shares_variables(s[i - 1], t[j - 1]):
                    return DNReport("DN4", clause, i)
    return DNReport()


def is_dn_positions(
    bin_prog: Sequence[Clause], positions: Mapping[Predicate, AbstractSet[int]]
) -> bool:
    """
    Check a plain set of positions directly.

    Each distinguished head argument must be a variable occurring once
    in the head, and may reappear in the body only at distinguished
    positions.

    """
    _require_binary(bin_prog)
    for clause in bin_prog:
        s = clause.head.args
        body = _body_atom(clause)
        body_positions = positions.get(body.predicate, frozenset())
        for i in positions.get(clause.head.predicate, frozenset()):
            x = s[i - 1]
            if not isinstance(x, Var):
                return False
            if sum(1 for arg in s for v in _all_occurrences(arg) if v == x) != 1:
                return False
            for j, arg in enumerate(body.args, start=1):
                if x in variables(arg) and j not in body_positions:
                    return False
    return True


def _all_occurrences(t: Term) -> list[Var]:
    found: list[Var] = []
    stack = [t]
    while stack:
        u = stack.pop()
        if isinstance(u, Var):
            found.append(u)
        else:
            stack.extend(u.args)
    return found


def preceq(t1: PosTermMap, t2: PosTermMap) -> bool:
    """True when t1 has fewer positions than t2, with less general terms."""
    for predicate in t1:
        mine = t1.positions(predicate)
        theirs = t2.positions(predicate)
        for i, u in mine.items():
            if i not in theirs or not is_more_general(theirs[i], u):
                return False
    return True


def satisfy_dn1(bin_prog: Sequence[Clause], tau: PosTermMap) -> PosTermMap:
    """Drop head positions whose argument shares a variable with another argument."""
    _require_binary(bin_prog)
    working = tau.as_dict()
    for clause in bin_prog:
        s = clause.head.args
        independent = {
            i
            for i in range(1, len(s) + 1)
            if not shares_variables(s[i - 1], [a for j, a in enumerate(s, 1) if j != i])
        }
        p = clause.head.predicate
        working[p] = {i: u for i, u in working.get(p, {}).items() if i in independent}
    return PosTermMap(working)


def satisfy_dn2(bin_prog: Sequence[Clause], tau: PosTermMap) -> PosTermMap:
    """Narrow associated terms to the head arguments, dropping incomparable ones."""
    _require_binary(bin_prog)
    working = tau.as_dict()
    for clause in bin_prog:
        p = clause.head.predicate
        narrowed: dict[int, Term] = {}
        for i, u in working.get(p, {}).items():
            lower = less_general(clause.head.args[i - 1], u)
            if lower is not None:
                narrowed[i] = fresh_copy(lower)
        working[p] = narrowed
    return PosTermMap(working)


def satisfy_dn3(bin_prog: Sequence[Clause], tau: PosTermMap) -> PosTermMap:
    """Drop body positions whose argument is not an instance of the associated term."""
    _require_binary(bin_prog)
    working = tau.as_dict()
    for clause in bin_prog:
        body = _body_atom(clause)
        if body == TRUE:
            continue
        q = body.predicate
        working[q] = {
            j: u
            for j, u in working.get(q, {}).items()
            if is_more_general(u, body.args[j - 1])
        }
    return PosTermMap(working)


def satisfy_dn4(bin_prog: Sequence[Clause], tau: PosTermMap) -> PosTermMap:
    """Drop head positions sharing variables with a non-distinguished body argument."""
    _require_binary(bin_prog)
    working = tau.as_dict()
    for clause in bin_prog:
        p = clause.head.predicate
        body = _body_atom(clause)
        body_positions = {} if body == TRUE else working.get(body.predicate, {})
        exposed = [
            arg for j, arg in enumerate(body.args, 1) if j not in body_positions
        ]
        working[p] = {
            i: u
            for i, u in working.get(p, {}).items()
            if not shares_variables(clause.head.args[i - 1], exposed)
        }
    return PosTermMap(working)


def _drop_ground_positions(tau: PosTermMap) -> PosTermMap:
    # a ground associated term fixes its argument, so the position is ordinary
    return PosTermMap(
        {
            p: {i: u for i, u in positions.items() if not is_ground(u)}
            for p, positions in tau.items()
        }
    )


def dna(bin_prog: Sequence[Clause], tau: PosTermMap) -> PosTermMap:
    """
    Weaken tau until it is DN for the binary program.

    The result is below tau for `preceq` and passes `is_dn`. Once the
    DN4 loop is stable, positions whose associated term is ground are
    dropped from the result.

    """
    result = satisfy_dn1(bin_prog, tau)
    result = satisfy_dn2(bin_prog, result)
    result = satisfy_dn3(bin_prog, result)
    while True:
        weaker = satisfy_dn4(bin_prog, result)
        if weaker == result:
            break
        result = weaker
    result = _drop_ground_positions(result)
    logger.debug("dna over %s clauses: %s -> %s", len(bin_prog), tau, result)
    return result
