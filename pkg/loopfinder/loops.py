"""
Loop dictionaries and looping conditions.

A looping pair is a sequence of binary clauses together with a DN map
certifying that the head of the first clause loops with respect to the
sequence. Pairs are found in the binary unfoldings of a program and
grown by prepending clauses whose body feeds the head of a known pair.
Each pair yields a looping condition: an atom and a map describing a
whole class of atomic queries that left loop.

"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import AbstractSet, Iterable, Iterator

from .filters import (
    PosTermMap,
    delta_more_general,
    dna,
    is_dn,
    render_associated,
    tau_max,
)
from .settings import MAX_ITERATIONS, PAIR_CAP, PASS_LIMIT
from .terms import Atom, Clause, Predicate, Program, canonical_form, is_variant
from .unfolding import BinClausePool, tp_beta_upto

logger = logging.getLogger(__name__)

PairKey = tuple[tuple[str, ...], tuple[tuple[str, int, str], ...]]
Origin = tuple[str, frozenset[str], tuple[tuple[str, int, str], ...]]


@dataclass(frozen=True, eq=False)
class LoopingPair:
    """
    A binary clause sequence and a map that is DN for it.

    For a sequence of more than one clause, `tail` is the pair the rest
    of the sequence came from; its map certifies the link between the
    first clause and the rest.

    """

    bin_seq: tuple[Clause, ...]
    tau: PosTermMap
    tail: LoopingPair | None = None

    @property
    def head(self) -> Atom:
        return self.bin_seq[0].head

    @cached_property
    def key(self) -> PairKey:
        return tuple(canonical_form(c) for c in self.bin_seq), self.tau.key()

    def __len__(self) -> int:
        return len(self.bin_seq)

    def __str__(self) -> str:
        clauses = " ".join(canonical_form(c) for c in self.bin_seq)
        return f"[{clauses}] with {self.tau}"


def check_looping_pair(pair: LoopingPair) -> bool:
    """Re-check the certificate of a pair from scratch."""
    if not pair.bin_seq or not is_dn(pair.bin_seq, pair.tau):
        return False
    first = pair.bin_seq[0]
    if len(pair.bin_seq) == 1:
        return delta_more_general(first.body[0], first.head, pair.tau) is not None
    tail = pair.tail
    if tail is None or tail.key[0] != pair.key[0][1:]:
        return False
    return (
        check_looping_pair(tail)
        and delta_more_general(first.body[0], tail.head, tail.tau) is not None
    )


class LoopDictionary:
    """
    Looping pairs in insertion order, without duplicates.

    `rejected` holds the pairs that failed re-certification while the
    dictionary was built.

    """

    def __init__(self, pairs: Iterable[LoopingPair] = ()) -> None:
        self._pairs: dict[PairKey, LoopingPair] = {}
        self.rejected: list[LoopingPair] = []
        for pair in pairs:
            self.add(pair)

    def __iter__(self) -> Iterator[LoopingPair]:
        return iter(list(self._pairs.values()))

    def __len__(self) -> int:
        return len(self._pairs)

    def __contains__(self, pair: object) -> bool:
        return isinstance(pair, LoopingPair) and pair.key in self._pairs

    def __getitem__(self, index: int) -> LoopingPair:
        return list(self._pairs.values())[index]

    def add(self, pair: LoopingPair) -> bool:
        if pair.key in self._pairs:
            return False
        self._pairs[pair.key] = pair
        return True

    def copy(self) -> LoopDictionary:
        return LoopDictionary(self._pairs.values())


def _unit_pair(
    clause: Clause, signature: AbstractSet[Predicate] | None
) -> LoopingPair | None:
    if clause.is_success_pattern:
        return None
    body = clause.body[0]
    if signature is None:
        signature = {clause.head.predicate, body.predicate}
    tau = dna([clause], tau_max(signature))
    if delta_more_general(body, clause.head, tau) is None:
        return None
    return LoopingPair((clause,), tau)


def _feeds(clause: Clause, pair: LoopingPair, pair_cap: int) -> bool:
    if clause.is_success_pattern or len(pair) >= pair_cap:
        return False
    return delta_more_general(clause.body[0], pair.head, pair.tau) is not None


def _extend(clause: Clause, pair: LoopingPair) -> LoopingPair:
    bin_seq = (clause, *pair.bin_seq)
    return LoopingPair(bin_seq, dna(bin_seq, pair.tau), pair)


def _extensions(
    clause: Clause, pairs: Iterable[LoopingPair], pair_cap: int
) -> Iterator[LoopingPair]:
    for pair in pairs:
        if _feeds(clause, pair, pair_cap):
            yield _extend(clause, pair)


def unit_loop(
    clause: Clause,
    dictionary: LoopDictionary,
    signature: AbstractSet[Predicate] | None = None,
) -> LoopDictionary:
    """
    Return dictionary plus the one-clause pair for clause, if it loops.

    signature is the set of predicates the map is built over; it
    defaults to the predicates of the clause.

    """
    result = dictionary.copy()
    pair = _unit_pair(clause, signature)
    if pair is not None:
        result.add(pair)
    return result


def loops_from_dict(
    clause: Clause, dictionary: LoopDictionary, pair_cap: int | None = None
) -> LoopDictionary:
    """Return dictionary plus every pair obtained by prepending clause to a member."""
    cap = PAIR_CAP if pair_cap is None else pair_cap
    result = dictionary.copy()
    for pair in _extensions(clause, dictionary, cap):
        result.add(pair)
    return result


@dataclass(frozen=True, eq=False)
class LoopingCondition:
    """
    An atom and a map denoting a class of left looping queries.

    The class holds the atom itself and every atom that is more general
    than it outside the distinguished positions, with instances of the
    associated terms at those positions.

    """

    atom: Atom
    tau: PosTermMap
    provenance: LoopingPair

    @property
    def predicate(self) -> Predicate:
        return self.atom.predicate

    @cached_property
    def key(self) -> tuple[str, str]:
        return canonical_form(self.atom), self.tau.render_positions(self.predicate)

    def neutral_positions(self) -> dict[int, str]:
        positions = self.tau.positions(self.predicate)
        return {i: render_associated(u) for i, u in positions.items()}

    def __contains__(self, query: object) -> bool:
        return isinstance(query, Atom) and membership(query, self)

    def __str__(self) -> str:
        return f"{self.key[0]} {self.key[1]}"


def membership(query: Atom, condition: LoopingCondition) -> bool:
    """True when query belongs to the class the condition denotes."""
    if is_variant(query, condition.atom):
        return True
    return delta_more_general(query, condition.atom, condition.tau) is not None


@dataclass
class LoopAnalysis:
    """Everything computed for one program: pool, dictionary and conditions."""

    program: Program
    max_iterations: int
    pool: BinClausePool
    dictionary: LoopDictionary
    conditions: list[LoopingCondition]

    def conditions_for(self, predicate: Predicate) -> list[LoopingCondition]:
        return [c for c in self.conditions if c.predicate == predicate]


def build_dictionary(
    program: Program,
    pool: BinClausePool,
    pair_cap: int | None = None,
    passes: int | None = None,
) -> LoopDictionary:
    """
    Run unit_loop and loops_from_dict over the pool.

    Clauses are taken by ascending stamp, then canonical text. Later
    passes only combine a clause with pairs it has not met yet, and
    every pair they add is re-certified with `check_looping_pair`.

    The map of an extension depends only on its first clause, its set
    of clauses and the map it was extended from. Later passes skip an
    extension when a pair no longer than it was built from the same
    three; both yield the same condition and the same extensions.

    """
    cap = PAIR_CAP if pair_cap is None else pair_cap
    limit = PASS_LIMIT if passes is None else passes
    clauses = pool.proper_clauses
    dictionary = LoopDictionary()
    # number of dictionary members each clause has already been tried against
    seen = [0] * len(clauses)
    # shortest pair built from each (first clause, clause set, map) origin
    origins: dict[Origin, int] = {}
    for n in range(1, limit + 1):
        before = len(dictionary)
        for index, clause in enumerate(clauses):
            if n == 1:
                pair = _unit_pair(clause, program.signature)
                if pair is not None:
                    dictionary.add(pair)
            members = list(dictionary)
            text = canonical_form(clause)
            for member in members[seen[index] :]:
                if not _feeds(clause, member, cap):
                    continue
                origin = (text, frozenset((text, *member.key[0])), member.tau.key())
                length = len(member) + 1
                if n > 1 and origins.get(origin, cap + 1) <= length:
                    continue
                extended = _extend(clause, member)
                if n > 1 and not check_looping_pair(extended):
                    logger.warning("Rejected uncertified looping pair %s", extended)
                    dictionary.rejected.append(extended)
                    continue
                dictionary.add(extended)
                origins[origin] = min(origins.get(origin, length), length)
            seen[index] = len(members)
        logger.debug("Pass %s: %s looping pairs", n, len(dictionary))
        if len(dictionary) == before:
            break
    return dictionary


def infer_loop_dict(
    program: Program,
    max_iterations: int,
    *,
    pool: BinClausePool | None = None,
    pool_cap: int | None = None,
    pair_cap: int | None = None,
    passes: int | None = None,
) -> LoopDictionary:
    if pool is None:
        pool = tp_beta_upto(program, max_iterations, pool_cap)
    return build_dictionary(program, pool, pair_cap, passes)


def conditions_from_dict(dictionary: LoopDictionary) -> list[LoopingCondition]:
    """One condition per pair; duplicates keep the first pair as provenance."""
    conditions: dict[tuple[str, str], LoopingCondition] = {}
    for pair in dictionary:
        condition = LoopingCondition(pair.head, pair.tau, pair)
        conditions.setdefault(condition.key, condition)
    return list(conditions.values())


def infer_loop_cond(
    program: Program,
    max_iterations: int,
    *,
    pool_cap: int | None = None,
    pair_cap: int | None = None,
    passes: int | None = None,
) -> list[LoopingCondition]:
    return analyze(
        program,
        max_iterations,
        pool_cap=pool_cap,
        pair_cap=pair_cap,
        passes=passes,
    ).conditions


def analyze(
    program: Program,
    max_iterations: int | None = None,
    *,
    pool_cap: int | None = None,
    pair_cap: int | None = None,
    passes: int | None = None,
) -> LoopAnalysis:
    """Unfold the program, build its loop dictionary and derive the conditions."""
    max_iterations = MAX_ITERATIONS if max_iterations is None else max_iterations
    pool = tp_beta_upto(program, max_iterations, pool_cap)
    dictionary = build_dictionary(program, pool, pair_cap, passes)
    conditions = conditions_from_dict(dictionary)
    logger.info(
        "Found %s looping pairs and %s looping conditions at max=%s",
        len(dictionary),
        len(conditions),
        max_iterations,
    )
    return LoopAnalysis(program, max_iterations, pool, dictionary, conditions)
