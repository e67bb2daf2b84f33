"""
Looping modes and optimality of terminating multi-modes.

A mode of p is the set of argument positions that are required to be
ground. Every looping condition yields a looping mode; a terminating
multi-mode supplied by the user is optimal when every mode it does not
cover is covered by a looping mode.

"""
from __future__ import annotations

import enum
import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .exceptions import ResourceError
from .loops import LoopAnalysis, LoopingCondition, analyze
from .settings import MODE_ARITY_BOUND
from .terms import Predicate, Program, is_ground

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Mode:
    predicate: Predicate
    positions: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", frozenset(self.positions))
        for i in self.positions:
            if not 1 <= i <= self.predicate.arity:
                raise ValueError(f"Position {i} is out of range for {self.predicate}")

    def as_list(self) -> list[int]:
        return sorted(self.positions)

    def __str__(self) -> str:
        return "{" + ",".join(str(i) for i in self.as_list()) + "}"


class ModeRole(enum.Enum):
    TERMINATING = "terminating"
    LOOPING = "looping"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class MultiMode:
    """A finite set of modes of one predicate, tagged with its role."""

    predicate: Predicate
    modes: frozenset[Mode] = field(default_factory=frozenset)
    role: ModeRole = ModeRole.UNDECIDED

    def __post_init__(self) -> None:
        object.__setattr__(self, "modes", frozenset(self.modes))
        for mode in self.modes:
            if mode.predicate != self.predicate:
                raise ValueError(f"Mode {mode} is not a mode of {self.predicate}")

    @classmethod
    def from_positions(
        cls,
        predicate: Predicate,
        position_sets: Iterable[Iterable[int]],
        role: ModeRole = ModeRole.TERMINATING,
    ) -> MultiMode:
        return cls(
            predicate,
            frozenset(Mode(predicate, frozenset(ps)) for ps in position_sets),
            role,
        )

    def as_lists(self) -> list[list[int]]:
        """Return the modes as ascending integer lists, sorted lexicographically."""
        return sorted(mode.as_list() for mode in self.modes)

    def __len__(self) -> int:
        return len(self.modes)

    def __contains__(self, mode: object) -> bool:
        return mode in self.modes

    def __str__(self) -> str:
        inner = ", ".join("{" + ",".join(map(str, ps)) + "}" for ps in self.as_lists())
        return "{" + inner + "}"


def looping_mode(condition: LoopingCondition) -> Mode:
    """Neutral positions plus the positions holding a ground argument."""
    atom = condition.atom
    ground = {i for i, arg in enumerate(atom.args, start=1) if is_ground(arg)}
    return Mode(atom.predicate, condition.tau.domain(atom.predicate) | ground)


def looping_modes(
    conditions: Iterable[LoopingCondition], predicate: Predicate
) -> MultiMode:
    return MultiMode(
        predicate,
        frozenset(looping_mode(c) for c in conditions if c.predicate == predicate),
        ModeRole.LOOPING,
    )


def all_modes(predicate: Predicate, bound: int | None = None) -> frozenset[Mode]:
    """Return every subset of the argument positions of predicate."""
    bound = MODE_ARITY_BOUND if bound is None else bound
    if predicate.arity > bound:
        raise ResourceError(
            "mode arity bound",
            bound,
            f"{predicate} has {2 ** predicate.arity} modes; raise "
            f"LOOPFINDER_MODE_ARITY_BOUND above {bound} to enumerate them",
        )
    positions = range(1, predicate.arity + 1)
    return frozenset(
        Mode(predicate, frozenset(subset))
        for size in range(predicate.arity + 1)
        for subset in itertools.combinations(positions, size)
    )


def less_general_closure(
    multi_mode: MultiMode, bound: int | None = None
) -> frozenset[Mode]:
    """Modes requiring at least the positions of some member."""
    return frozenset(
        m
        for m in all_modes(multi_mode.predicate, bound)
        if any(m.positions >= member.positions for member in multi_mode.modes)
    )


def more_general_closure(
    multi_mode: MultiMode, bound: int | None = None
) -> frozenset[Mode]:
    """Modes requiring at most the positions of some member."""
    return frozenset(
        m
        for m in all_modes(multi_mode.predicate, bound)
        if any(m.positions <= member.positions for member in multi_mode.modes)
    )


@dataclass(frozen=True)
class ModeVerdict:
    """Terminating, looping and undecided multi-modes of one predicate."""

    predicate: Predicate
    terminating: MultiMode
    looping: MultiMode
    undecided: MultiMode

    @property
    def certified(self) -> bool:
        """True when the terminating multi-mode is optimal."""
        return not self.undecided.modes


def mode_verdict(
    terminating: MultiMode, looping: MultiMode, bound: int | None = None
) -> ModeVerdict:
    predicate = terminating.predicate
    covered = less_general_closure(terminating, bound) | more_general_closure(
        looping, bound
    )
    undecided = MultiMode(
        predicate, all_modes(predicate, bound) - covered, ModeRole.UNDECIDED
    )
    return ModeVerdict(predicate, terminating, looping, undecided)


def optimal_tc(
    program: Program,
    max_iterations: int | None = None,
    terminating: Mapping[Predicate, MultiMode] | None = None,
    *,
    analysis: LoopAnalysis | None = None,
    pool_cap: int | None = None,
    pair_cap: int | None = None,
    passes: int | None = None,
    bound: int | None = None,
) -> dict[Predicate, ModeVerdict]:
    """
    Decide, per predicate of program, which modes are left undecided.

    Predicates missing from terminating get an empty terminating
    multi-mode. Entries for predicates that do not occur in the program
    are ignored with a warning. A previously computed analysis can be
    passed in to skip the unfolding.

    """
    terminating = dict(terminating or {})
    for predicate in sorted(set(terminating) - program.signature):
        logger.warning("Ignoring modes for %s: not in the program", predicate)
    if analysis is None:
        analysis = analyze(
            program,
            max_iterations,
            pool_cap=pool_cap,
            pair_cap=pair_cap,
            passes=passes,
        )
    verdicts: dict[Predicate, ModeVerdict] = {}
    for predicate in sorted(program.signature):
        tm = terminating.get(predicate, MultiMode(predicate, role=ModeRole.TERMINATING))
        lm = looping_modes(analysis.conditions, predicate)
        verdicts[predicate] = mode_verdict(tm, lm, bound)
    return verdicts


def is_optimal(verdicts: Mapping[Predicate, ModeVerdict]) -> bool:
    return all(v.certified for v in verdicts.values())
