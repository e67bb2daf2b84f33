from __future__ import annotations

import json
from typing import Any, Mapping

from django.core.serializers.json import DjangoJSONEncoder

from .exceptions import ModesFileError
from .loops import LoopAnalysis, LoopingCondition
from .modes import ModeRole, ModeVerdict, MultiMode, looping_mode
from .terms import Predicate, canonical_form
from .unfolding import BinClausePool


def load_modes(text: str) -> dict[Predicate, MultiMode]:
    """
    Parse a terminating-modes file.

    The file is a JSON object mapping predicate indicators to lists of
    modes, each mode a list of argument positions:

        {"append/3": [[1], [3]], "append3/4": [[1, 2], [1, 4]]}

    Raises ModesFileError for anything that does not follow this shape.

    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as ex:
        raise ModesFileError(f"Modes file is not valid JSON: {ex}") from ex
    if not isinstance(data, dict):
        raise ModesFileError("Modes file must hold a JSON object")
    modes: dict[Predicate, MultiMode] = {}
    for indicator, position_sets in data.items():
        try:
            predicate = Predicate.parse(indicator)
        except ValueError as ex:
            raise ModesFileError(str(ex)) from ex
        if not isinstance(position_sets, list) or not all(
            isinstance(ps, list) for ps in position_sets
        ):
            raise ModesFileError(f"Modes of {indicator} must be a list of lists")
        for ps in position_sets:
            # bool is an int subclass
            if not all(isinstance(i, int) and not isinstance(i, bool) for i in ps):
                raise ModesFileError(f"Mode {ps} of {indicator} must list integers")
        try:
            modes[predicate] = MultiMode.from_positions(
                predicate, position_sets, ModeRole.TERMINATING
            )
        except ValueError as ex:
            raise ModesFileError(f"{indicator}: {ex}") from ex
    return modes


def fixpoint_value(pool: BinClausePool) -> bool | int:
    """The fixpoint iteration when one was observed, else False."""
    if pool.fixpoint_reached is None:
        return False
    return pool.fixpoint_reached


def condition_record(
    condition: LoopingCondition,
    pool: BinClausePool,
    confirmed: bool | None = None,
) -> dict[str, Any]:
    record: dict[str, Any] = {
        "predicate": str(condition.predicate),
        "atom": canonical_form(condition.atom),
        "neutral_positions": {
            str(i): term for i, term in condition.neutral_positions().items()
        },
        "looping_mode": looping_mode(condition).as_list(),
        "provenance": [
            {"stamp": pool.stamp(clause), "clause": canonical_form(clause)}
            for clause in condition.provenance.bin_seq
        ],
    }
    if confirmed is not None:
        record["confirmed"] = confirmed
    return record


def verdict_record(verdict: ModeVerdict) -> dict[str, list[list[int]]]:
    return {
        "looping": verdict.looping.as_lists(),
        "terminating": verdict.terminating.as_lists(),
        "undecided": verdict.undecided.as_lists(),
    }


def analysis_report(
    program: str,
    analysis: LoopAnalysis,
    verdicts: Mapping[Predicate, ModeVerdict],
    confirmations: Mapping[LoopingCondition, bool] | None = None,
) -> dict[str, Any]:
    """Shape an analysis into the report record used for JSON output."""
    confirmations = confirmations or {}
    return {
        "program": program,
        "max": analysis.max_iterations,
        "fixpoint": fixpoint_value(analysis.pool),
        "conditions": [
            condition_record(c, analysis.pool, confirmations.get(c))
            for c in analysis.conditions
        ],
        "modes": {str(p): verdict_record(v) for p, v in sorted(verdicts.items())},
    }


def report_json(report: Mapping[str, Any]) -> str:
    return json.dumps(report, cls=DjangoJSONEncoder, indent=2, sort_keys=True)
