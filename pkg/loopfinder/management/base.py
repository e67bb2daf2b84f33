from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from django.core.management.base import BaseCommand, CommandError, CommandParser

from ..exceptions import ModesFileError, ParseError, ResourceError
from ..helpers import load_modes
from ..modes import MultiMode
from ..parser import parse_program
from ..settings import (
    MAX_ITERATIONS,
    ORACLE_DEPTH,
    ORACLE_ENABLED,
    PAIR_CAP,
    PASS_LIMIT,
    POOL_CAP,
)
from ..terms import Predicate, Program

logger = logging.getLogger(__name__)

# exit statuses
INPUT_ERROR = 2
RESOURCE_ERROR = 3
NOT_OPTIMAL = 1
UNCONFIRMED = 4


@dataclass(frozen=True)
class AnalysisConfig:
    """The options of one command run, defaults taken from settings."""

    program_path: Path
    max_iterations: int = MAX_ITERATIONS
    output_format: str = "text"
    oracle_enabled: bool = ORACLE_ENABLED
    oracle_depth: int = ORACLE_DEPTH
    pool_cap: int = POOL_CAP
    pair_cap: int = PAIR_CAP
    passes: int = PASS_LIMIT
    modes_path: Path | None = None

    def __post_init__(self) -> None:
        if self.max_iterations < 0:
            raise ValueError("--max must be non-negative")
        if self.oracle_depth < 1:
            raise ValueError("--oracle-depth must be at least 1")
        if self.output_format not in ("text", "json"):
            raise ValueError(f"Unknown output format: '{self.output_format}'")

    @classmethod
    def from_options(cls, options: dict[str, Any]) -> AnalysisConfig:
        modes = options.get("modes")
        return cls(
            program_path=Path(options["program"]),
            max_iterations=options.get("max_iterations", MAX_ITERATIONS),
            output_format=options.get("format", "text"),
            oracle_enabled=not options.get("no_oracle", not ORACLE_ENABLED),
            oracle_depth=options.get("oracle_depth", ORACLE_DEPTH),
            pool_cap=options.get("pool_cap", POOL_CAP),
            pair_cap=options.get("pair_cap", PAIR_CAP),
            passes=options.get("passes", PASS_LIMIT),
            modes_path=Path(modes) if modes else None,
        )


def _read(path: Path) -> str:
    try:
        return path.read_text()
    except OSError as ex:
        message = f"Cannot read {path}: {ex.strerror or ex}"
        raise CommandError(message, returncode=INPUT_ERROR) from ex


class AnalysisCommand(BaseCommand):
    """
    Shared plumbing of the analysis commands.

    Subclasses implement `run`. Input and budget errors raised while it
    runs are turned into a CommandError carrying the exit status.

    """

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        parser.add_argument("program", help="Path of the logic program to analyze.")
        parser.add_argument(
            "--max",
            dest="max_iterations",
            type=int,
            default=MAX_ITERATIONS,
            help="Number of binary unfolding iterations.",
        )
        parser.add_argument(
            "--format",
            dest="format",
            choices=("text", "json"),
            default="text",
            help="Output format.",
        )
        parser.add_argument(
            "--pool-cap",
            dest="pool_cap",
            type=int,
            default=POOL_CAP,
            help="Abort when the binary clause pool grows beyond this size.",
        )

    def add_loop_arguments(self, parser: CommandParser) -> None:
        parser.add_argument(
            "--pair-cap",
            dest="pair_cap",
            type=int,
            default=PAIR_CAP,
            help="Longest clause sequence kept in the loop dictionary.",
        )
        parser.add_argument(
            "--passes",
            dest="passes",
            type=int,
            default=PASS_LIMIT,
            help="Passes over the binary clause pool.",
        )

    def load_program(self, config: AnalysisConfig) -> Program:
        text = _read(config.program_path)
        try:
            return parse_program(text)
        except ParseError as ex:
            raise CommandError(
                f"{config.program_path}: {ex}", returncode=INPUT_ERROR
            ) from ex

    def load_modes(self, config: AnalysisConfig) -> dict[Predicate, MultiMode]:
        if config.modes_path is None:
            return {}
        text = _read(config.modes_path)
        try:
            return load_modes(text)
        except ModesFileError as ex:
            raise CommandError(
                f"{config.modes_path}: {ex}", returncode=INPUT_ERROR
            ) from ex

    def run(self, config: AnalysisConfig) -> None:
        raise NotImplementedError

    def handle(self, *args: Any, **options: Any) -> None:
        try:
            config = AnalysisConfig.from_options(options)
        except ValueError as ex:
            raise CommandError(str(ex), returncode=INPUT_ERROR) from ex
        try:
            self.run(config)
        except CommandError:
            raise
        except ResourceError as ex:
            raise CommandError(str(ex), returncode=RESOURCE_ERROR) from ex
        except Exception:
            logger.exception("Error analyzing %s", config.program_path)
            raise
