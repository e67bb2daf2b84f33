from __future__ import annotations

import logging

from django.core.management.base import CommandError, CommandParser
from django.utils.translation import gettext_lazy as _lazy

from loopfinder.helpers import analysis_report, report_json
from loopfinder.loops import LoopingCondition, analyze
from loopfinder.management.base import UNCONFIRMED, AnalysisCommand, AnalysisConfig
from loopfinder.modes import looping_mode, optimal_tc
from loopfinder.oracle import confirm
from loopfinder.settings import ORACLE_DEPTH, ORACLE_ENABLED

logger = logging.getLogger(__name__)


class Command(AnalysisCommand):
    help = _lazy(
        "Infer looping conditions and looping modes of a logic program, "
        "confirming each condition with the derivation oracle."
    )

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        self.add_loop_arguments(parser)
        parser.add_argument(
            "--oracle-depth",
            dest="oracle_depth",
            type=int,
            default=ORACLE_DEPTH,
            help="Derivation depth a condition must reach to be confirmed.",
        )
        parser.add_argument(
            "--no-oracle",
            dest="no_oracle",
            action="store_true",
            default=not ORACLE_ENABLED,
            help="Skip confirming the conditions.",
        )
        parser.add_argument(
            "--modes",
            dest="modes",
            default=None,
            help="JSON file of terminating modes to report against.",
        )

    def confirm_all(
        self, conditions: list[LoopingCondition], depth: int
    ) -> dict[LoopingCondition, bool]:
        confirmations: dict[LoopingCondition, bool] = {}
        for condition in conditions:
            confirmed, _ = confirm(condition, depth)
            if not confirmed:
                logger.warning(
                    "Looping condition %s not confirmed at depth %s", condition, depth
                )
            confirmations[condition] = confirmed
        return confirmations

    def run(self, config: AnalysisConfig) -> None:
        program = self.load_program(config)
        terminating = self.load_modes(config)
        analysis = analyze(
            program,
            config.max_iterations,
            pool_cap=config.pool_cap,
            pair_cap=config.pair_cap,
            passes=config.passes,
        )
        verdicts = optimal_tc(program, terminating=terminating, analysis=analysis)
        confirmations = (
            self.confirm_all(analysis.conditions, config.oracle_depth)
            if config.oracle_enabled
            else {}
        )
        if config.output_format == "json":
            report = analysis_report(
                str(config.program_path), analysis, verdicts, confirmations
            )
            self.stdout.write(report_json(report))
        else:
            self.stdout.write(
                f"Looping conditions of {config.program_path} "
                f"(max={config.max_iterations}):"
            )
            for condition in analysis.conditions:
                line = f"  {condition}  mode {looping_mode(condition)}"
                if condition in confirmations:
                    status = "confirmed" if confirmations[condition] else "unconfirmed"
                    line = f"{line}  {status}"
                self.stdout.write(line)
            self.stdout.write("Looping modes:")
            for predicate, verdict in verdicts.items():
                self.stdout.write(f"  {predicate}: {verdict.looping}")
        unconfirmed = sum(1 for ok in confirmations.values() if not ok)
        if unconfirmed:
            raise CommandError(
                f"{unconfirmed} looping conditions were not confirmed "
                f"at depth {config.oracle_depth}",
                returncode=UNCONFIRMED,
            )
