from __future__ import annotations

from django.core.management.base import CommandError, CommandParser
from django.utils.translation import gettext_lazy as _lazy

from loopfinder.helpers import analysis_report, report_json
from loopfinder.loops import analyze
from loopfinder.management.base import NOT_OPTIMAL, AnalysisCommand, AnalysisConfig
from loopfinder.modes import is_optimal, optimal_tc


class Command(AnalysisCommand):
    help = _lazy(
        "Check whether terminating modes are optimal, using the looping "
        "modes inferred for the program."
    )

    def add_arguments(self, parser: CommandParser) -> None:
        super().add_arguments(parser)
        self.add_loop_arguments(parser)
        parser.add_argument(
            "--modes",
            dest="modes",
            required=True,
            help="JSON file mapping 'name/arity' to lists of terminating modes.",
        )

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
        if config.output_format == "json":
            report = analysis_report(str(config.program_path), analysis, verdicts)
            self.stdout.write(report_json(report))
        else:
            for predicate, verdict in verdicts.items():
                self.stdout.write(str(predicate))
                self.stdout.write(f"  terminating: {verdict.terminating}")
                self.stdout.write(f"  looping: {verdict.looping}")
                self.stdout.write(f"  undecided: {verdict.undecided}")
        if not is_optimal(verdicts):
            undecided = ", ".join(
                str(p) for p, v in verdicts.items() if not v.certified
            )
            raise CommandError(
                f"Undecided modes remain for {undecided}", returncode=NOT_OPTIMAL
            )
        if config.output_format == "text":
            self.stdout.write("optimal")
