from __future__ import annotations

from django.utils.translation import gettext_lazy as _lazy

from loopfinder.helpers import fixpoint_value, report_json
from loopfinder.management.base import AnalysisCommand, AnalysisConfig
from loopfinder.unfolding import tp_beta_upto


class Command(AnalysisCommand):
    help = _lazy("Print the stamped binary unfoldings of a logic program.")

    def run(self, config: AnalysisConfig) -> None:
        program = self.load_program(config)
        pool = tp_beta_upto(program, config.max_iterations, config.pool_cap)
        if config.output_format == "json":
            report = {
                "program": str(config.program_path),
                "max": config.max_iterations,
                "fixpoint": fixpoint_value(pool),
                "clauses": [
                    {"stamp": pool.stamp(key), "clause": key}
                    for key in pool.ordered_keys()
                ],
            }
            self.stdout.write(report_json(report))
            return
        self.stdout.write(pool.dump(), ending="")
        if pool.fixpoint_reached is not None:
            self.stdout.write(f"fixpoint reached at iteration {pool.fixpoint_reached}")
        else:
            self.stdout.write(f"no fixpoint within {pool.iterations} iterations")
