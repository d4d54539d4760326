from django.core.management.base import BaseCommand, CommandError

from api.models import ExperimentRun
from api.quantum.experiments import read_csv, unobserved_stats
from api.services import records_for_run

from ._common import EXIT_VALIDATION, command_errors, emit


class Command(BaseCommand):
    help = ("Empirical probability that the target Pauli pattern was never "
            "observed, by (shots, obs_size), next to the analytic value.")

    def add_arguments(self, parser):
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--csv", help="CSV written by the experiment")
        source.add_argument("--run",
                            type=int,
                            help="Stored experiment run id")
        parser.add_argument("--format",
                            choices=["json", "text"],
                            default="text")
        parser.add_argument("--out")

    def handle(self, *args, **opts):
        with command_errors():
            if opts["csv"]:
                try:
                    records = read_csv(opts["csv"])
                except FileNotFoundError:
                    raise CommandError(f"no such file: {opts['csv']}",
                                       returncode=EXIT_VALIDATION)
            else:
                try:
                    run = ExperimentRun.objects.get(pk=opts["run"])
                except ExperimentRun.DoesNotExist:
                    raise CommandError(f"run {opts['run']} not found",
                                       returncode=EXIT_VALIDATION)
                records = records_for_run(run)
            rows = unobserved_stats(records)

        if opts["format"] == "json":
            emit(self, {"rows": [r.to_json() for r in rows]}, opts["out"])
            return
        if not rows:
            self.stdout.write(self.style.WARNING("No |F| = 1 rows found."))
            return
        lines = [
            f"{'shots':>8} {'size':>5} {'trials':>7} {'unobs':>6} "
            f"{'empirical':>10} {'analytic':>10}"
        ]
        for r in rows:
            lines.append(f"{r.shots:>8} {r.obs_size:>5} {r.trials:>7} "
                         f"{r.unobserved:>6} {r.empirical:>10.4f} "
                         f"{r.analytic:>10.4f}")
        self.stdout.write("\n".join(lines))
