import json
from dataclasses import asdict
from pathlib import Path

from django.conf import settings
from django.core.management.base import BaseCommand

from api.quantum.experiments import (ExperimentConfig, experiment_metadata,
                                     meta_path, run_experiment)
from api.services import save_experiment

from ._common import command_errors, emit, int_list


class Command(BaseCommand):
    help = ("Run fragmented vs. unfragmented shadow estimation on the "
            "clustered ansatz and write one CSV row per grid cell.")

    def add_arguments(self, parser):
        parser.add_argument("--clusters", type=int, default=3)
        parser.add_argument("--cluster-size", type=int, default=3)
        parser.add_argument("--fragments", default="1,2,3")
        parser.add_argument("--obs-size", default="1,5,9")
        parser.add_argument("--shots",
                            default="100,1000,10000",
                            help="Total shot budgets, split over fragments")
        parser.add_argument("--trials",
                            type=int,
                            default=settings.SHADOWCUT_EXPERIMENT_TRIALS)
        parser.add_argument("--penalty",
                            action="store_true",
                            help="Record abs_error = 1 for unobserved rows")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--groups", type=int, default=1)
        parser.add_argument("--workers", type=int, default=None)
        parser.add_argument("--format",
                            choices=["csv", "json"],
                            default="csv")
        parser.add_argument("--out")
        parser.add_argument("--save",
                            action="store_true",
                            help="Also store the run in the database")

    def handle(self, *args, **opts):
        out = Path(opts["out"] or settings.SHADOWCUT_OUTPUT_DIR /
                   f"experiment_seed{opts['seed']}.csv")
        with command_errors():
            config = ExperimentConfig(clusters=opts["clusters"],
                                      cluster_size=opts["cluster_size"],
                                      fragment_counts=tuple(
                                          int_list(opts["fragments"])),
                                      obs_sizes=tuple(int_list(
                                          opts["obs_size"])),
                                      shot_grid=tuple(int_list(opts["shots"])),
                                      trials=opts["trials"],
                                      penalty_mode=opts["penalty"],
                                      base_seed=opts["seed"],
                                      groups=opts["groups"])
            self.stdout.write(
                self.style.NOTICE(
                    f"{config.trials} trials x {len(config.fragment_counts)} "
                    f"fragment counts x {len(config.shot_grid)} budgets x "
                    f"{len(config.obs_sizes)} sizes"))
            csv_out = out if opts["format"] == "csv" else None
            records = run_experiment(config, csv_out, workers=opts["workers"])

        if opts["format"] == "json":
            emit(self, {
                "meta": experiment_metadata(config, len(records)),
                "rows": [asdict(r) for r in records],
            }, str(out))
        else:
            self.stdout.write(
                self.style.SUCCESS(f"Wrote {len(records)} rows to {out} "
                                   f"(+ {meta_path(out).name})"))
        if opts["save"]:
            meta = experiment_metadata(config, len(records))
            run = save_experiment(config,
                                  records,
                                  meta=json.loads(json.dumps(meta)),
                                  csv_path=str(out))
            self.stdout.write(self.style.SUCCESS(f"Stored run {run.pk}"))
