import dataclasses
from pathlib import Path

from django.core.management.base import BaseCommand

from api.quantum.cutter import cut_circuit
from api.quantum.shadows import collect_choi_shadow, write_shadow_file
from api.services import fragment_seed

from ._common import command_errors, load_circuit, load_cut_plan


def shadow_file_name(fragment_id: int) -> str:
    return f"fragment_{fragment_id}.jsonl"


class Command(BaseCommand):
    help = ("Collect Choi-state classical shadows for every fragment of a "
            "cut circuit and write one JSON-lines file per fragment.")

    def add_arguments(self, parser):
        parser.add_argument("--circuit", required=True)
        parser.add_argument("--cuts", help="Cuts JSON (default: no cuts)")
        parser.add_argument("--graph",
                            help="Fragment graph JSON written by the cut "
                            "command, instead of --cuts")
        parser.add_argument("--shots",
                            type=int,
                            required=True,
                            help="Shots per fragment")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--out", required=True, help="Output directory")

    def handle(self, *args, **opts):
        out_dir = Path(opts["out"])
        with command_errors():
            circuit = load_circuit(opts["circuit"])
            cuts = load_cut_plan(circuit, opts["cuts"], opts["graph"])
            graph = cut_circuit(circuit, cuts, allow_cycles=True)
            for frag in graph.fragments:
                ensemble, layout = collect_choi_shadow(
                    frag, opts["shots"], fragment_seed(opts["seed"], frag.id))
                ensemble = dataclasses.replace(ensemble,
                                               provenance={
                                                   **ensemble.provenance,
                                                   "parent": circuit.digest(),
                                                   "base_seed": opts["seed"],
                                               })
                path = write_shadow_file(out_dir / shadow_file_name(frag.id),
                                         ensemble, layout)
                self.stdout.write(f"fragment {frag.id}: {path}")
        self.stdout.write(
            self.style.SUCCESS(f"Wrote {len(graph.fragments)} shadow files "
                               f"to {out_dir}"))
