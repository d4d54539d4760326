from django.core.management.base import BaseCommand

from api.quantum.cutter import cut_circuit, graph_to_json

from ._common import command_errors, emit, load_circuit, load_cuts


class Command(BaseCommand):
    help = "Cut a circuit and export the fragment graph with its slot tables."

    def add_arguments(self, parser):
        parser.add_argument("--circuit", required=True)
        parser.add_argument("--cuts", help="Cuts JSON (default: no cuts)")
        parser.add_argument("--allow-cycles",
                            action="store_true",
                            help="Accept directed cycles between fragments")
        parser.add_argument("--out")

    def handle(self, *args, **opts):
        with command_errors():
            circuit = load_circuit(opts["circuit"])
            cuts = load_cuts(opts["cuts"])
            graph = cut_circuit(circuit,
                                cuts,
                                allow_cycles=opts["allow_cycles"])
        emit(self, graph_to_json(graph), opts["out"])
        if opts["out"]:
            self.stdout.write(
                self.style.NOTICE(f"{len(graph.fragments)} fragments, "
                                  f"{len(graph.edges)} edges"))
