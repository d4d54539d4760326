from django.core.management.base import BaseCommand, CommandError

from api.quantum.ansatz import gen_clustered_ansatz
from api.serializers import circuit_to_json, cuts_to_json

from ._common import EXIT_VALIDATION, command_errors, emit


class Command(BaseCommand):
    help = ("Generate the clustered Haar ansatz and the cut list for a "
            "target fragment count.")

    def add_arguments(self, parser):
        parser.add_argument("--clusters", type=int, default=3)
        parser.add_argument("--cluster-size", type=int, default=3)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument(
            "--fragments",
            type=int,
            default=None,
            help="Fragment count to cut for (default: one per cluster)")
        parser.add_argument("--out", help="Circuit JSON path (default stdout)")
        parser.add_argument("--cuts-out", help="Cuts JSON path")

    def handle(self, *args, **opts):
        with command_errors():
            ansatz = gen_clustered_ansatz(opts["clusters"],
                                          opts["cluster_size"], opts["seed"])
        fragments = opts["fragments"] or ansatz.clusters
        if fragments not in ansatz.cut_lists:
            raise CommandError(
                f"--fragments must be within 1..{ansatz.clusters}",
                returncode=EXIT_VALIDATION)

        emit(self, circuit_to_json(ansatz.circuit), opts["out"])
        cuts = cuts_to_json(ansatz.cut_lists[fragments])
        if opts["cuts_out"]:
            emit(self, cuts, opts["cuts_out"])
        if not opts["out"]:
            return
        self.stdout.write(
            self.style.NOTICE(
                f"{ansatz.circuit.n_qubits} qubits, "
                f"{len(ansatz.circuit.gates)} gates, "
                f"{len(cuts['cuts'])} cuts for {fragments} fragments"))
