from django.core.management.base import BaseCommand, CommandError

from api.quantum.ansatz import random_cut_instance, random_pauli_observable
from api.quantum.oracle import exact_cut_identity_check
from api.quantum.rng import derive_seed

from ._common import (EXIT_VALIDATION, command_errors, emit, load_circuit,
                      load_cuts, parse_observable)


class Command(BaseCommand):
    help = ("Check the cut identity: exact uncut expectation against the "
            "exact recombination over fragment Choi matrices.")

    def add_arguments(self, parser):
        parser.add_argument("--circuit")
        parser.add_argument("--cuts")
        parser.add_argument("--obs")
        parser.add_argument(
            "--instances",
            type=int,
            default=0,
            help="Check this many random instances instead of one circuit")
        parser.add_argument("--qubits", type=int, default=6)
        parser.add_argument("--gates", type=int, default=8)
        parser.add_argument("--n-cuts", type=int, default=3)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--tolerance", type=float, default=1e-9)
        parser.add_argument("--out")

    def handle(self, *args, **opts):
        if opts["instances"]:
            result = self._random_instances(opts)
        else:
            if not (opts["circuit"] and opts["obs"]):
                raise CommandError("--circuit and --obs are required",
                                   returncode=EXIT_VALIDATION)
            with command_errors():
                check = exact_cut_identity_check(
                    load_circuit(opts["circuit"]), load_cuts(opts["cuts"]),
                    parse_observable(opts["obs"]))
            result = check._asdict()
        emit(self, result, opts["out"])
        if result["delta"] > opts["tolerance"]:
            raise CommandError(
                f"cut identity violated: delta={result['delta']:.3g}",
                returncode=1)

    def _random_instances(self, opts) -> dict:
        worst = 0.0
        with command_errors():
            for i in range(opts["instances"]):
                circuit, cuts = random_cut_instance(
                    opts["qubits"], opts["gates"], opts["n_cuts"],
                    derive_seed(opts["seed"], i, 0))
                size = 1 + derive_seed(opts["seed"], i, 1) % opts["qubits"]
                observable = random_pauli_observable(
                    opts["qubits"], size, derive_seed(opts["seed"], i, 2))
                check = exact_cut_identity_check(circuit, cuts, observable)
                worst = max(worst, check.delta)
        self.stderr.write(
            self.style.NOTICE(f"{opts['instances']} instances checked"))
        return {"instances": opts["instances"], "delta": worst}
