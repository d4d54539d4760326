from django.core.management.base import BaseCommand, CommandError

from api.quantum.bounds import quote
from api.services import bounds_for_instance

from ._common import (EXIT_VALIDATION, command_errors, emit, load_circuit,
                      load_cuts, parse_observable)

COLUMNS = ("fragment", "deg", "qdeg", "k", "k_proof", "n", "total_shots")


class Command(BaseCommand):
    help = ("Per-fragment sample-complexity quotes, either for a (circuit, "
            "cuts, observable) instance or for explicit graph counts.")

    def add_arguments(self, parser):
        parser.add_argument("--epsilon", type=float, required=True)
        parser.add_argument("--delta", type=float, required=True)
        parser.add_argument("--o-norm",
                            type=float,
                            default=None,
                            help="Default: sum of |coefficients|")
        parser.add_argument("--circuit")
        parser.add_argument("--cuts")
        parser.add_argument("--obs")
        # explicit counts, used when no circuit is given
        parser.add_argument("--qdeg", type=int)
        parser.add_argument("--deg", type=int)
        parser.add_argument("--n-fragments", type=int)
        parser.add_argument("--n-edges", type=int)
        parser.add_argument("--k-size", type=int)
        parser.add_argument("--n-kappa-gamma", type=int)
        parser.add_argument("--format",
                            choices=["json", "text"],
                            default="json")
        parser.add_argument("--out")

    def handle(self, *args, **opts):
        with command_errors():
            if opts["circuit"]:
                if not opts["obs"]:
                    raise CommandError("--obs is required with --circuit",
                                       returncode=EXIT_VALIDATION)
                quotes = bounds_for_instance(load_circuit(opts["circuit"]),
                                             load_cuts(opts["cuts"]),
                                             parse_observable(opts["obs"]),
                                             opts["epsilon"], opts["delta"],
                                             opts["o_norm"])
            else:
                quotes = [self._explicit(opts).to_json()]

        if opts["format"] == "json":
            emit(self, {"quotes": quotes}, opts["out"])
            return
        widths = [max(len(c), 14) for c in COLUMNS]
        header = "  ".join(c.rjust(w) for c, w in zip(COLUMNS, widths))
        rows = [header]
        for q in quotes:
            cells = []
            for c, w in zip(COLUMNS, widths):
                v = q[c]
                cells.append((f"{v:.6g}" if isinstance(v, float) else
                              str(v)).rjust(w))
            rows.append("  ".join(cells))
        self.stdout.write("\n".join(rows))

    def _explicit(self, opts):
        keys = ("qdeg", "deg", "n_fragments", "n_edges", "k_size",
                "n_kappa_gamma")
        missing = [k for k in keys if opts[k] is None]
        if missing:
            raise CommandError(
                "without --circuit, give --" +
                ", --".join(k.replace("_", "-") for k in missing),
                returncode=EXIT_VALIDATION)
        return quote(**{k: opts[k]
                        for k in keys},
                     epsilon=opts["epsilon"],
                     delta=opts["delta"],
                     o_norm=1.0 if opts["o_norm"] is None else opts["o_norm"])
