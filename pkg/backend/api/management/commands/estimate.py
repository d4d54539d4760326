from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from api.quantum.shadows import read_shadow_file
from api.services import estimate_observable

from ._common import (EXIT_VALIDATION, command_errors, emit, load_circuit,
                      load_cut_plan, parse_observable)
from .shadow import shadow_file_name


class Command(BaseCommand):
    help = ("Estimate a Pauli observable by cutting, collecting Choi shadows "
            "(or reading them with --shadows) and recombining.")

    def add_arguments(self, parser):
        parser.add_argument("--circuit", required=True)
        parser.add_argument("--cuts", help="Cuts JSON (default: no cuts)")
        parser.add_argument("--graph",
                            help="Fragment graph JSON written by the cut "
                            "command, instead of --cuts")
        parser.add_argument("--obs",
                            required=True,
                            help='Observable, e.g. "X1 Y4 Z7" or @file')
        parser.add_argument("--shots",
                            type=int,
                            default=1000,
                            help="Shots per fragment")
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--groups",
                            type=int,
                            default=1,
                            help="Median-of-means groups (1 = plain mean)")
        parser.add_argument("--shadows",
                            help="Directory written by the shadow command")
        parser.add_argument("--no-exact", action="store_true")
        parser.add_argument("--format",
                            choices=["json", "text"],
                            default="json")
        parser.add_argument("--out")

    def handle(self, *args, **opts):
        if opts["shots"] < 1 or opts["groups"] < 1:
            raise CommandError("--shots and --groups must be positive",
                               returncode=EXIT_VALIDATION)
        with command_errors():
            circuit = load_circuit(opts["circuit"])
            cuts = load_cut_plan(circuit, opts["cuts"], opts["graph"])
            observable = parse_observable(opts["obs"])
            ensembles = None
            if opts["shadows"]:
                ensembles = self._read_shadows(Path(opts["shadows"]),
                                               circuit.digest())
            report = estimate_observable(circuit,
                                         cuts,
                                         observable,
                                         shots=opts["shots"],
                                         seed=opts["seed"],
                                         groups=opts["groups"],
                                         with_exact=not opts["no_exact"],
                                         ensembles=ensembles)

        if opts["format"] == "json":
            emit(self, report.to_json(), opts["out"])
            return
        lines = [f"estimate   {report.estimate:.6f}"]
        if report.exact is not None:
            lines.append(f"exact      {report.exact:.6f}")
            lines.append(
                f"abs_error  {abs(report.estimate - report.exact):.6f}")
        lines.append(f"terms      {report.terms}")
        lines.append(f"M-sums     {report.m_assignments}")
        lines.append(f"unobserved {report.unobserved_count}")
        self.stdout.write("\n".join(lines))

    def _read_shadows(self, directory: Path, digest: str) -> dict:
        ensembles = {}
        for path in sorted(directory.glob("fragment_*.jsonl")):
            ensemble, _ = read_shadow_file(path)
            fid = ensemble.provenance.get("fragment")
            if path.name != shadow_file_name(fid):
                raise CommandError(f"{path}: header names fragment {fid}",
                                   returncode=EXIT_VALIDATION)
            if ensemble.provenance.get("parent") != digest:
                raise CommandError(
                    f"{path} was recorded for another circuit",
                    returncode=EXIT_VALIDATION)
            ensembles[fid] = ensemble
        if not ensembles:
            raise CommandError(f"no shadow files in {directory}",
                               returncode=EXIT_VALIDATION)
        self.stderr.write(
            self.style.NOTICE(f"Read {len(ensembles)} shadow files"))
        return ensembles
