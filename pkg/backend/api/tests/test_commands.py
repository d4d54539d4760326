import json
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import TestCase

from api.models import ExperimentRun
from api.services import fragment_seed

from .circuits import chain_json, ghz_cuts_json, ghz_json


class CommandTestCase(TestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def write(self, name: str, data) -> str:
        path = self.dir / name
        path.write_text(json.dumps(data), encoding="utf-8")
        return str(path)

    def run_command(self, *args) -> str:
        out, err = StringIO(), StringIO()
        call_command(*args, stdout=out, stderr=err)
        return out.getvalue()

    def assertExitCode(self, code: int, *args):
        with self.assertRaises(CommandError) as cm:
            self.run_command(*args)
        self.assertEqual(cm.exception.returncode, code)


class GenAnsatzCommandTests(CommandTestCase):

    def test_writes_circuit_and_cuts(self):
        circuit, cuts = self.dir / "c.json", self.dir / "k.json"
        self.run_command("gen_ansatz", "--seed", "3", "--out", str(circuit),
                         "--cuts-out", str(cuts))
        data = json.loads(circuit.read_text())
        self.assertEqual(data["n_qubits"], 9)
        self.assertEqual(len(data["gates"]), 8)
        self.assertEqual(len(json.loads(cuts.read_text())["cuts"]), 4)

    def test_stdout(self):
        data = json.loads(
            self.run_command("gen_ansatz", "--clusters", "2",
                             "--cluster-size", "2"))
        self.assertEqual(data["n_qubits"], 4)

    def test_fragment_count_out_of_range(self):
        self.assertExitCode(2, "gen_ansatz", "--fragments", "5")

    def test_cluster_size_out_of_range(self):
        self.assertExitCode(2, "gen_ansatz", "--cluster-size", "6")


class CutCommandTests(CommandTestCase):

    def test_fragment_graph(self):
        data = json.loads(
            self.run_command("cut", "--circuit", self.write("c.json",
                                                            ghz_json()),
                             "--cuts", self.write("k.json", ghz_cuts_json())))
        self.assertEqual(len(data["fragments"]), 2)
        self.assertEqual(data["edges"][0]["wire"], 2)

    def test_cycles_need_the_flag(self):
        circuit, cuts = self.dir / "c.json", self.dir / "k.json"
        self.run_command("gen_ansatz", "--out", str(circuit), "--cuts-out",
                         str(cuts))
        self.assertExitCode(2, "cut", "--circuit", str(circuit), "--cuts",
                            str(cuts))
        data = json.loads(
            self.run_command("cut", "--circuit", str(circuit), "--cuts",
                             str(cuts), "--allow-cycles"))
        self.assertEqual((len(data["fragments"]), len(data["edges"])), (3, 4))
        self.assertFalse(data["acyclic"])

    def test_missing_file(self):
        self.assertExitCode(2, "cut", "--circuit",
                            str(self.dir / "nope.json"))

    def test_invalid_circuit(self):
        bad = {"n_qubits": 2, "gates": [{"kind": "named", "qubits": [3]}]}
        self.assertExitCode(2, "cut", "--circuit", self.write("c.json", bad))


class ShadowEstimateCommandTests(CommandTestCase):

    def setUp(self):
        super().setUp()
        self.circuit = self.write("c.json", ghz_json())
        self.cuts = self.write("k.json", ghz_cuts_json())

    def test_estimate_json(self):
        data = json.loads(
            self.run_command("estimate", "--circuit", self.circuit, "--cuts",
                             self.cuts, "--obs", "Z1 Z3", "--shots", "300",
                             "--seed", "4"))
        self.assertAlmostEqual(data["exact"], 1.0)
        self.assertEqual(data["m_assignments"], 4)
        self.assertEqual(sorted(data["seed_manifest"]), ["0", "1"])

    def test_estimate_text(self):
        out = self.run_command("estimate", "--circuit", self.circuit,
                               "--obs", "X1 X2 X3", "--shots", "100",
                               "--format", "text", "--no-exact")
        self.assertIn("estimate", out)
        self.assertNotIn("exact ", out)

    def test_estimate_from_shadow_files(self):
        shadows = self.dir / "shadows"
        self.run_command("shadow", "--circuit", self.circuit, "--cuts",
                         self.cuts, "--shots", "200", "--seed", "2", "--out",
                         str(shadows))
        self.assertEqual(sorted(p.name for p in shadows.iterdir()),
                         ["fragment_0.jsonl", "fragment_1.jsonl"])
        data = json.loads(
            self.run_command("estimate", "--circuit", self.circuit, "--cuts",
                             self.cuts, "--obs", "Z1 Z3", "--shadows",
                             str(shadows)))
        self.assertEqual(data["seed_manifest"], {
            "0": fragment_seed(2, 0),
            "1": fragment_seed(2, 1),
        })

    def test_shadows_of_another_circuit(self):
        shadows = self.dir / "shadows"
        self.run_command("shadow", "--circuit", self.circuit, "--cuts",
                         self.cuts, "--shots", "20", "--out", str(shadows))
        other = dict(ghz_json())
        other["gates"] = other["gates"][:1] + [
            {"kind": "named", "name": "cz", "qubits": [1, 2]},
            other["gates"][2],
        ]
        self.assertExitCode(2, "estimate", "--circuit",
                            self.write("other.json", other), "--cuts",
                            self.cuts, "--obs", "Z1", "--shadows",
                            str(shadows))

    def test_bad_observable(self):
        self.assertExitCode(2, "estimate", "--circuit", self.circuit, "--obs",
                            "Q1")

    def test_size_limit(self):
        self.assertExitCode(3, "estimate", "--circuit",
                            self.write("wide.json", chain_json(15)), "--obs",
                            "Z1", "--shots", "10")

    def test_haar_gate_too_wide(self):
        wide = {
            "n_qubits": 5,
            "gates": [{"kind": "haar", "qubits": [1, 2, 3, 4, 5], "seed": 0}],
        }
        self.assertExitCode(3, "cut", "--circuit", self.write("w.json", wide))
        self.assertExitCode(3, "estimate", "--circuit",
                            self.write("w.json", wide), "--obs", "Z1")

    def test_estimate_from_exported_graph(self):
        graph = str(self.dir / "graph.json")
        self.run_command("cut", "--circuit", self.circuit, "--cuts",
                         self.cuts, "--out", graph)
        args = ("--obs", "Z1 Z3", "--shots", "200", "--seed", "6")
        from_graph = json.loads(
            self.run_command("estimate", "--circuit", self.circuit, "--graph",
                             graph, *args))
        from_cuts = json.loads(
            self.run_command("estimate", "--circuit", self.circuit, "--cuts",
                             self.cuts, *args))
        self.assertEqual(from_graph, from_cuts)
        shadows = self.dir / "shadows"
        self.run_command("shadow", "--circuit", self.circuit, "--graph",
                         graph, "--shots", "20", "--out", str(shadows))
        self.assertEqual(len(list(shadows.iterdir())), 2)

    def test_graph_and_cuts_conflict(self):
        graph = str(self.dir / "graph.json")
        self.run_command("cut", "--circuit", self.circuit, "--cuts",
                         self.cuts, "--out", graph)
        self.assertExitCode(2, "estimate", "--circuit", self.circuit,
                            "--cuts", self.cuts, "--graph", graph, "--obs",
                            "Z1")

    def test_tampered_graph(self):
        graph = str(self.dir / "graph.json")
        self.run_command("cut", "--circuit", self.circuit, "--cuts",
                         self.cuts, "--out", graph)
        data = json.loads(Path(graph).read_text(encoding="utf-8"))
        data["edges"][0]["wire"] = 3
        self.assertExitCode(2, "estimate", "--circuit", self.circuit,
                            "--graph", self.write("bad.json", data), "--obs",
                            "Z1")


class OracleCommandTests(CommandTestCase):

    def test_single_instance(self):
        circuit = self.write("c.json", ghz_json())
        cuts = self.write("k.json", ghz_cuts_json())
        data = json.loads(
            self.run_command("oracle", "--circuit", circuit, "--cuts", cuts,
                             "--obs", "X1 X2 X3"))
        self.assertAlmostEqual(data["uncut"], 1.0)
        self.assertLessEqual(data["delta"], 1e-10)

    def test_random_instances(self):
        data = json.loads(
            self.run_command("oracle", "--instances", "3", "--qubits", "4",
                             "--gates", "5", "--n-cuts", "2", "--seed", "1"))
        self.assertEqual(data["instances"], 3)
        self.assertLessEqual(data["delta"], 1e-9)

    def test_tolerance_violation(self):
        self.assertExitCode(1, "oracle", "--circuit",
                            self.write("c.json", ghz_json()), "--obs",
                            "X1 X2 X3", "--tolerance", "-1")

    def test_needs_an_instance(self):
        self.assertExitCode(2, "oracle", "--obs", "Z1")


class BoundsCommandTests(CommandTestCase):

    def test_explicit_counts(self):
        data = json.loads(
            self.run_command("bounds", "--epsilon", "0.1", "--delta", "0.05",
                             "--qdeg", "1", "--deg", "4", "--n-fragments",
                             "3", "--n-edges", "2", "--k-size", "9",
                             "--n-kappa-gamma", "3"))
        quote = data["quotes"][0]
        self.assertAlmostEqual(quote["k"], 19.15, places=2)
        self.assertAlmostEqual(quote["n"], 28_723_200, places=3)

    def test_instance_table(self):
        out = self.run_command("bounds", "--epsilon", "0.1", "--delta",
                               "0.05", "--circuit",
                               self.write("c.json", ghz_json()), "--cuts",
                               self.write("k.json", ghz_cuts_json()),
                               "--obs", "Z1 Z3", "--format", "text")
        lines = out.strip().splitlines()
        self.assertEqual(len(lines), 3)
        self.assertIn("total_shots", lines[0])

    def test_missing_counts(self):
        self.assertExitCode(2, "bounds", "--epsilon", "0.1", "--delta",
                            "0.05", "--qdeg", "1")

    def test_epsilon_range(self):
        self.assertExitCode(2, "bounds", "--epsilon", "1.5", "--delta",
                            "0.05", "--qdeg", "1", "--deg", "4",
                            "--n-fragments", "3", "--n-edges", "2",
                            "--k-size", "9", "--n-kappa-gamma", "3")


class ExperimentCommandTests(CommandTestCase):

    ARGS = ("--clusters", "2", "--cluster-size", "2", "--fragments", "1,2",
            "--obs-size", "1,4", "--shots", "40", "--trials", "2")

    def test_csv_save_and_stats(self):
        out = self.dir / "exp.csv"
        self.run_command("experiment", *self.ARGS, "--out", str(out),
                         "--save")
        self.assertEqual(len(out.read_text().strip().splitlines()), 9)
        self.assertTrue((self.dir / "exp.csv.meta.json").exists())
        run = ExperimentRun.objects.get()
        self.assertEqual(run.results.count(), 8)
        self.assertTrue(run.complete)

        data = json.loads(
            self.run_command("unobserved_stats", "--csv", str(out),
                             "--format", "json"))
        self.assertEqual([(r["shots"], r["obs_size"]) for r in data["rows"]],
                         [(40, 1), (40, 4)])
        table = self.run_command("unobserved_stats", "--run", str(run.pk))
        self.assertEqual(len(table.strip().splitlines()), 3)

    def test_json_format(self):
        out = self.dir / "exp.json"
        self.run_command("experiment", *self.ARGS, "--format", "json",
                         "--out", str(out))
        data = json.loads(out.read_text())
        self.assertEqual(len(data["rows"]), 8)
        self.assertTrue(data["meta"]["complete"])

    def test_invalid_grid(self):
        self.assertExitCode(2, "experiment", "--clusters", "2",
                            "--cluster-size", "2", "--obs-size", "9",
                            "--out", str(self.dir / "x.csv"))
        self.assertExitCode(2, "experiment", "--fragments", "1,two")

    def test_unknown_run(self):
        self.assertExitCode(2, "unobserved_stats", "--run", "999")

    def test_missing_csv(self):
        self.assertExitCode(2, "unobserved_stats", "--csv",
                            str(self.dir / "none.csv"))
