from django.contrib.auth.models import User
from django.test import TestCase

from api import services
from api.models import ExperimentRun, TrialResult
from api.quantum.errors import SizeLimitError
from api.quantum.experiments import ExperimentConfig, run_experiment
from api.quantum.pauli import Observable
from api.quantum.simulator import Circuit, Gate
from api.serializers import parse_circuit

from .circuits import chain_json, ghz_circuit, ghz_cuts


class EstimateServiceTests(TestCase):

    def test_report_has_exact_value_and_seeds(self):
        report = services.estimate_observable(ghz_circuit(),
                                              ghz_cuts(),
                                              Observable.parse("Z1 Z3"),
                                              shots=200,
                                              seed=5)
        self.assertAlmostEqual(report.exact, 1.0)
        self.assertEqual(
            report.seed_manifest,
            {"0": services.fragment_seed(5, 0),
             "1": services.fragment_seed(5, 1)})
        self.assertEqual(report.m_assignments, 4)

    def test_only_active_fragments_are_sampled(self):
        report = services.estimate_observable(ghz_circuit(),
                                              ghz_cuts(),
                                              Observable.parse("X1"),
                                              shots=50,
                                              seed=1,
                                              with_exact=False)
        self.assertEqual(list(report.seed_manifest), ["0"])
        self.assertIsNone(report.exact)

    def test_dropped_fragments_do_not_change_the_estimate(self):
        base = ghz_circuit()
        # the extra gate lands in fragment 1, which X1 never looks at
        changed = Circuit(3, base.gates + (Gate.haar([1, 2], 9), ))
        reports = [
            services.estimate_observable(c,
                                         ghz_cuts(),
                                         Observable.parse("X1"),
                                         shots=400,
                                         seed=8,
                                         with_exact=False)
            for c in (base, changed)
        ]
        self.assertEqual(reports[0].estimate, reports[1].estimate)
        self.assertEqual(reports[0].seed_manifest, reports[1].seed_manifest)
        self.assertEqual(reports[1].seed_manifest,
                         {"0": services.fragment_seed(8, 0)})

    def test_size_limit(self):
        circuit = parse_circuit(chain_json(15))
        with self.assertRaises(SizeLimitError):
            services.estimate_observable(circuit, [], Observable.parse("Z1"),
                                         shots=10,
                                         seed=0)

    def test_oracle_and_bounds(self):
        check = services.oracle_check(ghz_circuit(), ghz_cuts(),
                                      Observable.parse("X1 X2 X3"))
        self.assertLessEqual(check["delta"], 1e-10)
        quotes = services.bounds_for_instance(ghz_circuit(), ghz_cuts(),
                                              Observable.parse("2*Z1 Z3"),
                                              0.1, 0.05)
        self.assertEqual(len(quotes), 2)
        self.assertEqual(quotes[0]["o_norm"], 2.0)
        self.assertEqual(quotes[0]["k_size"], 2)


class ExperimentStorageTests(TestCase):

    @classmethod
    def setUpTestData(cls):
        cls.user = User.objects.create_user("ada", password="pw")
        cls.config = ExperimentConfig(clusters=2,
                                      cluster_size=2,
                                      fragment_counts=(1, 2),
                                      obs_sizes=(1, 4),
                                      shot_grid=(40, ),
                                      trials=2)
        cls.records = run_experiment(cls.config)

    def test_save_and_load(self):
        run = services.save_experiment(self.config,
                                       self.records,
                                       meta={"rows": len(self.records)},
                                       user=self.user)
        run.refresh_from_db()
        self.assertEqual(run.results.count(), len(self.records))
        self.assertEqual(run.estimator, "mean")
        self.assertEqual(run.config["obs_sizes"], [1, 4])
        self.assertEqual(run.created_by, self.user)
        self.assertEqual(services.records_for_run(run), self.records)

    def test_unobserved_stats(self):
        run = services.save_experiment(self.config, self.records)
        rows = services.unobserved_stats_for_run(run)
        self.assertEqual([(r["shots"], r["obs_size"]) for r in rows],
                         [(40, 1), (40, 4)])
        self.assertTrue(all(r["trials"] == 2 for r in rows))

    def test_runs_are_independent(self):
        a = services.save_experiment(self.config, self.records)
        b = services.save_experiment(self.config, self.records[:2])
        self.assertEqual(ExperimentRun.objects.count(), 2)
        self.assertEqual(TrialResult.objects.filter(run=a).count(), 8)
        self.assertEqual(TrialResult.objects.filter(run=b).count(), 2)
