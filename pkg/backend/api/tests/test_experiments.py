import csv
import json
import statistics
import tempfile
from pathlib import Path
from unittest import mock

from django.test import SimpleTestCase, tag

from api.quantum import experiments
from api.quantum.errors import ShadowCutError
from api.quantum.experiments import (CSV_COLUMNS, ExperimentConfig,
                                     TrialRecord, meta_path, read_csv,
                                     run_experiment, run_trial, split_shots,
                                     unobserved_stats)

SMALL = dict(clusters=2,
             cluster_size=2,
             fragment_counts=(1, 2),
             obs_sizes=(1, 4),
             shot_grid=(60, ),
             trials=2)


def _record(trial=0, n_fragments=1, shots=100, obs_size=1, unobserved=False):
    return TrialRecord(trial, n_fragments, shots, obs_size, 0.5, 0.25, 0.25,
                       unobserved, 7)


class ConfigTests(SimpleTestCase):

    def test_defaults(self):
        config = ExperimentConfig(trials=3)
        self.assertEqual(config.width, 9)
        self.assertEqual(config.fragment_counts, (1, 2, 3))
        self.assertEqual(config.estimator, "mean")

    def test_axes_are_sorted_and_unique(self):
        config = ExperimentConfig(obs_sizes=(9, 1, 9, 5), trials=1)
        self.assertEqual(config.obs_sizes, (1, 5, 9))

    def test_validation(self):
        for bad in ({"obs_sizes": (10, )}, {"fragment_counts": (4, )},
                    {"trials": 0}, {"shot_grid": ()}, {"shot_grid": (0, )},
                    {"groups": 0}):
            with self.assertRaises(ShadowCutError, msg=str(bad)):
                ExperimentConfig(**{"trials": 1, **bad})

    def test_estimator_name(self):
        self.assertEqual(ExperimentConfig(trials=1, groups=5).estimator,
                         "median-of-means(5)")


class SplitShotsTests(SimpleTestCase):

    def test_remainder_goes_to_the_first_fragment(self):
        self.assertEqual(split_shots(10, 3), [4, 3, 3])
        self.assertEqual(split_shots(100, 1), [100])
        self.assertEqual(sum(split_shots(10_000, 3)), 10_000)


class TrialTests(SimpleTestCase):

    def test_rows_per_trial(self):
        config = ExperimentConfig(**SMALL)
        rows = run_trial(config, 0)
        self.assertEqual(len(rows), 2 * 1 * 2)
        for r in rows:
            self.assertLessEqual(r.abs_error, 3.0)
            self.assertEqual(r.abs_error, abs(r.estimate - r.exact))

    def test_fragment_counts_share_the_exact_value(self):
        rows = run_trial(ExperimentConfig(**SMALL), 1)
        exact = {}
        for r in rows:
            exact.setdefault(r.obs_size, set()).add(r.exact)
        self.assertTrue(all(len(v) == 1 for v in exact.values()))

    def test_penalty_mode(self):
        config = ExperimentConfig(**{**SMALL, "shot_grid": (3, ),
                                     "obs_sizes": (4, ),
                                     "penalty_mode": True})
        rows = run_trial(config, 0)
        for r in rows:
            if r.unobserved:
                self.assertEqual(r.abs_error, 1.0)

    def test_seeded(self):
        config = ExperimentConfig(**SMALL)
        self.assertEqual(run_trial(config, 1), run_trial(config, 1))
        self.assertNotEqual(run_trial(config, 0)[0].seed,
                            run_trial(config, 1)[0].seed)


class RunExperimentTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name) / "runs" / "small.csv"

    def tearDown(self):
        self.tmp.cleanup()

    def test_csv_and_sidecar(self):
        records = run_experiment(ExperimentConfig(**SMALL), self.out)
        self.assertEqual(len(records), 2 * 2 * 1 * 2)
        with self.out.open(newline="") as fh:
            rows = list(csv.reader(fh))
        self.assertEqual(tuple(rows[0]), CSV_COLUMNS)
        self.assertEqual(len(rows), 9)
        self.assertIn(rows[1][7], ("0", "1"))
        meta = json.loads(meta_path(self.out).read_text())
        self.assertTrue(meta["complete"])
        self.assertEqual(meta["rows"], 8)
        self.assertEqual(meta["log_base"], "e")
        self.assertEqual(read_csv(self.out), records)

    def test_rerun_is_byte_identical(self):
        config = ExperimentConfig(**SMALL)
        again = self.out.with_name("again.csv")
        run_experiment(config, self.out)
        run_experiment(config, again, workers=2)
        self.assertEqual(self.out.read_bytes(), again.read_bytes())

    def test_rows_are_ordered(self):
        records = run_experiment(ExperimentConfig(**SMALL))
        keys = [r.sort_key for r in records]
        self.assertEqual(keys, sorted(keys))

    def test_workers_do_not_change_results(self):
        config = ExperimentConfig(**SMALL)
        self.assertEqual(run_experiment(config, workers=1),
                         run_experiment(config, workers=2))

    def test_failure_flushes_partial_rows(self):
        config = ExperimentConfig(**SMALL)
        real = experiments.run_trial

        def flaky(cfg, trial):
            if trial == 1:
                raise RuntimeError("simulated crash")
            return real(cfg, trial)

        with mock.patch.object(experiments, "run_trial", flaky):
            with self.assertRaises(RuntimeError):
                run_experiment(config, self.out)
        meta = json.loads(meta_path(self.out).read_text())
        self.assertFalse(meta["complete"])
        self.assertEqual(meta["rows"], 4)
        self.assertEqual(len(read_csv(self.out)), 4)

    def test_missing_columns(self):
        self.out.parent.mkdir(parents=True)
        self.out.write_text("trial,shots\n0,10\n")
        with self.assertRaises(ShadowCutError):
            read_csv(self.out)


class UnobservedStatsTests(SimpleTestCase):

    def test_empty(self):
        self.assertEqual(unobserved_stats([]), [])

    def test_only_unfragmented_rows_count(self):
        records = [
            _record(trial=0, unobserved=True),
            _record(trial=1),
            _record(trial=0, n_fragments=2, unobserved=True),
            _record(trial=0, obs_size=9, shots=10_000, unobserved=True),
        ]
        rows = unobserved_stats(records)
        self.assertEqual([(r.shots, r.obs_size) for r in rows],
                         [(100, 1), (10_000, 9)])
        self.assertEqual((rows[0].trials, rows[0].unobserved), (2, 1))
        self.assertEqual(rows[0].empirical, 0.5)
        self.assertAlmostEqual(rows[1].analytic, 0.601, places=2)
        self.assertEqual(set(rows[0].to_json()),
                         {"shots", "obs_size", "trials", "unobserved",
                          "empirical", "analytic"})

    @tag("slow")
    def test_matches_the_analytic_rate(self):
        config = ExperimentConfig(fragment_counts=(1, ),
                                  obs_sizes=(9, ),
                                  shot_grid=(10_000, ),
                                  trials=400,
                                  base_seed=1)
        rows = unobserved_stats(run_experiment(config, workers=4))
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(rows[0].empirical, rows[0].analytic,
                               delta=0.07)

    @tag("slow")
    def test_weight_one_is_always_observed(self):
        config = ExperimentConfig(fragment_counts=(1, ),
                                  obs_sizes=(1, ),
                                  shot_grid=(1000, ),
                                  trials=20)
        rows = unobserved_stats(run_experiment(config))
        self.assertEqual(rows[0].unobserved, 0)


class FragmentCountTests(SimpleTestCase):

    @tag("slow")
    def test_uncut_wins_for_single_qubit_observables(self):
        config = ExperimentConfig(fragment_counts=(1, 3),
                                  obs_sizes=(1, 9),
                                  shot_grid=(10_000, ),
                                  trials=50,
                                  base_seed=0)
        records = run_experiment(config, workers=4)

        def median_error(n_fragments, obs_size):
            return statistics.median(r.abs_error for r in records
                                     if r.n_fragments == n_fragments
                                     and r.obs_size == obs_size)

        self.assertLess(median_error(1, 1), median_error(3, 1))
