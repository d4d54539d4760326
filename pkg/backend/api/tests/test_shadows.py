import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from api.quantum.cutter import cut_circuit
from api.quantum.errors import EstimationError, ShadowCutError
from api.quantum.pauli import PauliString
from api.quantum.shadows import (ChoiRegisterLayout, ShadowEnsemble,
                                 choi_statevector, collect_choi_shadow,
                                 collect_state_shadow, estimate, estimate_mom,
                                 read_shadow_file, unobserved_probability,
                                 write_shadow_file)
from api.quantum.simulator import Circuit, Gate, exact_expectation

from .circuits import ghz_circuit, ghz_cuts, identity_fragment, ry

# five recorded shots: measured bases and their +/-1 outcomes
WORKED_SAMPLES = [
    ("XYX", (1, 1, -1)),
    ("ZYY", (-1, -1, 1)),
    ("XZY", (-1, 1, -1)),
    ("XYZ", (-1, 1, 1)),
    ("XXX", (1, -1, 1)),
]


class MatchedAverageTests(SimpleTestCase):

    def setUp(self):
        self.ensemble = ShadowEnsemble.from_samples(WORKED_SAMPLES)

    def test_two_matches_cancel(self):
        est = estimate(self.ensemble, PauliString.parse("X1 Y2"))
        self.assertEqual(est.value, 0.0)
        self.assertEqual(est.n_matched, 2)

    def test_single_qubit(self):
        est = estimate(self.ensemble, PauliString.parse("Y2"))
        self.assertAlmostEqual(est.value, 1 / 3)
        self.assertEqual(est.n_matched, 3)

    def test_never_observed_defaults_to_zero(self):
        est = estimate(self.ensemble, PauliString.parse("Y1 X2"))
        self.assertEqual(tuple(est), (0.0, 0))

    def test_identity(self):
        self.assertEqual(tuple(estimate(self.ensemble, PauliString({}, 2.0))),
                         (2.0, 5))

    def test_coefficient_scales(self):
        est = estimate(self.ensemble, PauliString.parse("-3*Y2"))
        self.assertAlmostEqual(est.value, -1.0)

    def test_outside_register(self):
        with self.assertRaises(EstimationError):
            estimate(self.ensemble, PauliString.parse("Z4"))


class EnsembleTests(SimpleTestCase):

    def test_samples_view(self):
        ensemble = ShadowEnsemble.from_samples(WORKED_SAMPLES)
        self.assertEqual(len(ensemble), 5)
        self.assertEqual(list(ensemble.samples), WORKED_SAMPLES)

    def test_arrays_are_read_only(self):
        ensemble = ShadowEnsemble.from_samples(WORKED_SAMPLES)
        with self.assertRaises(ValueError):
            ensemble.bases[0, 0] = 1

    def test_validation(self):
        with self.assertRaises(ShadowCutError):
            ShadowEnsemble(1, np.array([[0]]), np.array([[1]]))
        with self.assertRaises(ShadowCutError):
            ShadowEnsemble(1, np.array([[3]]), np.array([[2]]))
        with self.assertRaises(ShadowCutError):
            ShadowEnsemble.from_samples([("XY", (1, 1)), ("X", (1, ))])


class StateShadowTests(SimpleTestCase):

    def test_zero_state(self):
        ensemble = collect_state_shadow(Circuit(1, ()), 3000, seed=2)
        z = ensemble.bases[:, 0] == 3
        self.assertTrue(np.all(ensemble.outcomes[z, 0] == 1))
        self.assertLess(abs(float(ensemble.outcomes[~z, 0].mean())), 0.2)

    def test_no_shots(self):
        ensemble = collect_state_shadow(ghz_circuit(), 0, seed=0)
        self.assertEqual(len(ensemble), 0)
        self.assertEqual(ensemble.register_size, 3)

    def test_provenance(self):
        ensemble = collect_state_shadow(ghz_circuit(), 10, seed=5)
        self.assertEqual(ensemble.provenance["seed"], 5)
        self.assertEqual(ensemble.provenance["circuit"],
                         ghz_circuit().digest())

    def test_average_over_seeds_is_exact(self):
        circuit = Circuit(2, (Gate((0, ), ry(0.7)),
                              Gate.named("cnot", [0, 1])))
        state = circuit.statevector()
        for text in ("Z1", "X2", "Z1 Z2", "X1 X2"):
            p = PauliString.parse(text)
            values = [estimate(collect_state_shadow(circuit, 300, seed=s),
                               p).value for s in range(100)]
            self.assertAlmostEqual(float(np.mean(values)),
                                   exact_expectation(state, p),
                                   delta=0.08)


class ChoiShadowTests(SimpleTestCase):

    def test_identity_channel_is_a_bell_pair(self):
        state = choi_statevector(identity_fragment())
        s = 1 / np.sqrt(2)
        np.testing.assert_allclose(state.amplitudes, [s, 0, 0, s],
                                   atol=1e-12)

    def test_identity_channel_correlations(self):
        ensemble, layout = collect_choi_shadow(identity_fragment(), 10_000,
                                               seed=8)
        self.assertEqual(layout.ancilla_slots, (0, ))
        self.assertEqual(layout.q_out_slots, (1, ))
        for text, expected in (("X1 X2", 1.0), ("Y1 Y2", -1.0),
                               ("Z1 Z2", 1.0)):
            est = estimate(ensemble, PauliString.parse(text))
            self.assertAlmostEqual(est.value, expected, delta=0.1)

    def test_fragment_without_inputs(self):
        graph = cut_circuit(ghz_circuit(), ghz_cuts())
        f0 = graph.fragments[0]
        ensemble, layout = collect_choi_shadow(f0, 20, seed=1)
        self.assertEqual(layout.ancilla_slots, ())
        self.assertEqual(ensemble.register_size, f0.subcircuit.n_qubits)
        self.assertEqual(ensemble.provenance["fragment"], 0)

    def test_layout(self):
        f1 = cut_circuit(ghz_circuit(), ghz_cuts()).fragments[1]
        layout = ChoiRegisterLayout.for_fragment(f1)
        self.assertEqual(
            (layout.ancilla_slots, layout.q_out_slots, layout.c_out_slots),
            ((0, ), (), (1, 2)))
        self.assertEqual(layout.c_out_wires, (1, 2))
        self.assertEqual(ChoiRegisterLayout.from_json(layout.to_json()),
                         layout)

    def test_overlapping_layout(self):
        with self.assertRaises(ShadowCutError):
            ChoiRegisterLayout((0, ), (0, ), ())


class MedianOfMeansTests(SimpleTestCase):

    def setUp(self):
        self.ensemble = collect_state_shadow(Circuit(1, ()), 10_000, seed=6)

    def test_one_group_is_the_mean(self):
        z = PauliString.parse("Z1")
        self.assertEqual(estimate_mom(self.ensemble, z, 1),
                         estimate(self.ensemble, z).value)

    def test_constant_outcomes(self):
        self.assertEqual(
            estimate_mom(self.ensemble, PauliString.parse("Z1"), 10), 1.0)

    def test_group_count(self):
        with self.assertRaises(EstimationError):
            estimate_mom(self.ensemble, PauliString.parse("Z1"), 0)
        with self.assertRaises(EstimationError):
            estimate_mom(self.ensemble, PauliString.parse("Z1"), 10_001)


class UnobservedProbabilityTests(SimpleTestCase):

    def test_values(self):
        self.assertEqual(unobserved_probability(1, 0), 1.0)
        self.assertAlmostEqual(unobserved_probability(9, 10_000), 0.601,
                               places=2)
        self.assertLess(unobserved_probability(1, 1000), 1e-100)

    def test_monotone_in_shots(self):
        values = [unobserved_probability(3, s) for s in range(0, 200, 10)]
        self.assertEqual(values, sorted(values, reverse=True))


class ShadowFileTests(SimpleTestCase):

    def test_write_then_read(self):
        f1 = cut_circuit(ghz_circuit(), ghz_cuts()).fragments[1]
        ensemble, layout = collect_choi_shadow(f1, 50, seed=3)
        with tempfile.TemporaryDirectory() as tmp:
            path = write_shadow_file(Path(tmp) / "f1.jsonl", ensemble, layout)
            back, back_layout = read_shadow_file(path)
        np.testing.assert_array_equal(back.bases, ensemble.bases)
        np.testing.assert_array_equal(back.outcomes, ensemble.outcomes)
        self.assertEqual(back.provenance, ensemble.provenance)
        self.assertEqual(back_layout, layout)

    def test_garbage(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "bad.jsonl"
            path.write_text("not json\n", encoding="utf-8")
            with self.assertRaises(ShadowCutError):
                read_shadow_file(path)
