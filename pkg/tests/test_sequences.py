"""Tests for coefficient sequences, tails and the summation-by-parts split"""

import math
import os
import tempfile
import unittest

import mpmath
import numpy as np

from src.core import sequences
from src.core.errors import InvalidParametersError
from src.core.sequences import CoefficientSequence


class TestEvaluate(unittest.TestCase):
    def test_alternating(self):
        seq = CoefficientSequence(kind="alternating", alpha=0.3, beta=0.5, gamma=1.0)
        a, b = sequences.evaluate(seq, 1)
        self.assertAlmostEqual(a, 0.7)
        self.assertAlmostEqual(b, -0.5)
        a, b = sequences.evaluate(seq, 2)
        self.assertAlmostEqual(a, 1.15)
        self.assertAlmostEqual(b, 0.25)

    def test_inverse_square(self):
        seq = CoefficientSequence(kind="inverse-square", alpha=0.2, beta=0.4)
        a, b = sequences.evaluate(seq, 2)
        self.assertAlmostEqual(a, 1.05)
        self.assertAlmostEqual(b, 0.1)

    def test_cosine_at_pi_matches_alternating(self):
        alt = CoefficientSequence(kind="alternating", alpha=0.1, beta=0.7, gamma=0.6)
        cos = CoefficientSequence(kind="cosine", alpha=0.1, beta=0.7, gamma=0.6, eta=math.pi)
        np.testing.assert_array_equal(sequences.coefficients(alt, 50)[1], sequences.coefficients(cos, 50)[1])

    def test_vectorized_matches_sitewise(self):
        seq = CoefficientSequence(kind="cosine", alpha=0.2, beta=1.0, gamma=0.8, eta=1.0)
        a, b = sequences.coefficients(seq, 30)
        for n in (1, 7, 30):
            an, bn = sequences.evaluate(seq, n)
            self.assertAlmostEqual(a[n - 1], an, places=15)
            self.assertAlmostEqual(b[n - 1], bn, places=15)

    def test_free(self):
        a, b = sequences.coefficients(CoefficientSequence(), 10)
        np.testing.assert_array_equal(a, np.ones(10))
        np.testing.assert_array_equal(b, np.zeros(10))

    def test_site_zero_rejected(self):
        with self.assertRaises(InvalidParametersError):
            sequences.evaluate(CoefficientSequence(), 0)


class TestValidation(unittest.TestCase):
    def test_nonpositive_offdiagonal(self):
        with self.assertRaisesRegex(InvalidParametersError, "a_1"):
            CoefficientSequence(kind="alternating", alpha=2.0, gamma=1.0)

    def test_bad_exponent(self):
        with self.assertRaises(InvalidParametersError):
            CoefficientSequence(kind="alternating", beta=1.0, gamma=0.0)

    def test_unknown_kind(self):
        with self.assertRaises(InvalidParametersError):
            CoefficientSequence(kind="sawtooth")

    def test_bad_phase(self):
        with self.assertRaises(InvalidParametersError):
            CoefficientSequence(kind="cosine", beta=1.0, eta=0.0)

    def test_table_with_zero_a(self):
        with self.assertRaises(InvalidParametersError):
            CoefficientSequence(kind="table", table=((0.0, 1.0),))


class TestTable(unittest.TestCase):
    def test_table_overrides_formula(self):
        seq = CoefficientSequence(kind="alternating", beta=1.0, gamma=1.0, table=((2.0, 0.5),))
        self.assertEqual(sequences.evaluate(seq, 1), (2.0, 0.5))
        a, b = sequences.evaluate(seq, 2)
        self.assertEqual(a, 1.0)
        self.assertAlmostEqual(b, 0.5)
        a_all, b_all = sequences.coefficients(seq, 3)
        self.assertEqual(a_all[0], 2.0)
        self.assertEqual(b_all[0], 0.5)

    def test_load_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "rows.csv")
            with open(path, "w") as fh:
                fh.write("a,b\n1.5,0.1\n0.9,-0.2\n")
            rows = sequences.load_table(path)
            self.assertEqual(rows, ((1.5, 0.1), (0.9, -0.2)))
            seq = CoefficientSequence.from_dict({"kind": "table", "table_path": path})
            self.assertEqual(seq.table, rows)

    def test_load_table_bad_header(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "rows.csv")
            with open(path, "w") as fh:
                fh.write("x,y\n1.0,0.0\n")
            with self.assertRaises(InvalidParametersError):
                sequences.load_table(path)

    def test_record_round_trip(self):
        seq = CoefficientSequence(kind="cosine", alpha=0.1, beta=0.4, gamma=0.7, eta=2.0,
                                  table=((1.2, 0.3),))
        self.assertEqual(CoefficientSequence.from_dict(seq.to_dict()), seq)


class TestTailSum(unittest.TestCase):
    def test_alternating_harmonic(self):
        seq = CoefficientSequence(kind="alternating", beta=1.0, gamma=1.0)
        self.assertAlmostEqual(sequences.tail_sum(seq, "b-part", 1), math.log(2), delta=1e-13)

    def test_alternating_from_later_site(self):
        seq = CoefficientSequence(kind="alternating", beta=1.0, gamma=0.5)
        exact = -mpmath.nsum(lambda j: (-1) ** j / mpmath.sqrt(j), [10, mpmath.inf])
        self.assertAlmostEqual(sequences.tail_sum(seq, "b-part", 10), float(exact), delta=1e-12)

    def test_cosine_quarter_period(self):
        # cos(pi j / 2) / j sums to -log(2) / 2
        seq = CoefficientSequence(kind="cosine", beta=1.0, gamma=1.0, eta=math.pi / 2)
        self.assertAlmostEqual(sequences.tail_sum(seq, "b-part", 1), math.log(2) / 2, delta=1e-12)

    def test_inverse_square_closed_form(self):
        seq = CoefficientSequence(kind="inverse-square", beta=0.3)
        self.assertAlmostEqual(sequences.tail_sum(seq, "b-part", 1), -0.3 * math.pi ** 2 / 6, places=14)

    def test_table_and_free_tails(self):
        seq = CoefficientSequence(kind="table", table=((1.0, 0.5), (1.0, 0.25)))
        self.assertAlmostEqual(sequences.tail_sum(seq, "b-part", 1), -0.75)
        self.assertEqual(sequences.tail_sum(seq, "b-part", 3), 0.0)

    def test_bad_component(self):
        with self.assertRaises(InvalidParametersError):
            sequences.tail_sum(CoefficientSequence(), "c-part", 1)


class TestDecompose(unittest.TestCase):
    def test_reconstructs_coefficients(self):
        seq = CoefficientSequence(kind="alternating", alpha=0.2, beta=0.8, gamma=0.7)
        dec = sequences.decompose(seq, 500)
        a, b = dec.reconstruct()
        a_ref, b_ref = sequences.coefficients(seq, 500)
        np.testing.assert_allclose(a, a_ref, atol=1e-12)
        np.testing.assert_allclose(b, b_ref, atol=1e-12)
        np.testing.assert_array_equal(dec.c, 0.0)
        np.testing.assert_array_equal(dec.e, 0.0)
        self.assertAlmostEqual(dec.f[500], sequences.tail_sum(seq, "b-part", 501), places=15)

    def test_half_of_the_first_term(self):
        seq = CoefficientSequence(kind="alternating", beta=1.0, gamma=1.0)
        dec = sequences.decompose(seq, 2000)
        n = np.arange(1000, 2001)
        np.testing.assert_allclose(np.abs(dec.f[n - 1]) * 2 * n, 1.0, rtol=2e-3)

    def test_summable_family(self):
        dec = sequences.decompose(CoefficientSequence(kind="alternating", beta=1.0, gamma=1.0), 4096)
        self.assertEqual(dec.sums.verdicts["f_squared"], "bounded")
        self.assertTrue(dec.sums.summable_ok)

    def test_square_sum_divergence(self):
        dec = sequences.decompose(CoefficientSequence(kind="alternating", beta=1.0, gamma=0.4), 4096)
        self.assertEqual(dec.sums.verdicts["f_squared"], "divergent")
        self.assertFalse(dec.sums.summable_ok)

    def test_growth_verdict_short_input(self):
        self.assertEqual(sequences.growth_verdict(np.ones(5)), "inconclusive")


class TestHypotheses(unittest.TestCase):
    def test_finite(self):
        report = sequences.check_hypotheses(CoefficientSequence(kind="alternating", beta=1.0, gamma=1.0), 4096)
        self.assertEqual(report.prediction, "finite-Z")

    def test_infinite(self):
        report = sequences.check_hypotheses(CoefficientSequence(kind="alternating", beta=1.0, gamma=0.4), 4096)
        self.assertEqual(report.limsup_verdict, "bounded")
        self.assertEqual(report.square_sum_verdict, "divergent")
        self.assertEqual(report.prediction, "infinite-Z")


class TestThreshold(unittest.TestCase):
    def test_below_quarter(self):
        profile = sequences.threshold_profile(CoefficientSequence(kind="inverse-square", beta=0.2), 1000)
        self.assertAlmostEqual(profile.criterion, 0.2, places=12)
        self.assertEqual(profile.prediction, "finite")
        self.assertFalse(profile.classical_ok)

    def test_classical_region(self):
        profile = sequences.threshold_profile(CoefficientSequence(kind="inverse-square", beta=0.05), 1000)
        self.assertTrue(profile.classical_ok)

    def test_chihara_values(self):
        profile = sequences.threshold_profile(CoefficientSequence(kind="inverse-square", alpha=0.5, beta=0.25), 1000)
        self.assertAlmostEqual(profile.criterion, 1.25, places=12)
        self.assertEqual(profile.prediction, "infinite")

    def test_one_sided(self):
        profile = sequences.threshold_profile(CoefficientSequence(kind="inverse-square", alpha=-0.3, beta=0.2), 1000)
        self.assertAlmostEqual(profile.criterion, 0.8, places=12)
        self.assertAlmostEqual(profile.one_sided_criterion, 0.2, places=12)
        self.assertEqual(profile.prediction, "finite")

    def test_short_horizon(self):
        with self.assertRaises(InvalidParametersError):
            sequences.threshold_profile(CoefficientSequence(), 3)


class TestFinitenessCriteria(unittest.TestCase):
    def test_small_amplitude(self):
        dec = sequences.decompose(CoefficientSequence(kind="alternating", beta=0.4, gamma=1.0), 4000)
        criteria = sequences.finiteness_criteria(dec)
        np.testing.assert_allclose(criteria["diagonal_only"], 0.08, rtol=1e-2)
        self.assertEqual(criteria["diagonal_only_verdict"], "finite")
        # with a == 1 the general form is six times the diagonal one
        np.testing.assert_allclose(criteria["general"], 6 * criteria["diagonal_only"], rtol=1e-12)

    def test_large_amplitude(self):
        dec = sequences.decompose(CoefficientSequence(kind="alternating", beta=1.5, gamma=1.0), 4000)
        criteria = sequences.finiteness_criteria(dec)
        np.testing.assert_allclose(criteria["diagonal_only"], 1.125, rtol=1e-2)
        self.assertEqual(criteria["diagonal_only_verdict"], "not-established")


if __name__ == '__main__':
    unittest.main()
