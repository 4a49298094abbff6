"""Tests for half-line potentials, Prüfer counts and the comparison bounds"""

import math
import os
import tempfile
import unittest

import mpmath
import numpy as np

from src.core import continuum
from src.core.continuum import Potential1D
from src.core.errors import InvalidParametersError, MonotonicityViolationError

SLOW = os.environ.get("JACOBI_LAB_SLOW")


class TestPotential(unittest.TestCase):
    def test_sin_power_values(self):
        V = Potential1D(kind="sin-power", beta=1.5, amplitude=2.0)
        r = np.array([0.0, 1.0, 10.0])
        np.testing.assert_allclose(V.value(r), 2.0 * np.sin(r) / (1 + r) ** 1.5, rtol=1e-14)

    def test_inverse_square_cutoff(self):
        V = Potential1D(kind="inverse-square", gamma=0.5, cutoff=1.0)
        self.assertEqual(V.value(0.5), 0.0)
        self.assertAlmostEqual(V.value(2.0), -0.125)

    def test_x_gamma(self):
        V = Potential1D(kind="x-gamma", gamma=0.3, cutoff=1.0)
        self.assertAlmostEqual(V.value(1.5), -0.25 / 2.25)
        r = 5.0
        self.assertAlmostEqual(V.value(r), -0.25 / r ** 2 - 0.3 / (r ** 2 * math.log(r) ** 2))

    def test_table_cells(self):
        V = Potential1D(kind="table", table=((1.0, -2.0), (3.0, -0.5)))
        np.testing.assert_array_equal(V.value(np.array([0.0, 0.999, 1.0, 2.5, 3.0, 10.0])),
                                      [-2.0, -2.0, -0.5, -0.5, 0.0, 0.0])

    def test_envelope_dominates(self):
        for V in (Potential1D(kind="sin-power", beta=1.2),
                  Potential1D(kind="sin-cutoff", alpha=0.7, cutoff=2.0),
                  Potential1D(kind="table", table=((1.0, -2.0), (3.0, 0.5)))):
            r = np.linspace(0.0, 50.0, 2001)
            self.assertTrue(np.all(np.abs(V.value(r)) <= V.envelope(r) + 1e-15), V.kind)

    def test_validation(self):
        with self.assertRaises(InvalidParametersError):
            Potential1D(kind="yukawa")
        with self.assertRaises(InvalidParametersError):
            Potential1D(kind="table", table=((2.0, 1.0), (1.0, 1.0)))
        with self.assertRaises(InvalidParametersError):
            Potential1D(kind="sin-power", beta=0.0)

    def test_record_round_trip(self):
        V = Potential1D(kind="sin-cutoff", alpha=0.8, cutoff=3.0, amplitude=-1.5)
        again = Potential1D.from_dict(V.to_dict())
        self.assertEqual(again.to_dict(), V.to_dict())

    def test_load_table(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "well.csv")
            with open(path, "w") as fh:
                fh.write("r_end,v\n1.0,-2.0\n3.0,-0.5\n")
            V = Potential1D.from_dict({"kind": "table", "table_path": path})
        self.assertEqual(V.table, ((1.0, -2.0), (3.0, -0.5)))

    def test_breakpoints(self):
        V = Potential1D(kind="x-gamma", cutoff=1.0)
        self.assertEqual(V.breakpoints(), [1.0, 2.0])


class TestPrufer(unittest.TestCase):
    def test_square_well(self):
        well = continuum.square_well(1.0, math.pi)
        for lam, zeros in ((1.0, 1), (4.0, 2), (9.0, 3)):
            self.assertEqual(continuum.prufer_count(well, lam, 10.0).zero_count, zeros)

    def test_zero_coupling(self):
        result = continuum.prufer_count(Potential1D(kind="sin-power"), 0.0, 50.0)
        self.assertEqual(result.zero_count, 0)
        self.assertTrue(result.tail_bound_ok)

    def test_repulsive_has_no_zeros(self):
        V = Potential1D(kind="power-law", beta=3.0, amplitude=5.0)
        self.assertEqual(continuum.prufer_count(V, 10.0, 100.0).zero_count, 0)

    def test_inverse_square_log_growth(self):
        # gamma = 1/2 > 1/4: zeros where log r = 3pi/2 + 2k pi
        V = Potential1D(kind="inverse-square", gamma=0.5, cutoff=1.0)
        self.assertEqual(continuum.prufer_count(V, 1.0, 1e4).zero_count, 1)
        self.assertEqual(continuum.prufer_count(V, 1.0, 1e6).zero_count, 2)

    def test_critical_inverse_square_stays_flat(self):
        # gamma = 1/4: u = sqrt(r) (1 + log(r) / 2) past the cutoff, no zeros
        V = Potential1D(kind="inverse-square", gamma=0.25, cutoff=1.0)
        counts = [continuum.prufer_count(V, 1.0, r_max).zero_count for r_max in (1e4, 1e6)]
        self.assertEqual(counts, [0, 0])

    def test_tail_bound(self):
        self.assertFalse(continuum.tail_bound_ok(Potential1D(kind="inverse-square", gamma=0.5), 1.0, 1e4))
        self.assertTrue(continuum.tail_bound_ok(Potential1D(kind="power-law", beta=3.0), 1.0, 1e3))

    def test_bad_radius(self):
        with self.assertRaises(InvalidParametersError):
            continuum.prufer_count(Potential1D(), 1.0, 0.0)

    @unittest.skipUnless(SLOW, "set JACOBI_LAB_SLOW=1 for large radii")
    def test_inverse_square_far(self):
        V = Potential1D(kind="inverse-square", gamma=0.5, cutoff=1.0)
        self.assertEqual(continuum.prufer_count(V, 1.0, 1e8).zero_count, 3)
        self.assertEqual(continuum.prufer_count(V, 1.0, 1e10).zero_count, 3)
        critical = Potential1D(kind="inverse-square", gamma=0.25, cutoff=1.0)
        self.assertEqual(continuum.prufer_count(critical, 1.0, 1e8).zero_count, 0)


class TestCoupling(unittest.TestCase):
    def test_fit_slope(self):
        lambdas = [1.0, 10.0, 100.0, 1000.0]
        self.assertAlmostEqual(continuum.fit_slope(lambdas, [3 * l ** 0.5 for l in lambdas]), 0.5)
        self.assertTrue(math.isnan(continuum.fit_slope(lambdas, [0, 0, 0, 4])))

    def test_radius(self):
        self.assertEqual(continuum.coupling_radius(2.0, 1.0), 10.0)
        self.assertEqual(continuum.coupling_radius(100.0, 1.0), 100.0)

    def test_square_well_scan(self):
        well = continuum.square_well(1.0, math.pi)
        scan = continuum.coupling_scan(well, [1.0, 4.0, 9.0])
        self.assertEqual([r.zero_count for r in scan.results], [1, 2, 3])
        self.assertAlmostEqual(scan.slope, 0.5, places=12)

    def test_weyl_regime(self):
        V = Potential1D(kind="power-law", beta=3.0, amplitude=-1.0)
        lambdas = [100.0, 1000.0, 10000.0, 100000.0]
        serial = continuum.coupling_scan(V, lambdas)
        parallel = continuum.coupling_scan(V, lambdas, threads=2)
        self.assertEqual([r.zero_count for r in serial.results], [r.zero_count for r in parallel.results])
        self.assertGreater(serial.slope, 0.4)
        self.assertLess(serial.slope, 0.6)

    def test_sin_power_slow_decay_slope(self):
        V = Potential1D(kind="sin-power", beta=1.5)
        scan = continuum.coupling_scan(V, [100.0, 1000.0, 10000.0, 100000.0], threads=2)
        self.assertGreaterEqual(scan.slope, 0.60)
        self.assertLessEqual(scan.slope, 0.74)

    def test_sin_power_weyl_regime(self):
        # upper-half slope is ~0.557 on this grid; the Weyl ratio shows the approach to 1/2
        V = Potential1D(kind="sin-power", beta=2.5)
        scan = continuum.coupling_scan(V, [100.0, 1000.0, 10000.0, 100000.0])
        self.assertGreaterEqual(scan.slope, 0.50)
        self.assertLessEqual(scan.slope, 0.60)
        ratios = continuum.weyl_ratios(V, scan)
        self.assertTrue(all(b > a for a, b in zip(ratios, ratios[1:])), ratios)
        self.assertGreater(ratios[-1], 0.5)
        self.assertLess(ratios[-1], 1.0)

    def test_dirichlet_lower_bound(self):
        for beta, lam in ((1.5, 1e4), (1.0, 500.0), (0.5, 50.0)):
            count = 0
            while lam / (2 * ((2 * count + 3) * math.pi) ** beta) > 2.25:
                count += 1
            self.assertEqual(continuum.dirichlet_lower_bound(beta, lam), count)
        self.assertEqual(continuum.dirichlet_lower_bound(1.5, 0.0), 0)

    def test_lower_bound_holds(self):
        V = Potential1D(kind="sin-power", beta=1.5)
        lam = 2000.0
        count = continuum.prufer_count(V, lam, continuum.coupling_radius(lam, 2 / 1.5)).zero_count
        self.assertGreaterEqual(count, continuum.dirichlet_lower_bound(1.5, lam))


class TestComparisonBounds(unittest.TestCase):
    def test_square_well_values(self):
        well = continuum.square_well(1.0, math.pi)
        self.assertAlmostEqual(continuum.calogero_bound(well, 10.0), 2.0, places=12)
        self.assertAlmostEqual(continuum.bargmann_bound(well, 10.0), math.pi ** 2 / 2, places=12)
        deep = continuum.square_well(4.0, math.pi)
        self.assertAlmostEqual(continuum.weyl_constant(deep, 10.0), 2.0, places=12)

    def test_counts_respect_bounds(self):
        for V in (Potential1D(kind="power-law", beta=3.0, amplitude=-10.0),
                  Potential1D(kind="power-law", beta=2.5, amplitude=-20.0),
                  continuum.square_well(4.0, math.pi)):
            count = continuum.prufer_count(V, 1.0, 1000.0).zero_count
            self.assertLessEqual(count, continuum.calogero_bound(V, 1000.0) + 1)
            self.assertLessEqual(count, continuum.bargmann_bound(V, 1000.0) + 1)

    def test_calogero_needs_monotone(self):
        with self.assertRaises(MonotonicityViolationError):
            continuum.calogero_bound(Potential1D(kind="sin-power"), 100.0)
        with self.assertRaises(MonotonicityViolationError):
            continuum.calogero_bound(Potential1D(kind="table", table=((1.0, -1.0), (2.0, -3.0))), 10.0)


class TestDivergenceSplit(unittest.TestCase):
    def test_oscillatory_tail(self):
        V = Potential1D(kind="sin-power", beta=1.0)
        exact = mpmath.quadosc(lambda r: mpmath.sin(r) / (1 + r), [0, mpmath.inf], omega=1)
        self.assertAlmostEqual(continuum.oscillatory_tail(V, 0.0), float(exact), delta=1e-10)

    def test_split_reassembles(self):
        V = Potential1D(kind="sin-power", beta=1.5)
        split = continuum.divergence_split(V, 5.0)
        r = np.linspace(0.0, 30.0, 601)
        np.testing.assert_allclose(split.composite.value(r), V.value(r), atol=1e-15)

    def test_w_is_flat_below_ramp(self):
        split = continuum.divergence_split(Potential1D(kind="sin-power", beta=1.5), 5.0)
        self.assertAlmostEqual(split.w(0.0), split.w(4.0), places=12)

    def test_w_derivative(self):
        split = continuum.divergence_split(Potential1D(kind="sin-power", beta=1.5), 2.0)
        h = 1e-4
        for x in (8.0, 12.3, 40.0):
            slope = (split.w(x + h) - split.w(x - h)) / (2 * h)
            self.assertAlmostEqual(slope, split.w_prime.value(x), delta=1e-6)

    def test_split_needs_oscillation(self):
        with self.assertRaises(InvalidParametersError):
            continuum.divergence_split(Potential1D(kind="power-law", beta=2.0), 1.0)

    def test_cm_inequality(self):
        beta, lam = 1.5, 30.0
        split = continuum.divergence_split(Potential1D(kind="sin-power", beta=beta), lam ** (1 / beta))
        left, right = continuum.cm_inequality_check(split, lam, lam ** (2 / beta))
        self.assertLessEqual(left, right)

    def test_w_envelope(self):
        beta, R = 1.5, 10.0
        split = continuum.divergence_split(Potential1D(kind="sin-power", beta=beta), R)
        r = np.array([0.0, 5.0, 10.0, 10.5, 11.0, 20.0, 57.3, 100.0, 314.0, 1000.0, 5000.0])
        scaled = np.abs(split.w(r)) * np.maximum(r, R) ** beta
        self.assertLess(scaled.max(), 4.0, scaled)

    def test_sin_cutoff_w_asymptotics(self):
        split = continuum.divergence_split(Potential1D(kind="sin-cutoff", alpha=1.0), 2.0)
        for r in (100.0, 200.5, 500.0, 1234.5):
            expected = -math.cos(r) / r - math.sin(r) / r ** 2
            self.assertAlmostEqual(split.w(r), expected, delta=1e-5)

    def test_zero_w_has_no_zeros(self):
        split = continuum.divergence_split(Potential1D(kind="sin-power", beta=1.5, amplitude=0.0), 3.0)
        self.assertEqual(continuum.cm_inequality_check(split, 5.0), (0, 0))

    def test_default_radius_follows_coupling(self):
        beta, lam = 1.5, 30.0
        split = continuum.divergence_split(Potential1D(kind="sin-power", beta=beta), lam ** (1 / beta))
        self.assertEqual(continuum.cm_inequality_check(split, lam),
                         continuum.cm_inequality_check(split, lam, continuum.coupling_radius(lam, 2 / beta)))

    def test_sin_cutoff_cm_inequality(self):
        split = continuum.divergence_split(Potential1D(kind="sin-cutoff", alpha=1.0), 2.0)
        lefts = {}
        for lam in (0.5, 2.0):
            for r_max in (200.0, 2000.0):
                left, right = continuum.cm_inequality_check(split, lam, r_max)
                self.assertLessEqual(left, right, msg=f"lambda={lam} r_max={r_max}")
                lefts[lam, r_max] = left
        self.assertEqual(lefts[0.5, 200.0], lefts[0.5, 2000.0])


if __name__ == '__main__':
    unittest.main()
