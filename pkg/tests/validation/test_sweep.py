# This file is part of pyCascade.
# Copyright (C) 2024 The pyCascade developers
#
# This program is free software: you can redistribute it and/or modify
# it under the terms of the GNU Lesser General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU Lesser General Public License for more details.
#
# You should have received a copy of the GNU Lesser General Public License
# along with this program.  If not, see <https://www.gnu.org/licenses/>.

import math
import unittest

from pyCascade.geometry import Discretization
from pyCascade.validation.sweep import SLOPE_THRESHOLDS, Check, SweepReport, error_bound_checks, metric_values, \
    run_sweep, slope_thresholds
from pyCascade.validation.validator import ConvergenceRow
from tests.util import SLOW, data, rate_suite_data, standard_geometry

SMALL = Discretization(nx=32, neta=8, R=8.0, P=16, strip_step=1.0 / 16.0, eta_modes=16)


def _row(eps: float, scale: float = 1.0) -> ConvergenceRow:
    return ConvergenceRow(eps, scale * eps, scale * eps, scale * eps ** 1.5, scale * eps ** 2.5,
                          (scale * eps, 2 * scale * eps), (eps, eps), (eps, 3 * eps), scale * eps ** 2)


class ThresholdTest(unittest.TestCase):
    def test_first_order(self):
        self.assertEqual(SLOPE_THRESHOLDS, slope_thresholds(1))

    def test_higher_orders(self):
        thresholds = slope_thresholds(2)
        self.assertAlmostEqual(4.2, thresholds["h1_partial"])
        self.assertAlmostEqual(3.8, thresholds["residual"])
        self.assertEqual(SLOPE_THRESHOLDS["l2_leading"], thresholds["l2_leading"])

    def test_metric_values_take_the_larger_branch(self):
        values = metric_values([_row(0.1), _row(0.05)])
        self.assertEqual([0.2, 0.1], values["average_l2"])
        self.assertAlmostEqual(0.3, values["average_max"][0])
        self.assertEqual(sorted(SLOPE_THRESHOLDS), sorted(values))


class SweepReportTest(unittest.TestCase):
    def test_optional_checks_do_not_fail(self):
        report = SweepReport(1, [0.1], [], [], SMALL)
        report.checks.append(Check("required", 1.0, 0.5, True))
        report.checks.append(Check("optional", 0.0, 0.5, False, required=False))
        self.assertTrue(report.passed)
        report.checks.append(Check("failing", 0.0, 0.5, False))
        self.assertFalse(report.passed)


class ErrorBoundTest(unittest.TestCase):
    def test_rows_below_the_bound(self):
        checks = error_bound_checks([_row(0.2), _row(0.1)], 1.0)
        self.assertEqual(2, len(checks))
        self.assertTrue(all(check.passed and check.required for check in checks))
        self.assertAlmostEqual(0.1 ** 1.5, checks[1].threshold)

    def test_row_above_the_bound_fails_the_report(self):
        rows = [_row(0.2), _row(0.1, scale=2.0), _row(0.05)]
        report = SweepReport(1, [0.2, 0.1, 0.05], rows, [], SMALL)
        report.checks.extend(error_bound_checks(rows, 1.5))
        self.assertEqual([True, False, True], [check.passed for check in report.checks])
        self.assertIn("eps=0.1", report.checks[1].name)
        self.assertFalse(report.passed)

    def test_zero_errors_meet_a_zero_bound(self):
        self.assertTrue(error_bound_checks([_row(0.1, scale=0.0)], 0.0)[0].passed)


class RunSweepTest(unittest.TestCase):
    def test_zero_data(self):
        report = run_sweep(data(), standard_geometry(), SMALL, [0.05, 0.2, 0.1])
        self.assertEqual([0.2, 0.1, 0.05], report.eps_list)
        self.assertTrue(report.passed)
        self.assertFalse(report.refined)
        self.assertTrue(all(fit is None for fit in report.slopes.values()))

    def test_constant_load_is_exact(self):
        report = run_sweep(data("1"), standard_geometry(), SMALL, [0.2, 0.1, 0.05], jobs=2)
        self.assertTrue(report.passed, [check for check in report.checks if not check.passed])
        self.assertEqual(3, len(report.rows))
        self.assertEqual(3, len(report.residuals))
        self.assertEqual(0.0, report.measured[0])
        self.assertGreater(report.bounds[0], 0.0)
        names = [check.name for check in report.checks]
        self.assertIn("sum |d_eta u2| <= bound", names)
        self.assertIn("|grad N2| <= bound", names)
        self.assertEqual(3, sum(name.startswith("|u-w2-eps(w3+N1)|_H1 <= bound") for name in names))

    def test_too_few_points_fail_the_rate_checks(self):
        report = run_sweep(rate_suite_data(), standard_geometry(), SMALL, [0.2, 0.1], auto_refine=False)
        slope_checks = [check for check in report.checks if check.name.startswith("slope")]
        self.assertTrue(all(math.isnan(check.value) and not check.passed for check in slope_checks))
        self.assertFalse(report.passed)

    def test_reduced_rate_suite(self):
        discretization = Discretization(nx=64, neta=8, R=8.0, P=16, strip_step=1.0 / 16.0, eta_modes=16)
        report = run_sweep(rate_suite_data(), standard_geometry(), discretization, [0.2, 0.1, 0.05], jobs=3,
                           auto_refine=False)
        self.assertGreaterEqual(report.slopes["l2_leading"].slope, SLOPE_THRESHOLDS["l2_leading"])
        self.assertGreaterEqual(report.slopes["h1_leading"].slope, SLOPE_THRESHOLDS["h1_leading"])
        self.assertLess(report.rows[-1].h1_partial, report.rows[0].h1_partial)

    @unittest.skipUnless(SLOW, "set CASCADE_ASYM_SLOW to run")
    def test_rate_suite(self):
        discretization = Discretization(nx=256, neta=64, R=12.0, P=64, strip_step=1.0 / 64.0)
        report = run_sweep(rate_suite_data(), standard_geometry(), discretization, [0.2, 0.1, 0.05, 0.025], jobs=4)
        self.assertTrue(report.passed, [check for check in report.checks if not check.passed])
        self.assertGreaterEqual(report.slopes["h1_partial"].slope, 2.2)
