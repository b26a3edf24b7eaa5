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

import unittest

import numpy as np

from pyCascade.asymptotics.homogenized import BranchFunction1D, effective_rhs, main_residual, solve_linear_branch, \
    solve_main
from pyCascade.geometry import CascadeGeometry
from tests.util import data, random_smooth_data, rate_suite_data, standard_geometry


def _solve(problem, geometry, nodes=512):
    rhs = [effective_rhs(problem, geometry, branch) for branch in (1, 2)]
    return solve_main(rhs[0], rhs[1], geometry, nodes), rhs


class EffectiveRhsTest(unittest.TestCase):
    def test_transversally_constant_source(self):
        rhs = effective_rhs(data("x+2"), standard_geometry(), 2)
        np.testing.assert_allclose(rhs(np.array([0.0, 0.5])), [1.0, 1.25])

    def test_cross_section_integral(self):
        geometry = standard_geometry()
        rhs = effective_rhs(data("eta^2"), geometry, 1)
        self.assertAlmostEqual(rhs(-0.5), 1.0 / 12.0, places=10)

    def test_fluxes(self):
        rhs = effective_rhs(data("0", phi_plus_1="x", phi_minus_1="1"), standard_geometry(), 1)
        self.assertAlmostEqual(rhs(-0.5), 0.5 + 1.0)

    def test_zero(self):
        self.assertTrue(effective_rhs(data(), standard_geometry(), 1).is_zero())


class SolveMainTest(unittest.TestCase):
    def test_constant_source(self):
        omega, _ = _solve(data("1"), standard_geometry())
        for branch, x in ((1, np.linspace(-1.0, 0.0, 101)), (2, np.linspace(0.0, 1.0, 101))):
            np.testing.assert_allclose(omega.value(x, branch), 0.5 * (1.0 - x ** 2), atol=1e-8)

    def test_one_sided_load(self):
        geometry = standard_geometry()
        omega, _ = _solve(data("0", phi_minus_1="1"), geometry)
        self.assertAlmostEqual(omega.value(0.0, 1), 1.0 / (2.0 * (geometry.h1 + geometry.h2)), places=8)

    def test_boundary_and_continuity(self):
        omega, _ = _solve(rate_suite_data(), standard_geometry())
        self.assertAlmostEqual(omega.value(-1.0, 1), 0.0, places=12)
        self.assertAlmostEqual(omega.value(1.0, 2), 0.0, places=12)
        self.assertAlmostEqual(omega.jump, 0.0, places=12)

    def test_flux_transmission(self):
        geometry = standard_geometry()
        for seed in range(5):
            omega, _ = _solve(random_smooth_data(seed), geometry)
            self.assertLess(abs(omega.flux_mismatch(geometry)), 1e-9)

    def test_equation_residual(self):
        geometry = standard_geometry()
        omega, rhs = _solve(rate_suite_data(), geometry)
        for residual in main_residual(omega, rhs, geometry):
            self.assertLess(residual, 1e-6)

    def test_zero_data(self):
        omega, _ = _solve(data(), standard_geometry())
        self.assertTrue(omega.is_zero)
        np.testing.assert_array_equal(omega.value(np.linspace(-1.0, 1.0, 5)), np.zeros(5))

    def test_value_without_branch(self):
        omega, _ = _solve(data("1"), standard_geometry())
        np.testing.assert_allclose(omega.value(np.array([-0.5, 0.5])), [0.375, 0.375], atol=1e-10)


class LinearBranchTest(unittest.TestCase):
    def test_jump_and_fluxes(self):
        geometry = CascadeGeometry(1.0, 0.5)
        omega = solve_linear_branch(3, 0.3, geometry)
        self.assertAlmostEqual(omega.jump, 0.3)
        self.assertAlmostEqual(omega.flux_mismatch(geometry), 0.0)
        self.assertAlmostEqual(omega.value(-1.0, 1), 0.0)
        self.assertAlmostEqual(omega.value(1.0, 2), 0.0)

    def test_zero_jump(self):
        self.assertTrue(solve_linear_branch(4, 0.0, standard_geometry()).is_zero)

    def test_order_check(self):
        with self.assertRaises(ValueError):
            solve_linear_branch(2, 1.0, standard_geometry())

    def test_piecewise_linear(self):
        omega = BranchFunction1D.piecewise_linear(1.0, 2.0)
        self.assertAlmostEqual(omega.derivative(0.0, 1), 1.0)
        self.assertAlmostEqual(omega.derivative(0.0, 2), 2.0)
        self.assertAlmostEqual(omega.jump, 0.0)

    def test_scaled(self):
        omega = solve_linear_branch(3, 1.0, standard_geometry()).scaled(2.0)
        self.assertAlmostEqual(omega.jump, 2.0)
