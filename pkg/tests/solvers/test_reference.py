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

from pyCascade.geometry import Discretization
from pyCascade.solvers.reference import average_e, energy_residual, reference_grid, solve_reference
from pyCascade.validation.validator import fit_rate
from tests.util import data, standard_geometry

# u = cos(pi x / 2) (1 + eta^2) solves the problem for eps = 1 with these data
MANUFACTURED = dict(f="((pi/2)^2*(1+eta^2) - 2)*cos(pi*x/2)",
                    phi_plus_1="-cos(pi*x/2)", phi_minus_1="cos(pi*x/2)",
                    phi_plus_2="-0.5*cos(pi*x/2)", phi_minus_2="0.5*cos(pi*x/2)")


def _manufactured_error(nx: int, neta: int) -> float:
    geometry = standard_geometry()
    u = solve_reference(data(**MANUFACTURED), geometry, 1.0, Discretization(nx=nx, neta=neta))
    x, eta = u.grid.node_x, u.grid.node_eta
    return float(np.max(np.abs(u.values - np.cos(0.5 * np.pi * x) * (1.0 + eta ** 2))))


class SolveReferenceTest(unittest.TestCase):
    def test_zero_data(self):
        u = solve_reference(data(), standard_geometry(), 0.1, Discretization(nx=16, neta=8))
        self.assertEqual(0.0, u.max_abs())

    def test_invalid_eps(self):
        with self.assertRaises(ValueError):
            solve_reference(data("1"), standard_geometry(), 0.0, Discretization(nx=16, neta=8))

    def test_constant_load_is_exact(self):
        for method in ("direct", "cg"):
            discretization = Discretization(nx=16, neta=8, linear_solver=method, tol_lin_solve=1e-12)
            u = solve_reference(data("1"), standard_geometry(), 0.1, discretization)
            expected = 0.5 * (1.0 - u.grid.node_x ** 2)
            np.testing.assert_allclose(u.values, expected, atol=1e-9 if method == "direct" else 1e-6)

    def test_dirichlet_ends(self):
        u = solve_reference(data("x*eta + 1"), standard_geometry(), 0.2, Discretization(nx=16, neta=8))
        ends = np.isclose(np.abs(u.grid.node_x), 1.0)
        self.assertFalse(np.any(u.values[ends]))

    def test_second_order_convergence(self):
        steps = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]
        errors = [_manufactured_error(round(1.0 / step), round(1.0 / step)) for step in steps]
        self.assertGreaterEqual(fit_rate(steps, errors).slope, 1.9, "errors {}".format(errors))

    def test_maximum_principle(self):
        geometry = standard_geometry()
        discretization = Discretization(nx=32, neta=16)
        for eps in (1.0, 0.1):
            below = solve_reference(data("-(1 + x^2 + eta^2)"), geometry, eps, discretization)
            self.assertLessEqual(float(np.max(below.values)), 1e-12)
            self.assertLess(float(np.min(below.values)), 0.0)
            above = solve_reference(data("exp(x)*(1+eta)"), geometry, eps, discretization)
            self.assertGreaterEqual(float(np.min(above.values)), -1e-12)

    def test_linear_in_data(self):
        geometry = standard_geometry()
        discretization = Discretization(nx=32, neta=16)
        first = solve_reference(data("cos(pi*x/2)*(1+eta)", phi_plus_1="x+1"), geometry, 0.1, discretization)
        second = solve_reference(data("x*eta", phi_minus_2="1"), geometry, 0.1, discretization)
        both = solve_reference(data("cos(pi*x/2)*(1+eta) + x*eta", phi_plus_1="x+1", phi_minus_2="1"), geometry, 0.1,
                               discretization)
        np.testing.assert_allclose(both.values, first.values + second.values, rtol=1e-10, atol=1e-12)

    def test_even_data_give_even_solution(self):
        u = solve_reference(data(**MANUFACTURED), standard_geometry(), 0.1, Discretization(nx=32, neta=16))
        array = u.to_array()
        np.testing.assert_allclose(array, array[:, ::-1], atol=1e-9)

    def test_grid_override(self):
        geometry = standard_geometry()
        grid = reference_grid(geometry, Discretization(nx=8, neta=4))
        u = solve_reference(data("1"), geometry, 0.1, grid=grid)
        self.assertIs(grid, u.grid)


class EnergyResidualTest(unittest.TestCase):
    def test_constant_load(self):
        geometry = standard_geometry()
        u = solve_reference(data("1"), geometry, 0.1, Discretization(nx=64, neta=16))
        self.assertLess(energy_residual(u, data("1"), geometry, 0.1), 1e-4)

    def test_second_order_under_refinement(self):
        geometry = standard_geometry()
        steps = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]
        residuals = []
        for step in steps:
            discretization = Discretization(nx=round(1.0 / step), neta=round(1.0 / step))
            u = solve_reference(data(**MANUFACTURED), geometry, 1.0, discretization)
            residuals.append(energy_residual(u, data(**MANUFACTURED), geometry, 1.0))
        self.assertLess(residuals[2], residuals[1])
        self.assertLess(residuals[1], residuals[0])
        self.assertGreaterEqual(fit_rate(steps, residuals).slope, 1.9, "residuals {}".format(residuals))


class AverageTest(unittest.TestCase):
    def test_profiles_of_constant_load(self):
        geometry = standard_geometry()
        u = solve_reference(data("1"), geometry, 0.1, Discretization(nx=16, neta=8))
        for branch in (1, 2):
            profile = average_e(u, branch)
            self.assertEqual(branch, profile.branch)
            np.testing.assert_allclose(profile.values, 0.5 * (1.0 - profile.x ** 2), atol=1e-9)
            middle = 0.5 * (profile.x[:-1] + profile.x[1:])
            np.testing.assert_allclose(profile.derivative(), -middle, atol=1e-9)
        self.assertEqual(0.0, float(average_e(u, 1).x[-1]))
        self.assertEqual(0.0, float(average_e(u, 2).x[0]))

    def test_interpolation(self):
        geometry = standard_geometry()
        u = solve_reference(data("1"), geometry, 0.1, Discretization(nx=16, neta=8))
        profile = average_e(u, 2)
        self.assertAlmostEqual(0.5, float(profile(0.0)), places=9)
