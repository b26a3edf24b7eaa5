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

from pyCascade.asymptotics.homogenized import BranchFunction1D
from pyCascade.asymptotics.junction import build_nk, junction_problem
from pyCascade.asymptotics.regular_correctors import corrector_u2
from pyCascade.geometry import CascadeGeometry
from pyCascade.solvers.strip import StripDomain, check_solvability, solve_z0
from tests.util import SLOW, data, standard_geometry


def _unit_flux(geometry):
    return BranchFunction1D.piecewise_linear(1.0 / geometry.h1, 1.0 / geometry.h2)


class JunctionProblemTest(unittest.TestCase):
    def test_first_order_data(self):
        geometry = standard_geometry()
        problem = junction_problem(1, geometry, _unit_flux(geometry))
        np.testing.assert_allclose(problem.G(np.array([0.3])), [-1.0])
        np.testing.assert_allclose(problem.Phi(np.array([0.0])), [1.0 - 2.0])

    def test_first_order_is_solvable(self):
        geometry = standard_geometry()
        dom = StripDomain(geometry.h1, geometry.h2, R=6.0, step=1.0 / 16.0)
        problem = junction_problem(1, geometry, _unit_flux(geometry))
        self.assertAlmostEqual(check_solvability(problem, dom), 0.0, places=10)

    def test_even_order_value_jump(self):
        geometry = standard_geometry()
        correctors = tuple(corrector_u2(data("x*eta+eta^2"), geometry, branch) for branch in (1, 2))
        problem = junction_problem(2, geometry, d_prev=0.4, correctors=correctors)
        eta = np.array([-0.2, 0.1])
        expected = correctors[0].evaluate(0.0, eta) - correctors[1].evaluate(0.0, eta)
        np.testing.assert_allclose(problem.Psi(eta), expected)
        np.testing.assert_allclose(problem.G(np.array([0.3])), [0.5 * 0.4 / 1.5])
        np.testing.assert_allclose(problem.Phi(np.array([0.0])), [0.4 * 0.5 / 1.5])

    def test_equal_thickness_without_jump_vanishes(self):
        geometry = CascadeGeometry(1.0, 1.0)
        self.assertTrue(junction_problem(1, geometry, _unit_flux(geometry)).is_zero())
        self.assertTrue(junction_problem(2, geometry).is_zero())

    def test_invalid_order(self):
        with self.assertRaises(ValueError):
            junction_problem(0, standard_geometry())


class BuildNkTest(unittest.TestCase):
    def setUp(self):
        self.geometry = standard_geometry()
        self.dom = StripDomain(self.geometry.h1, self.geometry.h2, R=8.0, step=1.0 / 32.0)
        self.z0 = solve_z0(self.dom)

    def test_plateau_and_green_formula_agree(self):
        layer = build_nk(1, self.geometry, self.dom, _unit_flux(self.geometry), z0=self.z0)
        self.assertNotEqual(layer.d_plus, 0.0)
        self.assertLess(abs(layer.d_plus - layer.d_green), 1e-3 * abs(layer.d_plus))

    def test_value_jump_order_by_green_formula(self):
        dom = StripDomain(self.geometry.h1, self.geometry.h2, R=8.0, step=1.0 / 64.0)
        correctors = tuple(corrector_u2(data("x*eta+eta^2"), self.geometry, branch) for branch in (1, 2))
        layer = build_nk(2, self.geometry, dom, d_prev=0.4, correctors=correctors, z0=solve_z0(dom))
        self.assertIsNotNone(layer.d_green)
        self.assertLess(abs(layer.d_plus - layer.d_green), 2e-3 * max(1.0, abs(layer.d_plus)))

    def test_layer_decays(self):
        layer = build_nk(1, self.geometry, self.dom, _unit_flux(self.geometry))
        self.assertLess(layer.far_field_ratio(), 1e-6)
        left, right = layer.decay_rates()
        self.assertGreater(left, 0.9 * np.pi / self.geometry.h1)
        self.assertGreater(right, 0.9 * np.pi / self.geometry.h2)
        self.assertGreaterEqual(layer.weighted_norm(), layer.gradient_norm())

    def test_layer_evaluation(self):
        layer = build_nk(1, self.geometry, self.dom, _unit_flux(self.geometry))
        self.assertAlmostEqual(float(layer.evaluate(np.array([100.0]), np.array([0.0]))[0]), 0.0)
        right = layer.evaluate(np.array([self.dom.R - 1.5]), np.array([0.1]))
        self.assertLess(abs(float(right[0])), 1e-6)

    def test_equal_thickness(self):
        geometry = CascadeGeometry(1.0, 1.0)
        dom = StripDomain(1.0, 1.0, R=6.0, step=1.0 / 16.0)
        layer = build_nk(1, geometry, dom, _unit_flux(geometry), z0=solve_z0(dom))
        self.assertTrue(layer.is_zero)
        self.assertAlmostEqual(layer.d_plus, 0.0, places=9)
        self.assertAlmostEqual(layer.d_green, 0.0, places=9)

    @unittest.skipUnless(SLOW, "set CASCADE_ASYM_SLOW to run")
    def test_truncation_independence(self):
        values = []
        for R in (12.0, 14.0):
            dom = StripDomain(1.0, 0.5, R=R, step=1.0 / 64.0)
            layer = build_nk(1, self.geometry, dom, _unit_flux(self.geometry), z0=solve_z0(dom))
            self.assertLess(abs(layer.d_plus - layer.d_green), 1e-3 * abs(layer.d_plus))
            values.append(layer.d_plus)
        self.assertLess(abs(values[0] - values[1]), 1e-4 * abs(values[1]))
