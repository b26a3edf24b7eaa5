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

from pyCascade.asymptotics.boundary_layers import FourierLayer, build_pi, eval_layer, fourier_coeffs
from pyCascade.asymptotics.homogenized import BranchFunction1D
from pyCascade.asymptotics.regular_correctors import corrector_u2, zero_corrector
from pyCascade.utils.exceptions import LayerException
from tests.util import data, standard_geometry


class FourierCoefficientsTest(unittest.TestCase):
    def test_single_modes(self):
        h = 0.5
        a, b, a0 = fourier_coeffs(lambda eta: 2.0 * np.cos(4.0 * np.pi * eta / h) - np.sin(np.pi * eta / h), h, 8)
        self.assertAlmostEqual(a0, 0.0, places=10)
        self.assertAlmostEqual(a[1], 2.0, places=10)
        self.assertAlmostEqual(b[0], -1.0, places=10)
        self.assertLess(np.max(np.abs(np.delete(a, 1))), 1e-10)

    def test_mean(self):
        _, _, a0 = fourier_coeffs(lambda eta: np.full(np.shape(eta), 3.0), 1.0, 4)
        self.assertAlmostEqual(a0, 3.0)


class FourierLayerTest(unittest.TestCase):
    def setUp(self):
        self.layer = FourierLayer("left", 1.0, np.array([0.5, -0.2]), np.array([0.3, 0.1, 0.0]))

    def test_harmonic(self):
        xi = np.array([0.1, 0.7, 2.0])
        eta = np.array([-0.3, 0.0, 0.4])
        laplacian = self.layer.evaluate(xi, eta, xi_order=2) + self.layer.evaluate(xi, eta, eta_order=2)
        np.testing.assert_allclose(laplacian, 0.0, atol=1e-10)

    def test_neumann_walls(self):
        xi = np.linspace(0.0, 2.0, 5)
        np.testing.assert_allclose(self.layer.evaluate(xi, 0.5, eta_order=1), 0.0, atol=1e-12)
        np.testing.assert_allclose(self.layer.evaluate(xi, -0.5, eta_order=1), 0.0, atol=1e-12)

    def test_decay(self):
        far = np.abs(self.layer.evaluate(40.0, np.linspace(-0.5, 0.5, 5)))
        self.assertLess(np.max(far), 1e-30)
        self.assertEqual(float(self.layer.evaluate(1e6, 0.1)), 0.0)

    def test_derivative_in_xi(self):
        xi, eta, step = 0.3, 0.2, 1e-6
        numeric = (self.layer.evaluate(xi + step, eta) - self.layer.evaluate(xi - step, eta)) / (2 * step)
        self.assertAlmostEqual(float(self.layer.evaluate(xi, eta, xi_order=1)), float(numeric), places=6)

    def test_zero(self):
        layer = FourierLayer.zero("right", 0.5, 16)
        self.assertTrue(layer.is_zero)
        self.assertEqual(layer.P, 16)
        np.testing.assert_array_equal(eval_layer(layer, np.zeros(3), np.zeros(3)), np.zeros(3))

    def test_invalid_side(self):
        with self.assertRaises(ValueError):
            FourierLayer("top", 1.0, np.zeros(2), np.zeros(3))


class BuildPiTest(unittest.TestCase):
    def test_trace_removes_dirichlet_mismatch(self):
        geometry = standard_geometry()
        u2 = corrector_u2(data("(x+2)*eta"), geometry, 1)
        layer = build_pi(2, u2, BranchFunction1D.zero(), "left", geometry, P=64)
        eta = np.linspace(-0.45, 0.45, 7)
        scale = np.max(np.abs(u2.evaluate(-1.0, eta)))
        np.testing.assert_allclose(layer.evaluate(0.0, eta), -u2.evaluate(-1.0, eta), atol=1e-5 * scale)

    def test_zero_trace(self):
        geometry = standard_geometry()
        layer = build_pi(2, zero_corrector(geometry, 2, 2), BranchFunction1D.zero(), "right", geometry)
        self.assertTrue(layer.is_zero)
        self.assertEqual(layer.side, "right")

    def test_mean_violation(self):
        geometry = standard_geometry()
        omega = BranchFunction1D.piecewise_linear(1.0, 1.0, value_0=0.5)
        with self.assertRaises(LayerException):
            build_pi(2, zero_corrector(geometry, 1, 2), omega, "left", geometry)

    def test_odd_order(self):
        geometry = standard_geometry()
        with self.assertRaises(ValueError):
            build_pi(1, zero_corrector(geometry, 1, 2), BranchFunction1D.zero(), "left", geometry)
