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

import numpy as np

from pyCascade.expressions.expression import differentiate
from pyCascade.expressions.parser import parse
from pyCascade.utils.exceptions import EvaluationException, ExpressionSyntaxException


class ParserTest(unittest.TestCase):
    def test_precedence(self):
        self.assertAlmostEqual(float(parse("1+2*3").evaluate()), 7.0)
        self.assertAlmostEqual(float(parse("(1+2)*3").evaluate()), 9.0)
        self.assertAlmostEqual(float(parse("8/4/2").evaluate()), 1.0)

    def test_power_is_right_associative(self):
        self.assertAlmostEqual(float(parse("2^3^2").evaluate()), 512.0)

    def test_power_binds_tighter_than_sign(self):
        self.assertAlmostEqual(float(parse("-x^2").evaluate(3.0)), -9.0)

    def test_negative_exponent_needs_parentheses(self):
        with self.assertRaises(ExpressionSyntaxException):
            parse("2^-1")
        self.assertAlmostEqual(float(parse("2^(-1)").evaluate()), 0.5)

    def test_variables_and_pi(self):
        e = parse("cos(pi*x/2)*(1+eta)")
        x = np.array([0.0, 0.5, -1.0])
        eta = np.array([0.0, 0.25, -0.5])
        np.testing.assert_allclose(e.evaluate(x, eta), np.cos(math.pi * x / 2) * (1 + eta))

    def test_broadcasting(self):
        e = parse("x*eta")
        values = e.evaluate(np.array([1.0, 2.0])[:, None], np.array([1.0, 2.0, 3.0])[None, :])
        self.assertEqual(values.shape, (2, 3))
        self.assertAlmostEqual(values[1, 2], 6.0)

    def test_constant_broadcasts_to_points(self):
        self.assertEqual(parse("1").evaluate(np.zeros(4), 0.0).shape, (4,))

    def test_scientific_notation(self):
        self.assertAlmostEqual(float(parse("1.5e-3*2").evaluate()), 3e-3)

    def test_unknown_identifier(self):
        with self.assertRaises(ExpressionSyntaxException):
            parse("x + y")

    def test_unknown_function(self):
        with self.assertRaises(ExpressionSyntaxException):
            parse("tan(x)")

    def test_error_position(self):
        with self.assertRaises(ExpressionSyntaxException) as context:
            parse("1 + * 2")
        self.assertGreaterEqual(context.exception.position, 0)

    def test_empty_expression(self):
        with self.assertRaises(ExpressionSyntaxException):
            parse("  ")

    def test_division_by_zero(self):
        with self.assertRaises(EvaluationException):
            parse("1/x").evaluate(0.0)

    def test_log_of_non_positive(self):
        with self.assertRaises(EvaluationException):
            parse("log(x)").evaluate(np.array([1.0, 0.0]))

    def test_sqrt_of_negative(self):
        with self.assertRaises(EvaluationException):
            parse("sqrt(x)").evaluate(-1.0)


class DifferentiationTest(unittest.TestCase):
    def test_polynomial(self):
        derivative = differentiate(parse("x^3 + 2*x*eta"), "x")
        self.assertAlmostEqual(float(derivative.evaluate(2.0, 1.0)), 14.0)

    def test_chain_rule(self):
        derivative = differentiate(parse("sin(2*x)"), "x")
        self.assertAlmostEqual(float(derivative.evaluate(0.3)), 2.0 * math.cos(0.6))

    def test_second_derivative(self):
        derivative = differentiate(parse("exp(x)*eta^2"), "eta", order=2)
        self.assertAlmostEqual(float(derivative.evaluate(1.0, 5.0)), 2.0 * math.e)

    def test_log_and_sqrt(self):
        self.assertAlmostEqual(float(differentiate(parse("log(x)"), "x").evaluate(4.0)), 0.25)
        self.assertAlmostEqual(float(differentiate(parse("sqrt(x)"), "x").evaluate(4.0)), 0.25)

    def test_quotient(self):
        derivative = differentiate(parse("x/(1+x^2)"), "x")
        x = 0.7
        self.assertAlmostEqual(float(derivative.evaluate(x)), (1 - x ** 2) / (1 + x ** 2) ** 2)

    def test_independent_variable_gives_zero(self):
        self.assertTrue(differentiate(parse("cos(x)"), "eta").is_zero())

    def test_dependencies(self):
        e = parse("cos(x)*3")
        self.assertTrue(e.depends_on("x"))
        self.assertFalse(e.depends_on("eta"))
        self.assertTrue(parse("0*x").is_zero())

    def test_unknown_variable(self):
        with self.assertRaises(ValueError):
            differentiate(parse("x"), "y")
