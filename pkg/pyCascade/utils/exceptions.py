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

"""Provides custom exception types."""


class CascadeException(Exception):
    """Base type of all errors raised by pyCascade."""


class ConfigurationException(CascadeException):
    """An exception type that's raised if the tool has no proper configuration."""


class ExpressionSyntaxException(CascadeException):
    """Raised if an expression cannot be parsed.

    The zero-based character offset of the offending token is kept in ``position``.
    """

    def __init__(self, message: str, position: int = -1):
        super().__init__(message)
        self.position = position


class EvaluationException(CascadeException):
    """Raised if an expression is evaluated outside its domain (division by zero, sqrt of a negative, ...)."""


class QuadratureException(CascadeException):
    """Raised if adaptive quadrature exhausts its node budget before reaching the tolerance."""

    def __init__(self, message: str, best_estimate=None, error_estimate: float = float("nan")):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class LinearSolveException(CascadeException):
    """Raised if a sparse linear system could not be solved to the requested tolerance."""


class GridException(CascadeException):
    """Raised for degenerate grids."""


class SolvabilityException(CascadeException):
    """Raised if the data of a Neumann type problem violates its solvability condition."""


class LayerException(CascadeException):
    """Raised if a boundary layer cannot be built from its trace."""


class MissingComponentException(CascadeException):
    """Raised if a partial sum is assembled without one of its components."""


class GridMismatchException(CascadeException):
    """Raised if two grid functions living on different grids are combined."""


class RateFitException(CascadeException):
    """Raised if a convergence rate is fitted from fewer than three usable points."""
