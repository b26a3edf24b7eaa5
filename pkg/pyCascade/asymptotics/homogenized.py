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

"""Effective right-hand sides and the one-dimensional transmission problems of the homogenized limit."""
import logging

from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BPoly

from pyCascade.expressions.quadrature import DEFAULT_NODE_BUDGET, integrate1d
from pyCascade.geometry import CascadeGeometry, ProblemData

_logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

_GL_NODES, _GL_WEIGHTS = leggauss(5)


class EffectiveRhs:
    """``F_i(x) = int_{Y_i} f(x, eta) d eta - phi_+(x) + phi_-(x)`` on branch ``i``."""

    def __init__(self, data: ProblemData, geometry: CascadeGeometry, branch: int, tol: float = 1e-10,
                 max_nodes: int = DEFAULT_NODE_BUDGET) -> None:
        self.branch = branch
        self.h = geometry.thickness(branch)
        self.f = data.f
        self.phi_plus = data.phi_plus(branch)
        self.phi_minus = data.phi_minus(branch)
        self.tol = tol
        self.max_nodes = max_nodes

    def is_zero(self) -> bool:
        return self.f.is_zero() and self.phi_plus.is_zero() and self.phi_minus.is_zero()

    def __call__(self, x: ArrayLike) -> ArrayLike:
        x = np.asarray(x, dtype=float)
        result = np.zeros(x.shape)
        if self.f.depends_on("eta"):
            result = result + integrate1d(self.f, "eta", -0.5 * self.h, 0.5 * self.h, self.tol, at=x,
                                          max_nodes=self.max_nodes)
        elif not self.f.is_zero():
            result = result + self.h * self.f.evaluate(x)
        if not self.phi_plus.is_zero():
            result = result - self.phi_plus.evaluate(x)
        if not self.phi_minus.is_zero():
            result = result + self.phi_minus.evaluate(x)
        return float(result) if result.ndim == 0 else result


def effective_rhs(data: ProblemData, geometry: CascadeGeometry, branch: int, tol: float = 1e-10,
                  max_nodes: int = DEFAULT_NODE_BUDGET) -> EffectiveRhs:
    return EffectiveRhs(data, geometry, branch, tol, max_nodes)


class BranchFunction1D:
    """
    A function on ``[-1, 0]`` (branch 1) and ``[0, 1]`` (branch 2), each branch a piecewise quintic in
    Bernstein form; the value may jump at ``x = 0``.
    """

    def __init__(self, first: BPoly, second: BPoly, zero: bool = False) -> None:
        self._pieces = (first, second)
        self._derivatives = {(1, 0): first, (2, 0): second}
        self.is_zero = zero

    @classmethod
    def zero(cls) -> "BranchFunction1D":
        return cls(_affine(-1.0, 0.0, 0.0, 0.0), _affine(0.0, 1.0, 0.0, 0.0), zero=True)

    @classmethod
    def piecewise_linear(cls, slope_1: float, slope_2: float, value_0: float = 0.0) -> "BranchFunction1D":
        """Continuous function with value ``value_0`` at ``x = 0`` and the given slope on each branch."""
        return cls(_affine(-1.0, 0.0, value_0 - slope_1, slope_1), _affine(0.0, 1.0, value_0, slope_2))

    @property
    def pieces(self) -> Tuple[BPoly, BPoly]:
        return self._pieces

    def _piece(self, branch: int, order: int) -> BPoly:
        key = (branch, order)
        if key not in self._derivatives:
            self._derivatives[key] = self._pieces[branch - 1].derivative(order)
        return self._derivatives[key]

    def value(self, x: ArrayLike, branch: Optional[int] = None, order: int = 0) -> ArrayLike:
        """
        Value (or derivative of the given order) at ``x``. Without an explicit branch, ``x <= 0`` is read from
        branch 1 and ``x > 0`` from branch 2.
        """
        x = np.asarray(x, dtype=float)
        if self.is_zero:
            result = np.zeros(x.shape)
        elif branch is not None:
            result = np.asarray(self._piece(branch, order)(x), dtype=float)
        else:
            left = x <= 0.0
            result = np.where(left, self._piece(1, order)(np.minimum(x, 0.0)),
                              self._piece(2, order)(np.maximum(x, 0.0)))
        return float(result) if result.ndim == 0 else result

    __call__ = value

    def derivative(self, x: ArrayLike, branch: Optional[int] = None, order: int = 1) -> ArrayLike:
        return self.value(x, branch, order)

    @property
    def jump(self) -> float:
        """``w(0+) - w(0-)``."""
        return self.value(0.0, 2) - self.value(0.0, 1)

    def flux_mismatch(self, geometry: CascadeGeometry) -> float:
        """``h1 w'(0-) - h2 w'(0+)``."""
        return geometry.h1 * self.derivative(0.0, 1) - geometry.h2 * self.derivative(0.0, 2)

    def breakpoints(self, branch: int) -> np.ndarray:
        return self._pieces[branch - 1].x

    def scaled(self, factor: float) -> "BranchFunction1D":
        if self.is_zero or factor == 0.0:
            return BranchFunction1D.zero()
        first, second = self._pieces
        return BranchFunction1D(BPoly(factor * first.c, first.x), BPoly(factor * second.c, second.x))


def _affine(a: float, b: float, value_a: float, slope: float) -> BPoly:
    value_b = value_a + slope * (b - a)
    return BPoly.from_derivatives([a, b], [[value_a, slope, 0.0], [value_b, slope, 0.0]])


def _cumulative(rhs: EffectiveRhs, a: float, b: float, intervals: int):
    """Particular solution ``P`` with ``P'' = F``, ``P(a) = P'(a) = 0`` at the nodes of a uniform grid."""
    nodes = np.linspace(a, b, intervals + 1)
    length = np.diff(nodes)
    points = nodes[:-1, None] + 0.5 * length[:, None] * (1.0 + _GL_NODES[None, :])
    weights = 0.5 * length[:, None] * _GL_WEIGHTS[None, :]
    values = np.asarray(rhs(points.ravel())).reshape(points.shape)

    slope_increments = np.sum(weights * values, axis=1)
    slopes = np.concatenate([[0.0], np.cumsum(slope_increments)])
    # Taylor formula with integral remainder, exact for the Gauss rule up to degree 9
    remainders = np.sum(weights * (nodes[1:, None] - points) * values, axis=1)
    value_increments = length * slopes[:-1] + remainders
    particular = np.concatenate([[0.0], np.cumsum(value_increments)])
    return nodes, particular, slopes, np.asarray(rhs(nodes))


def solve_main(rhs_1: EffectiveRhs, rhs_2: EffectiveRhs, geometry: CascadeGeometry, nodes_per_branch: int = 1024
               ) -> BranchFunction1D:
    """
    Solves ``-h_i w'' = F_i`` on both branches with ``w(-1) = w(1) = 0``, continuity at ``x = 0`` and the flux
    balance ``h1 w'(0-) = h2 w'(0+)``.

    Each branch is ``w = -P/h + a x + b`` with the cumulative particular solution ``P``; the four affine constants
    follow from the four end and transmission conditions.
    """
    if rhs_1.is_zero() and rhs_2.is_zero():
        return BranchFunction1D.zero()
    h1, h2 = geometry.h1, geometry.h2
    x1, p1, dp1, f1 = _cumulative(rhs_1, -1.0, 0.0, nodes_per_branch)
    x2, p2, dp2, f2 = _cumulative(rhs_2, 0.0, 1.0, nodes_per_branch)

    system = np.array([[-1.0, 1.0, 0.0, 0.0],
                       [0.0, 0.0, 1.0, 1.0],
                       [0.0, 1.0, 0.0, -1.0],
                       [h1, 0.0, -h2, 0.0]])
    rhs = np.array([0.0, p2[-1] / h2, p1[-1] / h1, dp1[-1]])
    a1, b1, a2, b2 = np.linalg.solve(system, rhs)

    first = BPoly.from_derivatives(x1, np.column_stack([-p1 / h1 + a1 * x1 + b1, -dp1 / h1 + a1, -f1 / h1]))
    second = BPoly.from_derivatives(x2, np.column_stack([-p2 / h2 + a2 * x2 + b2, -dp2 / h2 + a2, -f2 / h2]))
    omega = BranchFunction1D(first, second)
    _logger.debug("homogenized solution: w(0)=%.12g, flux mismatch %.3g", omega.value(0.0, 1),
                  omega.flux_mismatch(geometry))
    return omega


def solve_linear_branch(k: int, d_prev: float, geometry: CascadeGeometry) -> BranchFunction1D:
    """
    Linear branches of order ``k >= 3``: vanishing at the Dirichlet ends, equal fluxes ``h_i w'`` and the jump
    ``w(0+) - w(0-) = d_prev``.
    """
    if k < 3:
        raise ValueError("linear branches exist for k >= 3, got {}".format(k))
    if d_prev == 0.0:
        return BranchFunction1D.zero()
    h1, h2 = geometry.h1, geometry.h2
    slope_1 = -h2 * d_prev / (h1 + h2)
    slope_2 = -h1 * d_prev / (h1 + h2)
    return BranchFunction1D(_affine(-1.0, 0.0, 0.0, slope_1), _affine(0.0, 1.0, -slope_2, slope_2))


def main_residual(omega: BranchFunction1D, rhs: Sequence[EffectiveRhs], geometry: CascadeGeometry) -> List[float]:
    """Max of ``|-h_i w'' - F_i|`` over the midpoints of the representation grid of each branch."""
    residuals = []
    for branch, branch_rhs in zip((1, 2), rhs):
        nodes = omega.breakpoints(branch)
        middle = 0.5 * (nodes[:-1] + nodes[1:])
        second = omega.derivative(middle, branch, order=2)
        residuals.append(float(np.max(np.abs(-geometry.thickness(branch) * second - branch_rhs(middle)))))
    return residuals
