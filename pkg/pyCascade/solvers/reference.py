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

"""
Direct solution of the Neumann-Poisson problem on the thin cascade, used as the validation oracle.

The problem is solved in the fast coordinates ``(x, eta)`` with ``y = eps * eta``, so the grid does not depend on
``eps``. Divided by ``eps`` the weak form reads

    int (u_x v_x + eps^-2 u_eta v_eta) = int f v - sum_i int phi_+ v(., h_i/2) + sum_i int phi_- v(., -h_i/2)

with ``u = 0`` at ``x = -1`` and ``x = 1``. The step ``{0} x (Y1 \\ Y2)`` carries the natural homogeneous
Neumann condition and the interface ``{0} x Y2`` is interior to the grid.
"""
import logging

from dataclasses import dataclass
from typing import Optional

import numpy as np

from scipy.integrate import trapezoid

from pyCascade.expressions.expression import Expression
from pyCascade.geometry import CascadeGeometry, Discretization, ProblemData
from pyCascade.solvers.cascade_grid import CascadeGrid, GridFunction2D
from pyCascade.solvers.linear import solve_spd

_logger = logging.getLogger(__name__)


def reference_grid(geometry: CascadeGeometry, discretization: Discretization) -> CascadeGrid:
    return CascadeGrid(-1.0, 1.0, geometry.h1, geometry.h2, 1.0 / discretization.nx, geometry.h1 / discretization.neta)


def _weighted(grid: CascadeGrid, weights: np.ndarray, e: Expression) -> np.ndarray:
    """``weights * e`` evaluated only where the weights do not vanish."""
    result = np.zeros(grid.size)
    if e.is_zero():
        return result
    support = weights != 0.0
    result[support] = weights[support] * e.evaluate(grid.node_x[support], grid.node_eta[support])
    return result


def load_vector(grid: CascadeGrid, data: ProblemData) -> np.ndarray:
    load = _weighted(grid, grid.mass(), data.f)
    for branch in (1, 2):
        load -= _weighted(grid, grid.wall(branch, 1), data.phi_plus(branch))
        load += _weighted(grid, grid.wall(branch, -1), data.phi_minus(branch))
    return load


def dirichlet_nodes(grid: CascadeGrid) -> np.ndarray:
    return np.isclose(grid.node_x, grid.x_left) | np.isclose(grid.node_x, grid.x_right)


def solve_reference(data: ProblemData, geometry: CascadeGeometry, eps: float,
                    discretization: Optional[Discretization] = None,
                    grid: Optional[CascadeGrid] = None) -> GridFunction2D:
    """
    Solves the cascade problem for one ``eps``.

    :param grid: grid to solve on; defaults to the reference grid of ``discretization``
    :raises LinearSolveException: if the linear solve fails
    """
    discretization = discretization or Discretization()
    grid = grid or reference_grid(geometry, discretization)
    if eps <= 0:
        raise ValueError("eps must be positive")
    if data.is_zero():
        return GridFunction2D(grid, np.zeros(grid.size))

    free = ~dirichlet_nodes(grid)
    stiffness = grid.stiffness(1.0, eps ** -2)[free][:, free]
    load = load_vector(grid, data)[free]
    values = np.zeros(grid.size)
    values[free] = solve_spd(stiffness, load, discretization.tol_lin_solve, discretization.linear_solver)
    _logger.info("reference solve for eps=%g on %d unknowns", eps, int(np.count_nonzero(free)))
    return GridFunction2D(grid, values)


def _wall_edges(grid: CascadeGrid, branch: int, side: int):
    h = grid.h1 if branch == 1 else grid.h2
    j = int(np.argmin(np.abs(grid.eta - 0.5 * side * h)))
    columns = np.arange(0, grid.i0 + 1) if branch == 1 else np.arange(grid.i0, len(grid.x))
    nodes = grid.index[columns, j]
    positions = grid.x[columns]
    return nodes[:-1], nodes[1:], 0.5 * (positions[:-1] + positions[1:]), np.diff(positions)


def energy_residual(u: GridFunction2D, data: ProblemData, geometry: CascadeGeometry, eps: float) -> float:
    """
    Mismatch of the energy identity ``int |grad u|^2 = int f u - eps sum int phi_+ u + eps sum int phi_- u``.

    Both sides use cell and edge midpoint quadrature, which differs from the quadrature of the scheme; the
    mismatch is therefore a measure of the discretization error.
    """
    grid = u.grid
    v = u.values
    cells = grid.cells()
    ux = 0.5 * (v[cells.lower_right] - v[cells.lower_left] + v[cells.upper_right] - v[cells.upper_left]) / cells.dx
    ueta = 0.5 * (v[cells.upper_left] - v[cells.lower_left] + v[cells.upper_right] - v[cells.lower_right]) / cells.deta
    u_mid = 0.25 * (v[cells.lower_left] + v[cells.lower_right] + v[cells.upper_left] + v[cells.upper_right])
    area = cells.dx * cells.deta

    energy = np.sum((ux ** 2 + eps ** -2 * ueta ** 2) * area)
    work = 0.0
    if not data.f.is_zero():
        work = np.sum(data.f.evaluate(cells.x_center, cells.eta_center) * u_mid * area)
    for branch in (1, 2):
        for side, phi in ((1, data.phi_plus(branch)), (-1, data.phi_minus(branch))):
            if phi.is_zero():
                continue
            first, second, middle, length = _wall_edges(grid, branch, side)
            edge_work = np.sum(phi.evaluate(middle) * 0.5 * (v[first] + v[second]) * length)
            work += -edge_work if side == 1 else edge_work
    return float(eps * abs(energy - work))


@dataclass(frozen=True)
class BranchProfile:
    """Sampled function of ``x`` on one branch."""
    branch: int
    x: np.ndarray
    values: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.x, self.values)

    def derivative(self) -> np.ndarray:
        """Difference quotients on the sampling intervals."""
        return np.diff(self.values) / np.diff(self.x)


def average_e(u: GridFunction2D, branch: int) -> BranchProfile:
    """Cross-section average ``h_i^-1 int_{Y_i} u(x, eta) d eta`` on the x-lines of a branch (trapezoid in eta)."""
    grid = u.grid
    h = grid.h1 if branch == 1 else grid.h2
    columns = np.arange(0, grid.i0 + 1) if branch == 1 else np.arange(grid.i0, len(grid.x))
    rows = np.nonzero(np.abs(grid.eta) <= 0.5 * h + 1e-12 * grid.h1)[0]
    nodes = grid.index[np.ix_(columns, rows)]
    averages = trapezoid(u.values[nodes], grid.eta[rows], axis=1) / h
    return BranchProfile(branch, grid.x[columns].copy(), averages)
