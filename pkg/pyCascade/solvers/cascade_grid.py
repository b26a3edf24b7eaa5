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
Conforming tensor grids over a two-width domain.

The domain is ``[x_left, 0] x [-h1/2, h1/2]`` joined at ``x = 0`` to ``[0, x_right] x [-h2/2, h2/2]``. The same
grid type carries the reference problem (``x_left = -1``, ``x_right = 1``) and the truncated junction strip
(``x_left = -R``, ``x_right = R``). The eta lines are mirrored around ``eta = 0`` and always contain ``+-h2/2``,
so the vertical step at ``x = 0`` and the interface between the branches split on grid lines.

Nodes are vertex centred. Every active cell contributes the classic five point finite volume couplings of its
four edges, which gives a symmetric stiffness matrix and lumped mass and boundary weights.
"""
import logging

from typing import Callable, NamedTuple, Optional

import numpy as np
import scipy.sparse as sp

from pyCascade.utils.exceptions import GridException, GridMismatchException

_logger = logging.getLogger(__name__)


class Cells(NamedTuple):
    """Active cells given by their corner node numbers."""
    lower_left: np.ndarray
    lower_right: np.ndarray
    upper_left: np.ndarray
    upper_right: np.ndarray
    dx: np.ndarray
    deta: np.ndarray
    x_center: np.ndarray
    eta_center: np.ndarray


def eta_lines(h1: float, h2: float, step: float) -> np.ndarray:
    """Mirrored eta lines with uniform spacing inside ``Y2`` and inside each band of ``Y1 \\ Y2``."""
    n2 = 2 * max(1, int(round(h2 / step / 2.0)))
    upper = np.linspace(0.0, 0.5 * h2, n2 // 2 + 1)
    if h1 > h2:
        bands = max(1, int(round((h1 - h2) / 2.0 / step)))
        upper = np.concatenate([upper, np.linspace(0.5 * h2, 0.5 * h1, bands + 1)[1:]])
    return np.concatenate([-upper[:0:-1], upper])


class CascadeGrid:
    def __init__(self, x_left: float, x_right: float, h1: float, h2: float, dx: float, deta: float) -> None:
        if not x_left < 0.0 < x_right:
            raise GridException("grid must contain x = 0 strictly inside")
        if dx <= 0 or deta <= 0:
            raise GridException("grid spacings must be positive")
        if not 0 < h2 <= h1:
            raise GridException("thicknesses must satisfy 0 < h2 <= h1")
        self.h1 = h1
        self.h2 = h2
        n_left = max(1, int(round(-x_left / dx)))
        n_right = max(1, int(round(x_right / dx)))
        self.x = np.concatenate([np.linspace(x_left, 0.0, n_left + 1), np.linspace(0.0, x_right, n_right + 1)[1:]])
        self.eta = eta_lines(h1, h2, deta)
        self.i0 = n_left
        self._tol = 1e-12 * max(1.0, h1)

        xx, ee = np.meshgrid(self.x, self.eta, indexing="ij")
        self.active = (xx <= 0.0) | (np.abs(ee) <= 0.5 * h2 + self._tol)
        self.index = np.full(self.active.shape, -1, dtype=np.int64)
        self.size = int(np.count_nonzero(self.active))
        self.index[self.active] = np.arange(self.size)
        self.node_x = xx[self.active]
        self.node_eta = ee[self.active]
        self._cells = self._active_cells()
        _logger.debug("grid with %d x-lines, %d eta-lines and %d active nodes", len(self.x), len(self.eta),
                      self.size)

    @property
    def x_left(self) -> float:
        return float(self.x[0])

    @property
    def x_right(self) -> float:
        return float(self.x[-1])

    def _active_cells(self) -> Cells:
        ci, cj = np.meshgrid(np.arange(len(self.x) - 1), np.arange(len(self.eta) - 1), indexing="ij")
        ci = ci.ravel()
        cj = cj.ravel()
        x_center = 0.5 * (self.x[ci] + self.x[ci + 1])
        eta_center = 0.5 * (self.eta[cj] + self.eta[cj + 1])
        keep = (x_center < 0.0) | (np.abs(eta_center) < 0.5 * self.h2)
        ci, cj = ci[keep], cj[keep]
        return Cells(self.index[ci, cj], self.index[ci + 1, cj], self.index[ci, cj + 1], self.index[ci + 1, cj + 1],
                     self.x[ci + 1] - self.x[ci], self.eta[cj + 1] - self.eta[cj], x_center[keep], eta_center[keep])

    def cells(self, where: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None) -> Cells:
        """Active cells, optionally restricted by a predicate on the cell centres."""
        if where is None:
            return self._cells
        keep = np.asarray(where(self._cells.x_center, self._cells.eta_center), dtype=bool)
        return Cells(*(field[keep] for field in self._cells))

    def stiffness(self, ax: float = 1.0, aeta: float = 1.0,
                  where: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None) -> sp.csr_matrix:
        """Finite volume matrix of ``-ax d_xx - aeta d_etaeta`` with natural Neumann conditions everywhere."""
        cells = self.cells(where)
        wx = ax * 0.5 * cells.deta / cells.dx
        weta = aeta * 0.5 * cells.dx / cells.deta
        first = np.concatenate([cells.lower_left, cells.upper_left, cells.lower_left, cells.lower_right])
        second = np.concatenate([cells.lower_right, cells.upper_right, cells.upper_left, cells.upper_right])
        weights = np.concatenate([wx, wx, weta, weta])
        rows = np.concatenate([first, second, first, second])
        cols = np.concatenate([first, second, second, first])
        data = np.concatenate([weights, weights, -weights, -weights])
        return sp.coo_matrix((data, (rows, cols)), shape=(self.size, self.size)).tocsr()

    def mass(self) -> np.ndarray:
        """Lumped mass, one quarter of every adjacent cell."""
        cells = self._cells
        quarter = 0.25 * cells.dx * cells.deta
        weights = np.zeros(self.size)
        for corner in (cells.lower_left, cells.lower_right, cells.upper_left, cells.upper_right):
            np.add.at(weights, corner, quarter)
        return weights

    def _line_weights(self, nodes: np.ndarray, positions: np.ndarray) -> np.ndarray:
        weights = np.zeros(self.size)
        if len(nodes) < 2:
            return weights
        half = 0.5 * np.diff(positions)
        np.add.at(weights, nodes[:-1], half)
        np.add.at(weights, nodes[1:], half)
        return weights

    def _row(self, eta: float) -> int:
        j = int(np.argmin(np.abs(self.eta - eta)))
        if abs(self.eta[j] - eta) > self._tol:
            raise GridException("eta = {} is not a grid line".format(eta))
        return j

    def wall(self, branch: int, side: int) -> np.ndarray:
        """Trapezoid weights on the horizontal wall ``eta = side * h_branch / 2`` of a branch (side is +1 or -1)."""
        h = self.h1 if branch == 1 else self.h2
        j = self._row(0.5 * side * h)
        columns = np.arange(0, self.i0 + 1) if branch == 1 else np.arange(self.i0, len(self.x))
        return self._line_weights(self.index[columns, j], self.x[columns])

    def _column_segment(self, column: int, low: float, high: float) -> np.ndarray:
        rows = np.nonzero((self.eta >= low - self._tol) & (self.eta <= high + self._tol))[0]
        return self._line_weights(self.index[column, rows], self.eta[rows])

    def step(self) -> np.ndarray:
        """Weights on the vertical step ``{0} x (Y1 \\ Y2)``; zero for equal thicknesses."""
        if self.h1 == self.h2:
            return np.zeros(self.size)
        return (self._column_segment(self.i0, -0.5 * self.h1, -0.5 * self.h2)
                + self._column_segment(self.i0, 0.5 * self.h2, 0.5 * self.h1))

    def interface(self) -> np.ndarray:
        """Weights on the interface ``{0} x Y2`` between the branches."""
        return self._column_segment(self.i0, -0.5 * self.h2, 0.5 * self.h2)

    def left_end(self) -> np.ndarray:
        return self._column_segment(0, -0.5 * self.h1, 0.5 * self.h1)

    def right_end(self) -> np.ndarray:
        return self._column_segment(len(self.x) - 1, -0.5 * self.h2, 0.5 * self.h2)

    def column_nodes(self, column: int) -> np.ndarray:
        """Active node numbers of one x-line, ordered by eta."""
        nodes = self.index[column]
        return nodes[nodes >= 0]

    def same_as(self, other: "CascadeGrid") -> bool:
        return self is other or (self.h1 == other.h1 and self.h2 == other.h2 and
                                 np.array_equal(self.x, other.x) and np.array_equal(self.eta, other.eta))


class GridFunction2D:
    """Nodal values on the active nodes of a :class:`CascadeGrid`."""

    def __init__(self, grid: CascadeGrid, values: np.ndarray) -> None:
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.size,):
            raise GridMismatchException("expected {} nodal values, got {}".format(grid.size, values.shape))
        self.grid = grid
        self.values = values

    def _check(self, other: "GridFunction2D"):
        if not self.grid.same_as(other.grid):
            raise GridMismatchException("grid functions live on different grids")

    def __sub__(self, other: "GridFunction2D") -> "GridFunction2D":
        self._check(other)
        return GridFunction2D(self.grid, self.values - other.values)

    def __add__(self, other: "GridFunction2D") -> "GridFunction2D":
        self._check(other)
        return GridFunction2D(self.grid, self.values + other.values)

    def to_array(self) -> np.ndarray:
        """Values on the full tensor grid, NaN outside the domain."""
        result = np.full(self.grid.active.shape, np.nan)
        result[self.grid.active] = self.values
        return result

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def l2_norm(self, eps: float) -> float:
        """L2 norm over the thin domain, ``eps`` times the lumped integral in fast coordinates."""
        return float(np.sqrt(eps * np.sum(self.values ** 2 * self.grid.mass())))

    def energy(self, eps: float) -> float:
        """``int |grad u|^2`` over the thin domain, with ``|grad u|^2 = u_x^2 + eps^-2 u_eta^2``."""
        stiffness = self.grid.stiffness(1.0, eps ** -2)
        return float(eps * self.values @ (stiffness @ self.values))

    def h1_norm(self, eps: float) -> float:
        return float(np.sqrt(self.l2_norm(eps) ** 2 + self.energy(eps)))
