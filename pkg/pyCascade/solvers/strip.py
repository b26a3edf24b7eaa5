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
Inner layer problems on the truncated two-width strip.

The strip ``((-R, 0) x Y1) u ((0, R) x Y2)`` is discretized by the conforming finite volume grid of
:mod:`pyCascade.solvers.cascade_grid`. The data of a layer problem is

* ``F`` in the strip,
* ``B`` on the horizontal walls,
* ``G`` on the vertical step ``{0} x (Y1 \\ Y2)`` (normal derivative),
* ``Psi``, the value jump ``N(0+, eta) - N(0-, eta)`` on ``Y2``,
* ``Phi``, the jump ``d_xi N(0+, eta) - d_xi N(0-, eta)`` on ``Y2``.

The value jump is lifted by ``W = N - chi(xi) Psi(eta)`` on the right part. The remaining Neumann problem is
singular; it is made definite by a rank one term that fixes the mean over the left end of the strip.
"""
import logging
import threading

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.sparse as sp

from numpy.polynomial.legendre import leggauss
from scipy.integrate import trapezoid
from scipy.interpolate import RegularGridInterpolator

from pyCascade.expressions.quadrature import gauss_kronrod
from pyCascade.geometry import CascadeGeometry, Discretization
from pyCascade.solvers.cascade_grid import CascadeGrid, GridFunction2D
from pyCascade.solvers.linear import factorize
from pyCascade.utils.cutoff import plateau_cutoff
from pyCascade.utils.exceptions import SolvabilityException

_logger = logging.getLogger(__name__)

LIFT_DELTA = 1.0
# Gauss-Legendre points per grid interval of the Green formula
_GREEN_NODES, _GREEN_WEIGHTS = leggauss(4)
_PSI_STEP = 1e-3
WALLS = ((1, 1), (1, -1), (2, 1), (2, -1))

Data = Union[None, float, Callable]


def _as_function(value: Data) -> Optional[Callable]:
    if value is None:
        return None
    if callable(value):
        return value
    if value == 0.0:
        return None
    constant = float(value)
    return lambda *args: np.full(np.shape(args[0]), constant)


@dataclass
class StripProblem:
    """Data of one layer problem; ``None`` marks vanishing data."""
    F: Data = None
    B: Dict[Tuple[int, int], Data] = field(default_factory=dict)
    G: Data = None
    Psi: Data = None
    Phi: Data = None

    def __post_init__(self):
        self.F = _as_function(self.F)
        self.G = _as_function(self.G)
        self.Psi = _as_function(self.Psi)
        self.Phi = _as_function(self.Phi)
        self.B = {wall: _as_function(value) for wall, value in self.B.items() if _as_function(value) is not None}
        unknown = set(self.B) - set(WALLS)
        if unknown:
            raise ValueError("unknown walls {}".format(sorted(unknown)))

    def is_zero(self) -> bool:
        return self.F is None and not self.B and self.G is None and self.Psi is None and self.Phi is None

    @staticmethod
    def weight(xi):
        """Weight ``(1 + |xi|)^-1`` of the energy space of the strip."""
        return 1.0 / (1.0 + np.abs(xi))


class StripDomain:
    def __init__(self, h1: float, h2: float, R: float = 12.0, step: float = 1.0 / 64.0,
                 tol: float = 1e-10, method: str = "direct") -> None:
        if R <= 2.0 * LIFT_DELTA:
            raise ValueError("strip half-length must exceed the lifting support")
        self.h1 = h1
        self.h2 = h2
        self.R = R
        self.step = step
        self.tol = tol
        self.method = method
        self.grid = CascadeGrid(-R, R, h1, h2, step, step)
        grid = self.grid
        self.mass = grid.mass()
        self.stiffness = grid.stiffness()
        self.stiffness_left = grid.stiffness(where=lambda xc, ec: xc < 0.0)
        self.stiffness_right = grid.stiffness(where=lambda xc, ec: xc > 0.0)
        self.step_weights = grid.step()
        self.interface_weights = grid.interface()
        self.walls = {(branch, side): grid.wall(branch, side) for branch, side in WALLS}
        self.left_end = grid.left_end()
        self.right_end = grid.right_end()
        self.pin = self.left_end / h1
        self.right_nodes = grid.node_x > 0.0
        self.lift_support = (grid.node_x >= 0.0) & (np.abs(grid.node_eta) <= 0.5 * h2 + 1e-12 * h1)
        self._solver = None
        self._lock = threading.Lock()

    @classmethod
    def from_discretization(cls, geometry: CascadeGeometry, discretization: Discretization,
                            R: Optional[float] = None) -> "StripDomain":
        return cls(geometry.h1, geometry.h2, R if R is not None else discretization.R, discretization.strip_step,
                   discretization.tol_lin_solve, discretization.linear_solver)

    def _pinned(self) -> Callable[[np.ndarray], np.ndarray]:
        with self._lock:
            if self._solver is None:
                support = np.nonzero(self.pin)[0]
                k = len(support)
                rank_one = sp.coo_matrix((np.outer(self.pin[support], self.pin[support]).ravel(),
                                          (np.repeat(support, k), np.tile(support, k))),
                                         shape=self.stiffness.shape)
                self._solver = factorize((self.stiffness + rank_one).tocsr(), self.tol, self.method)
            return self._solver

    def solve(self, load: np.ndarray, left_mean: float = 0.0) -> np.ndarray:
        """
        Solves the Neumann problem ``A w = load`` with the mean over the left end fixed to ``left_mean``. The load is
        projected onto the range of ``A`` first.
        """
        total = float(np.sum(load))
        projected = load - total * self.mass / np.sum(self.mass)
        if abs(total) > self.tol * max(1.0, float(np.max(np.abs(load)))):
            _logger.warning("discrete solvability defect %.3g removed by projection", total)
        return self._pinned()(projected + left_mean * self.pin)

    def nodal(self, weights: np.ndarray, func: Callable, *coordinates: str) -> np.ndarray:
        """``weights * func`` on the nodes where the weights do not vanish."""
        result = np.zeros(self.grid.size)
        support = weights != 0.0
        args = [getattr(self.grid, "node_" + name)[support] for name in coordinates]
        result[support] = weights[support] * np.asarray(func(*args), dtype=float)
        return result

    def lift(self, psi: Optional[Callable]) -> np.ndarray:
        """Nodal values of ``chi(xi) Psi(eta)`` on the right part including ``xi = 0``."""
        result = np.zeros(self.grid.size)
        if psi is None:
            return result
        support = self.lift_support
        chi = plateau_cutoff(self.grid.node_x[support], LIFT_DELTA)
        result[support] = chi * np.asarray(psi(self.grid.node_eta[support]), dtype=float)
        return result

    def column_means(self) -> Tuple[np.ndarray, np.ndarray]:
        """Matrix mapping nodal values to trapezoid cross-section means, and the xi of each column."""
        grid = self.grid
        rows, cols, data = [], [], []
        for column in range(len(grid.x)):
            nodes = grid.column_nodes(column)
            eta = grid.eta[grid.index[column] >= 0]
            weights = np.zeros(len(nodes))
            half = 0.5 * np.diff(eta)
            weights[:-1] += half
            weights[1:] += half
            rows.extend([column] * len(nodes))
            cols.extend(nodes)
            data.extend(weights / (eta[-1] - eta[0]))
        matrix = sp.csr_matrix((data, (rows, cols)), shape=(len(grid.x), grid.size))
        return matrix, grid.x


@dataclass
class Z0Field:
    """Linearly growing solution of the homogeneous strip problem."""
    field: GridFunction2D
    c_h1: float
    c_h2: float
    slopes: Tuple[float, float]


def _fit_slope(xi: np.ndarray, means: np.ndarray, low: float, high: float) -> float:
    window = (xi >= low) & (xi <= high)
    return float(np.polyfit(xi[window], means[window], 1)[0])


def solve_z0(dom: StripDomain) -> Z0Field:
    """
    Solves the homogeneous strip problem with far-field data ``d_xi Z = 1/h1`` at ``xi = -R`` and ``1/h2`` at
    ``xi = R``. The left end mean is fixed to ``-R/h1``, so the cross-section mean is ``xi/h1 + Ch1`` on the left
    with ``Ch1 = 0``; ``Ch2`` is the mean over ``Y2`` at ``xi = 0``.
    """
    load = -dom.left_end / dom.h1 + dom.right_end / dom.h2
    values = dom.solve(load, left_mean=-dom.R / dom.h1)
    means, xi = dom.column_means()
    column = means @ values
    grid = dom.grid
    interface_nodes = grid.interface() != 0.0
    eta = grid.node_eta[interface_nodes]
    order = np.argsort(eta)
    c_h2 = float(trapezoid(values[interface_nodes][order], eta[order]) / dom.h2)
    c_h1 = float(column[grid.i0])
    R = dom.R
    slopes = (_fit_slope(xi, column, -(R - 1.0), -(R - 4.0)), _fit_slope(xi, column, R - 4.0, R - 1.0))
    _logger.info("Z0: Ch1=%.6g, Ch2=%.6g, far-field slopes %.6g / %.6g", c_h1, c_h2, *slopes)
    return Z0Field(GridFunction2D(grid, values), c_h1, c_h2, slopes)


def check_solvability(p: StripProblem, dom: StripDomain, tol: float = 1e-12) -> float:
    """
    ``int_Y2 Phi - int F - sum int B - int G``; zero for solvable data.

    One-dimensional data are integrated adaptively; the volume source uses the lumped grid quadrature.
    """
    residual = 0.0
    half_1, half_2 = 0.5 * dom.h1, 0.5 * dom.h2
    if p.Phi is not None:
        residual += gauss_kronrod(p.Phi, -half_2, half_2, tol)
    if p.G is not None and dom.h1 > dom.h2:
        residual -= gauss_kronrod(p.G, -half_1, -half_2, tol) + gauss_kronrod(p.G, half_2, half_1, tol)
    for (branch, side), func in p.B.items():
        residual -= gauss_kronrod(func, -dom.R, 0.0, tol) if branch == 1 else gauss_kronrod(func, 0.0, dom.R, tol)
    if p.F is not None:
        residual -= float(np.sum(dom.nodal(dom.mass, p.F, "x", "eta")))
    return float(residual)


def load_vector(p: StripProblem, dom: StripDomain) -> np.ndarray:
    """Right-hand side of the lifted problem for ``W``."""
    load = np.zeros(dom.grid.size)
    if p.F is not None:
        load += dom.nodal(dom.mass, p.F, "x", "eta")
    for wall, func in p.B.items():
        load += dom.nodal(dom.walls[wall], func, "x")
    if p.G is not None:
        load += dom.nodal(dom.step_weights, p.G, "eta")
    if p.Phi is not None:
        load -= dom.nodal(dom.interface_weights, p.Phi, "eta")
    if p.Psi is not None:
        load -= dom.stiffness_right @ dom.lift(p.Psi)
    return load


def _part_interpolators(grid: CascadeGrid, source: np.ndarray, right: bool) -> List[RegularGridInterpolator]:
    columns = np.arange(grid.i0, len(grid.x)) if right else np.arange(0, grid.i0 + 1)
    rows = np.nonzero(grid.index[columns[-1] if right else columns[0]] >= 0)[0]
    values = source[grid.index[np.ix_(columns, rows)]]
    x, eta = grid.x[columns], grid.eta[rows]
    gradient = np.gradient(values, x, eta)
    return [RegularGridInterpolator((x, eta), array, bounds_error=False, fill_value=0.0)
            for array in (values, gradient[0], gradient[1])]


class StripInterpolant:
    """
    Bilinear interpolation of a strip field that may jump at ``xi = 0``: ``left`` holds the nodal values seen from
    ``xi <= 0`` and ``right`` those seen from ``xi > 0``. Zero outside the strip.
    """

    def __init__(self, grid: CascadeGrid, left: np.ndarray, right: np.ndarray) -> None:
        self._left = _part_interpolators(grid, left, False)
        self._right = _part_interpolators(grid, right, True)

    def __call__(self, xi, eta, derivative: Optional[str] = None) -> np.ndarray:
        xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
        result = np.zeros(xi.shape)
        which = {None: 0, "xi": 1, "eta": 2}[derivative]
        points = np.stack([xi, eta], axis=-1)
        on_left = xi <= 0.0
        if np.any(on_left):
            result[on_left] = self._left[which](points[on_left])
        if np.any(~on_left):
            result[~on_left] = self._right[which](points[~on_left])
        return result


class JunctionLayer:
    """
    Layer ``N`` on the strip: ``W`` for ``xi <= 0`` and ``W + chi Psi - d_plus`` for ``xi > 0``, so that it decays
    at both ends. Evaluation outside the truncated strip returns zero.
    """

    def __init__(self, dom: StripDomain, w: np.ndarray, lift: np.ndarray, d_plus: float, order: int = 0,
                 d_green: Optional[float] = None) -> None:
        self.dom = dom
        self.order = order
        self.d_plus = d_plus
        self.d_green = d_green
        self.w = w
        self.lift = lift
        self.full = w + lift
        self.values = np.where(dom.right_nodes, self.full - d_plus, w)
        self.is_zero = not np.any(self.values) and d_plus == 0.0
        self._interpolators = None

    @classmethod
    def zero(cls, dom: StripDomain, order: int = 0) -> "JunctionLayer":
        zeros = np.zeros(dom.grid.size)
        return cls(dom, zeros, zeros, 0.0, order, 0.0)

    def _ensure(self) -> StripInterpolant:
        if self._interpolators is None:
            self._interpolators = StripInterpolant(self.dom.grid, self.w, self.full - self.d_plus)
        return self._interpolators

    def evaluate(self, xi, eta, derivative: Optional[str] = None) -> np.ndarray:
        """Bilinear interpolation of ``N`` (``derivative`` ``"xi"`` or ``"eta"`` for a gradient component)."""
        if self.is_zero:
            return np.zeros(np.broadcast(np.asarray(xi), np.asarray(eta)).shape)
        return self._ensure()(xi, eta, derivative)

    __call__ = evaluate

    def as_grid_function(self) -> GridFunction2D:
        return GridFunction2D(self.dom.grid, self.values)

    def gradient_norm(self) -> float:
        """``||grad N||`` over the truncated strip."""
        dom = self.dom
        energy = self.w @ (dom.stiffness_left @ self.w) + self.full @ (dom.stiffness_right @ self.full)
        return float(np.sqrt(max(energy, 0.0)))

    def weighted_norm(self) -> float:
        """Norm ``(int |grad N|^2 + int N^2 rho^2)^(1/2)`` with ``rho = (1 + |xi|)^-1``."""
        dom = self.dom
        rho = StripProblem.weight(dom.grid.node_x)
        weighted = np.sum(self.values ** 2 * rho ** 2 * dom.mass)
        return float(np.sqrt(self.gradient_norm() ** 2 + weighted))

    def _amplitudes(self) -> Tuple[np.ndarray, np.ndarray]:
        grid = self.dom.grid
        amplitude = np.zeros(len(grid.x))
        for column in range(len(grid.x)):
            amplitude[column] = np.max(np.abs(self.values[grid.column_nodes(column)]))
        return grid.x, amplitude

    def decay_rates(self) -> Tuple[float, float]:
        """Fitted exponential decay rates of the max-over-eta amplitude towards ``xi = -R`` and ``xi = R``."""
        xi, amplitude = self._amplitudes()
        floor = 1e-13 * max(float(np.max(amplitude)), 1e-300)
        rates = []
        for sign in (-1.0, 1.0):
            window = (sign * xi >= 1.0) & (sign * xi <= self.dom.R - 1.0) & (amplitude > floor)
            if np.count_nonzero(window) < 3:
                rates.append(float("nan"))
                continue
            slope = np.polyfit(xi[window], np.log(amplitude[window]), 1)[0]
            rates.append(float(-sign * slope))
        return rates[0], rates[1]

    def far_field_ratio(self) -> float:
        """Max amplitude at ``|xi| = R - 1`` relative to the amplitude at ``xi = 0``."""
        xi, amplitude = self._amplitudes()
        center = amplitude[self.dom.grid.i0]
        if center == 0.0:
            return 0.0
        R = self.dom.R
        far = max(amplitude[np.argmin(np.abs(xi + R - 1.0))], amplitude[np.argmin(np.abs(xi - R + 1.0))])
        return float(far / center)


def plateau(dom: StripDomain, full: np.ndarray) -> float:
    """Mass weighted mean over the slab ``R - 2 <= xi <= R - 1``."""
    x = dom.grid.node_x
    slab = (x >= dom.R - 2.0 - 1e-12) & (x <= dom.R - 1.0 + 1e-12)
    return float(np.sum(full[slab] * dom.mass[slab]) / np.sum(dom.mass[slab]))


def solve_strip(p: StripProblem, dom: StripDomain, order: int = 0, solvability_tol: float = 1e-8) -> JunctionLayer:
    """
    Solves a layer problem. The additive constant is fixed by a vanishing mean at the left end, the plateau
    ``d_plus`` is read off on ``[R - 2, R - 1]`` and subtracted on the right part.

    :raises SolvabilityException: if the data violates the solvability condition
    """
    if p.is_zero():
        return JunctionLayer.zero(dom, order)
    residual = check_solvability(p, dom)
    if abs(residual) > solvability_tol:
        raise SolvabilityException("strip data is not solvable: residual {:.3g}".format(residual))
    lift = dom.lift(p.Psi)
    w = dom.solve(load_vector(p, dom))
    d_plus = plateau(dom, w + lift)
    _logger.info("strip solve (order %d): plateau %.10g", order, d_plus)
    return JunctionLayer(dom, w, lift, d_plus, order)


def _composite(lines: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points and weights on every interval between consecutive grid lines."""
    a, b = lines[:-1, None], lines[1:, None]
    points = 0.5 * (a + b) + 0.5 * (b - a) * _GREEN_NODES
    weights = 0.5 * (b - a) * _GREEN_WEIGHTS
    return points.ravel(), weights.ravel()


def _second_difference(func: Callable, eta: np.ndarray, step: float) -> Tuple[np.ndarray, np.ndarray]:
    values = np.asarray(func(eta), dtype=float)
    upper = np.asarray(func(eta + step), dtype=float)
    lower = np.asarray(func(eta - step), dtype=float)
    return (upper - lower) / (2.0 * step), (upper - 2.0 * values + lower) / step ** 2


def compute_d0(p: StripProblem, dom: StripDomain, z0: Z0Field) -> float:
    """
    Green formula for the plateau,
    ``int F Z + sum int B Z + int G Z - int_Y2 Phi Z - int grad(chi Psi) . grad Z`` (the last one on the right part).

    ``Z`` is interpolated bilinearly and every term is integrated by composite Gauss-Legendre rules on the grid
    cells. Since ``Z`` is harmonic, the lifting term is integrated by parts,
    ``int (chi'' Psi + chi Psi'') Z - int chi (Psi'(h2/2) Z(xi, h2/2) - Psi'(-h2/2) Z(xi, -h2/2))``, so that no
    gradient of ``Z`` enters; derivatives of ``Psi`` are central differences.
    """
    if p.is_zero():
        return 0.0
    grid = dom.grid
    values = z0.field.values
    z = StripInterpolant(grid, values, values)
    half_1, half_2 = 0.5 * dom.h1, 0.5 * dom.h2
    lines_2 = grid.eta[np.abs(grid.eta) <= half_2 + 1e-12 * dom.h1]
    xi_left, w_left = _composite(grid.x[grid.x <= 0.0])
    xi_right, w_right = _composite(grid.x[grid.x >= 0.0])
    eta_1, w_eta_1 = _composite(grid.eta)
    eta_2, w_eta_2 = _composite(lines_2)

    total = 0.0
    if p.F is not None:
        for xi, w_xi, eta, w_eta in ((xi_left, w_left, eta_1, w_eta_1), (xi_right, w_right, eta_2, w_eta_2)):
            xx, ee = np.meshgrid(xi, eta, indexing="ij")
            weights = np.outer(w_xi, w_eta)
            source = np.asarray(p.F(xx.ravel(), ee.ravel()), dtype=float).reshape(xx.shape)
            total += float(np.sum(weights * source * z(xx, ee)))
    for (branch, side), func in p.B.items():
        xi, w_xi = (xi_left, w_left) if branch == 1 else (xi_right, w_right)
        eta = side * (half_1 if branch == 1 else half_2)
        total += float(np.sum(w_xi * np.asarray(func(xi), dtype=float) * z(xi, eta)))
    if p.G is not None and dom.h1 > dom.h2:
        for lines in (grid.eta[grid.eta <= -half_2 + 1e-12 * dom.h1], grid.eta[grid.eta >= half_2 - 1e-12 * dom.h1]):
            eta, w_eta = _composite(lines)
            total += float(np.sum(w_eta * np.asarray(p.G(eta), dtype=float) * z(0.0, eta)))
    if p.Phi is not None:
        total -= float(np.sum(w_eta_2 * np.asarray(p.Phi(eta_2), dtype=float) * z(0.0, eta_2)))
    if p.Psi is not None:
        support = xi_right <= 2.0 * LIFT_DELTA
        xi, w_xi = xi_right[support], w_right[support]
        step = _PSI_STEP * dom.h2
        _, psi_second = _second_difference(p.Psi, eta_2, step)
        psi = np.asarray(p.Psi(eta_2), dtype=float)
        xx, ee = np.meshgrid(xi, eta_2, indexing="ij")
        laplacian = (plateau_cutoff(xi, LIFT_DELTA, 2)[:, None] * psi[None, :] +
                     plateau_cutoff(xi, LIFT_DELTA)[:, None] * psi_second[None, :])
        total += float(np.sum(np.outer(w_xi, w_eta_2) * laplacian * z(xx, ee)))
        walls = np.array([-half_2, half_2])
        slopes, _ = _second_difference(p.Psi, walls, step)
        chi = plateau_cutoff(xi, LIFT_DELTA)
        total -= float(np.sum(w_xi * chi * (slopes[1] * z(xi, half_2) - slopes[0] * z(xi, -half_2))))
    _logger.debug("Green formula: d+ = %.10g", total)
    return total
