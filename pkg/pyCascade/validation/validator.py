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

"""Error norms, residuals, explicit constant bounds and rate fits of the asymptotic estimates."""
import logging
import math

from typing import NamedTuple, Optional, Sequence, Tuple

import numpy as np

from numpy.polynomial.legendre import leggauss

from pyCascade.asymptotics.expansion import AsymptoticComponents
from pyCascade.expressions.expression import Expression, differentiate
from pyCascade.geometry import CascadeGeometry, ProblemData
from pyCascade.solvers.cascade_grid import CascadeGrid, GridFunction2D
from pyCascade.solvers.reference import BranchProfile, average_e
from pyCascade.utils.exceptions import GridMismatchException, RateFitException
from pyCascade.validation.partial_sum import PartialSum, chi_end, chi_junction

_logger = logging.getLogger(__name__)

MIN_RATE_POINTS = 3


class ConvergenceRow(NamedTuple):
    eps: float
    l2_leading: float
    h1_leading: float
    h1_first: float
    h1_partial: float
    average_l2: Tuple[float, float]
    average_h1: Tuple[float, float]
    average_max: Tuple[float, float]
    residual: float = float("nan")

    @property
    def average_max_total(self) -> float:
        return max(self.average_max)


def _profile_errors(profile: BranchProfile, ps: PartialSum) -> Tuple[float, float, float]:
    difference = profile.values - ps.components.omega[2].value(profile.x, profile.branch)
    dx = np.diff(profile.x)
    l2 = float(np.sqrt(np.sum(0.5 * (difference[:-1] ** 2 + difference[1:] ** 2) * dx)))
    slope = np.diff(difference) / dx
    h1 = float(np.sqrt(l2 ** 2 + np.sum(slope ** 2 * dx)))
    return l2, h1, float(np.max(np.abs(difference)))


def error_norms(u_ref: GridFunction2D, ps: PartialSum, eps: float, grid: Optional[CascadeGrid] = None
                ) -> ConvergenceRow:
    """
    All error quantities of one sweep point: ``u - w_2`` in L2 and H1, ``u - w_2 - eps (w_3 + chi0 N_1)`` and
    ``u - U`` in H1, and the cross-section averages against ``w_2`` on both branches.

    :raises GridMismatchException: if the partial sum was assembled for another ``eps`` or ``grid`` differs from
        the grid of ``u_ref``
    """
    if grid is not None and not grid.same_as(u_ref.grid):
        raise GridMismatchException("reference solution and partial sum are sampled on different grids")
    if not math.isclose(ps.eps, eps, rel_tol=1e-12):
        raise GridMismatchException("partial sum assembled for eps={}, expected {}".format(ps.eps, eps))
    grid = u_ref.grid
    x, eta = grid.node_x, grid.node_eta
    leading = u_ref - GridFunction2D(grid, ps.leading(x))
    first = u_ref - GridFunction2D(grid, ps.first_order(x, eta))
    partial = u_ref - ps.sample(grid)
    averages = [_profile_errors(average_e(u_ref, branch), ps) for branch in (1, 2)]
    row = ConvergenceRow(eps, leading.l2_norm(eps), leading.h1_norm(eps), first.h1_norm(eps), partial.h1_norm(eps),
                         (averages[0][0], averages[1][0]), (averages[0][1], averages[1][1]),
                         (averages[0][2], averages[1][2]))
    _logger.info("eps=%g: |u-w2|=%.3e, |u-U|_H1=%.3e", eps, row.l2_leading, row.h1_partial)
    return row


class ResidualReport(NamedTuple):
    sup: Tuple[float, float]
    location: Tuple[Tuple[float, float], Tuple[float, float]]
    step: float
    interface: float

    @property
    def total(self) -> float:
        return max(self.sup)


def _laplacian_plus_f(ps: PartialSum, branch: int, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
    components = ps.components
    eps, delta = ps.eps, ps.delta
    h = components.geometry.thickness(branch)
    value = -np.array(components.rhs[branch - 1](x), dtype=float) / h
    if not components.data.f.is_zero():
        value = value + components.data.f.evaluate(x, eta)

    for k in range(2, 2 * ps.m + 1, 2):
        corrector = components.corrector(k, branch)
        if not corrector.is_zero:
            value = value + eps ** k * (corrector.derivative_x(2).evaluate(x, eta) +
                                        eps ** -2 * corrector.evaluate(x, eta, eta_order=2))

    # Cut-off commutators; the layers themselves are harmonic
    ramp = (np.abs(x) > delta) & (np.abs(x) < 2.0 * delta)
    for k in range(1, 2 * ps.m + 1):
        layer = components.junctions[k]
        if layer.is_zero or not np.any(ramp):
            continue
        xr, er = x[ramp], eta[ramp]
        xi = xr / eps
        value[ramp] += eps ** k * (chi_junction(xr, delta, 2) * layer.evaluate(xi, er) +
                                   2.0 * chi_junction(xr, delta, 1) / eps * layer.evaluate(xi, er, "xi"))
    for k in range(2, 2 * ps.m + 1, 2):
        layer = components.layers[k][branch - 1]
        sign = 1.0 if layer.side == "left" else -1.0
        distance = 1.0 + sign * x
        ramp = (distance > delta) & (distance < 2.0 * delta)
        if layer.is_zero or not np.any(ramp):
            continue
        xr, er = x[ramp], eta[ramp]
        xi = distance[ramp] / eps
        value[ramp] += eps ** k * (chi_end(xr, delta, layer.side, 2) * layer.evaluate(xi, er) +
                                   2.0 * sign * chi_end(xr, delta, layer.side, 1) / eps *
                                   layer.evaluate(xi, er, xi_order=1))
    return value


def residual_sup(ps: PartialSum, samples_x: int = 400, samples_eta: int = 41) -> ResidualReport:
    """
    Sup of ``|Delta U + f|`` per branch on sample grids that avoid ``x = 0`` and ``x = +-1``, with the location of
    the maximum; the Laplacian is ``d_xx + eps^-2 d_etaeta`` in fast coordinates. Also reports the residuals of the
    step condition and of the flux transmission at ``x = 0``.
    """
    geometry = ps.components.geometry
    sups, locations = [], []
    for branch in (1, 2):
        a, b = geometry.interval(branch)
        low, high = geometry.cross_section(branch)
        x, eta = np.meshgrid(np.linspace(a, b, samples_x + 2)[1:-1], np.linspace(low, high, samples_eta),
                             indexing="ij")
        residual = np.abs(_laplacian_plus_f(ps, branch, x.ravel(), eta.ravel()))
        position = int(np.argmax(residual))
        sups.append(float(residual[position]))
        locations.append((float(x.ravel()[position]), float(eta.ravel()[position])))
    step, interface = _junction_residuals(ps, samples_eta)
    return ResidualReport((sups[0], sups[1]), (locations[0], locations[1]), step, interface)


def _junction_residuals(ps: PartialSum, samples: int) -> Tuple[float, float]:
    components = ps.components
    geometry = components.geometry
    h1, h2 = geometry.h1, geometry.h2
    k = 2 * ps.m
    d = components.d_plus(k)
    first = components.corrector(k, 1).derivative_x()
    second = components.corrector(k, 2).derivative_x()
    scale = ps.eps ** k
    step = 0.0
    if not geometry.equal_thickness:
        eta = np.concatenate([np.linspace(-0.5 * h1, -0.5 * h2, samples), np.linspace(0.5 * h2, 0.5 * h1, samples)])
        step = float(np.max(np.abs(scale * (first.evaluate(0.0, eta) - h2 * d / (h1 + h2)))))
    eta = np.linspace(-0.5 * h2, 0.5 * h2, samples)
    jump = first.evaluate(0.0, eta) - second.evaluate(0.0, eta) + (h2 - h1) * d / (h1 + h2)
    return step, float(np.max(np.abs(scale * jump)))


def _norm_2d(e: Expression, geometry: CascadeGeometry, branch: int, points: int = 48) -> float:
    if e.is_zero():
        return 0.0
    nodes, weights = leggauss(points)
    a, b = geometry.interval(branch)
    low, high = geometry.cross_section(branch)
    x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    eta = 0.5 * (low + high) + 0.5 * (high - low) * nodes
    w = np.outer(0.5 * (b - a) * weights, 0.5 * (high - low) * weights)
    return float(np.sqrt(np.sum(w * e.evaluate(x[:, None], eta[None, :]) ** 2)))


def _norm_1d(e: Expression, geometry: CascadeGeometry, branch: int, points: int = 48) -> float:
    if e.is_zero():
        return 0.0
    nodes, weights = leggauss(points)
    a, b = geometry.interval(branch)
    x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
    return float(np.sqrt(np.sum(0.5 * (b - a) * weights * e.evaluate(x) ** 2)))


def constant_bounds(data: ProblemData, geometry: CascadeGeometry, c_delta: float = 1.0, d1_plus: float = 0.0
                    ) -> Tuple[float, float]:
    """
    Explicit bounds of ``sum_i ||d_eta u_2||`` (first value) and of ``||grad N_2||`` over the strip (second value)
    by norms of the data. ``c_delta`` is the free constant of the lifting estimate.
    """
    t9 = 0.0
    t10 = 0.0
    for branch in (1, 2):
        h = geometry.thickness(branch)
        f = _norm_2d(data.f, geometry, branch)
        f_x = _norm_2d(differentiate(data.f, "x"), geometry, branch)
        minus = _norm_1d(data.phi_minus(branch), geometry, branch)
        minus_x = _norm_1d(differentiate(data.phi_minus(branch), "x"), geometry, branch)
        plus = _norm_1d(data.phi_plus(branch), geometry, branch)
        plus_x = _norm_1d(differentiate(data.phi_plus(branch), "x"), geometry, branch)

        t9 += math.sqrt(h) * (math.sqrt(5.0 * h) * f + 2.0 * math.sqrt(2.0) * minus + math.sqrt(6.0) * plus)
        t10 += (h * (c_delta * math.sqrt(2.0) * h * math.sqrt(1.0 + h ** 2) + math.sqrt(5.0)) * (f + f_x) +
                math.sqrt(h) * (c_delta * h * math.sqrt(3.0 + 2.0 * h ** 2) + 2.0 * math.sqrt(2.0)) *
                (minus + minus_x) +
                math.sqrt(h) * (c_delta * h * math.sqrt(3.0 + 2.0 * h ** 2) + math.sqrt(6.0)) * (plus + plus_x))
    h1, h2 = geometry.h1, geometry.h2
    t10 = 2.0 * t10 + 2.0 * abs(d1_plus) * (h2 * math.sqrt(h1) + h1 * math.sqrt(h2)) / (h1 + h2)
    return t9, t10


def corrector_gradient_sum(components: AsymptoticComponents, points: int = 48) -> float:
    """``sum_i ||d_eta u_2||`` over ``I_i x Y_i`` by tensor Gauss-Legendre quadrature."""
    geometry = components.geometry
    total = 0.0
    nodes, weights = leggauss(points)
    for branch in (1, 2):
        corrector = components.corrector(2, branch)
        if corrector.is_zero:
            continue
        a, b = geometry.interval(branch)
        low, high = geometry.cross_section(branch)
        x = 0.5 * (a + b) + 0.5 * (b - a) * nodes
        eta = 0.5 * (low + high) + 0.5 * (high - low) * nodes
        w = np.outer(0.5 * (b - a) * weights, 0.5 * (high - low) * weights)
        values = corrector.evaluate(x[:, None], eta[None, :], eta_order=1)
        total += float(np.sqrt(np.sum(w * values ** 2)))
    return total


class RateFit(NamedTuple):
    slope: float
    intercept: float
    excluded: bool


def fit_rate(eps_list: Sequence[float], values: Sequence[float]) -> RateFit:
    """
    Least squares slope of ``log(value)`` against ``log(eps)``. Zero, negative and non-finite values are left out
    and flagged.

    :raises RateFitException: with fewer than three usable points
    """
    eps = np.asarray(eps_list, dtype=float)
    values = np.asarray(values, dtype=float)
    if eps.shape != values.shape:
        raise ValueError("eps and values must have the same length")
    usable = np.isfinite(values) & (values > 0.0) & (eps > 0.0)
    if np.count_nonzero(usable) < MIN_RATE_POINTS:
        raise RateFitException("rate fit needs at least {} positive values, got {}".format(
            MIN_RATE_POINTS, int(np.count_nonzero(usable))))
    slope, intercept = np.polyfit(np.log(eps[usable]), np.log(values[usable]), 1)
    return RateFit(float(slope), float(intercept), bool(not np.all(usable)))
