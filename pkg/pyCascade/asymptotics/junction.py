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

"""Data of the inner layer problems ``N_k`` at the junction and their solution on the strip."""
import logging

from typing import Callable, Optional, Tuple

import numpy as np

from pyCascade.asymptotics.homogenized import BranchFunction1D
from pyCascade.asymptotics.regular_correctors import CorrectorField
from pyCascade.geometry import CascadeGeometry
from pyCascade.solvers.strip import JunctionLayer, StripDomain, StripProblem, Z0Field, check_solvability, \
    compute_d0, solve_strip

_logger = logging.getLogger(__name__)


def _sum(*terms) -> Optional[Callable]:
    """Pointwise sum of eta-functions and constants, ``None`` if everything vanishes."""
    functions = [term for term in terms if callable(term)]
    constant = sum(term for term in terms if term is not None and not callable(term))
    if not functions:
        return constant if constant != 0.0 else None
    return lambda eta: sum(np.asarray(function(eta), dtype=float) for function in functions) + constant


def _trace(u: CorrectorField, sign: float = 1.0) -> Optional[Callable]:
    if u.is_zero:
        return None
    return lambda eta: sign * u.evaluate(0.0, eta)


def junction_problem(k: int, geometry: CascadeGeometry, omega2: Optional[BranchFunction1D] = None,
                     d_prev: float = 0.0,
                     correctors: Optional[Tuple[CorrectorField, CorrectorField]] = None) -> StripProblem:
    """
    Assembles the data of ``N_k``.

    * ``k = 1``: ``G = -w_2'(0-)`` and ``Phi = w_2'(0-) - w_2'(0+)``.
    * even ``k``: the value jump ``Psi = u_k(0-, eta) - u_k(0+, eta)`` of the correctors of order ``k`` and the
      flux data of the linear branch carrying ``d_prev``.
    * odd ``k >= 3``: flux data of ``d_x u_k-1`` plus those of the linear branch.
    """
    h1, h2 = geometry.h1, geometry.h2
    step = not geometry.equal_thickness
    if k < 1:
        raise ValueError("junction layers start at k = 1")
    if k == 1:
        if omega2 is None:
            raise ValueError("N_1 needs the homogenized solution")
        left, right = omega2.derivative(0.0, 1), omega2.derivative(0.0, 2)
        return StripProblem(G=-left if step else None, Phi=left - right)

    linear_g = h2 * d_prev / (h1 + h2)
    linear_phi = d_prev * (h1 - h2) / (h1 + h2)
    first, second = correctors if correctors is not None else (None, None)
    if k % 2 == 0:
        psi = None
        if first is not None and second is not None and not (first.is_zero and second.is_zero):
            psi = _sum(_trace(first), _trace(second, -1.0))
        return StripProblem(G=linear_g if step else None, Psi=psi, Phi=linear_phi)

    slope_first = _trace(first.derivative_x()) if first is not None else None
    slope_second = _trace(second.derivative_x(), -1.0) if second is not None else None
    g = _sum(_trace(first.derivative_x(), -1.0) if first is not None else None, linear_g)
    phi = _sum(slope_first, slope_second, linear_phi)
    return StripProblem(G=g if step else None, Phi=phi)


def build_nk(k: int, geometry: CascadeGeometry, dom: StripDomain, omega2: Optional[BranchFunction1D] = None,
             d_prev: float = 0.0, correctors: Optional[Tuple[CorrectorField, CorrectorField]] = None,
             z0: Optional[Z0Field] = None) -> JunctionLayer:
    """
    Solves the layer problem of order ``k``. With ``z0`` the plateau is also evaluated by the Green formula and
    stored as ``d_green``.
    """
    problem = junction_problem(k, geometry, omega2, d_prev, correctors)
    _logger.debug("N_%d solvability residual %.3g", k, check_solvability(problem, dom))
    layer = solve_strip(problem, dom, order=k)
    if z0 is not None:
        layer.d_green = compute_d0(problem, dom, z0)
        _logger.info("N_%d: d+ = %.10g (plateau), %.10g (Green formula)", k, layer.d_plus, layer.d_green)
    return layer
