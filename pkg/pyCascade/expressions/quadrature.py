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

"""Adaptive Gauss-Kronrod (7/15) quadrature on top of ``scipy.integrate.quad_vec``.

The integrand may be vector valued: ``func(t)`` receives the nodes as a 1D array and returns an array whose
last axis runs over the nodes. Intervals are bisected until the error estimate, taken as the maximum over all
components, drops below the absolute tolerance.
"""
import logging

from typing import Callable, Union

import numpy as np

from scipy.integrate import quad_vec

from pyCascade.expressions.expression import Expression, VARIABLES
from pyCascade.utils.exceptions import QuadratureException

_logger = logging.getLogger(__name__)

DEFAULT_NODE_BUDGET = 1_000_000

# Nodes of one Kronrod panel
_PANEL_NODES = 15

_ROUNDING_ERROR = 2


def gauss_kronrod(func: Callable, a: float, b: float, tol: float,
                  max_nodes: int = DEFAULT_NODE_BUDGET) -> Union[float, np.ndarray]:
    """
    Integrates ``func`` over ``[a, b]``.

    :param func: vectorized integrand, see module documentation
    :param tol: absolute error target
    :param max_nodes: budget of integrand evaluations
    :raises QuadratureException: if the budget is exhausted; the exception carries the best estimate
    """
    if b < a:
        raise ValueError("integration bounds must satisfy a <= b")
    if a == b:
        return np.zeros_like(np.asarray(func(np.array([a])), dtype=float)[..., 0])[()]

    def integrand(t: float) -> np.ndarray:
        return np.asarray(func(np.array([t])), dtype=float)[..., 0]

    result, error, info = quad_vec(integrand, a, b, epsabs=tol, epsrel=0.0, norm="max", quadrature="gk15",
                                   limit=max(1, max_nodes // _PANEL_NODES), full_output=True)
    if info.status != 0 and not (info.status == _ROUNDING_ERROR and error <= tol):
        _logger.debug("quadrature on [%g, %g] stopped: %s", a, b, info.message)
        raise QuadratureException("quadrature did not converge within {} nodes: {}".format(max_nodes, info.message),
                                  best_estimate=result, error_estimate=float(error))
    _logger.debug("quadrature on [%g, %g] used %d nodes", a, b, info.neval)
    return result


def integrate1d(e: Expression, var: str, a: float, b: float, tol: float, at: Union[float, np.ndarray] = 0.0,
                max_nodes: int = DEFAULT_NODE_BUDGET) -> Union[float, np.ndarray]:
    """
    Integrates the expression ``e`` with respect to ``var`` over ``[a, b]``.

    The other variable is held at ``at``; an array for ``at`` integrates a whole batch at once and returns an
    array of the same shape.
    """
    if var not in VARIABLES:
        raise ValueError("unknown integration variable " + var)
    fixed = np.asarray(at, dtype=float)

    def integrand(t):
        if var == "x":
            return e.evaluate(t, fixed[..., None])
        return e.evaluate(fixed[..., None], t)

    result = gauss_kronrod(integrand, a, b, tol, max_nodes)
    if fixed.ndim == 0:
        return float(result)
    return result
