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

"""Partial sums of the asymptotic expansion with cut-off localized junction and end layers."""
import logging

from typing import Optional

import numpy as np

from pyCascade.asymptotics.expansion import AsymptoticComponents
from pyCascade.solvers.cascade_grid import CascadeGrid, GridFunction2D
from pyCascade.utils.cutoff import plateau_cutoff
from pyCascade.utils.exceptions import MissingComponentException

_logger = logging.getLogger(__name__)


def chi_junction(x, delta: float, order: int = 0) -> np.ndarray:
    """Cut-off around ``x = 0`` and its x-derivatives."""
    x = np.asarray(x, dtype=float)
    value = plateau_cutoff(np.abs(x), delta, order)
    return value * np.sign(x) if order == 1 else value


def chi_end(x, delta: float, side: str, order: int = 0) -> np.ndarray:
    """Cut-off around ``x = -1`` (``"left"``) or ``x = 1`` (``"right"``) and its x-derivatives."""
    x = np.asarray(x, dtype=float)
    distance = 1.0 + x if side == "left" else 1.0 - x
    value = plateau_cutoff(np.abs(distance), delta, order)
    if order == 1:
        return value * np.sign(distance) * (1.0 if side == "left" else -1.0)
    return value


class PartialSum:
    """
    ``U = w_2 + sum_{k=1..m} eps^(2k-1) (w_2k+1 + chi0 N_2k-1)
          + sum_{k=1..m} eps^2k (u_2k + w_2k+2 + chi0 N_2k + chi- Pi_2k(left) + chi+ Pi_2k(right))``

    with ``N`` evaluated at ``(x/eps, eta)`` and the end layers at ``((1 + x)/eps, eta)`` and ``((1 - x)/eps, eta)``.
    """

    def __init__(self, components: AsymptoticComponents, m: int, eps: float, delta: Optional[float] = None) -> None:
        if eps <= 0:
            raise ValueError("eps must be positive")
        for k in range(2, 2 * m + 3):
            if k not in components.omega:
                raise MissingComponentException("w_{} is missing".format(k))
        for k in range(1, 2 * m + 1):
            if k not in components.junctions:
                raise MissingComponentException("N_{} is missing".format(k))
        for k in range(2, 2 * m + 1, 2):
            if k not in components.correctors:
                raise MissingComponentException("u_{} is missing".format(k))
            if k not in components.layers:
                raise MissingComponentException("Pi_{} is missing".format(k))
        self.components = components
        self.m = m
        self.eps = eps
        self.delta = components.discretization.delta if delta is None else delta

    def _junction_term(self, k: int, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
        layer = self.components.junctions[k]
        result = np.zeros(x.shape)
        chi = chi_junction(x, self.delta)
        support = chi > 0.0
        if layer.is_zero or not np.any(support):
            return result
        result[support] = chi[support] * layer.evaluate(x[support] / self.eps, eta[support])
        return result

    def _end_terms(self, k: int, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
        result = np.zeros(x.shape)
        for layer in self.components.layers[k]:
            chi = chi_end(x, self.delta, layer.side)
            support = chi > 0.0
            if layer.is_zero or not np.any(support):
                continue
            distance = 1.0 + x[support] if layer.side == "left" else 1.0 - x[support]
            result[support] += chi[support] * layer.evaluate(distance / self.eps, eta[support])
        return result

    def _corrector_term(self, k: int, x: np.ndarray, eta: np.ndarray) -> np.ndarray:
        result = np.zeros(x.shape)
        left = x <= 0.0
        for branch, mask in ((1, left), (2, ~left)):
            corrector = self.components.corrector(k, branch)
            if corrector.is_zero or not np.any(mask):
                continue
            result[mask] = corrector.evaluate(x[mask], eta[mask])
        return result

    def evaluate(self, x, eta) -> np.ndarray:
        x, eta = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(eta, dtype=float))
        shape = x.shape
        x, eta = x.ravel(), eta.ravel()
        omega = self.components.omega
        total = np.asarray(omega[2].value(x), dtype=float).copy()
        for k in range(1, self.m + 1):
            odd, even = 2 * k - 1, 2 * k
            total += self.eps ** odd * (omega[odd + 2].value(x) + self._junction_term(odd, x, eta))
            total += self.eps ** even * (self._corrector_term(even, x, eta) + omega[even + 2].value(x) +
                                         self._junction_term(even, x, eta) + self._end_terms(even, x, eta))
        return total.reshape(shape)

    __call__ = evaluate

    def leading(self, x) -> np.ndarray:
        return np.asarray(self.components.omega[2].value(np.asarray(x, dtype=float)), dtype=float)

    def first_order(self, x, eta) -> np.ndarray:
        """``w_2 + eps (w_3 + chi0 N_1)``."""
        x, eta = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(eta, dtype=float))
        shape = x.shape
        x, eta = x.ravel(), eta.ravel()
        omega = self.components.omega
        total = self.leading(x) + self.eps * (omega[3].value(x) + self._junction_term(1, x, eta))
        return total.reshape(shape)

    def sample(self, grid: CascadeGrid) -> GridFunction2D:
        return GridFunction2D(grid, self.evaluate(grid.node_x, grid.node_eta))


def assemble(m: int, components: AsymptoticComponents, eps: float) -> PartialSum:
    """
    :raises MissingComponentException: if a component of order up to ``m`` has not been built
    """
    if m > components.m:
        raise MissingComponentException("components were built up to m={}, requested m={}".format(components.m, m))
    return PartialSum(components, m, eps)
