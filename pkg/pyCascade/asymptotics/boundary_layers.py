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

"""Exponentially decaying boundary layers at the Dirichlet ends ``x = -1`` and ``x = 1``."""
import logging

from dataclasses import dataclass, field
from typing import Callable, Tuple

import numpy as np

from pyCascade.asymptotics.homogenized import BranchFunction1D
from pyCascade.asymptotics.regular_correctors import CorrectorField
from pyCascade.expressions.quadrature import DEFAULT_NODE_BUDGET, gauss_kronrod
from pyCascade.geometry import CascadeGeometry
from pyCascade.utils.exceptions import LayerException

_logger = logging.getLogger(__name__)

SIDES = ("left", "right")
EXPONENT_LIMIT = 700.0


def fourier_coeffs(trace: Callable[[np.ndarray], np.ndarray], h: float, P: int, tol: float = 1e-10,
                   max_nodes: int = DEFAULT_NODE_BUDGET) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Expansion of ``trace`` on ``(-h/2, h/2)`` in the Neumann modes ``cos(2 p pi eta / h)`` (``p = 1..P``) and
    ``sin((2 p + 1) pi eta / h)`` (``p = 0..P``). The mean ``a0`` is returned separately.
    """
    cosine = 2.0 * np.pi * np.arange(1, P + 1) / h
    sine = np.pi * (2.0 * np.arange(0, P + 1) + 1.0) / h

    def integrand(eta):
        values = np.asarray(trace(eta), dtype=float)
        return np.vstack([values / h,
                          2.0 / h * np.cos(np.outer(cosine, eta)) * values,
                          2.0 / h * np.sin(np.outer(sine, eta)) * values])

    coefficients = gauss_kronrod(integrand, -0.5 * h, 0.5 * h, tol, max_nodes)
    return coefficients[1:P + 1], coefficients[P + 1:], float(coefficients[0])


@dataclass(frozen=True, eq=False)
class FourierLayer:
    side: str
    h: float
    a: np.ndarray
    b: np.ndarray
    a0: float = 0.0
    _cosine: np.ndarray = field(init=False, repr=False, compare=False)
    _sine: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.side not in SIDES:
            raise ValueError("side must be 'left' or 'right'")
        object.__setattr__(self, "_cosine", 2.0 * np.pi * np.arange(1, len(self.a) + 1) / self.h)
        object.__setattr__(self, "_sine", np.pi * (2.0 * np.arange(len(self.b)) + 1.0) / self.h)

    @classmethod
    def zero(cls, side: str, h: float, P: int) -> "FourierLayer":
        return cls(side, h, np.zeros(P), np.zeros(P + 1))

    @property
    def P(self) -> int:
        return len(self.a)

    @property
    def rates(self) -> Tuple[np.ndarray, np.ndarray]:
        """Decay rates of the cosine and of the sine modes."""
        return self._cosine, self._sine

    @property
    def is_zero(self) -> bool:
        return not np.any(self.a) and not np.any(self.b)

    @staticmethod
    def _modes(coefficients, rates, xi, eta, xi_order, eta_order, phase):
        used = coefficients != 0.0
        if not np.any(used):
            return np.zeros(xi.shape)
        coefficients, rates = coefficients[used], rates[used]
        exponent = np.outer(xi, rates)
        decay = np.where(exponent <= EXPONENT_LIMIT, np.exp(-np.minimum(exponent, EXPONENT_LIMIT)), 0.0)
        shape = np.cos(np.outer(eta, rates) + phase + 0.5 * np.pi * eta_order)
        scale = coefficients * (-rates) ** xi_order * rates ** eta_order
        return (decay * shape) @ scale

    def evaluate(self, xi, eta, xi_order: int = 0, eta_order: int = 0) -> np.ndarray:
        """Truncated series (or a partial derivative of it) at ``xi >= 0``, ``|eta| <= h/2``."""
        xi, eta = np.broadcast_arrays(np.asarray(xi, dtype=float), np.asarray(eta, dtype=float))
        shape = xi.shape
        xi, eta = xi.ravel(), eta.ravel()
        values = (self._modes(self.a, self._cosine, xi, eta, xi_order, eta_order, 0.0) +
                  self._modes(self.b, self._sine, xi, eta, xi_order, eta_order, -0.5 * np.pi))
        return values.reshape(shape)

    __call__ = evaluate


def eval_layer(layer: FourierLayer, xi, eta) -> np.ndarray:
    return layer.evaluate(xi, eta)


def build_pi(k: int, u_k: CorrectorField, omega_kp2: BranchFunction1D, side: str, geometry: CascadeGeometry,
             P: int = 64, tol: float = 1e-10, max_nodes: int = DEFAULT_NODE_BUDGET) -> FourierLayer:
    """
    Layer of order ``k`` at one end. Its trace at ``xi = 0`` is ``-u_k(end, eta) - w_k+2(end)``, which removes the
    Dirichlet mismatch of the regular part.

    :raises LayerException: if the trace has a mean, i.e. the end condition of the homogenized problem fails
    """
    if k % 2:
        raise ValueError("boundary layers exist for even orders only")
    branch = 1 if side == "left" else 2
    h = geometry.thickness(branch)
    end = geometry.end_point(branch)
    shift = omega_kp2.value(end, branch)
    if u_k.is_zero and shift == 0.0:
        return FourierLayer.zero(side, h, P)

    def trace(eta):
        return -u_k.evaluate(end, eta) - shift

    a, b, a0 = fourier_coeffs(trace, h, P, tol, max_nodes)
    if abs(a0) > 10.0 * tol:
        raise LayerException("homogenized boundary condition violated (mean {:.3g} at the {} end)".format(a0, side))
    _logger.debug("layer %d at the %s end: max |a_p| %.3g, max |b_p| %.3g", k, side, np.max(np.abs(a)),
                  np.max(np.abs(b)))
    return FourierLayer(side, h, a, b, a0)
