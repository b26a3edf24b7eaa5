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
Regular correctors ``u_2k`` of the thin-domain expansion.

A corrector is a sum of terms that keep their x-dependence symbolic: source terms ``K^n[g](x, .)`` and flux terms
``c(x) p(eta)``. Here ``K`` is the mean-zero inverse of ``-d_etaeta`` with homogeneous Neumann conditions on the
cross-section ``(-h/2, h/2)``; it is applied at fixed ``x`` to the Chebyshev expansion in ``t = 2 eta / h`` of
the sampled source. Since ``K`` commutes with ``d_x``, the recursion ``u_2n = K[d_xx u_2n-2]`` only
differentiates expressions and raises powers of ``K``.
"""
import logging

from typing import List, Optional, Tuple

import numpy as np

from numpy.polynomial.chebyshev import chebder, chebint, chebpts1, chebvander

from pyCascade.expressions.expression import Expression, differentiate
from pyCascade.geometry import CascadeGeometry, ProblemData
from pyCascade.utils.exceptions import SolvabilityException

_logger = logging.getLogger(__name__)

MAX_ORDER = 6
SOLVABILITY_SAMPLES = 50

# Mean-zero profiles with -p'' constant, p'(-h/2) = -1, p'(h/2) = 0 (and mirrored), Chebyshev form in t, per unit h
_PROFILE_MINUS = np.array([1.0 / 48.0, -0.25, 1.0 / 16.0])
_PROFILE_PLUS = np.array([-1.0 / 48.0, -0.25, -1.0 / 16.0])


def _chebyshev_means(length: int) -> np.ndarray:
    """``1/2 int_{-1}^{1} T_n dt`` for ``n < length``."""
    n = np.arange(length)
    means = np.zeros(length)
    even = n % 2 == 0
    means[even] = 1.0 / (1.0 - n[even] ** 2)
    return means


class NeumannInverse:
    def __init__(self, h: float, modes: int = 40) -> None:
        self.h = h
        self.modes = modes
        self.t = chebpts1(modes)
        self.eta = 0.5 * h * self.t
        self._analysis = np.linalg.inv(chebvander(self.t, modes - 1))

    def transform(self, samples: np.ndarray) -> np.ndarray:
        """Chebyshev coefficients (last axis) of values sampled at :attr:`eta`."""
        return samples @ self._analysis.T

    @staticmethod
    def mean(coefficients: np.ndarray) -> np.ndarray:
        return coefficients @ _chebyshev_means(coefficients.shape[-1])

    def apply(self, coefficients: np.ndarray) -> np.ndarray:
        centred = np.array(coefficients, dtype=float)
        centred[..., 0] -= self.mean(centred)
        result = -(0.5 * self.h) ** 2 * chebint(centred, m=2, lbnd=-1, axis=-1)
        result[..., 0] -= self.mean(result)
        return result


class CorrectorField:
    """
    Corrector of one branch: ``sum K^n[g] + sum c(x) p(eta)``.

    :param sources: pairs ``(g, n)`` of an expression in ``(x, eta)`` and the power of ``K``
    :param fluxes: pairs ``(c, p)`` of an expression in ``x`` and Chebyshev coefficients of ``p`` in ``t``
    """

    def __init__(self, branch: int, order: int, inverse: NeumannInverse,
                 sources: Optional[List[Tuple[Expression, int]]] = None,
                 fluxes: Optional[List[Tuple[Expression, np.ndarray]]] = None) -> None:
        self.branch = branch
        self.order = order
        self.inverse = inverse
        self.h = inverse.h
        self.sources = [(g, n) for g, n in (sources or []) if not g.is_zero() and g.depends_on("eta")]
        self.fluxes = [(c, np.asarray(p, dtype=float)) for c, p in (fluxes or []) if not c.is_zero()]

    @property
    def is_zero(self) -> bool:
        return not self.sources and not self.fluxes

    def _width(self) -> int:
        widths = [self.inverse.modes + 2 * n for _, n in self.sources] + [len(p) for _, p in self.fluxes]
        return max(widths, default=1)

    def coefficients(self, x: np.ndarray) -> np.ndarray:
        """Chebyshev coefficients in ``t`` of ``u(x, .)``, one row per entry of ``x``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        total = np.zeros((len(x), self._width()))
        for g, power in self.sources:
            c = self.inverse.transform(g.evaluate(x[:, None], self.inverse.eta[None, :]))
            for _ in range(power):
                c = self.inverse.apply(c)
            total[:, :c.shape[1]] += c
        for coefficient, profile in self.fluxes:
            total[:, :len(profile)] += coefficient.evaluate(x)[:, None] * profile[None, :]
        return total

    def evaluate(self, x, eta, eta_order: int = 0) -> np.ndarray:
        """Values of ``d_eta^eta_order u`` at the broadcast of ``x`` and ``eta``."""
        x, eta = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(eta, dtype=float))
        if self.is_zero:
            return np.zeros(x.shape)
        unique, inverse = np.unique(x.ravel(), return_inverse=True)
        c = self.coefficients(unique)
        if eta_order:
            c = chebder(c, m=eta_order, scl=2.0 / self.h, axis=1)
        t = 2.0 * eta.ravel() / self.h
        values = np.einsum("ij,ij->i", chebvander(t, c.shape[1] - 1), c[inverse])
        return values.reshape(x.shape)

    __call__ = evaluate

    def mean(self, x) -> np.ndarray:
        """Cross-section means ``h^-1 int u(x, eta) d eta``."""
        if self.is_zero:
            return np.zeros(np.shape(x))
        return NeumannInverse.mean(self.coefficients(x)).reshape(np.shape(x))

    def derivative_x(self, order: int = 1) -> "CorrectorField":
        sources, fluxes = self.sources, self.fluxes
        for _ in range(order):
            sources = [(differentiate(g, "x"), n) for g, n in sources]
            fluxes = [(differentiate(c, "x"), p) for c, p in fluxes]
        return CorrectorField(self.branch, self.order, self.inverse, sources, fluxes)

    def __repr__(self):
        return "CorrectorField(branch={}, order={}, sources={}, fluxes={})".format(
            self.branch, self.order, len(self.sources), len(self.fluxes))


def zero_corrector(geometry: CascadeGeometry, branch: int, order: int, modes: int = 40) -> CorrectorField:
    return CorrectorField(branch, order, NeumannInverse(geometry.thickness(branch), modes))


def corrector_u2(data: ProblemData, geometry: CascadeGeometry, branch: int, modes: int = 40) -> CorrectorField:
    """
    ``u_2 = K[f] + phi_- p_- + phi_+ p_+``: mean-zero in eta, ``-d_etaeta u_2 = f - F/h`` and
    ``d_eta u_2(x, +-h/2) = -phi_+-(x)``.
    """
    h = geometry.thickness(branch)
    inverse = NeumannInverse(h, modes)
    fluxes = [(data.phi_minus(branch), h * _PROFILE_MINUS), (data.phi_plus(branch), h * _PROFILE_PLUS)]
    corrector = CorrectorField(branch, 2, inverse, [(data.f, 1)], fluxes)
    _logger.debug("u2 on branch %d: %r", branch, corrector)
    return corrector


def higher_corrector(prev: CorrectorField, geometry: CascadeGeometry, branch: int, tol: float = 1e-9
                     ) -> CorrectorField:
    """
    ``u_2n = K[d_xx u_2n-2]``, the mean-zero solution of ``-d_etaeta u_2n = d_xx u_2n-2`` with homogeneous
    Neumann data.

    :raises SolvabilityException: if ``d_xx u_2n-2`` has a cross-section mean above ``tol``
    """
    order = prev.order + 2
    if order > MAX_ORDER:
        raise ValueError("correctors are supported up to order {}".format(MAX_ORDER))
    if prev.branch != branch:
        raise ValueError("corrector belongs to branch {}".format(prev.branch))
    if prev.is_zero:
        return CorrectorField(branch, order, prev.inverse)

    second = prev.derivative_x(2)
    a, b = geometry.interval(branch)
    samples = np.linspace(a, b, SOLVABILITY_SAMPLES)
    defect = float(np.max(np.abs(second.mean(samples)))) if not second.is_zero else 0.0
    if defect > tol:
        raise SolvabilityException("corrector of order {} on branch {} is not solvable: mean {:.3g}".format(
            order, branch, defect))
    sources = [(g, n + 1) for g, n in second.sources]
    fluxes = [(c, prev.inverse.apply(p)) for c, p in second.fluxes]
    return CorrectorField(branch, order, prev.inverse, sources, fluxes)
