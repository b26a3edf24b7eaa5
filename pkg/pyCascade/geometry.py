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

"""Geometry, data and discretization of a two-stage thin cascade.

In the fast transversal variable ``eta = y / eps`` the cascade consists of the rectangle ``(-1, 0) x Y1`` with
``Y1 = (-h1/2, h1/2)`` joined at ``x = 0`` to the rectangle ``(0, 1) x Y2`` with ``Y2 = (-h2/2, h2/2)``.
"""
import logging
import math

from dataclasses import dataclass
from typing import Tuple

from pyCascade.expressions.expression import Expression, ZERO
from pyCascade.utils.exceptions import ConfigurationException

_logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CascadeGeometry:
    """
    Thickness scales of both branches.

    ``h2 == h1`` is accepted so that the degenerate straight channel can be studied; configuration files
    require ``h2 < h1``.
    """
    h1: float
    h2: float

    def __post_init__(self):
        if not (self.h1 > 0 and self.h2 > 0):
            raise ConfigurationException("thicknesses must be positive (h1={}, h2={})".format(self.h1, self.h2))
        if self.h2 > self.h1:
            raise ConfigurationException("h2 must be < h1")

    def thickness(self, branch: int) -> float:
        _check_branch(branch)
        return self.h1 if branch == 1 else self.h2

    def interval(self, branch: int) -> Tuple[float, float]:
        _check_branch(branch)
        return (-1.0, 0.0) if branch == 1 else (0.0, 1.0)

    def cross_section(self, branch: int) -> Tuple[float, float]:
        h = self.thickness(branch)
        return -0.5 * h, 0.5 * h

    def end_point(self, branch: int) -> float:
        """x coordinate of the Dirichlet end of a branch."""
        _check_branch(branch)
        return -1.0 if branch == 1 else 1.0

    @property
    def step_segments(self) -> Tuple[Tuple[float, float], Tuple[float, float]]:
        """The two eta intervals of the vertical step ``Y1 \\ Y2`` at ``x = 0``."""
        return (-0.5 * self.h1, -0.5 * self.h2), (0.5 * self.h2, 0.5 * self.h1)

    @property
    def equal_thickness(self) -> bool:
        return self.h1 == self.h2


@dataclass(frozen=True)
class ProblemData:
    """Right-hand side ``f(x, eta)`` and the Neumann data on the horizontal sides of both branches."""
    f: Expression
    phi_plus_1: Expression = ZERO
    phi_minus_1: Expression = ZERO
    phi_plus_2: Expression = ZERO
    phi_minus_2: Expression = ZERO

    def phi_plus(self, branch: int) -> Expression:
        _check_branch(branch)
        return self.phi_plus_1 if branch == 1 else self.phi_plus_2

    def phi_minus(self, branch: int) -> Expression:
        _check_branch(branch)
        return self.phi_minus_1 if branch == 1 else self.phi_minus_2

    def fluxes(self):
        return self.phi_plus_1, self.phi_minus_1, self.phi_plus_2, self.phi_minus_2

    def is_zero(self) -> bool:
        return self.f.is_zero() and all(phi.is_zero() for phi in self.fluxes())

    def is_transversally_constant(self) -> bool:
        """True if f depends on x only and all fluxes vanish; then every fast corrector is zero."""
        return not self.f.depends_on("eta") and all(phi.is_zero() for phi in self.fluxes())


@dataclass(frozen=True)
class Discretization:
    nx: int = 256
    neta: int = 64
    R: float = 12.0
    P: int = 64
    delta: float = 0.15
    tol_quad: float = 1e-10
    tol_lin_solve: float = 1e-10
    strip_step: float = 1.0 / 64.0
    linear_solver: str = "direct"
    eta_modes: int = 40
    c_delta: float = 1.0
    max_quad_nodes: int = 1_000_000

    def __post_init__(self):
        if not 0.0 < self.delta < 0.25:
            raise ConfigurationException("delta must lie in (0, 1/4), got {}".format(self.delta))
        if self.nx < 2 or self.neta < 2:
            raise ConfigurationException("nx and neta must be at least 2")
        if self.R <= 2.0:
            raise ConfigurationException("R must exceed 2 (the plateau is read on [R-2, R-1])")
        if self.P < 1:
            raise ConfigurationException("P must be positive")
        if self.strip_step <= 0:
            raise ConfigurationException("strip_step must be positive")
        if self.tol_quad <= 0 or self.tol_lin_solve <= 0:
            raise ConfigurationException("tolerances must be positive")
        if self.linear_solver not in ("direct", "cg"):
            raise ConfigurationException("linear_solver must be 'direct' or 'cg'")
        if self.eta_modes < 8:
            raise ConfigurationException("eta_modes must be at least 8")

    def recommended_R(self, geometry: CascadeGeometry) -> float:
        return 4.0 * max(geometry.h1, geometry.h2) / math.pi * math.log(1.0 / self.tol_lin_solve)

    def check_decay_budget(self, geometry: CascadeGeometry) -> bool:
        recommended = self.recommended_R(geometry)
        if self.R < recommended:
            _logger.warning("R=%g is below the recommended decay budget %.3g", self.R, recommended)
            return False
        return True


def _check_branch(branch: int):
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2, got {}".format(branch))
