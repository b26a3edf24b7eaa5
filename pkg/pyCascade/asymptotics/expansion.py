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
Construction of all expansion components up to order ``m``.

The components do not depend on ``eps``; they are built once in the interleaved order

    w_2; N_1 -> d_1 -> w_3; u_2; N_2 -> d_2 -> w_4; Pi_2; N_3 -> w_5; u_4; N_4 -> w_6; Pi_4; ...

and shared by all points of an eps-sweep.
"""
import logging

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

from pyCascade.asymptotics.boundary_layers import FourierLayer, build_pi
from pyCascade.asymptotics.homogenized import BranchFunction1D, EffectiveRhs, effective_rhs, solve_linear_branch, \
    solve_main
from pyCascade.asymptotics.junction import build_nk
from pyCascade.asymptotics.regular_correctors import CorrectorField, corrector_u2, higher_corrector, zero_corrector
from pyCascade.geometry import CascadeGeometry, Discretization, ProblemData
from pyCascade.solvers.strip import JunctionLayer, StripDomain, Z0Field, solve_z0

_logger = logging.getLogger(__name__)

MAX_M = 3


@dataclass
class AsymptoticComponents:
    geometry: CascadeGeometry
    data: ProblemData
    discretization: Discretization
    m: int
    rhs: Tuple[EffectiveRhs, EffectiveRhs]
    omega: Dict[int, BranchFunction1D] = field(default_factory=dict)
    correctors: Dict[int, Tuple[CorrectorField, CorrectorField]] = field(default_factory=dict)
    layers: Dict[int, Tuple[FourierLayer, FourierLayer]] = field(default_factory=dict)
    junctions: Dict[int, JunctionLayer] = field(default_factory=dict)
    strip: Optional[StripDomain] = None
    z0: Optional[Z0Field] = None

    def d_plus(self, k: int) -> float:
        return self.junctions[k].d_plus

    def corrector(self, k: int, branch: int) -> CorrectorField:
        return self.correctors[k][branch - 1]


def build_components(data: ProblemData, geometry: CascadeGeometry, discretization: Discretization, m: int = 1,
                     strip: Optional[StripDomain] = None, green: bool = True) -> AsymptoticComponents:
    """
    Builds ``w_2 .. w_2m+2``, ``u_2 .. u_2m``, ``Pi_2 .. Pi_2m`` at both ends and ``N_1 .. N_2m``.

    :param green: also solve for ``Z0`` and evaluate every plateau by the Green formula
    """
    if not 1 <= m <= MAX_M:
        raise ValueError("order m must lie in 1..{}".format(MAX_M))
    tol = discretization.tol_quad
    budget = discretization.max_quad_nodes
    rhs = (effective_rhs(data, geometry, 1, tol, budget), effective_rhs(data, geometry, 2, tol, budget))
    components = AsymptoticComponents(geometry, data, discretization, m, rhs)
    components.omega[2] = solve_main(rhs[0], rhs[1], geometry, 4 * discretization.nx)

    strip = strip or StripDomain.from_discretization(geometry, discretization)
    components.strip = strip
    if green:
        components.z0 = solve_z0(strip)

    transversal = data.is_transversally_constant()
    if transversal:
        _logger.info("data is independent of eta and has no fluxes: correctors and end layers vanish")

    for k in range(1, 2 * m + 1):
        if k % 2 == 0:
            components.correctors[k] = _correctors(k, components, transversal)
            related = components.correctors[k]
        else:
            related = components.correctors.get(k - 1)
        d_prev = components.junctions[k - 1].d_plus if k > 1 else 0.0
        components.junctions[k] = build_nk(k, geometry, strip, components.omega[2], d_prev, related,
                                           components.z0)
        components.omega[k + 2] = solve_linear_branch(k + 2, components.junctions[k].d_plus, geometry)
        if k % 2 == 0:
            first, second = components.correctors[k]
            components.layers[k] = (
                build_pi(k, first, components.omega[k + 2], "left", geometry, discretization.P, tol, budget),
                build_pi(k, second, components.omega[k + 2], "right", geometry, discretization.P, tol, budget))
    return components


def _correctors(k: int, components: AsymptoticComponents, transversal: bool
                ) -> Tuple[CorrectorField, CorrectorField]:
    geometry = components.geometry
    modes = components.discretization.eta_modes
    if transversal:
        return zero_corrector(geometry, 1, k, modes), zero_corrector(geometry, 2, k, modes)
    if k == 2:
        return (corrector_u2(components.data, geometry, 1, modes),
                corrector_u2(components.data, geometry, 2, modes))
    first, second = components.correctors[k - 2]
    return higher_corrector(first, geometry, 1), higher_corrector(second, geometry, 2)
