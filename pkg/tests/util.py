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

import os
import tempfile

import numpy as np

from pyCascade.expressions.parser import parse
from pyCascade.geometry import CascadeGeometry, Discretization, ProblemData

SLOW = bool(os.environ.get("CASCADE_ASYM_SLOW"))

path_sep = os.path.sep
project_path = path_sep.join(os.path.abspath(__file__).split(path_sep)[:-2])
configs_path = path_sep.join([project_path, "configs"])


def write_config(text: str) -> str:
    """Writes a TOML configuration into a temporary file and returns its path."""
    handle, path = tempfile.mkstemp(suffix=".toml")
    with os.fdopen(handle, "w") as config_file:
        config_file.write(text)
    return path


def data(f: str = "0", phi_plus_1: str = "0", phi_minus_1: str = "0", phi_plus_2: str = "0",
         phi_minus_2: str = "0") -> ProblemData:
    return ProblemData(parse(f), parse(phi_plus_1), parse(phi_minus_1), parse(phi_plus_2), parse(phi_minus_2))


def rate_suite_data() -> ProblemData:
    return data("cos(pi*x/2)*(1+eta)", phi_plus_1="x+1")


def standard_geometry() -> CascadeGeometry:
    return CascadeGeometry(1.0, 0.5)


def coarse_discretization(**overrides) -> Discretization:
    """Small grids for unit tests."""
    arguments = dict(nx=64, neta=16, R=8.0, P=32, strip_step=1.0 / 16.0, eta_modes=24)
    arguments.update(overrides)
    return Discretization(**arguments)


def random_smooth_data(seed: int) -> ProblemData:
    """Smooth data built from trigonometric and polynomial terms with random coefficients."""
    rng = np.random.default_rng(seed)
    a, b, c, d = np.round(rng.uniform(-2.0, 2.0, 4), 3)
    k = int(rng.integers(1, 3))
    f = "{} + {}*cos({}*x)*eta + {}*x*eta^2 + {}*sin(x)".format(a, b, k, c, d)
    p1, p2, p3 = np.round(rng.uniform(-1.0, 1.0, 3), 3)
    return data(f, phi_plus_1="{}*(x+1)".format(p1), phi_minus_1="{}*x^2".format(p2),
                phi_plus_2="{}*cos(x)".format(p3))
