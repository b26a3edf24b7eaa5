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

from typing import Any, Dict, List, NamedTuple, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from pyCascade.expressions.parser import parse
from pyCascade.geometry import CascadeGeometry, Discretization, ProblemData
from pyCascade.utils.exceptions import ConfigurationException, EvaluationException, ExpressionSyntaxException

DEFAULT_EPSILONS = (0.2, 0.1, 0.05, 0.025)

# Chebyshev-Lobatto points per direction used to screen the data, ends included
_SAMPLE_POINTS = 17

_DATA_KEYS = ("phi_plus_1", "phi_minus_1", "phi_plus_2", "phi_minus_2")
_DISCRETIZATION_KEYS = {
    "nx": int, "neta": int, "R": float, "P": int, "delta": float, "tol_quad": float, "tol_lin_solve": float,
    "strip_step": float, "linear_solver": str, "eta_modes": int, "max_quad_nodes": int,
}


class Configuration:
    """Options of a single command line invocation."""

    def __init__(self, command: str, config_path: Optional[str] = None, output: Optional[str] = None,
                 debug_output: int = 0, jobs: Optional[int] = None, order: int = 1,
                 eps: Optional[float] = None, plots: bool = False, dump_corrector: Optional[str] = None,
                 dump_layers: Optional[str] = None, h1: Optional[float] = None, h2: Optional[float] = None,
                 R: Optional[float] = None, strip_step: Optional[float] = None) -> None:
        """
        :param command: One of solve, homogenize, junction, asymptotics, sweep and validate.
        :param config_path: Path to the TOML problem configuration.
        :param output: Output file (CSV) of the command.
        :param debug_output: 0: warnings only, 1: progress, 2: detailed diagnostics.
        :param jobs: Worker threads for the epsilon sweep (None: available cores).
        :param order: Order m of the partial sum (1 to 3).
        :param eps: Single epsilon for solve and asymptotics.
        :param plots: Write log-log data files next to the sweep report.
        :param dump_corrector: File for a sampled dump of the regular correctors.
        :param dump_layers: File for the Fourier coefficients of the boundary layers.
        :param h1: Junction thickness of branch 1 (junction command without configuration).
        :param h2: Junction thickness of branch 2.
        :param R: Junction truncation half-length.
        :param strip_step: Junction grid spacing.
        """
        self.command = command
        self.config_path = config_path
        self.output = output
        self.debug_out = debug_output

        # Worker pool of the sweep; the environment wins over the command line
        env_jobs = os.environ.get("CASCADE_ASYM_JOBS")
        if env_jobs:
            try:
                jobs = int(env_jobs)
            except ValueError:
                raise ConfigurationException("CASCADE_ASYM_JOBS must be an integer, got '{}'".format(env_jobs))
        self.jobs = jobs if jobs and jobs > 0 else (os.cpu_count() or 1)

        if order not in (1, 2, 3):
            raise ConfigurationException("order m must be 1, 2 or 3")
        self.order = order
        if eps is not None and eps <= 0:
            raise ConfigurationException("eps must be positive")
        self.eps = eps
        self.plots = plots

        self.dump_corrector = dump_corrector
        self.dump_layers = dump_layers

        # Junction command without a problem file
        self.h1 = h1
        self.h2 = h2
        self.R = R
        self.strip_step = strip_step


class CascadeConfig(NamedTuple):
    geometry: CascadeGeometry
    data: ProblemData
    discretization: Discretization
    eps_list: List[float]


def _section(document: Dict[str, Any], name: str) -> Dict[str, Any]:
    section = document.get(name, {})
    if not isinstance(section, dict):
        raise ConfigurationException("[{}] must be a table".format(name))
    return section


def _require(section: Dict[str, Any], section_name: str, key: str):
    if key not in section:
        raise ConfigurationException("missing key '{}' in [{}]".format(key, section_name))
    return section[key]


def _expression(text: Any, key: str):
    if isinstance(text, (int, float)):
        text = repr(float(text))
    if not isinstance(text, str):
        raise ConfigurationException("'{}' must be a quoted expression".format(key))
    try:
        return parse(text)
    except ExpressionSyntaxException as e:
        raise ConfigurationException("malformed expression for '{}': {}".format(key, e)) from e


def _lobatto(a: float, b: float) -> np.ndarray:
    return 0.5 * (a + b) - 0.5 * (b - a) * np.cos(np.pi * np.arange(_SAMPLE_POINTS) / (_SAMPLE_POINTS - 1))


def check_finite(data: ProblemData, geometry: CascadeGeometry) -> None:
    """
    Evaluates the data on sample points of the closure of each branch; ``f`` on both rectangles and the wall
    fluxes of branch ``i`` on its interval.

    :raises ConfigurationException: if an expression is undefined or not finite at a sample point
    """
    samples = []
    for branch, (a, b) in ((1, (-1.0, 0.0)), (2, (0.0, 1.0))):
        x = _lobatto(a, b)
        half = 0.5 * geometry.thickness(branch)
        samples.append(("f", data.f, x[:, None], _lobatto(-half, half)[None, :]))
        samples.append(("phi_plus_{}".format(branch), data.phi_plus(branch), x, 0.0))
        samples.append(("phi_minus_{}".format(branch), data.phi_minus(branch), x, 0.0))
    for key, expression, x, eta in samples:
        try:
            expression.evaluate(x, eta)
        except EvaluationException as e:
            raise ConfigurationException("'{}' is not finite on its domain: {}".format(key, e)) from e


def load_config(path: str) -> CascadeConfig:
    """
    Loads and validates a problem configuration.

    :raises ConfigurationException: if the file is missing or malformed, a required key is missing, h2 >= h1, an
        epsilon is not positive or an expression does not parse or is not finite on its domain
    """
    if not os.path.isfile(path):
        raise ConfigurationException("config not found: {}".format(path))
    try:
        with open(path, "rb") as config_file:
            document = tomllib.load(config_file)
    except tomllib.TOMLDecodeError as e:
        raise ConfigurationException("malformed config {}: {}".format(path, e)) from e

    geometry_section = _section(document, "geometry")
    try:
        h1 = float(_require(geometry_section, "geometry", "h1"))
        h2 = float(_require(geometry_section, "geometry", "h2"))
    except (TypeError, ValueError) as e:
        raise ConfigurationException("h1 and h2 must be numbers") from e
    if h2 >= h1:
        raise ConfigurationException("h2 must be < h1")
    geometry = CascadeGeometry(h1, h2)

    data_section = _section(document, "data")
    f = _expression(_require(data_section, "data", "f"), "f")
    fluxes = {key: _expression(data_section.get(key, "0"), key) for key in _DATA_KEYS}
    unknown = set(data_section) - set(_DATA_KEYS) - {"f"}
    if unknown:
        raise ConfigurationException("unknown keys in [data]: " + ", ".join(sorted(unknown)))
    data = ProblemData(f, **fluxes)
    check_finite(data, geometry)

    discretization_section = _section(document, "discretization")
    arguments = {}
    for key, value in discretization_section.items():
        if key not in _DISCRETIZATION_KEYS:
            raise ConfigurationException("unknown key '{}' in [discretization]".format(key))
        try:
            arguments[key] = _DISCRETIZATION_KEYS[key](value)
        except (TypeError, ValueError) as e:
            raise ConfigurationException("invalid value for '{}': {}".format(key, value)) from e
    bounds_section = _section(document, "bounds")
    if "c_delta" in bounds_section:
        arguments["c_delta"] = float(bounds_section["c_delta"])
    discretization = Discretization(**arguments)
    discretization.check_decay_budget(geometry)

    sweep_section = _section(document, "sweep")
    eps_values = sweep_section.get("eps", list(DEFAULT_EPSILONS))
    if not isinstance(eps_values, list) or not eps_values:
        raise ConfigurationException("[sweep] eps must be a non-empty list")
    try:
        eps_list = sorted((float(eps) for eps in eps_values), reverse=True)
    except (TypeError, ValueError) as e:
        raise ConfigurationException("[sweep] eps must contain numbers") from e
    if any(eps <= 0 for eps in eps_list):
        raise ConfigurationException("every eps must be positive")

    return CascadeConfig(geometry, data, discretization, eps_list)
