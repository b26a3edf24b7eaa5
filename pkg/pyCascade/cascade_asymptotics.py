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

import logging
import math
import os
import time

from dataclasses import replace
from datetime import datetime
from typing import List, Optional

from tabulate import tabulate

from pyCascade.asymptotics.expansion import AsymptoticComponents, build_components
from pyCascade.asymptotics.homogenized import BranchFunction1D, effective_rhs, main_residual, solve_main
from pyCascade.asymptotics.junction import build_nk
from pyCascade.configuration import CascadeConfig, Configuration, load_config
from pyCascade.geometry import CascadeGeometry, Discretization
from pyCascade.report.convergence_reporters import CsvConvergenceReporter, CsvLogLogReporter, TextCheckReporter, \
    TextConvergenceReporter
from pyCascade.report.field_reporters import CsvCorrectorReporter, CsvFieldReporter, CsvLayerCoefficientReporter, \
    CsvProfileReporter, TextProfileReporter
from pyCascade.solvers.reference import energy_residual, reference_grid, solve_reference
from pyCascade.solvers.strip import StripDomain, solve_z0
from pyCascade.utils.exceptions import ConfigurationException
from pyCascade.validation.partial_sum import assemble
from pyCascade.validation.sweep import Check, SweepReport, run_sweep
from pyCascade.validation.validator import constant_bounds, corrector_gradient_sum, residual_sup

_logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION_FAILED = 1
EXIT_INPUT_ERROR = 2

# Tolerances of the validate command
FLUX_TOLERANCE = 1e-9
SLOPE_TOLERANCE = 1e-3
PLATEAU_TOLERANCE = 1e-3


def write_report(path: str, lines: List[str]) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w") as report_file:
        report_file.writelines(lines)
    print("Written {}".format(path))


class CascadeAsymptotics:
    def __init__(self, configuration: Configuration) -> None:
        self._configuration = configuration
        self._config: Optional[CascadeConfig] = None

    @property
    def config(self) -> CascadeConfig:
        if self._config is None:
            if not self._configuration.config_path:
                raise ConfigurationException("--config is required for '{}'".format(self._configuration.command))
            self._config = load_config(self._configuration.config_path)
        return self._config

    def run(self) -> int:
        """
        Runs the requested command and returns the exit status: 0 on success, 1 if a validation check failed.
        Input errors propagate as exceptions.
        """
        start_time = time.process_time()
        command = getattr(self, "_run_" + self._configuration.command)
        status = command()
        if self._configuration.debug_out > 0:
            self.statistics_output(time.process_time() - start_time)
        return status

    def statistics_output(self, complete_time: float) -> None:
        stat_output = "Statistics:\n-----\n"
        stat_output += "Command: " + self._configuration.command + "\n"
        stat_output += "Runtime: " + "{:.2f}s".format(complete_time) + "\n"
        stat_output += "Finished: " + datetime.now().strftime("%d.%m.%Y %H:%M:%S")
        print(stat_output)

    def _eps(self) -> float:
        return self._configuration.eps if self._configuration.eps is not None else self.config.eps_list[-1]

    def _run_solve(self) -> int:
        config = self.config
        eps = self._eps()
        print("Solving the cascade problem for eps={:g}...".format(eps))
        u = solve_reference(config.data, config.geometry, eps, config.discretization)
        print("max |u| = {:.10g}".format(u.max_abs()))
        print("energy identity mismatch = {:.3e}".format(energy_residual(u, config.data, config.geometry, eps)))
        if self._configuration.output:
            write_report(self._configuration.output, CsvFieldReporter(u).generate())
        return EXIT_OK

    def _run_homogenize(self) -> int:
        config = self.config
        geometry, discretization = config.geometry, config.discretization
        rhs = [effective_rhs(config.data, geometry, branch, discretization.tol_quad, discretization.max_quad_nodes)
               for branch in (1, 2)]
        omega = solve_main(rhs[0], rhs[1], geometry, 4 * discretization.nx)
        print("Homogenized solution w2:")
        print(TextProfileReporter(omega, geometry).generate())
        print()
        print("w2(0) = {:.12g}".format(omega.value(0.0, 1)))
        print("flux mismatch h1 w2'(0-) - h2 w2'(0+) = {:.3e}".format(omega.flux_mismatch(geometry)))
        residuals = main_residual(omega, rhs, geometry)
        print("equation residual per branch = {:.3e} / {:.3e}".format(*residuals))
        if self._configuration.output:
            write_report(self._configuration.output, CsvProfileReporter(omega, geometry, discretization.nx + 1)
                         .generate())
        return EXIT_OK

    def _junction_setup(self):
        configuration = self._configuration
        if configuration.config_path:
            geometry, discretization = self.config.geometry, self.config.discretization
            if configuration.h1 is not None or configuration.h2 is not None:
                _logger.warning("--h1/--h2 are ignored when a configuration is given")
        else:
            if configuration.h1 is None or configuration.h2 is None:
                raise ConfigurationException("junction needs --config or both --h1 and --h2")
            geometry = CascadeGeometry(configuration.h1, configuration.h2)
            discretization = Discretization()
        if configuration.R is not None:
            discretization = replace(discretization, R=configuration.R)
        if configuration.strip_step is not None:
            discretization = replace(discretization, strip_step=configuration.strip_step)
        discretization.check_decay_budget(geometry)
        return geometry, discretization

    def _run_junction(self) -> int:
        geometry, discretization = self._junction_setup()
        if self._configuration.config_path:
            config = self.config
            rhs = [effective_rhs(config.data, geometry, branch, discretization.tol_quad,
                                 discretization.max_quad_nodes) for branch in (1, 2)]
            omega = solve_main(rhs[0], rhs[1], geometry, 4 * discretization.nx)
        else:
            omega = BranchFunction1D.piecewise_linear(1.0 / geometry.h1, 1.0 / geometry.h2)

        print("Solving the junction problem N1 (h1={:g}, h2={:g}, R={:g}, step={:g})...".format(
            geometry.h1, geometry.h2, discretization.R, discretization.strip_step))
        dom = StripDomain.from_discretization(geometry, discretization)
        z0 = solve_z0(dom)
        layer = build_nk(1, geometry, dom, omega, z0=z0)
        print("d1+ = {:.10g} (plateau)".format(layer.d_plus))
        print("d1+ = {:.10g} (Green formula)".format(layer.d_green))
        if layer.is_zero:
            print("layer identically zero")
        else:
            rates = layer.decay_rates()
            print(tabulate([["left", rates[0], math.pi / geometry.h1], ["right", rates[1], math.pi / geometry.h2]],
                           headers=["Side", "Decay rate", "pi/h"], floatfmt=".6g"))
            print("weighted norm = {:.6g}, far-field ratio = {:.3e}".format(layer.weighted_norm(),
                                                                             layer.far_field_ratio()))
        print("Z0 far-field slopes = {:.6g} / {:.6g} (1/h1 = {:.6g}, 1/h2 = {:.6g})".format(
            z0.slopes[0], z0.slopes[1], 1.0 / geometry.h1, 1.0 / geometry.h2))
        if self._configuration.output:
            write_report(self._configuration.output,
                         CsvFieldReporter(layer.as_grid_function(), ("xi", "eta", "N1")).generate())
        return EXIT_OK

    def _components(self, m: Optional[int] = None) -> AsymptoticComponents:
        config = self.config
        m = m or self._configuration.order
        print("Building the asymptotic components up to m={}...".format(m))
        return build_components(config.data, config.geometry, config.discretization, m)

    def _dump_components(self, components: AsymptoticComponents) -> None:
        if self._configuration.dump_corrector:
            write_report(self._configuration.dump_corrector, CsvCorrectorReporter(components).generate())
        if self._configuration.dump_layers:
            write_report(self._configuration.dump_layers, CsvLayerCoefficientReporter(components).generate())

    def _run_asymptotics(self) -> int:
        components = self._components()
        lines = []
        for k in sorted(components.junctions):
            layer = components.junctions[k]
            lines.append(["N{}".format(k), layer.d_plus, layer.d_green, layer.gradient_norm()])
        print(tabulate(lines, headers=["Layer", "d+ (plateau)", "d+ (Green)", "|grad N|"], floatfmt=".10g"))
        print()
        self._dump_components(components)
        if self._configuration.output:
            config = self.config
            eps = self._eps()
            ps = assemble(components.m, components, eps)
            u = ps.sample(reference_grid(config.geometry, config.discretization))
            write_report(self._configuration.output, CsvFieldReporter(u, ("x", "eta", "U")).generate())
        return EXIT_OK

    def _print_sweep(self, report: SweepReport) -> None:
        print(TextConvergenceReporter(report).generate())
        print()
        if report.refined:
            print("reference grid refined once (nx={}, neta={})".format(report.discretization.nx,
                                                                        report.discretization.neta))
        print(TextCheckReporter(report).generate())

    def _run_sweep(self) -> int:
        config = self.config
        components = self._components()
        print("Running the sweep over eps = {} with {} workers...".format(
            ", ".join("{:g}".format(eps) for eps in config.eps_list), self._configuration.jobs))
        report = run_sweep(config.data, config.geometry, config.discretization, config.eps_list,
                           components.m, self._configuration.jobs, components)
        self._print_sweep(report)
        self._dump_components(components)
        output = self._configuration.output
        if output:
            write_report(output, CsvConvergenceReporter(report).generate())
            if self._configuration.plots:
                write_report(os.path.splitext(output)[0] + "_loglog.csv", CsvLogLogReporter(report).generate())
        return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED

    def _run_validate(self) -> int:
        """Structural checks of one configuration: transmission, junction, far field, energy and bounds."""
        config = self.config
        geometry = config.geometry
        components = self._components()
        checks = []

        omega = components.omega[2]
        checks.append(Check("flux transmission of w2", abs(omega.flux_mismatch(geometry)), FLUX_TOLERANCE,
                            abs(omega.flux_mismatch(geometry)) < FLUX_TOLERANCE))
        slopes = components.z0.slopes
        for side, slope, target in (("left", slopes[0], 1.0 / geometry.h1), ("right", slopes[1], 1.0 / geometry.h2)):
            error = abs(slope - target)
            checks.append(Check("Z0 far-field slope ({})".format(side), error, SLOPE_TOLERANCE,
                                error < SLOPE_TOLERANCE))
        for k in sorted(components.junctions):
            layer = components.junctions[k]
            scale = max(abs(layer.d_plus), abs(layer.d_green), 1e-300)
            mismatch = abs(layer.d_plus - layer.d_green) / scale if layer.d_plus or layer.d_green else 0.0
            checks.append(Check("d{}+ plateau vs Green".format(k), mismatch, PLATEAU_TOLERANCE,
                                mismatch < PLATEAU_TOLERANCE))

        bound_t9, bound_t10 = constant_bounds(config.data, geometry, config.discretization.c_delta,
                                              components.d_plus(1))
        measured = corrector_gradient_sum(components)
        checks.append(Check("sum |d_eta u2| <= bound", measured, bound_t9, measured <= bound_t9 * (1.0 + 1e-9)))
        gradient = components.junctions[2].gradient_norm()
        checks.append(Check("|grad N2| <= bound", gradient, bound_t10, gradient <= bound_t10 * (1.0 + 1e-9),
                            required=False))

        eps = self._eps()
        u = solve_reference(config.data, geometry, eps, config.discretization)
        energy = energy_residual(u, config.data, geometry, eps)
        scale = max(u.h1_norm(eps) ** 2, 1e-300)
        checks.append(Check("energy identity (eps={:g})".format(eps), energy / scale, 1e-2, energy <= 1e-2 * scale,
                            required=False))
        residual = residual_sup(assemble(components.m, components, eps))
        checks.append(Check("sup |Delta U + f| (eps={:g})".format(eps), residual.total, math.nan, True,
                            required=False))
        _logger.info("residual maxima at %s and %s", *residual.location)

        report = SweepReport(components.m, [], [], [], config.discretization, checks=checks,
                             bounds=(bound_t9, bound_t10), measured=(measured, gradient))
        print(TextCheckReporter(report).generate())
        self._dump_components(components)
        return EXIT_OK if report.passed else EXIT_VALIDATION_FAILED
