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

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from pyCascade.asymptotics.expansion import AsymptoticComponents, build_components
from pyCascade.geometry import CascadeGeometry, Discretization, ProblemData
from pyCascade.solvers.reference import solve_reference
from pyCascade.utils.exceptions import RateFitException
from pyCascade.validation.partial_sum import assemble
from pyCascade.validation.validator import ConvergenceRow, RateFit, ResidualReport, constant_bounds, \
    corrector_gradient_sum, error_norms, fit_rate, residual_sup

_logger = logging.getLogger(__name__)

# Minimal fitted slopes at m = 1
SLOPE_THRESHOLDS = {
    "l2_leading": 1.4,
    "h1_leading": 0.9,
    "h1_first": 1.4,
    "h1_partial": 2.2,
    "average_l2": 0.9,
    "average_h1": 0.4,
    "average_max": 0.4,
    "residual": 1.8,
}
ZERO_ERROR = 1e-9
PROXY_RATIO = 0.1


def slope_thresholds(m: int) -> Dict[str, float]:
    thresholds = dict(SLOPE_THRESHOLDS)
    thresholds["h1_partial"] = 2 * m + 0.2
    thresholds["residual"] = 2 * m - 0.2
    return thresholds


def metric_values(rows: Sequence[ConvergenceRow]) -> Dict[str, List[float]]:
    """Fitted quantities of a sweep; per-branch quantities enter with their larger branch value."""
    return {
        "l2_leading": [row.l2_leading for row in rows],
        "h1_leading": [row.h1_leading for row in rows],
        "h1_first": [row.h1_first for row in rows],
        "h1_partial": [row.h1_partial for row in rows],
        "average_l2": [max(row.average_l2) for row in rows],
        "average_h1": [max(row.average_h1) for row in rows],
        "average_max": [row.average_max_total for row in rows],
        "residual": [row.residual for row in rows],
    }


class Check(NamedTuple):
    name: str
    value: float
    threshold: float
    passed: bool
    required: bool = True


@dataclass
class SweepReport:
    m: int
    eps_list: List[float]
    rows: List[ConvergenceRow]
    residuals: List[ResidualReport]
    discretization: Discretization
    slopes: Dict[str, Optional[RateFit]] = field(default_factory=dict)
    checks: List[Check] = field(default_factory=list)
    bounds: Tuple[float, float] = (0.0, 0.0)
    measured: Tuple[float, float] = (0.0, 0.0)
    proxy: float = 0.0
    refined: bool = False

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks if check.required)


def discretization_proxy(components: AsymptoticComponents, m: int, eps: float,
                         discretization: Discretization) -> Tuple[float, float]:
    """
    Richardson estimate of the reference-solver error in ``|u - U|_H1`` from the configured grid and the grid
    coarsened once; returns the estimate and the fine-grid error.
    """
    ps = assemble(m, components, eps)
    fine = solve_reference(components.data, components.geometry, eps, discretization)
    coarse_discretization = replace(discretization, nx=max(2, discretization.nx // 2),
                                    neta=max(2, discretization.neta // 2))
    coarse = solve_reference(components.data, components.geometry, eps, coarse_discretization)
    q_fine = error_norms(fine, ps, eps).h1_partial
    q_coarse = error_norms(coarse, ps, eps).h1_partial
    return abs(q_fine - q_coarse) / 3.0, q_fine


def _sweep_point(components: AsymptoticComponents, m: int, eps: float, discretization: Discretization
                 ) -> Tuple[ConvergenceRow, ResidualReport]:
    u = solve_reference(components.data, components.geometry, eps, discretization)
    ps = assemble(m, components, eps)
    residual = residual_sup(ps)
    row = error_norms(u, ps, eps)._replace(residual=residual.total)
    return row, residual


def _warm_up(components: AsymptoticComponents):
    # Interpolators of the strip fields are built lazily; build them before the workers share them
    for layer in components.junctions.values():
        layer.evaluate(np.zeros(1), np.zeros(1))


def _run_rows(components: AsymptoticComponents, m: int, eps_list: Sequence[float],
              discretization: Discretization, jobs: int):
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        futures = [pool.submit(_sweep_point, components, m, eps, discretization) for eps in eps_list]
        results = [future.result() for future in futures]
    return [row for row, _ in results], [residual for _, residual in results]


def _slope_checks(report: SweepReport):
    thresholds = slope_thresholds(report.m)
    for name, values in metric_values(report.rows).items():
        if all(abs(value) <= ZERO_ERROR for value in values):
            report.slopes[name] = None
            report.checks.append(Check("slope " + name, math.inf, thresholds[name], True))
            continue
        try:
            fit = fit_rate(report.eps_list, values)
        except RateFitException as e:
            _logger.warning("no rate for %s: %s", name, e)
            report.slopes[name] = None
            report.checks.append(Check("slope " + name, math.nan, thresholds[name], False))
            continue
        if fit.excluded:
            _logger.warning("rate of %s excludes non-positive values", name)
        report.slopes[name] = fit
        report.checks.append(Check("slope " + name, fit.slope, thresholds[name], fit.slope >= thresholds[name]))


def error_bound_checks(rows: Sequence[ConvergenceRow], bound: float, rate: float = 1.5) -> List[Check]:
    """One check per row that ``|u - w_2 - eps (w_3 + chi0 N_1)|_H1 <= bound * eps^rate``."""
    checks = []
    for row in rows:
        limit = bound * row.eps ** rate
        checks.append(Check("|u-w2-eps(w3+N1)|_H1 <= bound at eps={:g}".format(row.eps), row.h1_first, limit,
                            row.h1_first <= limit * (1.0 + 1e-9) + ZERO_ERROR))
    return checks


def run_sweep(data: ProblemData, geometry: CascadeGeometry, discretization: Discretization,
              eps_list: Sequence[float], m: int = 1, jobs: int = 1,
              components: Optional[AsymptoticComponents] = None, auto_refine: bool = True) -> SweepReport:
    """
    Computes one convergence row per ``eps`` concurrently, fits the rates and evaluates the checks.

    The asymptotic components are built once. If the discretization proxy at the smallest ``eps`` is not one order
    below the measured error, the reference grid is refined once before the sweep.
    """
    eps_list = sorted((float(eps) for eps in eps_list), reverse=True)
    components = components or build_components(data, geometry, discretization, m)
    _warm_up(components)

    proxy, refined = 0.0, False
    if auto_refine and not data.is_zero():
        proxy, q = discretization_proxy(components, m, eps_list[-1], discretization)
        _logger.info("discretization proxy %.3e against |u-U|_H1 = %.3e", proxy, q)
        if q > ZERO_ERROR and proxy > PROXY_RATIO * q:
            discretization = replace(discretization, nx=2 * discretization.nx, neta=2 * discretization.neta)
            refined = True
            _logger.warning("reference grid refined to nx=%d, neta=%d", discretization.nx, discretization.neta)

    rows, residuals = _run_rows(components, m, eps_list, discretization, jobs)
    report = SweepReport(m, eps_list, rows, residuals, discretization, proxy=proxy, refined=refined)
    _slope_checks(report)

    maxima = [row.average_max_total for row in rows]
    report.checks.append(Check("max |E(u) - w2| decreasing", float(maxima[-1]), float(maxima[0]),
                               bool(np.all(np.diff(maxima) <= ZERO_ERROR)), required=False))

    report.bounds = constant_bounds(data, geometry, discretization.c_delta, components.d_plus(1))
    report.checks.extend(error_bound_checks(rows, report.bounds[0]))
    report.measured = (corrector_gradient_sum(components), components.junctions[2].gradient_norm())
    report.checks.append(Check("sum |d_eta u2| <= bound", report.measured[0], report.bounds[0],
                               report.measured[0] <= report.bounds[0] * (1.0 + 1e-9)))
    report.checks.append(Check("|grad N2| <= bound", report.measured[1], report.bounds[1],
                               report.measured[1] <= report.bounds[1] * (1.0 + 1e-9), required=False))
    return report
