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

from collections import namedtuple
from typing import Iterable, List, Sequence

import numpy as np

from tabulate import tabulate

from pyCascade.asymptotics.expansion import AsymptoticComponents
from pyCascade.asymptotics.homogenized import BranchFunction1D
from pyCascade.geometry import CascadeGeometry
from pyCascade.solvers.cascade_grid import GridFunction2D

profile_row = namedtuple("ProfileRow", "branch x value derivative")
field_row = namedtuple("FieldRow", "x eta value")
corrector_row = namedtuple("CorrectorRow", "order branch x eta value")
coefficient_row = namedtuple("CoefficientRow", "order side mode p coefficient rate")


def format_value(value) -> str:
    if isinstance(value, (str, int, np.integer)):
        return str(value)
    return "{:.17g}".format(float(value))


def csv_lines(header: Sequence[str], rows: Iterable[Sequence]) -> List[str]:
    report = [",".join(header) + "\n"]
    for row in rows:
        report.append(",".join(format_value(value) for value in row) + "\n")
    return report


class ProfileReporter:
    def __init__(self, omega: BranchFunction1D, geometry: CascadeGeometry, samples: int = 257):
        self.omega = omega
        self.geometry = geometry
        self.samples = samples

    def get_report_lines(self):
        lines = []
        for branch in (1, 2):
            a, b = self.geometry.interval(branch)
            x = np.linspace(a, b, self.samples)
            values = np.broadcast_to(self.omega.value(x, branch), x.shape)
            derivatives = np.broadcast_to(self.omega.derivative(x, branch), x.shape)
            lines.extend(profile_row(branch, x[i], values[i], derivatives[i]) for i in range(len(x)))
        return lines


class TextProfileReporter(ProfileReporter):
    def generate(self):
        lines = self.get_report_lines()
        step = max(1, (self.samples - 1) // 8)
        shown = [row for i, row in enumerate(lines) if (i % self.samples) % step == 0]
        return tabulate(shown, headers=["Branch", "x", "w2", "w2'"], floatfmt=".10g")


class CsvProfileReporter(ProfileReporter):
    def generate(self):
        return csv_lines(("branch", "x", "omega2", "omega2_x"), self.get_report_lines())


class CsvFieldReporter:
    """Nodal values of a field on a reference or strip grid."""

    def __init__(self, u: GridFunction2D, header: Sequence[str] = ("x", "eta", "u")):
        self.u = u
        self.header = header

    def get_report_lines(self):
        grid = self.u.grid
        return [field_row(*values) for values in zip(grid.node_x, grid.node_eta, self.u.values)]

    def generate(self):
        return csv_lines(self.header, self.get_report_lines())


class CsvCorrectorReporter:
    def __init__(self, components: AsymptoticComponents, samples_x: int = 65, samples_eta: int = 17):
        self.components = components
        self.samples_x = samples_x
        self.samples_eta = samples_eta

    def get_report_lines(self):
        geometry = self.components.geometry
        lines = []
        for order in sorted(self.components.correctors):
            for branch in (1, 2):
                a, b = geometry.interval(branch)
                low, high = geometry.cross_section(branch)
                x, eta = np.meshgrid(np.linspace(a, b, self.samples_x), np.linspace(low, high, self.samples_eta),
                                     indexing="ij")
                values = self.components.corrector(order, branch).evaluate(x, eta)
                lines.extend(corrector_row(order, branch, *point)
                             for point in zip(x.ravel(), eta.ravel(), values.ravel()))
        return lines

    def generate(self):
        return csv_lines(corrector_row._fields, self.get_report_lines())


class CsvLayerCoefficientReporter:
    def __init__(self, components: AsymptoticComponents):
        self.components = components

    def get_report_lines(self):
        lines = []
        for order in sorted(self.components.layers):
            for layer in self.components.layers[order]:
                lines.append(coefficient_row(order, layer.side, "mean", 0, layer.a0, 0.0))
                for p, (a, rate) in enumerate(zip(layer.a, layer.rates[0]), start=1):
                    lines.append(coefficient_row(order, layer.side, "cos", p, a, rate))
                for p, (b, rate) in enumerate(zip(layer.b, layer.rates[1])):
                    lines.append(coefficient_row(order, layer.side, "sin", p, b, rate))
        return lines

    def generate(self):
        return csv_lines(coefficient_row._fields, self.get_report_lines())
