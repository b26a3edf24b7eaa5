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
from typing import List

import numpy as np

from tabulate import tabulate

from pyCascade.report.field_reporters import csv_lines
from pyCascade.utils.exceptions import RateFitException
from pyCascade.validation.sweep import SweepReport, metric_values
from pyCascade.validation.validator import fit_rate

row_attributes = "eps l2_omega2 h1_omega2 h1_first h1_partial e_l2_1 e_l2_2 e_h1_1 e_h1_2 e_max_1 e_max_2 residual"
convergence_row = namedtuple("ConvergenceReportRow", row_attributes)
check_row = namedtuple("CheckRow", "check value threshold status")


class ConvergenceReporter:
    def __init__(self, report: SweepReport):
        self.report = report

    def get_report_lines(self) -> List[convergence_row]:
        lines = []
        for row in self.report.rows:
            lines.append(convergence_row(row.eps, row.l2_leading, row.h1_leading, row.h1_first, row.h1_partial,
                                         row.average_l2[0], row.average_l2[1], row.average_h1[0],
                                         row.average_h1[1], row.average_max[0], row.average_max[1],
                                         row.residual))
        return lines

    def slope_line(self) -> List:
        """Fitted slope of every column; ``nan`` where no rate could be fitted."""
        eps = [line.eps for line in self.get_report_lines()]
        slopes = ["slope"]
        columns = list(zip(*self.get_report_lines()))[1:] if self.report.rows else []
        for values in columns:
            try:
                slopes.append(fit_rate(eps, values).slope)
            except RateFitException:
                slopes.append(float("nan"))
        return slopes


class TextConvergenceReporter(ConvergenceReporter):
    def generate(self):
        lines = self.get_report_lines()
        if self.report.rows:
            lines = lines + [self.slope_line()]
        return tabulate(lines, headers=["eps", "|u-w2|", "|u-w2|_H1", "|u-w2-eps w3|_H1", "|u-U|_H1",
                                        "E1 L2", "E2 L2", "E1 H1", "E2 H1", "E1 max", "E2 max", "residual"],
                        floatfmt=".4e")


class CsvConvergenceReporter(ConvergenceReporter):
    def generate(self):
        lines = self.get_report_lines()
        if self.report.rows:
            lines = lines + [self.slope_line()]
        return csv_lines(convergence_row._fields, lines)


class TextCheckReporter:
    def __init__(self, report: SweepReport):
        self.report = report

    def get_report_lines(self) -> List[check_row]:
        lines = []
        for check in self.report.checks:
            if check.passed:
                status = "ok"
            else:
                status = "FAILED" if check.required else "not met"
            lines.append(check_row(check.name, check.value, check.threshold, status))
        return lines

    def generate(self):
        return tabulate(self.get_report_lines(), headers=["Check", "Value", "Threshold", "Status"],
                        floatfmt=".4g")


class CsvLogLogReporter:
    """``log10`` of every fitted quantity against ``log10(eps)``; non-positive values are left empty."""

    def __init__(self, report: SweepReport):
        self.report = report

    def generate(self):
        metrics = metric_values(self.report.rows)
        header = ["log10_eps"] + ["log10_" + name for name in metrics]
        report = [",".join(header) + "\n"]
        for i, eps in enumerate(self.report.eps_list):
            cells = ["{:.17g}".format(np.log10(eps))]
            for values in metrics.values():
                cells.append("{:.17g}".format(np.log10(values[i])) if values[i] > 0 else "")
            report.append(",".join(cells) + "\n")
        return report
