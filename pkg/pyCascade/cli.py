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


"""pyCascade builds and verifies the asymptotic expansion of the Poisson problem in a thin two-stage cascade.

This module provides the main entry location for the program execution from the command
line.
"""
import argparse
import logging
import sys

from typing import List

from pyCascade.cascade_asymptotics import CascadeAsymptotics, EXIT_INPUT_ERROR
from pyCascade.configuration import Configuration
from pyCascade.utils.exceptions import CascadeException

_DEBUG_LEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}


def _add_common_arguments(parser: argparse.ArgumentParser, config_required: bool = True) -> None:
    parser.add_argument("--config", required=config_required, help="Path to the TOML problem configuration")
    parser.add_argument("-o", "--out", help="Output file (CSV)")
    parser.add_argument("-d", "--debug", type=int, default=0, choices=(0, 1, 2),
                        help="Debug level (0: warnings, 1: progress, 2: detailed)")


def _create_argument_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser("cascade-asym")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    solve = commands.add_parser("solve", help="Solve the cascade problem for one eps")
    _add_common_arguments(solve)
    solve.add_argument("--eps", type=float, help="Thickness parameter (default: smallest eps of the sweep)")

    homogenize = commands.add_parser("homogenize", help="Solve the homogenized problem for w2")
    _add_common_arguments(homogenize)

    junction = commands.add_parser("junction", help="Solve the junction layer N1 and report d1+")
    _add_common_arguments(junction, config_required=False)
    junction.add_argument("--h1", type=float, help="Thickness of branch 1 (without --config)")
    junction.add_argument("--h2", type=float, help="Thickness of branch 2 (without --config)")
    junction.add_argument("--R", type=float, help="Half-length of the truncated strip")
    junction.add_argument("--step", type=float, help="Grid spacing on the strip")

    for name, description in (("asymptotics", "Build every component of the partial sum"),
                              ("sweep", "Run the eps sweep and fit the convergence rates"),
                              ("validate", "Check transmission, junction, far-field and bound properties")):
        command = commands.add_parser(name, help=description)
        _add_common_arguments(command)
        command.add_argument("--m", type=int, default=1, choices=(1, 2, 3), help="Order of the partial sum")
        command.add_argument("--dump-corrector", help="CSV file for sampled regular correctors")
        command.add_argument("--dump-layers", help="CSV file for the boundary layer coefficients")
        if name != "sweep":
            command.add_argument("--eps", type=float, help="Thickness parameter (default: smallest eps)")
        else:
            command.add_argument("-j", "--jobs", type=int, help="Worker threads (default: available cores)")
            command.add_argument("--plots", action="store_true", default=False,
                                 help="Also write log-log data next to the report")
    return parser


def main(argv: List[str] = None) -> int:
    """
    Main entry point of the cascade-asym command.

    :param argv: List of command-line arguments, the program name first.
    :return: 0 on success, 1 on a failed validation check, 2 on an input error.
    """
    if argv is None:
        argv = sys.argv
    arguments = list(argv[1:])
    if not arguments:
        arguments.append("--help")

    parser = _create_argument_parser()
    args = parser.parse_args(arguments)
    logging.basicConfig(level=_DEBUG_LEVELS[args.debug], format="%(levelname)s %(name)s: %(message)s", force=True)

    try:
        configuration = Configuration(command=args.command, config_path=args.config, output=args.out,
                                      debug_output=args.debug, jobs=getattr(args, "jobs", None),
                                      order=getattr(args, "m", 1), eps=getattr(args, "eps", None),
                                      plots=getattr(args, "plots", False),
                                      dump_corrector=getattr(args, "dump_corrector", None),
                                      dump_layers=getattr(args, "dump_layers", None),
                                      h1=getattr(args, "h1", None), h2=getattr(args, "h2", None),
                                      R=getattr(args, "R", None), strip_step=getattr(args, "step", None))
        return CascadeAsymptotics(configuration).run()
    except (CascadeException, FileNotFoundError) as e:
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main(sys.argv))
