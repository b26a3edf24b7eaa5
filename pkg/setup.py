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

from setuptools import find_packages, setup

with open("requirements.txt") as requirements_file:
    requirements = [line.strip() for line in requirements_file if line.strip()]

setup(
    name="pyCascade",
    version="0.1.0",
    description="Asymptotic expansion and reference solver for the Poisson problem in a thin two-stage cascade",
    license="LGPLv3+",
    packages=find_packages(exclude=("tests", "tests.*")),
    python_requires=">=3.8",
    install_requires=requirements,
    entry_points={"console_scripts": ["cascade-asym = pyCascade.cli:main"]},
)
