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

"""Smooth plateau cut-off: equal to one on ``[0, delta]``, zero beyond ``2 delta``, quintic smoothstep between."""
import numpy as np


def _smoothstep(t: np.ndarray, order: int) -> np.ndarray:
    if order == 0:
        return t ** 3 * (10.0 - 15.0 * t + 6.0 * t ** 2)
    if order == 1:
        return 30.0 * t ** 2 * (1.0 - t) ** 2
    if order == 2:
        return 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    raise ValueError("cut-off derivatives are available up to order 2")


def plateau_cutoff(r, delta: float, order: int = 0) -> np.ndarray:
    """
    Cut-off as a function of the distance ``r >= 0`` (or its derivative of the given order with respect to
    ``r``). The profile is C2.
    """
    r = np.asarray(r, dtype=float)
    t = np.clip((r - delta) / delta, 0.0, 1.0)
    inside = (r > delta) & (r < 2.0 * delta)
    if order == 0:
        return np.where(r <= delta, 1.0, np.where(inside, 1.0 - _smoothstep(t, 0), 0.0))
    return np.where(inside, -_smoothstep(t, order) / delta ** order, 0.0)
