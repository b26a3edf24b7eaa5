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

"""Sparse solvers for the symmetric positive definite systems of both finite volume discretizations."""
import logging

from typing import Callable

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from pyCascade.utils.exceptions import LinearSolveException

_logger = logging.getLogger(__name__)

METHODS = ("direct", "cg")


def _jacobi(matrix: sp.spmatrix) -> spla.LinearOperator:
    diagonal = matrix.diagonal()
    if np.any(diagonal <= 0):
        raise LinearSolveException("matrix has a non-positive diagonal entry")
    inverse = 1.0 / diagonal
    return spla.LinearOperator(matrix.shape, matvec=lambda v: inverse * v, dtype=float)


def _cg(matrix: sp.spmatrix, rhs: np.ndarray, tol: float) -> np.ndarray:
    iterations = [0]

    def count(_):
        iterations[0] += 1

    preconditioner = _jacobi(matrix)
    maxiter = 20 * matrix.shape[0]
    try:
        solution, info = spla.cg(matrix, rhs, rtol=tol, atol=0.0, M=preconditioner, maxiter=maxiter,
                                 callback=count)
    except TypeError:
        # scipy < 1.12 names the relative tolerance ``tol``
        solution, info = spla.cg(matrix, rhs, tol=tol, atol=0.0, M=preconditioner, maxiter=maxiter,
                                 callback=count)
    if info != 0:
        raise LinearSolveException("conjugate gradients did not converge after {} iterations".format(iterations[0]))
    _logger.debug("cg converged in %d iterations (n=%d)", iterations[0], matrix.shape[0])
    return solution


def solve_spd(matrix: sp.spmatrix, rhs: np.ndarray, tol: float = 1e-10, method: str = "direct") -> np.ndarray:
    """
    Solves ``matrix @ x = rhs`` for a symmetric positive definite sparse matrix.

    :param method: ``"direct"`` (sparse LU) or ``"cg"`` (Jacobi preconditioned conjugate gradients, relative
        tolerance ``tol``)
    :raises LinearSolveException: on non-convergence or a singular factorization
    """
    if not np.any(rhs):
        return np.zeros_like(rhs, dtype=float)
    if method == "cg":
        return _cg(matrix.tocsr(), rhs, tol)
    if method != "direct":
        raise ValueError("unknown linear solver " + method)
    return factorize(matrix, tol, method)(rhs)


def factorize(matrix: sp.spmatrix, tol: float = 1e-10, method: str = "direct") -> Callable[[np.ndarray], np.ndarray]:
    """Returns a solver for repeated right-hand sides with the same matrix."""
    if method == "cg":
        csr = matrix.tocsr()
        return lambda rhs: np.zeros_like(rhs, dtype=float) if not np.any(rhs) else _cg(csr, rhs, tol)
    try:
        solve = spla.factorized(matrix.tocsc())
    except RuntimeError as e:
        raise LinearSolveException("sparse factorization failed: {}".format(e)) from e

    def apply(rhs: np.ndarray) -> np.ndarray:
        solution = solve(rhs)
        if not np.all(np.isfinite(solution)):
            raise LinearSolveException("singular matrix in sparse factorization")
        return solution

    _logger.debug("factorized sparse matrix of size %d with %d nonzeros", matrix.shape[0], matrix.nnz)
    return apply
