"""
Solucion de sistemas dispersos simetricos definidos positivos.

Metodo por defecto: gradiente conjugado con precondicionador diagonal
(Jacobi) escrito sobre numpy; alternativa Cholesky densa para mallas
pequenas. Las matrices son scipy.sparse.csr_matrix.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from fraccional.conf import get_setting
from fraccional.exceptions import InvalidArgumentError, SolverFailureError

logger = logging.getLogger(__name__)

METHOD_CG = 'cg'
METHOD_CHOLESKY = 'cholesky'
METHODS = (METHOD_CG, METHOD_CHOLESKY)

# Cholesky densa solo tiene sentido para sistemas chicos.
CHOLESKY_MAX_DIM = 4000

SYMMETRY_TOL = 1e-12


@dataclass
class SolveInfo:
    iterations: int
    residual: float                  # ||Ax - b|| / ||b||
    history: List[float] = field(default_factory=list)


def matvec(A: sp.spmatrix, x) -> np.ndarray:
    """Producto matriz-vector con verificacion de dimensiones."""
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or A.shape[1] != x.shape[0]:
        raise InvalidArgumentError(
            f"Dimensiones incompatibles: matriz {A.shape}, vector {x.shape}"
        )
    return A @ x


class LinearSolver:
    """
    Solver para una matriz SPD fija.

    La simetria se verifica una sola vez al construir. El objeto no guarda
    estado entre llamadas a solve, asi que puede compartirse.
    """

    def __init__(self, matrix, method: Optional[str] = None, tol: Optional[float] = None,
                 maxiter: Optional[int] = None):
        self.matrix = sp.csr_matrix(matrix)
        self.method = method or get_setting('FRACCIONAL_SOLVER_METHOD')
        self.tol = float(tol if tol is not None else get_setting('FRACCIONAL_SOLVER_TOL'))
        self.maxiter = int(maxiter if maxiter is not None else get_setting('FRACCIONAL_SOLVER_MAXITER'))

        n, m = self.matrix.shape
        if n != m:
            raise InvalidArgumentError(f"La matriz debe ser cuadrada, se recibio {self.matrix.shape}")
        if self.method not in METHODS:
            raise InvalidArgumentError(f"Metodo de solucion desconocido: {self.method}")
        if not (0.0 < self.tol < 1.0):
            raise InvalidArgumentError(f"Tolerancia fuera de rango: {self.tol}")
        if self.maxiter < 1:
            raise InvalidArgumentError(f"maxiter debe ser positivo: {self.maxiter}")
        self._check_symmetry()

        self.n = n
        diagonal = self.matrix.diagonal()
        if np.any(diagonal <= 0.0):
            raise InvalidArgumentError("La matriz tiene diagonal no positiva; no es SPD")
        self._inv_diagonal = 1.0 / diagonal

        self._cholesky = None
        if self.method == METHOD_CHOLESKY:
            if n > CHOLESKY_MAX_DIM:
                raise InvalidArgumentError(
                    f"Cholesky densa limitada a dimension {CHOLESKY_MAX_DIM}, se recibio {n}"
                )
            self._cholesky = sla.cho_factor(self.matrix.toarray(), lower=True)

    def _check_symmetry(self):
        scale = abs(self.matrix).max() if self.matrix.nnz else 0.0
        if scale == 0.0:
            return
        asym = abs(self.matrix - self.matrix.T)
        gap = asym.max() if asym.nnz else 0.0
        if gap > SYMMETRY_TOL * scale:
            raise InvalidArgumentError(f"La matriz no es simetrica (diferencia {gap:.3e})")

    def solve(self, rhs, x0=None, callback: Optional[Callable[[np.ndarray], None]] = None) -> np.ndarray:
        x, _ = self.solve_with_info(rhs, x0=x0, callback=callback)
        return x

    def solve_with_info(self, rhs, x0=None, callback=None):
        b = np.asarray(rhs, dtype=float)
        if b.shape != (self.n,):
            raise InvalidArgumentError(f"rhs de tamano {b.shape}, se esperaba ({self.n},)")
        if not np.all(np.isfinite(b)):
            raise InvalidArgumentError("El lado derecho contiene valores no finitos")

        b_norm = np.linalg.norm(b)
        if b_norm == 0.0:
            return np.zeros(self.n), SolveInfo(iterations=0, residual=0.0)

        if self._cholesky is not None:
            x = sla.cho_solve(self._cholesky, b)
            residual = np.linalg.norm(self.matrix @ x - b) / b_norm
            if residual > self.tol:
                raise SolverFailureError(
                    f"Cholesky no alcanzo la tolerancia (residuo {residual:.3e})",
                    residual=residual, iterations=0,
                )
            return x, SolveInfo(iterations=0, residual=residual)

        return self._pcg(b, b_norm, x0, callback)

    def _pcg(self, b, b_norm, x0, callback):
        if x0 is None:
            x = np.zeros(self.n)
        else:
            x = np.array(x0, dtype=float)
            if x.shape != (self.n,):
                raise InvalidArgumentError(f"x0 de tamano {x.shape}, se esperaba ({self.n},)")

        A = self.matrix
        target = self.tol * b_norm
        history = []
        iterations = 0

        r = b - A @ x
        while iterations < self.maxiter:
            # Reinicio con el residuo verdadero cuando la recurrencia converge.
            z = self._inv_diagonal * r
            p = z.copy()
            rz = r @ z
            r_norm = np.linalg.norm(r)
            history.append(float(r_norm / b_norm))
            if r_norm <= target:
                break

            while iterations < self.maxiter:
                Ap = A @ p
                step = rz / (p @ Ap)
                x += step * p
                r -= step * Ap
                iterations += 1
                if callback is not None:
                    callback(x)

                r_norm = np.linalg.norm(r)
                history.append(float(r_norm / b_norm))
                if r_norm <= target:
                    break
                z = self._inv_diagonal * r
                rz_new = r @ z
                p = z + (rz_new / rz) * p
                rz = rz_new

            r = b - A @ x
            if np.linalg.norm(r) <= target:
                break

        residual = float(np.linalg.norm(b - A @ x) / b_norm)
        if not np.isfinite(residual) or residual > self.tol:
            logger.error(f"CG no convergio: {iterations} iteraciones, residuo {residual:.3e}")
            raise SolverFailureError(
                f"CG no convergio en {self.maxiter} iteraciones (residuo {residual:.3e})",
                residual=residual, iterations=iterations,
            )
        if iterations > self.maxiter // 2:
            logger.warning(f"CG lento: {iterations} iteraciones de {self.maxiter}")
        logger.debug(f"CG: {iterations} iteraciones, residuo {residual:.3e}")
        return x, SolveInfo(iterations=iterations, residual=residual, history=history)


def solve(solver: LinearSolver, rhs, x0=None) -> np.ndarray:
    """Resuelve A x = rhs con el solver dado (x0 permite arranque en caliente)."""
    return solver.solve(rhs, x0=x0)
