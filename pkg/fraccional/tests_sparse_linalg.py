# -*- coding: utf-8 -*-
import numpy as np
import scipy.sparse as sp
from django.test import SimpleTestCase, override_settings
from scipy.sparse.linalg import spsolve

from fraccional.exceptions import InvalidArgumentError, SolverFailureError
from fraccional.services.assembly import assemble_mass, assemble_stiffness
from fraccional.services.meshgen import build_mesh
from fraccional.services.sparse_linalg import CHOLESKY_MAX_DIM, LinearSolver, matvec, solve


class LinearSolverTest(SimpleTestCase):
    """Pruebas para el gradiente conjugado precondicionado y la alternativa Cholesky."""

    def setUp(self):
        mesh = build_mesh(16)
        self.matrix = (assemble_mass(mesh) * 100.0 + assemble_stiffness(mesh)).tocsr()
        self.rhs = np.random.default_rng(7).standard_normal(mesh.n_interior)
        self.expected = spsolve(self.matrix.tocsc(), self.rhs)

    def test_cg_coincide_con_solucion_directa(self):
        solver = LinearSolver(self.matrix, method='cg', tol=1e-12)
        x, info = solver.solve_with_info(self.rhs)
        np.testing.assert_allclose(x, self.expected, rtol=1e-9, atol=1e-12)
        self.assertLessEqual(info.residual, 1e-12)
        self.assertGreater(info.iterations, 0)

    def test_cholesky_coincide_con_solucion_directa(self):
        solver = LinearSolver(self.matrix, method='cholesky', tol=1e-12)
        np.testing.assert_allclose(solver.solve(self.rhs), self.expected, rtol=1e-10, atol=1e-13)

    def test_funcion_solve_acepta_arranque(self):
        solver = LinearSolver(self.matrix, method='cg', tol=1e-12)
        x = solve(solver, self.rhs, x0=np.zeros_like(self.rhs))
        np.testing.assert_allclose(x, self.expected, rtol=1e-9, atol=1e-12)

    def test_lado_derecho_nulo(self):
        x, info = LinearSolver(self.matrix).solve_with_info(np.zeros_like(self.rhs))
        self.assertFalse(np.any(x))
        self.assertEqual(info.iterations, 0)

    def test_arranque_en_caliente_con_la_solucion(self):
        solver = LinearSolver(self.matrix, method='cg', tol=1e-8)
        _, info = solver.solve_with_info(self.rhs, x0=self.expected)
        self.assertEqual(info.iterations, 0)

    def test_error_decrece_en_norma_de_energia(self):
        errors = []

        def energy_error(x):
            e = x - self.expected
            errors.append(float(np.sqrt(e @ (self.matrix @ e))))

        LinearSolver(self.matrix, method='cg', tol=1e-10).solve(self.rhs, callback=energy_error)
        self.assertGreater(len(errors), 1)
        for before, after in zip(errors, errors[1:]):
            self.assertLessEqual(after, before * (1.0 + 1e-10) + 1e-14)

    def test_falla_por_iteraciones(self):
        solver = LinearSolver(self.matrix, method='cg', tol=1e-12, maxiter=1)
        with self.assertRaises(SolverFailureError) as ctx:
            solver.solve(self.rhs)
        self.assertGreater(ctx.exception.residual, 1e-12)
        self.assertEqual(ctx.exception.iterations, 1)

    def test_matriz_no_simetrica(self):
        dense = np.array([[2.0, 1.0], [0.0, 2.0]])
        with self.assertRaises(InvalidArgumentError):
            LinearSolver(sp.csr_matrix(dense))

    def test_lado_derecho_no_finito(self):
        rhs = self.rhs.copy()
        rhs[3] = np.nan
        with self.assertRaises(InvalidArgumentError):
            LinearSolver(self.matrix).solve(rhs)

    def test_cholesky_limitada_por_dimension(self):
        with self.assertRaises(InvalidArgumentError):
            LinearSolver(sp.identity(CHOLESKY_MAX_DIM + 1, format='csr'), method='cholesky')

    def test_metodo_desconocido(self):
        with self.assertRaises(InvalidArgumentError):
            LinearSolver(self.matrix, method='gauss')

    @override_settings(FRACCIONAL_SOLVER_METHOD='cholesky', FRACCIONAL_SOLVER_TOL=1e-9)
    def test_valores_por_defecto_desde_settings(self):
        solver = LinearSolver(self.matrix)
        self.assertEqual(solver.method, 'cholesky')
        self.assertEqual(solver.tol, 1e-9)


class MatvecTest(SimpleTestCase):

    def test_dimensiones_incompatibles(self):
        with self.assertRaises(InvalidArgumentError):
            matvec(sp.identity(3, format='csr'), np.ones(4))

    def test_producto(self):
        A = sp.csr_matrix(np.array([[2.0, 1.0], [1.0, 3.0]]))
        np.testing.assert_array_equal(matvec(A, [1.0, 1.0]), [3.0, 4.0])
