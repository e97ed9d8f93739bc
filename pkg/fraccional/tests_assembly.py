# -*- coding: utf-8 -*-
import tempfile
from pathlib import Path

import numpy as np
import scipy.io
from django.test import SimpleTestCase

from fraccional.exceptions import CoefficientRangeError, EvaluationError, InvalidArgumentError
from fraccional.services.assembly import (
    FieldP1,
    assemble_load,
    assemble_mass,
    assemble_stiffness,
    dump_matrix_market,
    l2_project,
    nodal_interpolant,
    ritz_project,
)
from fraccional.services.meshgen import build_mesh


class AssemblyTest(SimpleTestCase):
    """Pruebas para el ensamblaje de masa, rigidez y carga."""

    def test_valores_exactos_con_m2(self):
        mesh = build_mesh(2)
        # Un solo nodo interior rodeado por seis triangulos de area 1/8.
        self.assertAlmostEqual(assemble_mass(mesh)[0, 0], 1.0 / 8.0, places=15)
        self.assertAlmostEqual(assemble_stiffness(mesh)[0, 0], 4.0, places=14)
        self.assertAlmostEqual(assemble_load(mesh, 1.0)[0], 1.0 / 4.0, places=15)

    def test_masa_completa_suma_el_area(self):
        for M in (4, 8, 16):
            mass = assemble_mass(build_mesh(M), include_boundary=True)
            self.assertAlmostEqual(mass.sum(), 1.0, places=13)

    def test_rigidez_completa_anula_constantes(self):
        for M in (4, 8, 16):
            mesh = build_mesh(M)
            stiffness = assemble_stiffness(mesh, include_boundary=True)
            self.assertLess(np.max(np.abs(stiffness @ np.ones(mesh.n_nodes))), 1e-12)

    def test_matrices_simetricas(self):
        mesh = build_mesh(8)
        a = lambda x, y: 1.0 + x * y
        for matrix in (assemble_mass(mesh), assemble_stiffness(mesh, a)):
            self.assertLess(abs(matrix - matrix.T).max(), 1e-15)

    def test_rigidez_escala_con_el_coeficiente(self):
        mesh = build_mesh(4)
        diff = assemble_stiffness(mesh, 2.0) - 2.0 * assemble_stiffness(mesh)
        self.assertLess(abs(diff).max(), 1e-14)

    def test_coeficiente_invalido(self):
        mesh = build_mesh(4)
        with self.assertRaises(CoefficientRangeError):
            assemble_stiffness(mesh, -1.0)
        with self.assertRaises(CoefficientRangeError):
            assemble_stiffness(mesh, lambda x, y: np.where(x > 0.5, np.nan, 1.0))

    def test_carga_no_finita(self):
        with self.assertRaises(EvaluationError):
            assemble_load(build_mesh(4), lambda x, y: np.full_like(x, np.inf))

    def test_carga_exacta_para_polinomios_lineales(self):
        mesh = build_mesh(8)
        g = lambda x, y: x + 2.0 * y
        # g lineal: la regla de aristas es exacta y coincide con la masa completa.
        full_mass = assemble_mass(mesh, include_boundary=True)
        nodal = g(mesh.nodes[:, 0], mesh.nodes[:, 1])
        expected = (full_mass @ nodal)[mesh.interior_nodes]
        np.testing.assert_allclose(assemble_load(mesh, g), expected, rtol=1e-13)


class ProjectionTest(SimpleTestCase):
    """Pruebas para las proyecciones L2 y de Ritz."""

    def setUp(self):
        self.mesh = build_mesh(8)
        rng = np.random.default_rng(11)
        self.field = FieldP1(self.mesh, rng.standard_normal(self.mesh.n_interior))

    def test_l2_reproduce_funciones_de_vh(self):
        projected = l2_project(self.mesh, self.field.as_function())
        np.testing.assert_allclose(projected.values, self.field.values, atol=1e-11)

    def test_ritz_converge_en_los_nodos(self):
        g = lambda x, y: np.sin(np.pi * x) * np.sin(np.pi * y)
        grad = lambda x, y: (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
                             np.pi * np.sin(np.pi * x) * np.cos(np.pi * y))
        errors = []
        for M in (8, 16):
            mesh = build_mesh(M)
            exact = nodal_interpolant(mesh, g).values
            errors.append(np.max(np.abs(ritz_project(mesh, 1.0, g, grad).values - exact)))
        self.assertGreater(np.log2(errors[0] / errors[1]), 1.5)

    def test_ritz_rechaza_datos_no_nulos_en_la_frontera(self):
        with self.assertRaises(InvalidArgumentError):
            ritz_project(self.mesh, 1.0, lambda x, y: np.ones_like(x),
                         lambda x, y: (np.zeros_like(x), np.zeros_like(x)))

    def test_campo_con_tamano_incorrecto(self):
        with self.assertRaises(InvalidArgumentError):
            FieldP1(self.mesh, np.ones(3))

    def test_copia_independiente(self):
        copy = self.field.copy()
        copy.values[0] += 1.0
        self.assertNotEqual(copy.values[0], self.field.values[0])


class DumpMatrixMarketTest(SimpleTestCase):

    def test_exporta_y_relee(self):
        mass = assemble_mass(build_mesh(4))
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_matrix_market(mass, Path(tmp) / 'masa.mtx')
            self.assertTrue(path.read_text().startswith('%%MatrixMarket'))
            reread = scipy.io.mmread(str(path))
            self.assertLess(abs(reread.tocsr() - mass).max(), 1e-15)
