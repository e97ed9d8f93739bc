# -*- coding: utf-8 -*-
import csv
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from fraccional.exceptions import InvalidArgumentError, OutOfDomainError
from fraccional.services.assembly import nodal_interpolant
from fraccional.services.meshgen import (
    build_mesh,
    dump_mesh_csv,
    evaluate_field,
    interpolation_matrix,
    locate_point,
    locate_points,
)


class BuildMeshTest(SimpleTestCase):
    """Pruebas para `build_mesh`."""

    def test_conteos_para_m4(self):
        mesh = build_mesh(4)
        self.assertEqual(mesh.n_nodes, 25)
        self.assertEqual(mesh.n_triangles, 32)
        self.assertEqual(mesh.n_interior, 9)
        self.assertAlmostEqual(mesh.h, np.sqrt(2) / 4)

    def test_areas_positivas_e_iguales(self):
        mesh = build_mesh(8)
        areas = mesh.signed_areas()
        self.assertTrue(np.all(areas > 0))
        np.testing.assert_allclose(areas, mesh.triangle_area, rtol=1e-14)
        self.assertAlmostEqual(areas.sum(), 1.0, places=14)

    def test_orden_de_triangulos_en_cada_cuadro(self):
        mesh = build_mesh(4)
        # Cuadro 0: bajo la diagonal (v00, v10, v11), luego (v00, v11, v01).
        self.assertEqual(list(mesh.triangles[0]), [0, 1, 6])
        self.assertEqual(list(mesh.triangles[1]), [0, 6, 5])

    def test_grados_de_libertad_en_orden_por_filas(self):
        mesh = build_mesh(3)
        points = mesh.interior_points()
        expected = np.array([[1, 1], [2, 1], [1, 2], [2, 2]]) / 3.0
        np.testing.assert_allclose(points, expected)
        self.assertEqual(mesh.interior_index[mesh.interior_nodes[2]], 2)
        self.assertTrue(np.all(mesh.interior_index[mesh.boundary_mask] == -1))

    def test_arreglos_de_solo_lectura(self):
        mesh = build_mesh(2)
        with self.assertRaises(ValueError):
            mesh.nodes[0, 0] = 1.0

    def test_triangulos_de_esquina_sin_grados_de_libertad(self):
        mesh = build_mesh(4)
        corner = mesh.boundary_mask[mesh.triangles].all(axis=1)
        self.assertEqual(int(corner.sum()), 2)
        centroids = mesh.nodes[mesh.triangles[corner]].mean(axis=1)
        np.testing.assert_allclose(sorted(map(tuple, centroids)), [(1 / 12, 11 / 12), (11 / 12, 1 / 12)])
        # Cualquier funcion discreta se anula en esos triangulos.
        values = evaluate_field(mesh, np.ones(mesh.n_interior), centroids)
        np.testing.assert_array_equal(values, 0.0)

    def test_m_invalido(self):
        for M in (1, 0, -3, 2.5, True):
            with self.assertRaises(InvalidArgumentError):
                build_mesh(M)


class LocatePointTest(SimpleTestCase):
    """Pruebas para la ubicacion de puntos y las coordenadas baricentricas."""

    def setUp(self):
        self.mesh = build_mesh(4)

    def test_baricentricas_reproducen_el_punto(self):
        rng = np.random.default_rng(3)
        points = rng.random((200, 2))
        tri, bary = locate_points(self.mesh, points)
        self.assertTrue(np.all(bary >= -1e-14))
        np.testing.assert_allclose(bary.sum(axis=1), 1.0, rtol=1e-14)
        vertices = self.mesh.nodes[self.mesh.triangles[tri]]
        rebuilt = np.einsum('pk,pkd->pd', bary, vertices)
        np.testing.assert_allclose(rebuilt, points, atol=1e-14)

    def test_centro_con_m2(self):
        tri, bary = locate_point(build_mesh(2), (0.5, 0.5))
        self.assertEqual(tri, 0)
        np.testing.assert_allclose(bary, [0.0, 0.0, 1.0])

    def test_esquinas(self):
        tri, bary = locate_point(self.mesh, (0.0, 0.0))
        self.assertEqual(tri, 0)
        np.testing.assert_allclose(bary, [1.0, 0.0, 0.0])
        tri, _ = locate_point(self.mesh, (1.0, 1.0))
        self.assertIn(tri, (2 * 15, 2 * 15 + 1))

    def test_arista_compartida_va_al_menor_indice(self):
        # x = 0.25 es frontera entre los cuadros 0 y 1 de la primera fila.
        tri, _ = locate_point(self.mesh, (0.25, 0.1))
        self.assertEqual(tri, 0)

    def test_fuera_del_dominio(self):
        for point in ((1.2, 0.5), (-0.01, 0.3), (np.nan, 0.5)):
            with self.assertRaises(OutOfDomainError):
                locate_point(self.mesh, point)


class InterpolationTest(SimpleTestCase):
    """Pruebas para `interpolation_matrix` y `evaluate_field`."""

    def test_reproduce_valores_nodales(self):
        mesh = build_mesh(8)
        g = lambda x, y: x * (1 - x) * y * (1 - y)
        field = nodal_interpolant(mesh, g)
        values = evaluate_field(mesh, field.values, mesh.interior_points())
        np.testing.assert_allclose(values, field.values, atol=1e-15)

    def test_cero_en_la_frontera(self):
        mesh = build_mesh(4)
        values = evaluate_field(mesh, np.ones(mesh.n_interior), [[0.0, 0.3], [1.0, 0.7], [0.5, 0.0]])
        np.testing.assert_allclose(values, 0.0)

    def test_filas_suman_a_lo_sumo_uno(self):
        mesh = build_mesh(4)
        points = np.random.default_rng(0).random((50, 2))
        matrix = interpolation_matrix(mesh, points)
        self.assertEqual(matrix.shape, (50, mesh.n_interior))
        self.assertTrue(np.all(np.asarray(matrix.sum(axis=1)).ravel() <= 1.0 + 1e-14))

    def test_tamano_incorrecto(self):
        mesh = build_mesh(4)
        with self.assertRaises(InvalidArgumentError):
            evaluate_field(mesh, np.ones(5), [[0.5, 0.5]])


class DumpMeshCsvTest(SimpleTestCase):

    def test_escribe_nodos_y_triangulos(self):
        mesh = build_mesh(3)
        with tempfile.TemporaryDirectory() as tmp:
            nodes_path, tris_path = dump_mesh_csv(mesh, Path(tmp) / 'malla')
            with nodes_path.open() as handle:
                rows = list(csv.reader(handle))
            self.assertEqual(len(rows), 16)
            self.assertEqual(rows[5], ['5', '0.3333333333333333', '0.3333333333333333'])
            with tris_path.open() as handle:
                self.assertEqual(len(list(csv.reader(handle))), 18)
