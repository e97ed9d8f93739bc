# -*- coding: utf-8 -*-
import csv
import math
import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from fraccional.exceptions import InvalidArgumentError, UndefinedRateError
from fraccional.presets import PUBLISHED_TABLES
from fraccional.services import frac_stepper
from fraccional.services.assembly import l2_project, nodal_interpolant
from fraccional.services.error_metrics import (
    ErrorReport,
    StreamingErrorObserver,
    check_nesting,
    convergence_rates,
    fine_lattice,
    pairwise_rates,
    step_error,
    weighted_errors,
    write_summary_csv,
)
from fraccional.services.exports import format_table, table_rows, write_gnuplot_script, write_step_csvs
from fraccional.services.meshgen import build_mesh, interpolation_matrix
from fraccional.services.reference_solution import eval_grid, example_datum, make_series
from fraccional.services.verification import published_rates_suite


class FineLatticeTest(SimpleTestCase):

    def test_conteos(self):
        self.assertEqual(fine_lattice(128).size, 127 * 127)
        lattice = fine_lattice(2)
        np.testing.assert_array_equal(lattice.points, [[0.5, 0.5]])

    def test_orden_por_filas(self):
        lattice = fine_lattice(4)
        np.testing.assert_allclose(lattice.points[:4], [[0.25, 0.25], [0.5, 0.25], [0.75, 0.25], [0.25, 0.5]])

    def test_anidamiento(self):
        check_nesting(8, 128)
        check_nesting(16, 16)
        for M, M_s in ((8, 100), (8, 24), (16, 8)):
            with self.assertRaises(InvalidArgumentError):
                check_nesting(M, M_s)
        with self.assertRaises(InvalidArgumentError):
            fine_lattice(1)


class StepErrorTest(SimpleTestCase):
    """Pruebas para `step_error`."""

    def test_cero_en_nodos_compartidos(self):
        mesh = build_mesh(8)
        g = lambda x, y: np.sin(np.pi * x) * y * (1 - y)
        lattice = fine_lattice(8)
        exact = g(lattice.points[:, 0], lattice.points[:, 1])
        self.assertLessEqual(step_error(nodal_interpolant(mesh, g), exact, lattice), 1e-15)

    def test_exacta_nula_da_el_maximo_discreto(self):
        mesh = build_mesh(4)
        field = nodal_interpolant(mesh, lambda x, y: x * y * (1 - x) * (1 - y))
        lattice = fine_lattice(16)
        error = step_error(field, np.zeros(lattice.size), lattice)
        self.assertAlmostEqual(error, 0.25 ** 2, places=15)

    def test_operador_reutilizado(self):
        mesh = build_mesh(4)
        lattice = fine_lattice(16)
        field = nodal_interpolant(mesh, lambda x, y: x * (1 - x) * y * (1 - y))
        exact = np.full(lattice.size, 0.01)
        interpolation = interpolation_matrix(mesh, lattice.points)
        self.assertEqual(step_error(field, exact, lattice, interpolation),
                         step_error(field, exact, lattice))

    def test_tamano_incorrecto(self):
        mesh = build_mesh(4)
        with self.assertRaises(InvalidArgumentError):
            step_error(nodal_interpolant(mesh, 0.0), np.zeros(10), fine_lattice(16))


class WeightedErrorsTest(SimpleTestCase):
    """Pruebas para E_mu y las tasas de convergencia."""

    def test_una_fila(self):
        self.assertEqual(weighted_errors([(1, 0.5, 2.0)], [1.0]), {1.0: 1.0})

    def test_mu_cero_es_el_maximo(self):
        rows = [(1, 0.01, 3.0), (2, 0.1, 1.0), (3, 0.5, 0.5)]
        weighted = weighted_errors(rows, [0.0, 0.5, 1.0])
        self.assertEqual(weighted[0.0], 3.0)
        self.assertAlmostEqual(weighted[1.0], 0.25)
        # Con t <= 1 el peso t^mu no aumenta con mu.
        self.assertGreaterEqual(weighted[0.0], weighted[0.5])
        self.assertGreaterEqual(weighted[0.5], weighted[1.0])

    def test_sin_filas(self):
        with self.assertRaises(InvalidArgumentError):
            weighted_errors([], [0.0])

    def test_tasas(self):
        self.assertAlmostEqual(convergence_rates([1.2759e-2, 3.3749e-3])[0], 1.9186, delta=5e-5)
        self.assertEqual(convergence_rates([4.0, 1.0]), [2.0])
        self.assertEqual(convergence_rates([1e-3, 1e-3]), [0.0])

    def test_tasa_indefinida(self):
        for errors in ([1.0, 0.0], [0.0, 1.0], [-1.0, 1.0], [1.0, float('nan')]):
            with self.assertRaises(UndefinedRateError):
                convergence_rates(errors)
        self.assertEqual(pairwise_rates([1.0, 0.0, 0.0]), [None, None])
        with self.assertRaises(InvalidArgumentError):
            convergence_rates([1.0])

    def test_aritmetica_de_las_tablas_publicadas(self):
        result = published_rates_suite()
        self.assertTrue(result.passed, result.failures())

    def test_tasa_mal_impresa_de_la_tabla_2(self):
        errors = PUBLISHED_TABLES['table2']['errors']
        self.assertAlmostEqual(math.log2(errors[8][0] / errors[16][0]), 0.954, delta=2e-3)

    def test_suite_detecta_tasas_alteradas(self):
        table = {
            'alterada': {
                'mu': [0.0],
                'errors': {4: [4.0], 8: [1.0]},
                'rates': {8: [1.5]},
            },
        }
        self.assertFalse(published_rates_suite(table).passed)

    def test_tabla_3_peso_mu_uno_domina(self):
        for row in PUBLISHED_TABLES['table3']['errors'].values():
            self.assertGreater(row[0] / row[3], 100.0)


class StreamingObserverTest(SimpleTestCase):
    """El maximo incremental coincide con el calculo a posteriori."""

    def setUp(self):
        self.mesh = build_mesh(8)
        self.lattice = fine_lattice(32)
        datum = example_datum('example1')
        self.series = make_series(datum, 0.75, 20)
        self.u0 = l2_project(self.mesh, datum.evaluate)
        self.time_mesh = frac_stepper.build_time_mesh(30, 1.6, 0.5)

    def _observer(self, mu_list):
        return StreamingErrorObserver(
            self.mesh, self.lattice, lambda t: eval_grid(self.series, t, self.lattice.ticks), mu_list=mu_list,
        )

    def test_incremental_igual_a_posteriori(self):
        observer = self._observer([0.0, 0.5, 1.0])
        frac_stepper.run(self.mesh, self.time_mesh, 0.75, 1.0, self.u0, observer=observer)
        self.assertEqual(len(observer.rows), 30)
        posthoc = weighted_errors(observer.rows, [0.0, 0.5, 1.0])
        report = observer.report(8, 30, 1.6, 0.75, 'example1')
        self.assertEqual(report.M_s, 32)
        for mu, value in observer.running.items():
            self.assertAlmostEqual(value, posthoc[mu], delta=1e-15 * value)
            self.assertAlmostEqual(value, report.weighted[mu], delta=1e-15 * value)
        self.assertEqual(report.max_error, observer.running[0.0])

    def test_error_simetrico_en_x_y(self):
        captured = {}

        def keep_last(n, t, values):
            captured['values'] = np.array(values)

        frac_stepper.run(self.mesh, self.time_mesh, 0.75, 1.0, self.u0, observer=keep_last)
        side = self.lattice.ticks.size
        discrete = (interpolation_matrix(self.mesh, self.lattice.points) @ captured['values']).reshape(side, side)
        np.testing.assert_allclose(discrete, discrete.T, atol=1e-12)


class ErrorReportTest(SimpleTestCase):

    def _report(self):
        rows = [(1, 0.1, 0.02), (2, 0.3, 0.01), (3, 0.5, 0.004)]
        return ErrorReport(M=8, N=3, gamma=1.6, alpha=0.75, tag='example1', M_s=128,
                           mu_list=[0.0, 1.0], rows=rows).finalize()

    def test_diccionario_ida_y_vuelta(self):
        report = self._report()
        again = ErrorReport.from_dict(report.to_dict())
        self.assertEqual(again.rows, report.rows)
        self.assertEqual(again.weighted, report.weighted)

    def test_csv_por_paso(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = self._report().write_csv(Path(tmp) / 'errores.csv')
            with path.open() as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ['n', 't', 'err'])
        self.assertEqual(rows[1], ['1', '0.1', '0.02'])
        self.assertEqual(len(rows), 4)

    def test_resumen_con_tasas(self):
        coarse = self._report()
        fine = ErrorReport(M=16, N=3, gamma=1.6, alpha=0.75, tag='example1', M_s=128,
                           mu_list=[0.0, 1.0], rows=[(1, 0.1, 0.005), (2, 0.3, 0.0025), (3, 0.5, 0.001)]).finalize()
        with tempfile.TemporaryDirectory() as tmp:
            path = write_summary_csv([fine, coarse], Path(tmp) / 'resumen.csv', [0.0, 1.0])
            with path.open() as handle:
                rows = list(csv.reader(handle))
        self.assertEqual(rows[0], ['M', 'E_0', 'E_1', 'CR_0', 'CR_1'])
        self.assertEqual(rows[1][0], '8')
        self.assertEqual(rows[1][3:], ['', ''])
        self.assertAlmostEqual(float(rows[2][3]), 2.0)


class ExportsTest(SimpleTestCase):
    """Pruebas para la tabla de texto y el script de gnuplot."""

    def setUp(self):
        self.reports = [
            ErrorReport(M=M, N=1, gamma=1.0, alpha=0.75, tag='example1', M_s=128,
                        mu_list=[0.0], rows=[(1, 0.5, err)]).finalize()
            for M, err in ((8, 3.3749e-3), (4, 1.2759e-2))
        ]

    def test_filas_ordenadas_con_tasas(self):
        rows = table_rows(self.reports, [0.0])
        self.assertEqual([row[0] for row in rows], [4, 8])
        self.assertIsNone(rows[0][2])
        self.assertAlmostEqual(rows[1][2], 1.9186, delta=5e-5)

    def test_tabla_de_texto(self):
        text = format_table(self.reports, [0.0], title='table1')
        lines = text.splitlines()
        self.assertEqual(lines[0], 'table1')
        self.assertIn('1.2759e-02', text)
        self.assertIn('1.9186', text)

    def test_script_de_gnuplot(self):
        with tempfile.TemporaryDirectory() as tmp:
            paths = write_step_csvs(self.reports, tmp, 'figure1')
            script = write_gnuplot_script(paths, Path(tmp) / 'figure1.gp').read_text()
        self.assertEqual([p.name for p in paths], ['figure1_M4.csv', 'figure1_M8.csv'])
        self.assertIn("'figure1_M4.csv' every ::1 using 2:3 with lines title 'figure1_M4'", script)
