# -*- coding: utf-8 -*-
import math

import numpy as np
from django.test import SimpleTestCase

from fraccional.exceptions import InvalidArgumentError
from fraccional.services.error_metrics import fine_lattice
from fraccional.services.reference_solution import (
    custom_datum,
    eval_grid,
    eval_points,
    example_datum,
    make_series,
    manufactured_variable_diffusivity,
    named_custom_datum,
    sine_coefficients,
)


class CoefficientsTest(SimpleTestCase):
    """Pruebas para los coeficientes (u0, phi_mn) de los tres ejemplos."""

    def test_primer_coeficiente(self):
        self.assertAlmostEqual(example_datum('example1').coefficients(1)[0, 0], 32.0 / math.pi ** 6, places=15)
        self.assertAlmostEqual(example_datum('example2').coefficients(1)[0, 0], 8.0 / math.pi ** 4, places=15)
        self.assertAlmostEqual(example_datum('example3').coefficients(1)[0, 0], 8.0 / math.pi ** 2, places=15)

    def test_modos_pares_nulos(self):
        for tag in ('example1', 'example2', 'example3'):
            C = example_datum(tag).coefficients(8)
            self.assertFalse(np.any(C[1::2, :]))
            self.assertFalse(np.any(C[:, 1::2]))

    def test_signo_alternado_de_la_carpa(self):
        C = example_datum('example2').coefficients(5)
        self.assertGreater(C[0, 0], 0.0)
        self.assertLess(C[2, 0], 0.0)
        self.assertGreater(C[2, 2], 0.0)

    def test_cuadratura_reproduce_formas_cerradas(self):
        for tag in ('example1', 'example2'):
            datum = example_datum(tag)
            np.testing.assert_allclose(
                sine_coefficients(datum.evaluate, 9), datum.coefficients(9), atol=1e-10,
            )

    def test_dato_personalizado_usa_cuadratura(self):
        datum = named_custom_datum('seno')
        C = datum.coefficients(12)
        self.assertAlmostEqual(C[0, 0], 0.5, places=13)
        C[0, 0] = 0.0
        self.assertLess(np.max(np.abs(C)), 1e-13)

    def test_nombres_desconocidos(self):
        with self.assertRaises(InvalidArgumentError):
            example_datum('example4')
        with self.assertRaises(InvalidArgumentError):
            named_custom_datum('coseno')
        with self.assertRaises(InvalidArgumentError):
            example_datum('example1').coefficients(0)


class SeriesSolutionTest(SimpleTestCase):
    """Pruebas para la evaluacion de la serie exacta."""

    def test_reproduce_el_dato_inicial_en_t_cero(self):
        sol = make_series(example_datum('example1'), 0.75, 60)
        coarse = np.arange(1, 4) / 4.0
        X, Y = np.meshgrid(coarse, coarse)
        V = eval_grid(sol, 0.0, coarse)
        self.assertLessEqual(np.max(np.abs(V - X * (1 - X) * Y * (1 - Y))), 1e-6)

        ticks = fine_lattice(128).ticks
        X, Y = np.meshgrid(ticks, ticks)
        V = eval_grid(sol, 0.0, ticks)
        self.assertLessEqual(np.max(np.abs(V - X * (1 - X) * Y * (1 - Y))), 1e-5)

    def test_carpa_en_media_cuadratica(self):
        sol = make_series(example_datum('example2'), 0.75, 60)
        ticks = fine_lattice(128).ticks
        X, Y = np.meshgrid(ticks, ticks)
        exact = np.minimum(X, 1 - X) * np.minimum(Y, 1 - Y)
        rms = np.sqrt(np.mean((eval_grid(sol, 0.0, ticks) - exact) ** 2))
        self.assertLessEqual(rms, 2e-4)

    def test_alpha_uno_es_la_serie_del_calor(self):
        K = 12
        sol = make_series(example_datum('example1'), 1.0, K)
        t = 0.05
        expected = 2.0 * sol.coefficients * np.exp(-sol.eigenvalues * t)
        np.testing.assert_allclose(sol.decay(t), expected, rtol=1e-12, atol=1e-300)

    def test_simetrias(self):
        ticks = fine_lattice(32).ticks
        for tag in ('example1', 'example3'):
            V = eval_grid(make_series(example_datum(tag), 0.75, 30), 0.1, ticks)
            np.testing.assert_allclose(V, V.T, atol=1e-12)
            np.testing.assert_allclose(V, V[:, ::-1], atol=1e-12)

    def test_evaluacion_separable_contra_suma_directa(self):
        K = 10
        sol = make_series(example_datum('example2'), 0.5, K)
        ticks = np.linspace(0.1, 0.9, 9)
        t = 0.02
        D = sol.decay(t)
        naive = np.zeros((9, 9))
        for j, y in enumerate(ticks):
            for i, x in enumerate(ticks):
                for m in range(1, K + 1):
                    for n in range(1, K + 1):
                        naive[j, i] += D[m - 1, n - 1] * math.sin(m * math.pi * x) * math.sin(n * math.pi * y)
        np.testing.assert_allclose(eval_grid(sol, t, ticks), naive, atol=1e-14)

        X, Y = np.meshgrid(ticks, ticks)
        points = np.column_stack([X.ravel(), Y.ravel()])
        np.testing.assert_allclose(eval_points(sol, t, points), naive.ravel(), atol=1e-14)

    def test_truncamiento_en_60_modos(self):
        ticks = fine_lattice(64).ticks
        datum = example_datum('example1')
        short = eval_grid(make_series(datum, 0.75, 60), 0.1, ticks)
        long = eval_grid(make_series(datum, 0.75, 120), 0.1, ticks)
        self.assertLessEqual(np.max(np.abs(short - long)), 1e-8)

    def test_primer_modo_decrece(self):
        sol = make_series(example_datum('example3'), 0.75, 5)
        amplitudes = [sol.modal_amplitude(t) for t in (0.0, 0.01, 0.1, 0.5)]
        self.assertTrue(all(b < a for a, b in zip(amplitudes, amplitudes[1:])))
        self.assertAlmostEqual(amplitudes[0], 16.0 / math.pi ** 2, places=14)

    def test_tiempo_invalido(self):
        sol = make_series(example_datum('example1'), 0.75, 4)
        for t in (-0.1, float('nan')):
            with self.assertRaises(InvalidArgumentError):
                sol.decay(t)

    def test_dato_nulo(self):
        sol = make_series(custom_datum(lambda x, y: np.zeros_like(x)), 0.5, 6)
        self.assertFalse(np.any(eval_grid(sol, 0.3, fine_lattice(8).ticks)))


class ManufacturedProblemTest(SimpleTestCase):

    def test_fuente_en_t_cero_y_dato_inicial(self):
        problem = manufactured_variable_diffusivity(0.5)
        x = np.array([0.3, 0.5])
        y = np.array([0.7, 0.5])
        np.testing.assert_array_equal(problem.forcing(x, y, 0.0), 0.0)
        np.testing.assert_array_equal(problem.initial(x, y), 0.0)
        self.assertAlmostEqual(problem.exact(0.5, 0.5, 2.0), 4.0)
        self.assertAlmostEqual(problem.diffusivity(0.5, 0.5), 1.5)
