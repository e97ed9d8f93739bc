# -*- coding: utf-8 -*-
import math

import numpy as np
from django.test import SimpleTestCase, override_settings
from scipy import special

from fraccional.exceptions import GammaPoleError, InvalidArgumentError
from fraccional.services.mittag_leffler import (
    REGIME_ASYMPTOTIC,
    REGIME_EXPONENTIAL,
    REGIME_INTEGRAL,
    REGIME_SERIES,
    MlfEvaluator,
    gamma,
    mlf,
)
from fraccional.services.verification import mittag_leffler_suite, mlf_reference


class GammaTest(SimpleTestCase):

    def test_valores_conocidos(self):
        self.assertAlmostEqual(gamma(0.5), math.sqrt(math.pi), places=14)
        self.assertAlmostEqual(gamma(5.0), 24.0, places=12)
        np.testing.assert_allclose(gamma(np.array([1.5, 2.5])), [math.sqrt(math.pi) / 2, 3 * math.sqrt(math.pi) / 4])

    def test_polos(self):
        for x in (0.0, -1.0, -2.0):
            with self.assertRaises(GammaPoleError):
                gamma(x)


class MittagLefflerTest(SimpleTestCase):
    """Pruebas para E_alpha(-x) en sus tres regimenes."""

    def test_alpha_uno_es_la_exponencial(self):
        evaluator = MlfEvaluator.create(1.0)
        xs = np.linspace(0.0, 50.0, 201)
        np.testing.assert_allclose(mlf(evaluator, xs), np.exp(-xs), rtol=0, atol=1e-12)
        self.assertEqual(evaluator.regime_of(3.0), REGIME_EXPONENTIAL)

    def test_alpha_medio_es_erfcx(self):
        evaluator = MlfEvaluator.create(0.5)
        self.assertAlmostEqual(mlf(evaluator, 1.0), math.e * math.erfc(1.0), delta=1e-10)
        xs = np.array([0.01, 0.3, 2.0, 7.5, 30.0, 80.0, 400.0])
        np.testing.assert_allclose(mlf(evaluator, xs), special.erfcx(xs), rtol=0, atol=1e-10)

    def test_valor_en_cero(self):
        for alpha in (0.25, 0.75):
            self.assertEqual(mlf(MlfEvaluator.create(alpha), 0.0), 1.0)

    def test_regimenes(self):
        evaluator = MlfEvaluator.create(0.75, x_lo=5.0, x_hi=50.0)
        self.assertEqual(evaluator.regime_of(5.0), REGIME_SERIES)
        self.assertEqual(evaluator.regime_of(20.0), REGIME_INTEGRAL)
        self.assertEqual(evaluator.regime_of(50.0), REGIME_ASYMPTOTIC)

    def test_umbral_de_la_serie_se_adapta(self):
        self.assertEqual(MlfEvaluator.create(0.75).x_lo, 5.0)
        self.assertEqual(MlfEvaluator.create(0.5).x_lo, 2.5)
        self.assertEqual(MlfEvaluator.create(0.25).x_lo, 1.25)

    def test_continuidad_entre_regimenes(self):
        for alpha in (0.25, 0.5, 0.75, 0.95):
            evaluator = MlfEvaluator.create(alpha)
            lo, hi = evaluator.x_lo, evaluator.x_hi
            self.assertLessEqual(abs(evaluator.series(lo)[0] - evaluator.integral(lo)[0]), 1e-9)
            self.assertLessEqual(abs(evaluator.integral(hi)[0] - evaluator.asymptotic(hi)[0]), 1e-9)

    def test_monotona_y_en_el_intervalo_unitario(self):
        xs = np.concatenate([[0.0], np.geomspace(1e-3, 1e4, 300)])
        for alpha in (0.3, 0.75):
            values = mlf(MlfEvaluator.create(alpha), xs)
            self.assertTrue(np.all(values > 0.0))
            self.assertTrue(np.all(values <= 1.0))
            self.assertLessEqual(np.max(np.diff(values)), 1e-14)

    def test_contra_precision_extendida(self):
        for alpha, x in ((0.75, 0.5), (0.75, 3.0), (0.75, 8.0), (0.9, 12.0), (0.5, 6.0)):
            value = mlf(MlfEvaluator.create(alpha), x)
            self.assertAlmostEqual(value, mlf_reference(alpha, x), delta=1e-10)

    def test_cola_con_error_relativo(self):
        for alpha, x in ((0.75, 20.0), (0.75, 35.0), (0.95, 20.0), (0.95, 35.0)):
            reference = mlf_reference(alpha, x)
            value = mlf(MlfEvaluator.create(alpha), x)
            self.assertLessEqual(abs(value / reference - 1.0), 1e-8, f'alpha={alpha}, x={x}')

        xs = np.linspace(10.0, 50.0, 41)
        np.testing.assert_allclose(mlf(MlfEvaluator.create(0.5), xs), special.erfcx(xs), rtol=1e-9, atol=0.0)

    def test_forma_del_arreglo(self):
        evaluator = MlfEvaluator.create(0.75)
        xs = np.array([[0.1, 10.0, 100.0], [1.0, 20.0, 1e3]])
        values = mlf(evaluator, xs)
        self.assertEqual(values.shape, (2, 3))
        self.assertAlmostEqual(values[1, 1], mlf(evaluator, 20.0), places=15)

    def test_integral_en_varios_bloques(self):
        evaluator = MlfEvaluator.create(0.75)
        xs = np.linspace(6.0, 49.0, 3000)
        values = evaluator.integral(xs)
        for index in (0, 2047, 2048, 2999):
            self.assertAlmostEqual(values[index], evaluator.integral(xs[index])[0], delta=1e-12)

    def test_argumentos_invalidos(self):
        evaluator = MlfEvaluator.create(0.75)
        for x in (-1.0, np.nan, np.inf):
            with self.assertRaises(InvalidArgumentError):
                mlf(evaluator, x)
        for alpha in (0.0, 1.5, -0.2):
            with self.assertRaises(InvalidArgumentError):
                MlfEvaluator.create(alpha)

    @override_settings(FRACCIONAL_MLF_X_HI=80.0)
    def test_umbral_alto_desde_settings(self):
        self.assertEqual(MlfEvaluator.create(0.75).x_hi, 80.0)


class MittagLefflerSuiteTest(SimpleTestCase):
    """La suite de funciones especiales pasa con los umbrales por defecto y detecta fallas inyectadas."""

    def test_suite_pasa(self):
        result = mittag_leffler_suite()
        self.assertTrue(result.passed, result.failures())
        descriptions = [description for description, _, _ in result.checks]
        self.assertIn('E_0.75(-35.0) contra mpmath', descriptions)
        self.assertIn('E_0.95(-20.0) contra mpmath', descriptions)

    def test_umbral_alto_muy_bajo_rompe_la_continuidad(self):
        result = mittag_leffler_suite(x_hi=6.0)
        self.assertFalse(result.passed)
        self.assertTrue(any('alpha=0.95' in description for description, _, _ in result.failures()))
