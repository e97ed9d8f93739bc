# -*- coding: utf-8 -*-
"""
Reproduccion de las tablas publicadas.

Las corridas completas (N = 1000 o 1300 pasos, M hasta 64) tardan varios
minutos; solo se ejecutan con FRACCIONAL_PRUEBAS_LENTAS=1.
"""
import os
import unittest

from django.test import SimpleTestCase, override_settings

from fraccional.presets import PUBLISHED_TABLES, get_preset
from fraccional.services.error_metrics import convergence_rates
from fraccional.services.experiments import run_experiment, run_manufactured, run_study
from fraccional.services.verification import variable_diffusivity_suite

PRUEBAS_LENTAS = os.environ.get('FRACCIONAL_PRUEBAS_LENTAS') == '1'

# Error relativo admitido en M=4 (malla con triangulos de esquina sin grados de libertad).
COARSE_TOLERANCE = 0.10


class VariableDiffusivityTest(SimpleTestCase):
    """Problema manufacturado con a(x) variable: orden espacial cercano a 2."""

    def test_error_decrece_con_la_malla(self):
        coarse = run_manufactured(8, N=100)
        fine = run_manufactured(16, N=100)
        self.assertLess(fine, coarse / 3.0)

    @unittest.skipUnless(PRUEBAS_LENTAS, 'FRACCIONAL_PRUEBAS_LENTAS=1 para corridas largas')
    def test_orden_espacial(self):
        result = variable_diffusivity_suite()
        self.assertTrue(result.passed, result.failures())


@unittest.skipUnless(PRUEBAS_LENTAS, 'FRACCIONAL_PRUEBAS_LENTAS=1 para corridas largas')
@override_settings(FRACCIONAL_SHOW_PROGRESS=False)
class PublishedTablesTest(SimpleTestCase):
    """Errores y tasas de las tablas publicadas dentro de tolerancias holgadas."""

    def _study(self, name):
        reports = run_study(get_preset(name), parallel=False, show_progress=False)
        published = PUBLISHED_TABLES[name]
        return reports, published

    def test_un_solo_m_del_ejemplo_1(self):
        report = run_experiment(get_preset('table1'), 8, show_progress=False)
        self.assertAlmostEqual(report.weighted[0.0], 3.3749e-3, delta=0.05 * 3.3749e-3)

    def test_tabla_1(self):
        reports, published = self._study('table1')
        errors = [r.weighted[0.0] for r in reports]
        for report, error in zip(reports, errors):
            target = published['errors'][report.M][0]
            tolerance = COARSE_TOLERANCE if report.M == 4 else 0.05
            self.assertAlmostEqual(error, target, delta=tolerance * target, msg=f'M={report.M}')
        for M, rate in zip([r.M for r in reports][1:], convergence_rates(errors)):
            if M >= 16:
                self.assertAlmostEqual(rate, published['rates'][M][0], delta=0.05, msg=f'M={M}')

    def test_tabla_2(self):
        reports, published = self._study('table2')
        for col, mu in enumerate(published['mu']):
            if mu < 0.5:
                continue
            errors = [r.weighted[mu] for r in reports]
            for report, error in zip(reports, errors):
                target = published['errors'][report.M][col]
                self.assertAlmostEqual(error, target, delta=0.1 * target)
            for M, rate in zip([r.M for r in reports][1:], convergence_rates(errors)):
                if M >= 16:
                    self.assertAlmostEqual(rate, published['rates'][M][col], delta=0.2)

    def test_tabla_3(self):
        reports, published = self._study('table3')
        for report in reports:
            target = published['errors'][report.M][3]
            self.assertAlmostEqual(report.weighted[1.0], target, delta=0.1 * target)
            self.assertGreater(report.weighted[0.0] / report.weighted[1.0], 100.0)
