# -*- coding: utf-8 -*-
import math

import numpy as np
from django.test import SimpleTestCase

from fraccional.exceptions import InvalidArgumentError, NumericalBlowupError
from fraccional.services import frac_stepper
from fraccional.services.assembly import FieldP1, assemble_mass, assemble_stiffness, l2_project
from fraccional.services.meshgen import build_mesh
from fraccional.services.reference_solution import example_datum
from fraccional.services.verification import (
    heat_limit_gap,
    leibniz_residual,
    power_rule_error,
    product_residual,
    sampled_positivity,
)


class _Contador:
    def __init__(self):
        self.total = 0

    def update(self, amount):
        self.total += amount


class TimeMeshTest(SimpleTestCase):
    """Pruebas para `build_time_mesh`."""

    def test_malla_graduada_pequena(self):
        mesh = frac_stepper.build_time_mesh(2, 2.0, 1.0)
        np.testing.assert_allclose(mesh.nodes, [0.0, 0.25, 1.0])
        np.testing.assert_allclose(mesh.steps, [0.25, 0.75])
        np.testing.assert_allclose(mesh.midpoints(), [0.125, 0.625])

    def test_malla_de_las_tablas(self):
        mesh = frac_stepper.build_time_mesh(1000, 1.6, 0.5)
        self.assertEqual(mesh.nodes[-1], 0.5)
        self.assertAlmostEqual(mesh.nodes[1], 0.5 * 1000 ** -1.6, places=18)
        self.assertTrue(np.all(np.diff(mesh.steps) > 0))

    def test_malla_uniforme(self):
        mesh = frac_stepper.build_time_mesh(4, 1.0, 2.0)
        np.testing.assert_allclose(mesh.steps, 0.5)

    def test_parametros_invalidos(self):
        for args in ((0, 1.0, 1.0), (4, 0.5, 1.0), (4, 1.0, 0.0), (4, 1.0, float('nan'))):
            with self.assertRaises(InvalidArgumentError):
                frac_stepper.build_time_mesh(*args)


class FracWeightsTest(SimpleTestCase):
    """Pruebas para los pesos de la integral fraccional."""

    def test_constante_uno_con_alpha_medio(self):
        mesh = frac_stepper.build_time_mesh(64, 1.0, 1.0)
        weights = frac_stepper.frac_weights(mesh, 0.5)
        value = frac_stepper.apply_frac_integral(weights, np.ones(64))[-1]
        self.assertAlmostEqual(value, 2.0 / math.sqrt(math.pi), places=13)

    def test_pesos_positivos_y_triangulares(self):
        mesh = frac_stepper.build_time_mesh(50, 1.6, 0.5)
        weights = frac_stepper.frac_weights(mesh, 0.75)
        lower = np.tril(np.ones((50, 50), dtype=bool))
        self.assertTrue(np.all(weights.weights[lower] > 0.0))
        self.assertFalse(np.any(weights.weights[~lower]))
        self.assertAlmostEqual(weights.row(3)[-1], mesh.steps[2] ** 0.75 / math.gamma(1.75), places=15)
        self.assertEqual(weights.increment_row(5).size, 5)

    def test_incrementos_de_historia_negativos(self):
        # c_{n,j} < 0 para j < n: la memoria pesa cada vez menos.
        mesh = frac_stepper.build_time_mesh(30, 1.6, 0.5)
        weights = frac_stepper.frac_weights(mesh, 0.5)
        for n in range(2, 31):
            self.assertTrue(np.all(weights.increment_row(n)[:-1] < 0.0))

    def test_alpha_fuera_de_rango(self):
        mesh = frac_stepper.build_time_mesh(10, 1.0, 1.0)
        for alpha in (0.0, 1.0, 1.2):
            with self.assertRaises(InvalidArgumentError):
                frac_stepper.frac_weights(mesh, alpha)


class QuadratureTest(SimpleTestCase):
    """Pruebas para las cuadraturas escalares en el tiempo."""

    def test_derivada_de_constante_y_de_lineal(self):
        mesh = frac_stepper.build_time_mesh(40, 1.6, 1.0)
        weights = frac_stepper.frac_weights(mesh, 0.3)
        t = np.asarray(mesh.nodes)
        np.testing.assert_allclose(
            frac_stepper.riemann_liouville_derivative(weights, np.ones(41)),
            t[1:] ** -0.7 / math.gamma(0.3), rtol=1e-13,
        )
        np.testing.assert_allclose(
            frac_stepper.riemann_liouville_derivative(weights, t),
            t[1:] ** 0.3 / math.gamma(1.3), rtol=1e-12,
        )

    def test_integral_acumulada_exacta_para_lineales(self):
        mesh = frac_stepper.build_time_mesh(20, 2.0, 1.0)
        t = np.asarray(mesh.nodes)
        np.testing.assert_allclose(frac_stepper.cumulative_integral(mesh, 3.0 * t), 1.5 * t ** 2, atol=1e-13)

    def test_orden_de_la_regla_de_potencias(self):
        for alpha in (0.3, 0.5, 0.75):
            errors = [power_rule_error(alpha, N) for N in (250, 500, 1000)]
            orders = [math.log2(a / b) for a, b in zip(errors, errors[1:])]
            self.assertGreaterEqual(min(orders), 1.0, f"alpha={alpha}: {orders}")

    def test_identidades_de_leibniz_y_producto(self):
        for residual in (leibniz_residual, product_residual):
            values = [residual(0.75, N, np.sin) for N in (64, 128, 256)]
            orders = [math.log2(a / b) for a, b in zip(values, values[1:])]
            self.assertGreaterEqual(min(orders), 1.0, residual.__name__)

    def test_positividad_en_malla_uniforme(self):
        mesh = frac_stepper.build_time_mesh(60, 1.0, 1.0)
        for alpha in (0.2, 0.5, 0.9):
            B = frac_stepper.frac_weights(mesh, alpha).weights
            smallest = np.linalg.eigvalsh(0.5 * (B + B.T)).min()
            self.assertGreaterEqual(smallest, -1e-14)

    def test_positividad_con_vectores_aleatorios(self):
        rng = np.random.default_rng(5)
        mesh = frac_stepper.build_time_mesh(200, 1.6, 0.5)
        weights = frac_stepper.frac_weights(mesh, 0.75)
        for _ in range(100):
            self.assertGreaterEqual(frac_stepper.positivity_form(weights, rng.standard_normal(200)), -1e-10)

    def test_semilla_de_las_historias_aleatorias(self):
        weights = frac_stepper.frac_weights(frac_stepper.build_time_mesh(200, 1.6, 0.5), 0.5)
        first = sampled_positivity(weights, seed=0)
        self.assertEqual(sampled_positivity(weights, seed=0), first)
        self.assertNotEqual(sampled_positivity(weights, seed=1), first)
        self.assertGreaterEqual(min(first, sampled_positivity(weights, seed=1)), -1e-10)

    def test_tamano_incorrecto(self):
        weights = frac_stepper.frac_weights(frac_stepper.build_time_mesh(10, 1.0, 1.0), 0.5)
        with self.assertRaises(InvalidArgumentError):
            frac_stepper.apply_frac_integral(weights, np.ones(9))
        with self.assertRaises(InvalidArgumentError):
            frac_stepper.riemann_liouville_derivative(weights, np.ones(10))


class SchemeTest(SimpleTestCase):
    """Pruebas del esquema de Crank-Nicolson generalizado."""

    def setUp(self):
        self.mesh = build_mesh(8)
        self.mass = assemble_mass(self.mesh)
        self.stiffness = assemble_stiffness(self.mesh)
        self.u0 = l2_project(self.mesh, example_datum('example1').evaluate, mass=self.mass)

    def _run(self, **kwargs):
        options = dict(alpha=0.5, N=40, gamma=1.6, T=0.5)
        options.update(kwargs)
        time_mesh = frac_stepper.build_time_mesh(options.pop('N'), options.pop('gamma'), options.pop('T'))
        return frac_stepper.run(self.mesh, time_mesh, options.pop('alpha'), 1.0, self.u0,
                                mass=self.mass, stiffness=self.stiffness, **options)

    def test_dato_nulo_se_mantiene_nulo(self):
        zero = FieldP1(self.mesh, np.zeros(self.mesh.n_interior))
        time_mesh = frac_stepper.build_time_mesh(10, 1.6, 0.5)
        state = frac_stepper.run(self.mesh, time_mesh, 0.75, 1.0, zero)
        self.assertFalse(np.any(state.solutions))

    def test_un_grado_de_libertad_un_paso(self):
        mesh = build_mesh(2)
        time_mesh = frac_stepper.build_time_mesh(1, 1.0, 1.0)
        state = frac_stepper.run(mesh, time_mesh, 0.5, 1.0, FieldP1(mesh, [1.0]))
        c11 = 2.0 / math.sqrt(math.pi)
        self.assertAlmostEqual(state.solutions[1, 0], 0.125 / (0.125 + 4.0 * c11), places=13)

    def test_un_grado_de_libertad_dos_pasos(self):
        mesh = build_mesh(2)
        alpha = 0.5
        time_mesh = frac_stepper.build_time_mesh(2, 1.0, 1.0)
        state = frac_stepper.run(mesh, time_mesh, alpha, 1.0, FieldP1(mesh, [1.0]))

        m, s, tau = 0.125, 4.0, 0.5
        g = math.gamma(alpha + 1.0)
        b11 = tau ** alpha / g
        b21 = (1.0 - tau ** alpha) / g
        u1 = (m / tau) / (m / tau + b11 / tau * s)
        c21, c22 = b21 - b11, b11
        rhs = m * u1 / tau - c21 / tau * s * u1 - 0.5 * c22 / tau * s * u1
        u2 = rhs / (m / tau + 0.5 * c22 / tau * s)
        np.testing.assert_allclose(state.solutions[:, 0], [1.0, u1, u2], rtol=1e-12)

    def test_limite_alpha_uno_coincide_con_crank_nicolson(self):
        self.assertLessEqual(heat_limit_gap(M=8, N=50), 1e-10)

    def test_historia_consistente(self):
        state = self._run()
        self.assertLessEqual(frac_stepper.audit_history(state, self.stiffness), 1e-12)
        self.assertEqual(state.n, 40)
        self.assertEqual(len(state.iterations), 40)

    def test_norma_de_masa_decrece(self):
        state = self._run(N=100)
        norms = np.sqrt(np.einsum('ni,ni->n', state.solutions, (self.mass @ state.solutions.T).T))
        for before, after in zip(norms, norms[1:]):
            self.assertLessEqual(after, before * (1.0 + 1e-12))

    def test_observador_en_orden_y_de_solo_lectura(self):
        calls = []

        def observer(n, t, u):
            calls.append((n, t, u.flags.writeable))
            with self.assertRaises(ValueError):
                u[0] = 1.0

        progress = _Contador()
        state = self._run(N=12, observer=observer, progress=progress)
        self.assertEqual([c[0] for c in calls], list(range(1, 13)))
        np.testing.assert_allclose([c[1] for c in calls], state.time_mesh.nodes[1:])
        self.assertFalse(any(c[2] for c in calls))
        self.assertEqual(progress.total, 12)

    def test_campo_del_estado(self):
        state = self._run(N=5)
        field = state.field()
        np.testing.assert_array_equal(field.values, state.solutions[5])
        field.values[0] = 99.0
        self.assertNotEqual(state.solutions[5, 0], 99.0)

    def test_carga_no_finita(self):
        time_mesh = frac_stepper.build_time_mesh(4, 1.0, 0.5)
        state = frac_stepper.SchemeState.start(self.u0, time_mesh)
        weights = frac_stepper.frac_weights(time_mesh, 0.5)
        load = np.full(self.mesh.n_interior, np.inf)
        with self.assertRaises(NumericalBlowupError) as ctx:
            frac_stepper.step(state, 1, self.mass, self.stiffness, weights, load=load)
        self.assertEqual(ctx.exception.step, 1)

    def test_paso_fuera_de_orden(self):
        time_mesh = frac_stepper.build_time_mesh(4, 1.0, 0.5)
        state = frac_stepper.SchemeState.start(self.u0, time_mesh)
        weights = frac_stepper.frac_weights(time_mesh, 0.5)
        with self.assertRaises(InvalidArgumentError):
            frac_stepper.step(state, 2, self.mass, self.stiffness, weights)

    def test_dato_de_otra_malla(self):
        time_mesh = frac_stepper.build_time_mesh(4, 1.0, 0.5)
        with self.assertRaises(InvalidArgumentError):
            frac_stepper.run(build_mesh(8), time_mesh, 0.5, 1.0, self.u0)

    def test_referencia_de_calor_decrece(self):
        time_mesh = frac_stepper.build_time_mesh(20, 1.0, 0.5)
        out = frac_stepper.heat_crank_nicolson(self.mass, self.stiffness, self.u0.values, time_mesh)
        self.assertEqual(out.shape, (21, self.mesh.n_interior))
        maxima = out.max(axis=1)
        self.assertTrue(np.all(np.diff(maxima) < 0.0))
        # El primer modo decae como exp(-2 pi^2 t), cerca de 5e-5 en t = 0.5.
        self.assertLess(maxima[-1] / maxima[0], 1e-4)
