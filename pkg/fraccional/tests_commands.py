# -*- coding: utf-8 -*-
import csv
import importlib
import inspect
import tempfile
from io import StringIO
from pathlib import Path

from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, override_settings
from openpyxl import load_workbook

from fraccional.exceptions import ConfigValidationError, InvalidArgumentError
from fraccional.forms import validate_config
from fraccional.presets import PRESETS, get_preset
from fraccional.services.experiments import ExperimentConfig, run_study
from fraccional.services.verification import run_suites

# Corrida pequena: unos segundos por M.
SMALL = ['--N', '20', '--fine-M', '16', '--modes', '10', '--sin-progreso']


def _read_csv(path):
    with Path(path).open() as handle:
        return list(csv.reader(handle))


class ValidateConfigTest(SimpleTestCase):
    """Pruebas para `validate_config` y el formulario de configuracion."""

    def _field_of(self, **changes):
        with self.assertRaises(ConfigValidationError) as ctx:
            validate_config(ExperimentConfig().replace(**changes), require_doubling=True)
        return ctx.exception.field

    def test_configuracion_por_defecto_es_valida(self):
        config = validate_config(ExperimentConfig())
        self.assertEqual(config.M, [8])
        self.assertEqual(config.mu, [0.0])
        self.assertIsNone(config.method)

    def test_campos_invalidos(self):
        self.assertEqual(self._field_of(alpha=1.5), 'alpha')
        self.assertEqual(self._field_of(alpha=0.0), 'alpha')
        self.assertEqual(self._field_of(T=0.0), 'T')
        self.assertEqual(self._field_of(gamma=0.5), 'gamma')
        self.assertEqual(self._field_of(M=''), 'M')
        self.assertEqual(self._field_of(M=[4, 12]), 'M')
        self.assertEqual(self._field_of(M='1,2'), 'M')
        self.assertEqual(self._field_of(mu=[-0.5]), 'mu')
        self.assertEqual(self._field_of(tol=2.0), 'tol')
        self.assertEqual(self._field_of(method='lu'), 'method')
        self.assertEqual(self._field_of(fine_M=100), 'fine_M')
        self.assertEqual(self._field_of(example='custom', datum='coseno'), 'datum')
        self.assertEqual(self._field_of(example='example3', projection='ritz'), 'projection')

    def test_listas_como_texto(self):
        config = validate_config(ExperimentConfig().replace(M='16, 4,8', mu='0,0.5'), require_doubling=True)
        self.assertEqual(config.M, [4, 8, 16])
        self.assertEqual(config.mu, [0.0, 0.5])

    def test_json_ida_y_vuelta(self):
        config = get_preset('table2')
        self.assertEqual(ExperimentConfig.from_json(config.to_json()), config)

    def test_json_con_campo_desconocido(self):
        with self.assertRaises(ConfigValidationError) as ctx:
            ExperimentConfig.from_json('{"alpha": 0.5, "beta": 1}')
        self.assertEqual(ctx.exception.field, 'beta')
        with self.assertRaises(ConfigValidationError):
            ExperimentConfig.from_json('[1, 2]')

    def test_semilla_no_es_campo_de_experimento(self):
        with self.assertRaises(ConfigValidationError) as ctx:
            ExperimentConfig.from_json('{"seed": 3}')
        self.assertEqual(ctx.exception.field, 'seed')

    def test_presets_validos(self):
        for name, preset in PRESETS.items():
            validate_config(preset, require_doubling=True)
        with self.assertRaises(InvalidArgumentError):
            get_preset('table9')

    def test_figuras_con_los_pasos_de_su_tabla(self):
        for number in (1, 2, 3):
            figure, table = get_preset(f'figure{number}'), get_preset(f'table{number}')
            self.assertEqual((figure.example, figure.N, figure.gamma), (table.example, table.N, table.gamma))
        self.assertEqual(get_preset('figure2').N, 1300)

    def test_preset_no_se_comparte(self):
        config = get_preset('table1')
        config.M.append(128)
        self.assertEqual(get_preset('table1').M, [4, 8, 16, 32, 64])


@override_settings(FRACCIONAL_SHOW_PROGRESS=False)
class RunStudyTest(SimpleTestCase):

    def test_grupo_de_celery_igual_a_corrida_secuencial(self):
        config = ExperimentConfig(M=[8, 4], N=15, fine_M=16, modes=10, mu=[0.0, 0.5])
        sequential = run_study(config, parallel=False)
        grouped = run_study(config, parallel=True)
        self.assertEqual([r.M for r in sequential], [4, 8])
        self.assertEqual([r.M for r in grouped], [4, 8])
        for a, b in zip(sequential, grouped):
            self.assertEqual(a.rows, b.rows)

    def test_curvas_ordenadas_por_m(self):
        config = ExperimentConfig(M=[4, 8], N=20, fine_M=16, modes=10)
        coarse, fine = run_study(config, parallel=False)
        for index in (9, 14, 19):
            self.assertLess(fine.rows[index][2], coarse.rows[index][2])

    def test_lista_vacia(self):
        with self.assertRaises(ConfigValidationError):
            run_study(ExperimentConfig(M=[]))


@override_settings(FRACCIONAL_SHOW_PROGRESS=False)
class SolveCommandTest(SimpleTestCase):
    """Pruebas para `manage.py solve`."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def _solve(self, *args, out=None):
        stdout = StringIO()
        call_command('solve', *args, *SMALL, '--out', str(out or self.out), stdout=stdout)
        return stdout.getvalue()

    def test_escribe_csv_por_paso_y_resumen(self):
        output = self._solve('--M', '4')
        self.assertIn('E_0=', output)
        rows = _read_csv(self.out / 'solve' / 'errores_example1_M4.csv')
        self.assertEqual(rows[0], ['n', 't', 'err'])
        self.assertEqual(len(rows), 21)
        self.assertEqual(float(rows[-1][1]), 0.5)
        summary = _read_csv(self.out / 'solve' / 'resumen.csv')
        self.assertEqual(summary[0], ['M', 'E_0', 'CR_0'])

    def test_alpha_invalido_termina_con_codigo_2(self):
        with self.assertRaises(CommandError) as ctx:
            self._solve('--alpha', '1.5')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('alpha', str(ctx.exception))

    def test_lista_de_m_vacia(self):
        with self.assertRaises(CommandError) as ctx:
            self._solve('--M', '')
        self.assertEqual(ctx.exception.returncode, 2)
        self.assertIn('M', str(ctx.exception))

    def test_dato_nulo_da_error_cero(self):
        self._solve('--example', 'custom', '--datum', 'cero', '--M', '4')
        rows = _read_csv(self.out / 'solve' / 'errores_custom_cero_M4.csv')
        self.assertTrue(all(float(err) == 0.0 for _, _, err in rows[1:]))

    def test_salida_determinista(self):
        other = tempfile.TemporaryDirectory()
        self.addCleanup(other.cleanup)
        self._solve('--M', '4', '--alpha', '0.5')
        self._solve('--M', '4', '--alpha', '0.5', out=other.name)
        name = Path('solve') / 'errores_example1_M4.csv'
        self.assertEqual((self.out / name).read_bytes(), (Path(other.name) / name).read_bytes())

    def test_configuracion_desde_json(self):
        config_path = self.out / 'config.json'
        config_path.write_text(ExperimentConfig(example='example3', M=[4], alpha=0.5).to_json())
        self._solve('--config', str(config_path))
        self.assertTrue((self.out / 'solve' / 'errores_example3_M4.csv').exists())

    def test_json_ilegible(self):
        with self.assertRaises(CommandError) as ctx:
            self._solve('--config', str(self.out / 'no_existe.json'))
        self.assertEqual(ctx.exception.returncode, 2)


@override_settings(FRACCIONAL_SHOW_PROGRESS=False)
class TableAndFigureCommandTest(SimpleTestCase):
    """Pruebas para `manage.py table` y `manage.py figure`."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.out = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_tabla_con_preset_y_banderas(self):
        stdout = StringIO()
        call_command('table', 'table1', '--M', '4,8', *SMALL, '--out', str(self.out), stdout=stdout)
        self.assertIn('CR_0', stdout.getvalue())

        rows = _read_csv(self.out / 'table1' / 'table1.csv')
        self.assertEqual([row[0] for row in rows], ['M', '4', '8'])

        sheet = load_workbook(self.out / 'table1' / 'table1.xlsx').active
        values = list(sheet.iter_rows(values_only=True))
        self.assertEqual(values[0], ('M', 'E_0', 'CR_0'))
        self.assertEqual(values[1][0], 4)
        self.assertIsNone(values[1][2])
        self.assertAlmostEqual(values[2][1], float(rows[2][1]), places=15)

    def test_tabla_requiere_m_que_se_duplican(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('table', '--M', '4,12', *SMALL, '--out', str(self.out))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_tabla_con_preset_desconocido(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('table', 'table9', *SMALL, '--out', str(self.out))
        self.assertEqual(ctx.exception.returncode, 2)

    def test_figura_escribe_curvas_y_script(self):
        call_command('figure', '--M', '4,8', '--example', 'example2', *SMALL,
                     '--out', str(self.out), stdout=StringIO())
        directory = self.out / 'custom'
        self.assertTrue((directory / 'custom_M4.csv').exists())
        self.assertTrue((directory / 'custom_M8.csv').exists())
        script = (directory / 'custom.gp').read_text()
        self.assertIn('set logscale xy', script)
        self.assertIn("'custom_M8.csv'", script)


class VerifyCommandTest(SimpleTestCase):
    """Pruebas para `manage.py verify`."""

    def test_todas_las_suites_pasan(self):
        stdout = StringIO()
        call_command('verify', stdout=stdout)
        self.assertIn('Todas las suites pasaron', stdout.getvalue())

    def test_tasas_publicadas(self):
        stdout = StringIO()
        call_command('verify', 'tasas_publicadas', stdout=stdout)
        self.assertIn('[OK]    tasas_publicadas', stdout.getvalue())

    def test_falla_inyectada_termina_con_codigo_1(self):
        stdout = StringIO()
        with self.assertRaises(CommandError) as ctx:
            call_command('verify', 'funciones_especiales', '--mlf-x-hi', '6', stdout=stdout)
        self.assertEqual(ctx.exception.returncode, 1)
        self.assertIn('[FALLA] funciones_especiales', stdout.getvalue())

    def test_suite_desconocida(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('verify', 'inexistente')
        self.assertEqual(ctx.exception.returncode, 2)

    def test_semilla_llega_a_la_suite_de_cuadratura(self):
        results = run_suites(['cuadratura'], seed=7)
        descriptions = [description for description, _, _ in results[0].checks]
        self.assertIn('positividad discreta (alpha=0.3, semilla=7)', descriptions)
        self.assertTrue(results[0].passed, results[0].failures())

    def test_semilla_negativa(self):
        with self.assertRaises(CommandError) as ctx:
            call_command('verify', 'cuadratura', '--seed', '-1')
        self.assertEqual(ctx.exception.returncode, 2)


class DocstringRegisterTest(SimpleTestCase):
    """Los docstrings del proyecto se escriben sin acentos."""

    MODULES = (
        'subdifusion', 'subdifusion.celery', 'fraccional.exceptions', 'fraccional.conf', 'fraccional.forms',
        'fraccional.tasks', 'fraccional.management.base', 'fraccional.services.assembly',
        'fraccional.services.error_metrics', 'fraccional.services.experiments', 'fraccional.services.frac_stepper',
        'fraccional.services.meshgen', 'fraccional.services.mittag_leffler',
        'fraccional.services.reference_solution', 'fraccional.services.sparse_linalg',
        'fraccional.services.verification',
    )

    def test_docstrings_ascii(self):
        for name in self.MODULES:
            module = importlib.import_module(name)
            documented = [module] + [
                obj for _, obj in inspect.getmembers(module, lambda o: inspect.isclass(o) or inspect.isfunction(o))
                if getattr(obj, '__module__', None) == name
            ]
            for obj in documented:
                doc = inspect.getdoc(obj) or ''
                self.assertTrue(doc.isascii(), f'{name}.{getattr(obj, "__name__", "")}')
