"""
Base comun de los comandos solve, table y figure.

Arma la ExperimentConfig (preset o JSON, luego banderas), la valida con
ExperimentConfigForm y traduce las excepciones del solver a codigos de
salida: 2 configuracion invalida, 1 falla numerica.
"""
import logging
from contextlib import contextmanager
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from fraccional.conf import get_setting
from fraccional.exceptions import (
    ConfigValidationError,
    FraccionalError,
    InvalidArgumentError,
    NumericalBlowupError,
)
from fraccional.forms import validate_config
from fraccional.services.experiments import ExperimentConfig

logger = logging.getLogger(__name__)

EXIT_NUMERICAL = 1
EXIT_CONFIG = 2

# bandera -> campo de ExperimentConfig
OVERRIDES = {
    'alpha': 'alpha',
    'example': 'example',
    'datum': 'datum',
    'M': 'M',
    'N': 'N',
    'gamma': 'gamma',
    'T': 'T',
    'modes': 'modes',
    'mu': 'mu',
    'fine_M': 'fine_M',
    'out': 'out',
    'tol': 'tol',
    'method': 'method',
    'projection': 'projection',
}


@contextmanager
def exit_codes():
    """Convierte excepciones del solver en CommandError con el codigo de salida."""
    try:
        yield
    except (ConfigValidationError, InvalidArgumentError) as exc:
        raise CommandError(f'Configuracion invalida: {exc}', returncode=EXIT_CONFIG) from exc
    except NumericalBlowupError as exc:
        logger.error(f"Falla numerica en el paso {exc.step}: {exc}")
        raise CommandError(f'Falla numerica en el paso {exc.step}: {exc}', returncode=EXIT_NUMERICAL) from exc
    except FraccionalError as exc:
        logger.error(f"Falla numerica: {exc}")
        raise CommandError(f'Falla numerica: {exc}', returncode=EXIT_NUMERICAL) from exc


class ExperimentCommand(BaseCommand):
    require_doubling = False

    def add_arguments(self, parser):
        parser.add_argument('--config', help='Archivo JSON con una ExperimentConfig')
        parser.add_argument('--alpha', type=float, help='Orden fraccional en (0, 1)')
        parser.add_argument('--example', help='example1, example2, example3 o custom')
        parser.add_argument('--datum', help='Nombre del dato inicial cuando --example custom')
        parser.add_argument('--M', dest='M', help='Lista de M separada por comas, p. ej. 4,8,16')
        parser.add_argument('--N', dest='N', type=int, help='Numero de pasos de tiempo')
        parser.add_argument('--gamma', type=float, help='Exponente de graduacion (>= 1)')
        parser.add_argument('--T', dest='T', type=float, help='Tiempo final')
        parser.add_argument('--modes', type=int, help='Modos por eje de la serie exacta')
        parser.add_argument('--mu', help='Lista de pesos mu separada por comas')
        parser.add_argument('--fine-M', dest='fine_M', type=int, help='Subdivisiones de la reticula fina')
        parser.add_argument('--out', help='Carpeta de salida')
        parser.add_argument('--tol', type=float, help='Tolerancia relativa del solver lineal')
        parser.add_argument('--method', help='cg o cholesky')
        parser.add_argument('--projection', help='l2 o ritz')
        parser.add_argument('--paralelo', action='store_true', help='Despacha las M como grupo de Celery')
        parser.add_argument('--sin-progreso', dest='sin_progreso', action='store_true',
                            help='No muestra barras de progreso')

    def base_config(self, options) -> ExperimentConfig:
        if options.get('config'):
            path = Path(options['config'])
            try:
                text = path.read_text()
            except OSError as exc:
                raise ConfigValidationError('config', f'No se pudo leer {path}: {exc}')
            return ExperimentConfig.from_json(text)
        return ExperimentConfig()

    def build_config(self, options) -> ExperimentConfig:
        config = self.base_config(options)
        changes = {field: options.get(flag) for flag, field in OVERRIDES.items()}
        config = config.replace(**changes)
        return validate_config(config, require_doubling=self.require_doubling)

    def output_dir(self, config: ExperimentConfig, name: str) -> Path:
        root = Path(config.out or get_setting('FRACCIONAL_OUTPUT_DIR'))
        directory = root / name
        directory.mkdir(parents=True, exist_ok=True)
        return directory

    def show_progress(self, options):
        return False if options.get('sin_progreso') else None
