"""
Tareas de Celery para repartir las corridas de un estudio entre workers.

Con CELERY_TASK_ALWAYS_EAGER=True (valor por defecto) las tareas se ejecutan
en el mismo proceso y no hace falta Redis.
"""
import logging

from celery import shared_task

from fraccional.services.experiments import ExperimentConfig, run_experiment

logger = logging.getLogger(__name__)


@shared_task(name='fraccional.tasks.run_experiment_task')
def run_experiment_task(config_json, M):
    """
    Ejecuta una corrida (M, N) y devuelve el ErrorReport como diccionario.

    Los errores numericos se propagan: el estudio completo falla si falla una M.
    """
    config = ExperimentConfig.from_json(config_json)
    logger.info(f"Tarea: corrida M={M} ({config.datum_label})")
    report = run_experiment(config, int(M), show_progress=False)
    return report.to_dict()
