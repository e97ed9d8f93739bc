"""
Orquestacion de corridas: una corrida (M, N) completa y estudios sobre varias M.

Una corrida arma malla, matrices, dato inicial proyectado, serie exacta y
observador de error, y devuelve un ErrorReport. Los estudios ejecutan las
M en orden o como grupo de Celery (FRACCIONAL_PARALLEL) y siempre
devuelven los reportes ordenados por M.
"""
import json
import logging
from dataclasses import asdict, dataclass, field, fields
from typing import List, Optional

import numpy as np
from tqdm import tqdm

from fraccional.conf import get_setting
from fraccional.exceptions import ConfigValidationError, InvalidArgumentError
from fraccional.services import frac_stepper
from fraccional.services.assembly import assemble_mass, assemble_stiffness, l2_project, ritz_project
from fraccional.services.error_metrics import (
    ErrorReport,
    StreamingErrorObserver,
    check_nesting,
    fine_lattice,
)
from fraccional.services.meshgen import build_mesh
from fraccional.services.reference_solution import (
    CUSTOM,
    eval_grid,
    example_datum,
    make_series,
    manufactured_variable_diffusivity,
    named_custom_datum,
)

logger = logging.getLogger(__name__)

PROJECTION_L2 = 'l2'
PROJECTION_RITZ = 'ritz'


@dataclass
class ExperimentConfig:
    """Parametros de una corrida o estudio; se serializa a JSON."""

    alpha: float = 0.75
    example: str = 'example1'
    datum: str = ''                       # nombre del dato cuando example == 'custom'
    M: List[int] = field(default_factory=lambda: [8])
    N: int = 1000
    gamma: float = 1.6
    T: float = 0.5
    modes: int = 60
    mu: List[float] = field(default_factory=lambda: [0.0])
    fine_M: int = 128
    out: str = ''
    tol: Optional[float] = None
    method: Optional[str] = None
    projection: str = PROJECTION_L2
    label: str = ''

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> 'ExperimentConfig':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigValidationError('config', f"JSON invalido: {exc}")
        if not isinstance(data, dict):
            raise ConfigValidationError('config', "Se esperaba un objeto JSON")
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: dict) -> 'ExperimentConfig':
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigValidationError(unknown[0], "Campo desconocido")
        return cls(**data)

    def replace(self, **changes) -> 'ExperimentConfig':
        data = asdict(self)
        data.update({key: value for key, value in changes.items() if value is not None})
        return ExperimentConfig.from_dict(data)

    @property
    def datum_label(self) -> str:
        return f'{CUSTOM}:{self.datum}' if self.example == CUSTOM else self.example

    def initial_datum(self):
        if self.example == CUSTOM:
            return named_custom_datum(self.datum)
        return example_datum(self.example)


def initial_field(mesh, datum, projection: str = PROJECTION_L2, a=1.0, mass=None, stiffness=None):
    """u_h^0 = P_h u0 (por defecto) o R_h u0."""
    if projection == PROJECTION_L2:
        return l2_project(mesh, datum.evaluate, mass=mass)
    if projection == PROJECTION_RITZ:
        if datum.gradient is None:
            raise InvalidArgumentError(f"El dato {datum.tag} no admite proyeccion de Ritz")
        return ritz_project(mesh, a, datum.evaluate, datum.gradient, stiffness=stiffness)
    raise InvalidArgumentError(f"Proyeccion desconocida: {projection!r}")


def _progress_bar(total: int, label: str, show: Optional[bool]):
    show = get_setting('FRACCIONAL_SHOW_PROGRESS') if show is None else show
    if not show:
        return None
    return tqdm(total=total, desc=label, unit='paso', leave=False)


def run_experiment(config: ExperimentConfig, M: int, show_progress: Optional[bool] = None) -> ErrorReport:
    """
    Corrida (M, N) de extremo a extremo con error por paso en la reticula fina.

    Raises:
        InvalidArgumentError: Si fine_M no es M por una potencia de dos
        SolverFailureError, NumericalBlowupError, EvaluationError: Propagados
    """
    check_nesting(M, config.fine_M)
    datum = config.initial_datum()
    mesh = build_mesh(M)
    time_mesh = frac_stepper.build_time_mesh(config.N, config.gamma, config.T)
    mass = assemble_mass(mesh)
    stiffness = assemble_stiffness(mesh, 1.0)
    u0 = initial_field(mesh, datum, config.projection, mass=mass, stiffness=stiffness)

    series = make_series(datum, config.alpha, config.modes)
    lattice = fine_lattice(config.fine_M)
    observer = StreamingErrorObserver(
        mesh, lattice, lambda t: eval_grid(series, t, lattice.ticks), mu_list=config.mu,
    )

    bar = _progress_bar(config.N, f'M={M}', show_progress)
    try:
        frac_stepper.run(
            mesh, time_mesh, config.alpha, 1.0, u0, observer=observer,
            mass=mass, stiffness=stiffness, method=config.method, tol=config.tol, progress=bar,
        )
    finally:
        if bar is not None:
            bar.close()

    report = observer.report(M, config.N, config.gamma, config.alpha, config.datum_label, config.fine_M)
    summary = ', '.join(f'E_{mu:g}={value:.4e}' for mu, value in report.weighted.items())
    logger.info(f"M={M} terminado: {summary}")
    return report


def run_study(config: ExperimentConfig, parallel: Optional[bool] = None,
              show_progress: Optional[bool] = None) -> List[ErrorReport]:
    """Ejecuta todas las M de la configuracion; el resultado va ordenado por M."""
    if not config.M:
        raise ConfigValidationError('M', "La lista de M esta vacia")
    parallel = get_setting('FRACCIONAL_PARALLEL') if parallel is None else parallel
    Ms = sorted(config.M)
    logger.info(f"Estudio {config.label or config.datum_label}: M={Ms}, N={config.N}, alpha={config.alpha}")

    if parallel:
        from celery import group
        from fraccional.tasks import run_experiment_task

        payload = config.to_json()
        result = group(run_experiment_task.s(payload, M) for M in Ms).apply_async()
        reports = [ErrorReport.from_dict(data) for data in result.get()]
    else:
        reports = [run_experiment(config, M, show_progress=show_progress) for M in Ms]
    return sorted(reports, key=lambda r: r.M)


def run_manufactured(M: int, N: int = 200, alpha: float = 0.5, T: float = 1.0,
                     gamma: float = 1.0, method: Optional[str] = None) -> float:
    """
    Error nodal maximo en t = T del problema manufacturado con difusividad variable.
    """
    problem = manufactured_variable_diffusivity(alpha)
    mesh = build_mesh(M)
    time_mesh = frac_stepper.build_time_mesh(N, gamma, T)
    u0 = l2_project(mesh, problem.initial)
    state = frac_stepper.run(
        mesh, time_mesh, alpha, problem.diffusivity, u0, f=problem.forcing, method=method,
    )
    nodes = mesh.interior_points()
    exact = problem.exact(nodes[:, 0], nodes[:, 1], T)
    error = float(np.max(np.abs(state.solutions[-1] - exact)))
    logger.info(f"Problema manufacturado M={M}, N={N}: error nodal {error:.4e}")
    return error
