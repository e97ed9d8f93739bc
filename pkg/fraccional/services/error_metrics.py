"""
Errores en norma maxima discreta sobre una reticula fina y tasas de convergencia.

|||v||| = max |v(x)| sobre los nodos interiores de la reticula M_s x M_s;
E_mu = max_n t_n^mu |||u_h^n - u(t_n)|||.
"""
import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from fraccional.exceptions import InvalidArgumentError, UndefinedRateError
from fraccional.services.meshgen import StructuredMesh, interpolation_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FineLattice:
    """Nodos interiores (i/M_s, j/M_s), 1 <= i, j <= M_s - 1, en orden por filas."""

    M_s: int
    ticks: np.ndarray
    points: np.ndarray

    @property
    def size(self) -> int:
        return self.points.shape[0]


def fine_lattice(M_s: int) -> FineLattice:
    """
    Raises:
        InvalidArgumentError: Si M_s no es un entero >= 2
    """
    if isinstance(M_s, bool) or int(M_s) != M_s or M_s < 2:
        raise InvalidArgumentError(f"M_s debe ser un entero >= 2, se recibio {M_s!r}")
    M_s = int(M_s)
    ticks = np.arange(1, M_s, dtype=float) / M_s
    xs, ys = np.meshgrid(ticks, ticks)
    points = np.column_stack([xs.ravel(), ys.ravel()])
    ticks.setflags(write=False)
    points.setflags(write=False)
    return FineLattice(M_s=M_s, ticks=ticks, points=points)


def check_nesting(M: int, M_s: int):
    """M_s debe ser M por una potencia de dos."""
    ratio, rest = divmod(M_s, M)
    if rest or ratio < 1 or ratio & (ratio - 1):
        raise InvalidArgumentError(f"M_s={M_s} no es M={M} por una potencia de dos")


def step_error(u_h, exact_vals, lattice: FineLattice, interpolation=None) -> float:
    """
    max |u_h - u| sobre la reticula fina.

    `u_h` es un FieldP1; `interpolation` permite reutilizar el operador de
    interpolation_matrix entre pasos.
    """
    exact = np.asarray(exact_vals, dtype=float).ravel()
    if exact.size != lattice.size:
        raise InvalidArgumentError(
            f"Valores exactos de tamano {exact.size}, la reticula tiene {lattice.size} nodos"
        )
    if interpolation is None:
        interpolation = interpolation_matrix(u_h.mesh, lattice.points)
    discrete = interpolation @ u_h.values
    return float(np.max(np.abs(discrete - exact)))


def weighted_errors(rows: Sequence, mu_list: Sequence[float]) -> Dict[float, float]:
    """E_mu = max_n t_n^mu err_n para cada mu; `rows` son tuplas (n, t, err)."""
    if not rows:
        raise InvalidArgumentError("No hay filas de error para ponderar")
    data = np.asarray([(t, err) for _, t, err in rows], dtype=float)
    t, err = data[:, 0], data[:, 1]
    return {float(mu): float(np.max(t ** mu * err)) for mu in mu_list}


def convergence_rates(errors: Sequence[float]) -> List[float]:
    """
    CR(M -> 2M) = log2(E(M) / E(2M)) para errores de mallas sucesivas.

    Raises:
        UndefinedRateError: Si algun error es cero, negativo o no finito
    """
    if len(errors) < 2:
        raise InvalidArgumentError("Se necesitan al menos dos errores para calcular tasas")
    values = [float(e) for e in errors]
    for value in values:
        if not math.isfinite(value) or value <= 0.0:
            raise UndefinedRateError(f"Tasa indefinida: error {value!r}")
    return [math.log2(coarse / fine) for coarse, fine in zip(values, values[1:])]


@dataclass
class ErrorReport:
    M: int
    N: int
    gamma: float
    alpha: float
    tag: str
    M_s: int
    mu_list: List[float] = field(default_factory=lambda: [0.0])
    rows: List[tuple] = field(default_factory=list)
    weighted: Dict[float, float] = field(default_factory=dict)

    @property
    def max_error(self) -> float:
        return max((err for _, _, err in self.rows), default=0.0)

    def finalize(self) -> 'ErrorReport':
        self.weighted = weighted_errors(self.rows, self.mu_list)
        return self

    def to_dict(self) -> dict:
        """Forma serializable a JSON (resultado de tareas Celery)."""
        return {
            'M': self.M, 'N': self.N, 'gamma': self.gamma, 'alpha': self.alpha,
            'tag': self.tag, 'M_s': self.M_s, 'mu_list': list(self.mu_list),
            'rows': [[int(n), float(t), float(err)] for n, t, err in self.rows],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'ErrorReport':
        rows = [(int(n), float(t), float(err)) for n, t, err in data['rows']]
        return cls(
            M=int(data['M']), N=int(data['N']), gamma=float(data['gamma']),
            alpha=float(data['alpha']), tag=data['tag'], M_s=int(data['M_s']),
            mu_list=[float(mu) for mu in data['mu_list']], rows=rows,
        ).finalize()

    def write_csv(self, path) -> Path:
        """CSV por paso: "n,t,err" con precision completa."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open('w', newline='') as handle:
            writer = csv.writer(handle)
            writer.writerow(['n', 't', 'err'])
            for n, t, err in self.rows:
                writer.writerow([n, repr(float(t)), repr(float(err))])
        return path


class StreamingErrorObserver:
    """
    Observador para frac_stepper.run: calcula el error en cada paso.

    exact(t) devuelve los valores exactos sobre la reticula; mantiene el
    maximo ponderado de forma incremental ademas de las filas.
    """

    def __init__(self, mesh: StructuredMesh, lattice: FineLattice, exact: Callable,
                 mu_list: Sequence[float] = (0.0,)):
        self.mesh = mesh
        self.lattice = lattice
        self.exact = exact
        self.mu_list = [float(mu) for mu in mu_list]
        self.interpolation = interpolation_matrix(mesh, lattice.points)
        self.rows: List[tuple] = []
        self.running: Dict[float, float] = {mu: 0.0 for mu in self.mu_list}

    def __call__(self, n: int, t: float, values):
        discrete = self.interpolation @ values
        exact = np.asarray(self.exact(t), dtype=float).ravel()
        err = float(np.max(np.abs(discrete - exact)))
        self.rows.append((n, t, err))
        for mu in self.mu_list:
            self.running[mu] = max(self.running[mu], t ** mu * err)
        logger.debug(f"Paso {n}: t={t:.6e}, error={err:.6e}")

    def report(self, M: int, N: int, gamma: float, alpha: float, tag: str,
               M_s: Optional[int] = None) -> ErrorReport:
        return ErrorReport(
            M=M, N=N, gamma=gamma, alpha=alpha, tag=tag,
            M_s=M_s or self.lattice.M_s, mu_list=list(self.mu_list), rows=list(self.rows),
        ).finalize()


def write_summary_csv(reports: Sequence[ErrorReport], path, mu_list: Sequence[float]) -> Path:
    """Resumen por estudio: "M,E_mu...,CR_mu..." ordenado por M."""
    reports = sorted(reports, key=lambda r: r.M)
    mu_list = [float(mu) for mu in mu_list]
    rates = {mu: pairwise_rates([r.weighted[mu] for r in reports]) for mu in mu_list}

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open('w', newline='') as handle:
        writer = csv.writer(handle)
        writer.writerow(['M'] + [f'E_{mu:g}' for mu in mu_list] + [f'CR_{mu:g}' for mu in mu_list])
        for idx, report in enumerate(reports):
            row = [report.M] + [repr(report.weighted[mu]) for mu in mu_list]
            row += ['' if idx == 0 or rates[mu][idx - 1] is None else repr(rates[mu][idx - 1]) for mu in mu_list]
            writer.writerow(row)
    return path


def pairwise_rates(errors) -> List[Optional[float]]:
    """Tasas por pares; None donde la tasa no esta definida."""
    out = []
    for coarse, fine in zip(errors, errors[1:]):
        try:
            out.append(convergence_rates([coarse, fine])[0])
        except UndefinedRateError:
            out.append(None)
    return out
