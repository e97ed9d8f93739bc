"""
Esquema de Crank-Nicolson generalizado en mallas temporales graduadas.

Para 1 <= n <= N se resuelve

    (u^n - u^{n-1}, v) + A(I^a ubar(t_n) - I^a ubar(t_{n-1}), v) = tau_n (f(t_{n-1/2}), v)

con ubar = u^1 en (0, t_1) y ubar = (u^j + u^{j-1})/2 en (t_{j-1}, t_j), j >= 2.
I^a de una funcion constante a trozos es exacto con los pesos
b_{n,j} = [(t_n - t_{j-1})^a - (t_n - t_j)^a] / Gamma(a + 1).

Dividiendo entre tau_n, el sistema del paso n queda

    (Mass/tau + theta c_nn/tau S) u^n = Mass u^{n-1}/tau - (1/tau) sum_{j<n} c_nj z_j
                                       - (1 - theta) c_nn/tau S u^{n-1} + carga

con c_nj = b_{n,j} - b_{n-1,j}, c_nn = b_{n,n}, z_j = S ubar_j y theta = 1
en el primer paso, 1/2 en los demas.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy import special

from fraccional.exceptions import InvalidArgumentError, NumericalBlowupError
from fraccional.services.assembly import FieldP1, assemble_load, assemble_mass, assemble_stiffness
from fraccional.services.sparse_linalg import LinearSolver

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class GradedTimeMesh:
    """Nodos t_n = (n/N)^gamma T, n = 0..N."""

    N: int
    gamma: float
    T: float
    nodes: np.ndarray
    steps: np.ndarray

    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.nodes[1:] + self.nodes[:-1])


def build_time_mesh(N: int, gamma: float, T: float) -> GradedTimeMesh:
    """
    Raises:
        InvalidArgumentError: Si N < 1, gamma < 1 o T <= 0
    """
    if isinstance(N, bool) or int(N) != N or N < 1:
        raise InvalidArgumentError(f"N debe ser un entero >= 1, se recibio {N!r}")
    if not math.isfinite(gamma) or gamma < 1.0:
        raise InvalidArgumentError(f"gamma debe ser >= 1, se recibio {gamma}")
    if not math.isfinite(T) or T <= 0.0:
        raise InvalidArgumentError(f"T debe ser positivo, se recibio {T}")
    N = int(N)
    nodes = (np.arange(N + 1) / N) ** gamma * T
    nodes[0] = 0.0
    nodes[-1] = T
    steps = np.diff(nodes)
    nodes.setflags(write=False)
    steps.setflags(write=False)
    return GradedTimeMesh(N=N, gamma=float(gamma), T=float(T), nodes=nodes, steps=steps)


@dataclass(frozen=True, eq=False)
class FracWeights:
    """
    Pesos de I^alpha para historias constantes a trozos.

    weights[n-1, j-1] = b_{n,j} (triangular inferior); increments[n-1, j-1] = c_{n,j}.
    """

    alpha: float
    time_mesh: GradedTimeMesh
    weights: np.ndarray
    increments: np.ndarray

    def row(self, n: int) -> np.ndarray:
        return self.weights[n - 1, :n]

    def increment_row(self, n: int) -> np.ndarray:
        return self.increments[n - 1, :n]


def _power_difference(a, c, alpha):
    """a^alpha - c^alpha para 0 <= c < a, estable cuando c/a es cercano a 1."""
    ratio = (a - c) / a
    with np.errstate(divide='ignore'):
        return -(a ** alpha) * np.expm1(alpha * np.log1p(-ratio))


def frac_weights(time_mesh: GradedTimeMesh, alpha: float) -> FracWeights:
    """
    Raises:
        InvalidArgumentError: Si alpha no esta en (0, 1)
    """
    if not (0.0 < alpha < 1.0):
        raise InvalidArgumentError(f"alpha debe estar en (0, 1), se recibio {alpha}")

    t = np.asarray(time_mesh.nodes)
    tau = np.asarray(time_mesh.steps)
    N = time_mesh.N
    scale = 1.0 / special.gamma(alpha + 1.0)

    weights = np.zeros((N, N))
    for n in range(1, N + 1):
        left = t[n] - t[:n - 1]            # t_n - t_{j-1}, j = 1..n-1
        row = _power_difference(left, left - tau[:n - 1], alpha) if n > 1 else np.empty(0)
        weights[n - 1, :n - 1] = row * scale
        weights[n - 1, n - 1] = tau[n - 1] ** alpha * scale

    increments = weights.copy()
    increments[1:, :] -= weights[:-1, :]
    weights.setflags(write=False)
    increments.setflags(write=False)
    return FracWeights(alpha=float(alpha), time_mesh=time_mesh, weights=weights, increments=increments)


@dataclass
class SchemeState:
    """
    Estado del esquema: soluciones u^0..u^n y historia z_j = S ubar_j.

    Un SchemeState pertenece a una sola corrida.
    """

    mesh: object
    time_mesh: GradedTimeMesh
    solutions: np.ndarray              # (N+1) x dof
    history: np.ndarray                # N x dof, fila j-1 = z_j
    n: int = 0
    iterations: list = field(default_factory=list)

    @classmethod
    def start(cls, u0: FieldP1, time_mesh: GradedTimeMesh) -> 'SchemeState':
        dof = u0.values.size
        solutions = np.zeros((time_mesh.N + 1, dof))
        solutions[0] = u0.values
        return cls(mesh=u0.mesh, time_mesh=time_mesh, solutions=solutions,
                   history=np.zeros((time_mesh.N, dof)))

    def field(self, n: Optional[int] = None) -> FieldP1:
        n = self.n if n is None else n
        return FieldP1(self.mesh, self.solutions[n].copy())

    def averaged(self, j: int) -> np.ndarray:
        """ubar_j sobre (t_{j-1}, t_j)."""
        if j == 1:
            return self.solutions[1]
        return 0.5 * (self.solutions[j] + self.solutions[j - 1])


def step(state: SchemeState, n: int, mass, stiffness, weights: FracWeights,
         load: Optional[np.ndarray] = None, method: Optional[str] = None,
         tol: Optional[float] = None) -> FieldP1:
    """
    Avanza del paso n-1 al paso n y guarda u^n y z_n en el estado.

    Raises:
        InvalidArgumentError: Si el estado no esta en el paso n-1
        NumericalBlowupError: Si aparecen valores no finitos
        SolverFailureError: Propagado desde el solver lineal
    """
    if n < 1 or n > state.time_mesh.N or state.n != n - 1:
        raise InvalidArgumentError(f"Paso {n} invalido para un estado en el paso {state.n}")

    tau = float(state.time_mesh.steps[n - 1])
    c_row = weights.increment_row(n)
    c_nn = c_row[-1]
    theta = 1.0 if n == 1 else 0.5
    u_prev = state.solutions[n - 1]

    system = (mass / tau + (theta * c_nn / tau) * stiffness).tocsr()
    rhs = mass @ u_prev / tau
    if n > 1:
        rhs -= (c_row[:-1] @ state.history[:n - 1]) / tau
        rhs -= ((1.0 - theta) * c_nn / tau) * (stiffness @ u_prev)
    if load is not None:
        rhs += load

    if not np.all(np.isfinite(rhs)):
        logger.error(f"Lado derecho no finito en el paso {n}")
        raise NumericalBlowupError(f"Lado derecho no finito en el paso {n}", step=n)

    solver = LinearSolver(system, method=method, tol=tol)
    u_new, info = solver.solve_with_info(rhs, x0=u_prev)
    if not np.all(np.isfinite(u_new)):
        logger.error(f"Solucion no finita en el paso {n}")
        raise NumericalBlowupError(f"Solucion no finita en el paso {n}", step=n)

    state.solutions[n] = u_new
    state.n = n
    state.history[n - 1] = stiffness @ state.averaged(n)
    state.iterations.append(info.iterations)
    return FieldP1(state.mesh, u_new.copy())


def run(mesh, time_mesh: GradedTimeMesh, alpha: float, a, u0_field: FieldP1,
        f: Optional[Callable] = None, observer: Optional[Callable] = None,
        mass=None, stiffness=None, method: Optional[str] = None,
        tol: Optional[float] = None, progress=None) -> SchemeState:
    """
    Ejecuta los N pasos del esquema.

    observer(n, t_n, u^n) se llama una vez por paso, en orden creciente de n,
    con una vista de solo lectura de u^n. f(x, y, t) se muestrea en el punto
    medio de cada paso.
    """
    if u0_field.mesh is not mesh:
        raise InvalidArgumentError("El dato inicial no pertenece a la malla dada")
    weights = frac_weights(time_mesh, alpha)
    mass = assemble_mass(mesh) if mass is None else mass
    stiffness = assemble_stiffness(mesh, a) if stiffness is None else stiffness
    state = SchemeState.start(u0_field, time_mesh)
    midpoints = time_mesh.midpoints()

    logger.info(
        f"Corrida: M={mesh.M}, N={time_mesh.N}, gamma={time_mesh.gamma}, "
        f"T={time_mesh.T}, alpha={alpha}, gdl={mesh.n_interior}"
    )
    for n in range(1, time_mesh.N + 1):
        load = None
        if f is not None:
            t_mid = float(midpoints[n - 1])
            load = assemble_load(mesh, lambda x, y, t_mid=t_mid: f(x, y, t_mid))
        step(state, n, mass, stiffness, weights, load=load, method=method, tol=tol)
        if observer is not None:
            snapshot = state.solutions[n].view()
            snapshot.setflags(write=False)
            observer(n, float(time_mesh.nodes[n]), snapshot)
        if progress is not None:
            progress.update(1)

    logger.info(
        f"Corrida terminada: M={mesh.M}, iteraciones CG promedio "
        f"{np.mean(state.iterations) if state.iterations else 0:.1f}"
    )
    return state


def audit_history(state: SchemeState, stiffness) -> float:
    """Maxima diferencia ||z_j - S ubar_j|| sobre los pasos calculados."""
    worst = 0.0
    for j in range(1, state.n + 1):
        worst = max(worst, float(np.linalg.norm(state.history[j - 1] - stiffness @ state.averaged(j))))
    return worst


def heat_crank_nicolson(mass, stiffness, u0, time_mesh: GradedTimeMesh) -> np.ndarray:
    """
    Stepper de referencia para u' - div(a grad u) = 0.

    El primer paso es Euler implicito y los siguientes Crank-Nicolson, que
    es el limite alpha -> 1 del esquema fraccional. Usa solucion directa
    (spsolve), independiente del gradiente conjugado.
    """
    u = np.asarray(u0, dtype=float)
    out = np.zeros((time_mesh.N + 1, u.size))
    out[0] = u
    for n in range(1, time_mesh.N + 1):
        tau = float(time_mesh.steps[n - 1])
        theta = 1.0 if n == 1 else 0.5
        lhs = sp.csc_matrix(mass + (theta * tau) * stiffness)
        rhs = mass @ u - ((1.0 - theta) * tau) * (stiffness @ u)
        u = spla.spsolve(lhs, rhs)
        out[n] = u
    return out


# -- cuadraturas escalares en el tiempo --------------------------------

def apply_frac_integral(weights: FracWeights, values) -> np.ndarray:
    """(I^alpha vbar)(t_n), n = 1..N, para vbar constante a trozos con valores `values`."""
    values = np.asarray(values, dtype=float)
    if values.shape != (weights.time_mesh.N,):
        raise InvalidArgumentError(f"Se esperaban {weights.time_mesh.N} valores, se recibieron {values.shape}")
    return weights.weights @ values


def riemann_liouville_derivative(weights: FracWeights, nodal_values) -> np.ndarray:
    """
    d/dt I^alpha del interpolante lineal a trozos de `nodal_values` en t_1..t_N.

    Exacto para funciones lineales a trozos:
    sum_j b_{n,j} (theta_j - theta_{j-1}) / tau_j + theta_0 t_n^(alpha-1) / Gamma(alpha).
    """
    theta = np.asarray(nodal_values, dtype=float)
    mesh = weights.time_mesh
    if theta.shape != (mesh.N + 1,):
        raise InvalidArgumentError(f"Se esperaban {mesh.N + 1} valores nodales, se recibieron {theta.shape}")
    slopes = np.diff(theta) / mesh.steps
    t = np.asarray(mesh.nodes[1:])
    return weights.weights @ slopes + theta[0] * t ** (weights.alpha - 1.0) / special.gamma(weights.alpha)


def cumulative_integral(time_mesh: GradedTimeMesh, nodal_values) -> np.ndarray:
    """I^1 por trapecios en t_0..t_N (valor 0 en t_0)."""
    v = np.asarray(nodal_values, dtype=float)
    out = np.zeros_like(v)
    out[1:] = np.cumsum(0.5 * (v[1:] + v[:-1]) * time_mesh.steps)
    return out


def positivity_form(weights: FracWeights, values) -> float:
    """sum_n (I^alpha v)(t_n) v_n tau_n para v constante a trozos."""
    values = np.asarray(values, dtype=float)
    return float(np.sum(apply_frac_integral(weights, values) * values * weights.time_mesh.steps))
