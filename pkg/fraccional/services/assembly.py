"""
Ensamblaje P1 de masa, rigidez y vectores de carga; proyecciones L2 y de Ritz.

Reglas de cuadratura:
- coeficiente de difusion a(x): un punto (centroide) por elemento;
- cargas y proyecciones: tres puntos medios de arista (exacta en grado 2).

Los nodos de frontera se eliminan al ensamblar; las matrices resultantes
son scipy.sparse.csr_matrix sobre los grados de libertad interiores.
"""
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from fraccional.exceptions import CoefficientRangeError, EvaluationError, InvalidArgumentError
from fraccional.services.meshgen import StructuredMesh, evaluate_field
from fraccional.services.sparse_linalg import LinearSolver

logger = logging.getLogger(__name__)

PROJECTION_TOL = 1e-13

_LOCAL_MASS = np.array([[2.0, 1.0, 1.0],
                        [1.0, 2.0, 1.0],
                        [1.0, 1.0, 2.0]]) / 12.0


@dataclass(eq=False)
class FieldP1:
    """Funcion de V_h dada por sus coeficientes en los nodos interiores."""

    mesh: StructuredMesh
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != (self.mesh.n_interior,):
            raise InvalidArgumentError(
                f"El campo requiere {self.mesh.n_interior} coeficientes, se recibieron {self.values.shape}"
            )

    def evaluate(self, points) -> np.ndarray:
        return evaluate_field(self.mesh, self.values, points)

    def copy(self) -> 'FieldP1':
        return FieldP1(self.mesh, self.values.copy())

    def as_function(self):
        """Callable f(x, y) sobre arreglos de cualquier forma."""
        def evaluate(x, y):
            x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
            points = np.column_stack([x.ravel(), y.ravel()])
            return self.evaluate(points).reshape(x.shape)
        return evaluate


def _sample(function, x, y, label):
    if callable(function):
        values = np.asarray(function(x, y), dtype=float)
    else:
        values = np.asarray(function, dtype=float)
    values = np.broadcast_to(values, np.shape(x)).astype(float)
    if not np.all(np.isfinite(values)):
        raise EvaluationError(f"{label} produjo valores no finitos en la cuadratura")
    return values


def _element_geometry(mesh: StructuredMesh):
    """Vertices, areas y gradientes de las funciones baricentricas por elemento."""
    p = mesh.nodes[mesh.triangles]          # T x 3 x 2
    x0, y0 = p[:, 0, 0], p[:, 0, 1]
    x1, y1 = p[:, 1, 0], p[:, 1, 1]
    x2, y2 = p[:, 2, 0], p[:, 2, 1]
    twice_area = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    grads = np.empty((mesh.n_triangles, 3, 2))
    grads[:, 0, 0] = (y1 - y2) / twice_area
    grads[:, 0, 1] = (x2 - x1) / twice_area
    grads[:, 1, 0] = (y2 - y0) / twice_area
    grads[:, 1, 1] = (x0 - x2) / twice_area
    grads[:, 2, 0] = (y0 - y1) / twice_area
    grads[:, 2, 1] = (x1 - x0) / twice_area
    return p, 0.5 * twice_area, grads


def _edge_midpoints(p):
    """Puntos medios opuestos a cada vertice: m[:, k] no toca al vertice k."""
    mids = np.empty_like(p)
    mids[:, 0] = 0.5 * (p[:, 1] + p[:, 2])
    mids[:, 1] = 0.5 * (p[:, 2] + p[:, 0])
    mids[:, 2] = 0.5 * (p[:, 0] + p[:, 1])
    return mids


def _assemble_global(mesh, local, include_boundary):
    tris = mesh.triangles
    rows = np.repeat(tris, 3, axis=1).ravel()
    cols = np.tile(tris, (1, 3)).ravel()
    n = mesh.n_nodes
    full = sp.coo_matrix((local.ravel(), (rows, cols)), shape=(n, n)).tocsr()
    if include_boundary:
        return full
    interior = mesh.interior_nodes
    return full[interior][:, interior].tocsr()


def _assemble_vector(mesh, local):
    full = np.bincount(mesh.triangles.ravel(), weights=local.ravel(), minlength=mesh.n_nodes)
    return full[mesh.interior_nodes]


def assemble_mass(mesh: StructuredMesh, include_boundary: bool = False) -> sp.csr_matrix:
    """Matriz de masa M_ij = (phi_i, phi_j), formula cerrada por elemento."""
    _, areas, _ = _element_geometry(mesh)
    local = areas[:, None, None] * _LOCAL_MASS[None, :, :]
    return _assemble_global(mesh, local, include_boundary)


def assemble_stiffness(mesh: StructuredMesh, a=1.0, include_boundary: bool = False) -> sp.csr_matrix:
    """
    Matriz de rigidez S_ij = (a grad phi_i, grad phi_j).

    a se toma en el centroide de cada elemento y multiplica la matriz
    elemental exacta de coeficiente constante.

    Raises:
        CoefficientRangeError: Si a no es finito o no es positivo en algun centroide
    """
    p, areas, grads = _element_geometry(mesh)
    centroids = p.mean(axis=1)
    if callable(a):
        a_c = np.asarray(a(centroids[:, 0], centroids[:, 1]), dtype=float)
    else:
        a_c = np.asarray(a, dtype=float)
    a_c = np.broadcast_to(a_c, areas.shape)
    if not np.all(np.isfinite(a_c)) or np.any(a_c <= 0.0):
        raise CoefficientRangeError("El coeficiente de difusion debe ser finito y positivo en todos los centroides")

    local = (a_c * areas)[:, None, None] * np.einsum('tik,tjk->tij', grads, grads)
    return _assemble_global(mesh, local, include_boundary)


def assemble_load(mesh: StructuredMesh, g) -> np.ndarray:
    """Vector de carga b_i = (g, phi_i) con la regla de puntos medios de arista."""
    p, areas, _ = _element_geometry(mesh)
    mids = _edge_midpoints(p)
    g_mid = _sample(g, mids[..., 0], mids[..., 1], 'La funcion de carga')
    # phi_k vale 1/2 en los dos puntos medios que tocan al vertice k y 0 en el opuesto.
    local = (areas / 6.0)[:, None] * (g_mid.sum(axis=1)[:, None] - g_mid)
    return _assemble_vector(mesh, local)


def l2_project(mesh: StructuredMesh, g, mass=None) -> FieldP1:
    """Proyeccion L2 P_h g: resuelve Mass c = (g, phi_i)."""
    mass = assemble_mass(mesh) if mass is None else mass
    rhs = assemble_load(mesh, g)
    solver = LinearSolver(mass, method='cg', tol=PROJECTION_TOL)
    return FieldP1(mesh, solver.solve(rhs))


def ritz_project(mesh: StructuredMesh, a, g, grad_g, stiffness=None) -> FieldP1:
    """
    Proyeccion de Ritz R_h g: resuelve S c = (a grad g, grad phi_i).

    a se toma en el centroide (igual que en la rigidez) y grad g en los
    puntos medios de arista, asi R_h reproduce exactamente las funciones de V_h.
    """
    boundary = mesh.nodes[mesh.boundary_mask]
    g_boundary = _sample(g, boundary[:, 0], boundary[:, 1], 'g')
    if np.max(np.abs(g_boundary), initial=0.0) > 1e-12:
        raise InvalidArgumentError("La proyeccion de Ritz requiere g = 0 en la frontera")

    p, areas, grads = _element_geometry(mesh)
    mids = _edge_midpoints(p)
    gx, gy = grad_g(mids[..., 0], mids[..., 1])
    gx = _sample(gx, mids[..., 0], mids[..., 1], 'grad g')
    gy = _sample(gy, mids[..., 0], mids[..., 1], 'grad g')
    mean_grad = np.stack([gx.mean(axis=1), gy.mean(axis=1)], axis=1)

    centroids = p.mean(axis=1)
    a_c = _sample(a, centroids[:, 0], centroids[:, 1], 'El coeficiente de difusion')
    local = (a_c * areas)[:, None] * np.einsum('tk,tik->ti', mean_grad, grads)
    rhs = _assemble_vector(mesh, local)

    stiffness = assemble_stiffness(mesh, a) if stiffness is None else stiffness
    solver = LinearSolver(stiffness, method='cg', tol=PROJECTION_TOL)
    return FieldP1(mesh, solver.solve(rhs))


def nodal_interpolant(mesh: StructuredMesh, g) -> FieldP1:
    """Interpolante nodal de g en los nodos interiores."""
    pts = mesh.interior_points()
    return FieldP1(mesh, _sample(g, pts[:, 0], pts[:, 1], 'g'))


def dump_matrix_market(matrix, path) -> Path:
    """Escribe la matriz en formato MatrixMarket (coordenadas) para depuracion."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    scipy.io.mmwrite(str(path), sp.coo_matrix(matrix), symmetry='general')
    logger.info(f"Matriz {matrix.shape} exportada en {path}")
    return path
