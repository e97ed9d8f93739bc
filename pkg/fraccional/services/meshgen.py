"""
Mallas estructuradas de triangulos rectangulos sobre el cuadrado unitario.

Cada cuadro de la reticula (M+1)x(M+1) se divide por la diagonal que va
de la esquina inferior izquierda a la superior derecha. Los nodos se
numeran en orden de filas (id = j*(M+1) + i, punto (i/M, j/M)); dentro de
cada cuadro el triangulo bajo la diagonal va antes que el triangulo sobre
ella. Los grados de libertad son solo los nodos interiores.
"""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple

import numpy as np
import scipy.sparse as sp

from fraccional.exceptions import InvalidArgumentError, OutOfDomainError

logger = logging.getLogger(__name__)


def _frozen(array):
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class StructuredMesh:
    """Triangulacion de [0,1]^2 con 2*M^2 triangulos y (M-1)^2 nodos interiores."""

    M: int
    nodes: np.ndarray            # (M+1)^2 x 2
    triangles: np.ndarray        # 2*M^2 x 3, orientacion antihoraria
    interior_index: np.ndarray   # nodo -> indice de grado de libertad, -1 en la frontera
    boundary_mask: np.ndarray    # bool por nodo
    interior_nodes: np.ndarray   # grado de libertad -> nodo

    @property
    def h(self) -> float:
        return float(np.sqrt(2.0) / self.M)

    @property
    def triangle_area(self) -> float:
        return 1.0 / (2.0 * self.M * self.M)

    @property
    def n_nodes(self) -> int:
        return self.nodes.shape[0]

    @property
    def n_triangles(self) -> int:
        return self.triangles.shape[0]

    @property
    def n_interior(self) -> int:
        return self.interior_nodes.shape[0]

    def signed_areas(self) -> np.ndarray:
        p0 = self.nodes[self.triangles[:, 0]]
        p1 = self.nodes[self.triangles[:, 1]]
        p2 = self.nodes[self.triangles[:, 2]]
        return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1])
                      - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))

    def interior_points(self) -> np.ndarray:
        return self.nodes[self.interior_nodes]


def build_mesh(M: int) -> StructuredMesh:
    """
    Construye la malla estructurada con M subdivisiones por eje.

    Raises:
        InvalidArgumentError: Si M < 2 (no habria nodos interiores)
    """
    if isinstance(M, bool) or int(M) != M or M < 2:
        raise InvalidArgumentError(f"M debe ser un entero >= 2, se recibio {M!r}")
    M = int(M)

    ticks = np.arange(M + 1, dtype=float) / M
    xs, ys = np.meshgrid(ticks, ticks)
    nodes = np.column_stack([xs.ravel(), ys.ravel()])

    ii, jj = np.meshgrid(np.arange(M), np.arange(M))
    ii, jj = ii.ravel(), jj.ravel()
    v00 = jj * (M + 1) + ii
    v10 = v00 + 1
    v01 = v00 + (M + 1)
    v11 = v01 + 1
    lower = np.column_stack([v00, v10, v11])
    upper = np.column_stack([v00, v11, v01])
    triangles = np.empty((2 * M * M, 3), dtype=np.int64)
    triangles[0::2] = lower
    triangles[1::2] = upper

    ni, nj = np.meshgrid(np.arange(M + 1), np.arange(M + 1))
    ni, nj = ni.ravel(), nj.ravel()
    boundary_mask = (ni == 0) | (ni == M) | (nj == 0) | (nj == M)
    interior_nodes = np.flatnonzero(~boundary_mask)
    interior_index = np.full(nodes.shape[0], -1, dtype=np.int64)
    interior_index[interior_nodes] = np.arange(interior_nodes.size)

    logger.debug(f"Malla M={M}: {nodes.shape[0]} nodos, {triangles.shape[0]} triangulos")
    return StructuredMesh(
        M=M,
        nodes=_frozen(nodes),
        triangles=_frozen(triangles),
        interior_index=_frozen(interior_index),
        boundary_mask=_frozen(boundary_mask),
        interior_nodes=_frozen(interior_nodes),
    )


def locate_points(mesh: StructuredMesh, points) -> Tuple[np.ndarray, np.ndarray]:
    """
    Ubica un arreglo de puntos (k x 2) en la malla.

    Usa aritmetica sobre la reticula: el cuadro se elige con ceil(M*x)-1 para
    que los puntos sobre aristas compartidas queden en el triangulo de menor
    indice, y la prueba de la diagonal decide entre los dos triangulos.

    Returns:
        (indices de triangulo, coordenadas baricentricas k x 3)
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != 2:
        raise InvalidArgumentError(f"Se esperaban puntos (k, 2), se recibio {pts.shape}")
    outside = ~np.isfinite(pts).all(axis=1) | (pts < 0.0).any(axis=1) | (pts > 1.0).any(axis=1)
    if outside.any():
        bad = pts[np.flatnonzero(outside)[0]]
        raise OutOfDomainError(f"Punto fuera del cuadrado unitario: ({bad[0]}, {bad[1]})")

    M = mesh.M
    scaled = pts * M
    cell = np.clip(np.ceil(scaled) - 1.0, 0, M - 1).astype(np.int64)
    local = scaled - cell
    xi, eta = local[:, 0], local[:, 1]
    square = cell[:, 1] * M + cell[:, 0]

    below = eta <= xi
    tri = 2 * square + np.where(below, 0, 1)
    bary = np.where(
        below[:, None],
        np.column_stack([1.0 - xi, xi - eta, eta]),
        np.column_stack([1.0 - eta, xi, eta - xi]),
    )
    return tri, bary


def locate_point(mesh: StructuredMesh, p) -> Tuple[int, np.ndarray]:
    """Triangulo que contiene p y sus coordenadas baricentricas."""
    tri, bary = locate_points(mesh, np.asarray(p, dtype=float).reshape(1, 2))
    return int(tri[0]), bary[0]


def interpolation_matrix(mesh: StructuredMesh, points) -> sp.csr_matrix:
    """
    Operador disperso que lleva coeficientes interiores a valores en `points`.

    Los vertices de frontera no aportan: la funcion P1 vale cero en la frontera.
    """
    tri, bary = locate_points(mesh, points)
    vertices = mesh.triangles[tri]
    dofs = mesh.interior_index[vertices]
    rows = np.repeat(np.arange(tri.size), 3)
    cols = dofs.ravel()
    vals = bary.ravel()
    keep = cols >= 0
    return sp.csr_matrix(
        (vals[keep], (rows[keep], cols[keep])),
        shape=(tri.size, mesh.n_interior),
    )


def evaluate_field(mesh: StructuredMesh, values, points) -> np.ndarray:
    """Evalua en `points` la funcion P1 con coeficientes interiores `values`."""
    values = np.asarray(values, dtype=float)
    if values.shape != (mesh.n_interior,):
        raise InvalidArgumentError(
            f"Se esperaban {mesh.n_interior} coeficientes, se recibieron {values.shape}"
        )
    return interpolation_matrix(mesh, points) @ values


def dump_mesh_csv(mesh: StructuredMesh, directory) -> Tuple[Path, Path]:
    """Escribe nodos ("id,x,y") y triangulos ("id,n0,n1,n2") para depuracion."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    nodes_path = directory / f'malla_M{mesh.M}_nodos.csv'
    tris_path = directory / f'malla_M{mesh.M}_triangulos.csv'

    with nodes_path.open('w', newline='') as handle:
        writer = csv.writer(handle)
        for idx, (x, y) in enumerate(mesh.nodes):
            writer.writerow([idx, repr(float(x)), repr(float(y))])
    with tris_path.open('w', newline='') as handle:
        writer = csv.writer(handle)
        for idx, (n0, n1, n2) in enumerate(mesh.triangles):
            writer.writerow([idx, int(n0), int(n1), int(n2)])

    logger.info(f"Malla M={mesh.M} exportada en {directory}")
    return nodes_path, tris_path
