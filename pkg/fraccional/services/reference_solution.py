"""
Solucion exacta por separacion de variables en el cuadrado unitario.

Con phi_mn = 2 sin(m pi x) sin(n pi y) y lambda_mn = (m^2 + n^2) pi^2,

    u(x, y, t) = sum_{m,n} (u0, phi_mn) E_alpha(-lambda_mn t^alpha) phi_mn(x, y).

La serie se trunca en m, n <= K (truncamiento tensorial) y se evalua de
forma separable: V = Sy D(t)^T Sx^T con D_mn = 2 C_mn E_alpha(-lambda_mn t^alpha).
"""
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from fraccional.exceptions import InvalidArgumentError
from fraccional.services.mittag_leffler import MlfEvaluator

logger = logging.getLogger(__name__)

EXAMPLE1 = 'example1'
EXAMPLE2 = 'example2'
EXAMPLE3 = 'example3'
CUSTOM = 'custom'
EXAMPLE_TAGS = (EXAMPLE1, EXAMPLE2, EXAMPLE3)

# Cuadratura de coeficientes para datos arbitrarios: 4 paneles Gauss-Legendre
# por eje con cortes en 1/4, 1/2 y 3/4.
QUADRATURE_PANELS = 4


def _odd_factor(k):
    return 1.0 - (-1.0) ** k


def _coefficients_example1(m, n):
    return 8.0 * _odd_factor(m) * _odd_factor(n) / (m * n * math.pi ** 2) ** 3


def _coefficients_example2(m, n):
    # Signo sin(m pi/2) sin(n pi/2): la carpa min(x, 1-x) min(y, 1-y) tiene C_11 > 0.
    sign = np.sin(m * math.pi / 2.0) * np.sin(n * math.pi / 2.0)
    sign = np.rint(sign)
    return 2.0 * _odd_factor(m) * _odd_factor(n) * sign / (m * n * math.pi ** 2) ** 2


def _coefficients_example3(m, n):
    return 2.0 * _odd_factor(m) * _odd_factor(n) / (m * n * math.pi ** 2)


@dataclass(frozen=True)
class InitialDatum:
    """
    Dato inicial u0 con evaluador puntual.

    `coefficient_rule(m, n)` da (u0, phi_mn) en forma cerrada; si falta, los
    coeficientes se calculan por cuadratura. `gradient` (opcional) habilita
    la proyeccion de Ritz.
    """

    tag: str
    evaluate: Callable
    coefficient_rule: Optional[Callable] = None
    gradient: Optional[Callable] = None

    def __call__(self, x, y):
        return self.evaluate(x, y)

    def coefficients(self, K: int) -> np.ndarray:
        if K < 1:
            raise InvalidArgumentError(f"K debe ser >= 1, se recibio {K}")
        modes = np.arange(1, K + 1, dtype=float)
        if self.coefficient_rule is not None:
            m, n = np.meshgrid(modes, modes, indexing='ij')
            return np.asarray(self.coefficient_rule(m, n), dtype=float)
        return sine_coefficients(self.evaluate, K)


def sine_coefficients(function: Callable, K: int, points_per_panel: Optional[int] = None) -> np.ndarray:
    """
    (u0, phi_mn) para m, n = 1..K por cuadratura tensorial de Gauss-Legendre compuesta.

    Usa 4 paneles por eje con `points_per_panel` puntos (por defecto K, es
    decir 4K puntos por eje).
    """
    q = int(points_per_panel or K)
    nodes, weights = np.polynomial.legendre.leggauss(q)
    edges = np.linspace(0.0, 1.0, QUADRATURE_PANELS + 1)
    half = 0.5 * np.diff(edges)
    centers = 0.5 * (edges[1:] + edges[:-1])
    x = (centers[:, None] + half[:, None] * nodes[None, :]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()

    X, Y = np.meshgrid(x, x, indexing='ij')
    values = np.broadcast_to(np.asarray(function(X, Y), dtype=float), X.shape)
    modes = np.arange(1, K + 1)
    S = np.sin(np.pi * np.outer(x, modes)) * w[:, None]        # puntos x modos
    return 2.0 * S.T @ values @ S


def _example1(x, y):
    return x * (1.0 - x) * y * (1.0 - y)


def _example1_gradient(x, y):
    return (1.0 - 2.0 * x) * y * (1.0 - y), x * (1.0 - x) * (1.0 - 2.0 * y)


def _example2(x, y):
    return np.minimum(x, 1.0 - x) * np.minimum(y, 1.0 - y)


def _example2_gradient(x, y):
    dx = np.where(x <= 0.5, 1.0, -1.0)
    dy = np.where(y <= 0.5, 1.0, -1.0)
    return dx * np.minimum(y, 1.0 - y), np.minimum(x, 1.0 - x) * dy


def _example3(x, y):
    return np.ones(np.broadcast(np.asarray(x), np.asarray(y)).shape)


_EXAMPLES = {
    EXAMPLE1: InitialDatum(EXAMPLE1, _example1, _coefficients_example1, _example1_gradient),
    EXAMPLE2: InitialDatum(EXAMPLE2, _example2, _coefficients_example2, _example2_gradient),
    # u0 = 1 no se anula en la frontera: no admite proyeccion de Ritz.
    EXAMPLE3: InitialDatum(EXAMPLE3, _example3, _coefficients_example3, None),
}


def example_datum(tag: str) -> InitialDatum:
    try:
        return _EXAMPLES[tag]
    except KeyError:
        raise InvalidArgumentError(f"Ejemplo desconocido: {tag!r} (opciones: {', '.join(EXAMPLE_TAGS)})")


def custom_datum(function: Callable, gradient: Optional[Callable] = None) -> InitialDatum:
    """Dato inicial arbitrario; sus coeficientes se calculan por cuadratura."""
    return InitialDatum(CUSTOM, function, None, gradient)


def _zero(x, y):
    return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)


def _zero_gradient(x, y):
    return _zero(x, y), _zero(x, y)


def _first_mode(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def _first_mode_gradient(x, y):
    return (np.pi * np.cos(np.pi * x) * np.sin(np.pi * y),
            np.pi * np.sin(np.pi * x) * np.cos(np.pi * y))


# Datos personalizados accesibles por nombre desde la configuracion.
NAMED_CUSTOM_DATA = {
    'cero': (_zero, _zero_gradient),
    'seno': (_first_mode, _first_mode_gradient),
}


def named_custom_datum(name: str) -> InitialDatum:
    try:
        function, gradient = NAMED_CUSTOM_DATA[name]
    except KeyError:
        raise InvalidArgumentError(
            f"Dato personalizado desconocido: {name!r} (opciones: {', '.join(NAMED_CUSTOM_DATA)})"
        )
    return custom_datum(function, gradient)


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    alpha: float
    K: int
    coefficients: np.ndarray     # K x K, C[m-1, n-1] = (u0, phi_mn)
    eigenvalues: np.ndarray      # K x K, (m^2 + n^2) pi^2
    tag: str
    evaluator: MlfEvaluator

    def decay(self, t: float) -> np.ndarray:
        """Matriz D(t) = 2 C E_alpha(-lambda t^alpha); E solo se evalua donde C != 0."""
        if not math.isfinite(t) or t < 0.0:
            raise InvalidArgumentError(f"t debe ser finito y >= 0, se recibio {t}")
        D = 2.0 * self.coefficients.copy()
        if t == 0.0:
            return D
        active = self.coefficients != 0.0
        D[active] *= self.evaluator(self.eigenvalues[active] * t ** self.alpha)
        return D

    def modal_amplitude(self, t: float, m: int = 1, n: int = 1) -> float:
        return float(self.decay(t)[m - 1, n - 1])


def make_series(datum: InitialDatum, alpha: float, K: int,
                evaluator: Optional[MlfEvaluator] = None) -> SeriesSolution:
    if K < 1:
        raise InvalidArgumentError(f"K debe ser >= 1, se recibio {K}")
    evaluator = evaluator or MlfEvaluator.create(alpha)
    modes = np.arange(1, K + 1, dtype=float)
    eigenvalues = (modes[:, None] ** 2 + modes[None, :] ** 2) * math.pi ** 2
    coefficients = datum.coefficients(K)
    coefficients.setflags(write=False)
    eigenvalues.setflags(write=False)
    logger.debug(f"Serie {datum.tag}: K={K}, {int(np.count_nonzero(coefficients))} coeficientes no nulos")
    return SeriesSolution(
        alpha=float(alpha), K=int(K), coefficients=coefficients,
        eigenvalues=eigenvalues, tag=datum.tag, evaluator=evaluator,
    )


def sine_matrix(coords, K: int) -> np.ndarray:
    """sin(k pi x_i) para cada coordenada (filas) y modo k = 1..K (columnas)."""
    coords = np.asarray(coords, dtype=float)
    return np.sin(np.pi * np.outer(coords, np.arange(1, K + 1)))


def eval_grid(sol: SeriesSolution, t: float, xs, ys=None) -> np.ndarray:
    """
    u(x_i, y_j, t) sobre la reticula xs x ys.

    Returns:
        Matriz V con V[j, i] = u(xs[i], ys[j], t); V.ravel() sigue el orden
        por filas de la malla.
    """
    ys = xs if ys is None else ys
    Sx = sine_matrix(xs, sol.K)
    Sy = sine_matrix(ys, sol.K)
    return Sy @ sol.decay(t).T @ Sx.T


def eval_points(sol: SeriesSolution, t: float, points) -> np.ndarray:
    """Evaluacion directa en puntos sueltos (k x 2)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    Sx = sine_matrix(pts[:, 0], sol.K)
    Sy = sine_matrix(pts[:, 1], sol.K)
    return np.einsum('pm,mn,pn->p', Sx, sol.decay(t), Sy)


@dataclass(frozen=True)
class ManufacturedProblem:
    """Problema con solucion conocida y termino fuente f(x, y, t)."""

    diffusivity: Callable
    exact: Callable
    forcing: Callable
    initial: Callable


def manufactured_variable_diffusivity(alpha: float) -> ManufacturedProblem:
    """
    a(x, y) = 1 + sin(pi x) sin(pi y) / 2 y u = t^2 w con w = sin(pi x) sin(pi y).

    Como d^{1-alpha}(t^2) = 2 t^{1+alpha} / Gamma(2+alpha),
    f = 2 t w + 2 t^{1+alpha} / Gamma(2+alpha) (a 2 pi^2 w - grad a . grad w).
    """
    factor = 2.0 / math.gamma(2.0 + alpha)

    def w(x, y):
        return np.sin(np.pi * x) * np.sin(np.pi * y)

    def a(x, y):
        return 1.0 + 0.5 * w(x, y)

    def operator_w(x, y):
        wx = np.pi * np.cos(np.pi * x) * np.sin(np.pi * y)
        wy = np.pi * np.sin(np.pi * x) * np.cos(np.pi * y)
        # grad a = grad w / 2
        return a(x, y) * 2.0 * np.pi ** 2 * w(x, y) - 0.5 * (wx * wx + wy * wy)

    def exact(x, y, t):
        return t * t * w(x, y)

    def forcing(x, y, t):
        return 2.0 * t * w(x, y) + factor * t ** (1.0 + alpha) * operator_w(x, y)

    def initial(x, y):
        return np.zeros(np.broadcast(np.asarray(x), np.asarray(y)).shape)

    return ManufacturedProblem(diffusivity=a, exact=exact, forcing=forcing, initial=initial)
