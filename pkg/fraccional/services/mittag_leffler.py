"""
Funcion de Mittag-Leffler E_alpha(-x) para x >= 0 y 0 < alpha <= 1.

Tres regimenes:
- serie de Taylor sum (-x)^p / Gamma(alpha p + 1) con suma compensada (x <= x_lo);
- representacion integral para 0 < alpha < 1, integrada de forma adaptativa
  con scipy.integrate.quad_vec sobre todos los argumentos a la vez
  (x_lo < x < x_hi):

      E_alpha(-x) = sin(alpha pi) / (alpha pi x)
                    * int_0^inf exp(-v^(1/alpha)) / (1 + 2 cos(alpha pi) v/x + (v/x)^2) dv

- expansion asintotica sum_{k>=1} (-1)^(k+1) x^(-k) / Gamma(1 - alpha k),
  cortada en el termino mas pequeno (x >= x_hi).

Para alpha = 1 se usa exp(-x) directamente.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import special
from scipy.integrate import quad_vec

from fraccional.conf import get_setting
from fraccional.exceptions import EvaluationError, GammaPoleError, InvalidArgumentError

logger = logging.getLogger(__name__)

REGIME_SERIES = 'serie'
REGIME_INTEGRAL = 'integral'
REGIME_ASYMPTOTIC = 'asintotica'
REGIME_EXPONENTIAL = 'exponencial'

# Cota del termino mayor de la serie: por encima la cancelacion se come
# mas de tres digitos y el umbral x_lo se reduce.
SERIES_MAX_TERM = 1e3
SERIES_MAX_TERMS = 400
ASYMPTOTIC_MAX_TERMS = 60

# Cantidad de argumentos por llamada a quad_vec.
QUAD_CHUNK = 2048


def gamma(x):
    """
    Funcion Gamma (scipy.special.gamma) con rechazo explicito de los polos.

    Raises:
        GammaPoleError: Si x es un entero no positivo
    """
    arr = np.asarray(x, dtype=float)
    if np.any((arr <= 0) & (arr == np.round(arr))):
        raise GammaPoleError(f"Gamma tiene un polo en {x}")
    value = special.gamma(arr)
    return float(value) if np.ndim(value) == 0 else value


def _series_max_term(alpha, x):
    p = np.arange(SERIES_MAX_TERMS)
    with np.errstate(divide='ignore'):
        log_terms = p * math.log(x) - special.gammaln(alpha * p + 1.0)
    return float(np.exp(np.max(log_terms)))


@dataclass(frozen=True)
class MlfEvaluator:
    """Evaluador inmutable de E_alpha(-x); seguro para uso concurrente."""

    alpha: float
    x_lo: float
    x_hi: float
    rtol: float

    def __post_init__(self):
        if not (0.0 < self.alpha <= 1.0) or not math.isfinite(self.alpha):
            raise InvalidArgumentError(f"alpha debe estar en (0, 1], se recibio {self.alpha}")
        if not (0.0 < self.x_lo < self.x_hi):
            raise InvalidArgumentError(f"Umbrales invalidos: x_lo={self.x_lo}, x_hi={self.x_hi}")

    @classmethod
    def create(cls, alpha: float, x_lo: Optional[float] = None, x_hi: Optional[float] = None,
               rtol: Optional[float] = None, adapt_series: bool = True) -> 'MlfEvaluator':
        """
        Construye el evaluador con los umbrales de settings.

        Con adapt_series=True el umbral de la serie se baja hasta que el
        termino mayor no supere SERIES_MAX_TERM (alpha pequeno).
        """
        x_lo = float(get_setting('FRACCIONAL_MLF_X_LO') if x_lo is None else x_lo)
        x_hi = float(get_setting('FRACCIONAL_MLF_X_HI') if x_hi is None else x_hi)
        rtol = float(get_setting('FRACCIONAL_MLF_RTOL') if rtol is None else rtol)
        if not (0.0 < alpha <= 1.0):
            raise InvalidArgumentError(f"alpha debe estar en (0, 1], se recibio {alpha}")
        if adapt_series and alpha < 1.0:
            while x_lo > 0.25 and _series_max_term(alpha, x_lo) > SERIES_MAX_TERM:
                x_lo *= 0.5
        return cls(alpha=float(alpha), x_lo=x_lo, x_hi=x_hi, rtol=rtol)

    def regime_of(self, x: float) -> str:
        if self.alpha == 1.0:
            return REGIME_EXPONENTIAL
        if x <= self.x_lo:
            return REGIME_SERIES
        if x < self.x_hi:
            return REGIME_INTEGRAL
        return REGIME_ASYMPTOTIC

    # -- regimenes -----------------------------------------------------

    def series(self, x) -> np.ndarray:
        """Serie de Taylor con suma compensada (Kahan) hasta que el termino sea despreciable."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        total = np.ones_like(x)
        compensation = np.zeros_like(x)
        with np.errstate(divide='ignore'):
            log_x = np.log(x)
        for p in range(1, SERIES_MAX_TERMS):
            magnitude = np.exp(p * log_x - special.gammaln(self.alpha * p + 1.0))
            term = magnitude if p % 2 == 0 else -magnitude
            y = term - compensation
            t = total + y
            compensation = (t - total) - y
            total = t
            if np.all(magnitude <= 1e-17 * np.abs(total)) and p > 2:
                break
        return total

    def integral(self, x) -> np.ndarray:
        """Representacion integral (0 < alpha < 1) con cuadratura adaptativa vectorial."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        alpha = self.alpha
        if alpha == 1.0:
            return np.exp(-x)
        cos_ap = math.cos(alpha * math.pi)
        prefactor = math.sin(alpha * math.pi) / (alpha * math.pi)
        # exp(-v^(1/alpha)) < 1e-40 a partir de v = 92^alpha
        upper = 92.0 ** alpha

        out = np.empty_like(x)
        for start in range(0, x.size, QUAD_CHUNK):
            chunk = x[start:start + QUAD_CHUNK]

            def integrand(v, chunk=chunk):
                ratio = v / chunk
                return math.exp(-v ** (1.0 / alpha)) / (1.0 + 2.0 * cos_ap * ratio + ratio * ratio)

            values, _ = quad_vec(
                integrand, 0.0, upper,
                epsabs=1e-16, epsrel=self.rtol, norm='max', limit=2000,
            )
            out[start:start + QUAD_CHUNK] = prefactor * values / chunk
        return out

    def asymptotic(self, x) -> np.ndarray:
        """Expansion asintotica cortada en el termino de menor magnitud."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        k = np.arange(1, ASYMPTOTIC_MAX_TERMS + 1)
        coeffs = special.rgamma(1.0 - self.alpha * k) * np.where(k % 2 == 1, 1.0, -1.0)
        terms = coeffs[None, :] * x[:, None] ** (-k[None, :].astype(float))
        magnitude = np.abs(terms)
        # Coeficientes nulos (alpha k entero) no cuentan como termino minimo.
        masked = np.where(coeffs[None, :] == 0.0, np.inf, magnitude)
        cutoff = np.argmin(masked, axis=1)
        keep = k[None, :] <= (cutoff[:, None] + 1)
        if np.any(cutoff < 4):
            logger.warning("Serie asintotica cortada con menos de 5 terminos; el argumento es pequeno para este regimen")
        return np.sum(np.where(keep, terms, 0.0), axis=1)

    # -- evaluacion ----------------------------------------------------

    def __call__(self, x):
        return mlf(self, x)


def mlf(evaluator: MlfEvaluator, x):
    """
    E_alpha(-x) para x >= 0 (escalar o arreglo).

    Raises:
        InvalidArgumentError: Si x es negativo o no finito
        EvaluationError: Si algun regimen produce valores no finitos
    """
    scalar = np.ndim(x) == 0
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
        raise InvalidArgumentError("mlf requiere argumentos finitos x >= 0")

    flat = arr.ravel()
    out = np.empty_like(flat)
    if evaluator.alpha == 1.0:
        out = np.exp(-flat)
    else:
        series = flat <= evaluator.x_lo
        asym = flat >= evaluator.x_hi
        middle = ~(series | asym)
        if series.any():
            out[series] = evaluator.series(flat[series])
        if middle.any():
            out[middle] = evaluator.integral(flat[middle])
        if asym.any():
            out[asym] = evaluator.asymptotic(flat[asym])
        logger.debug(
            f"mlf alpha={evaluator.alpha}: serie={int(series.sum())}, "
            f"integral={int(middle.sum())}, asintotica={int(asym.sum())}"
        )

    if not np.all(np.isfinite(out)):
        raise EvaluationError(f"E_alpha(-x) no finito para alpha={evaluator.alpha}")
    out = out.reshape(arr.shape)
    return float(out[0]) if scalar else out
