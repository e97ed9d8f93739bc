"""
Excepciones del solver de difusion fraccional.

Todas heredan de FraccionalError; los comandos de manage.py traducen cada
tipo a un codigo de salida (2 configuracion invalida, 1 falla numerica).
"""
from typing import Any, Dict, Optional


class FraccionalError(Exception):
    """Excepcion base del solver fraccional"""
    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        self.message = message
        self.context = context or {}
        super().__init__(self.message)


class InvalidArgumentError(FraccionalError, ValueError):
    """Argumento fuera del rango documentado"""
    pass


class OutOfDomainError(FraccionalError, ValueError):
    """Punto fuera del cuadrado unitario cerrado"""
    pass


class CoefficientRangeError(FraccionalError, ValueError):
    """Coeficiente de difusion no finito o no positivo"""
    pass


class EvaluationError(FraccionalError, ArithmeticError):
    """Cuadratura o funcion especial con resultado no finito"""
    pass


class GammaPoleError(FraccionalError, ValueError):
    """Gamma evaluada en un entero no positivo"""
    pass


class UndefinedRateError(FraccionalError, ValueError):
    """Tasa de convergencia con errores nulos o negativos"""
    pass


class SolverFailureError(FraccionalError, ArithmeticError):
    """El solver lineal no alcanzo la tolerancia"""
    def __init__(self, message: str, residual: float, iterations: int):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message, {'residual': residual, 'iterations': iterations})


class NumericalBlowupError(FraccionalError, ArithmeticError):
    """Valores no finitos durante el avance en el tiempo"""
    def __init__(self, message: str, step: int):
        self.step = step
        super().__init__(message, {'step': step})


class ConfigValidationError(FraccionalError, ValueError):
    """Configuracion de experimento invalida; `field` nombra el campo"""
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}", {'field': field})
