"""
Acceso a los parametros FRACCIONAL_* de settings.

Los servicios numericos tambien se usan como libreria sin un proyecto
Django configurado; en ese caso se devuelven los valores por defecto.
"""
import os

from django.conf import settings


DEFAULTS = {
    'FRACCIONAL_OUTPUT_DIR': 'resultados',
    'FRACCIONAL_SOLVER_METHOD': 'cg',
    'FRACCIONAL_SOLVER_TOL': 1e-12,
    'FRACCIONAL_SOLVER_MAXITER': 5000,
    'FRACCIONAL_MLF_X_LO': 5.0,
    'FRACCIONAL_MLF_X_HI': 50.0,
    'FRACCIONAL_MLF_RTOL': 1e-13,
    'FRACCIONAL_FINE_M': 128,
    'FRACCIONAL_SHOW_PROGRESS': True,
    'FRACCIONAL_PARALLEL': False,
}


def get_setting(name, default=None):
    fallback = DEFAULTS.get(name) if default is None else default
    if not settings.configured and not os.environ.get('DJANGO_SETTINGS_MODULE'):
        return fallback
    return getattr(settings, name, fallback)
