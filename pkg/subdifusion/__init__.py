"""
Inicializacion del proyecto Subdifusion.
Importa la aplicacion Celery para que este disponible cuando Django inicie.
"""
from .celery import app as celery_app

__all__ = ('celery_app',)
