"""
Configuracion de Celery para el proyecto Subdifusion.

Las corridas independientes de un estudio de convergencia (una por M)
se despachan como tareas; con CELERY_TASK_ALWAYS_EAGER se ejecutan en
el mismo proceso.
"""
import os
from celery import Celery

# Configurar el modulo de settings de Django para Celery
os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'subdifusion.settings')

app = Celery('subdifusion')

# Cargar configuracion desde Django settings con namespace 'CELERY'
app.config_from_object('django.conf:settings', namespace='CELERY')

# Autodescubrir tareas en todas las apps instaladas
app.autodiscover_tasks()
