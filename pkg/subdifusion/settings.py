from pathlib import Path
import os
from dotenv import load_dotenv

# Cargar variables de entorno desde .env
load_dotenv()

BASE_DIR = Path(__file__).resolve().parent.parent

# ========================
# Seguridad y Debug
# ========================

SECRET_KEY = os.environ.get('SECRET_KEY', 'dev-secret-key')  # clave de respaldo para local
DEBUG = os.environ.get('DEBUG', 'True').lower() == 'true'

def env_bool(name, default=False):
    value = os.environ.get(name, str(default))
    return str(value).strip().lower() in ('1', 'true', 'yes', 'on', 'si', 'sí')

def env_float(name, default):
    value = os.environ.get(name, '')
    try:
        return float(value) if value.strip() else float(default)
    except ValueError:
        return float(default)

def env_int(name, default):
    return int(env_float(name, default))

ALLOWED_HOSTS = []

# ========================
# Aplicaciones
# ========================

INSTALLED_APPS = [
    'fraccional',
]

# El solver no persiste datos: sin base de datos.
DATABASES = {}

LANGUAGE_CODE = 'es-CO'
TIME_ZONE = 'America/Bogota'
USE_I18N = True
USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

# ========================
# Parametros del solver fraccional
# ========================

# Carpeta donde los comandos escriben CSV, XLSX y scripts de gnuplot.
FRACCIONAL_OUTPUT_DIR = os.environ.get('FRACCIONAL_OUTPUT_DIR', str(BASE_DIR / 'resultados'))

# Solver lineal por paso de tiempo: 'cg' (gradiente conjugado con Jacobi) o 'cholesky'.
FRACCIONAL_SOLVER_METHOD = os.environ.get('FRACCIONAL_SOLVER_METHOD', 'cg')
FRACCIONAL_SOLVER_TOL = env_float('FRACCIONAL_SOLVER_TOL', 1e-12)
FRACCIONAL_SOLVER_MAXITER = env_int('FRACCIONAL_SOLVER_MAXITER', 5000)

# Umbrales de regimen de la funcion de Mittag-Leffler E_alpha(-x).
FRACCIONAL_MLF_X_LO = env_float('FRACCIONAL_MLF_X_LO', 5.0)
FRACCIONAL_MLF_X_HI = env_float('FRACCIONAL_MLF_X_HI', 50.0)
FRACCIONAL_MLF_RTOL = env_float('FRACCIONAL_MLF_RTOL', 1e-13)

# Malla fina de evaluacion del error (h_s = sqrt(2)/FRACCIONAL_FINE_M).
FRACCIONAL_FINE_M = env_int('FRACCIONAL_FINE_M', 128)

FRACCIONAL_SHOW_PROGRESS = env_bool('FRACCIONAL_SHOW_PROGRESS', True)

# Corridas de un estudio (varias M) despachadas como grupo de Celery.
FRACCIONAL_PARALLEL = env_bool('FRACCIONAL_PARALLEL', False)

# ========================
# Logging
# ========================

FRACCIONAL_LOG_LEVEL = os.environ.get('FRACCIONAL_LOG_LEVEL', 'INFO').upper()

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '[{asctime}] {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'loggers': {
        'fraccional': {
            'handlers': ['console'],
            'level': FRACCIONAL_LOG_LEVEL,
            'propagate': False,
        },
    },
}

# ========================
# Configuracion de Celery
# ========================

# URL de Redis (usar Redis como broker y backend)
CELERY_BROKER_URL = os.environ.get('REDIS_URL', 'redis://localhost:6379/0')
CELERY_RESULT_BACKEND = os.environ.get('REDIS_URL', 'redis://localhost:6379/0')

CELERY_ACCEPT_CONTENT = ['json']
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_TIMEZONE = 'America/Bogota'

# Sin worker disponible las corridas se ejecutan en el mismo proceso.
CELERY_TASK_ALWAYS_EAGER = env_bool('CELERY_TASK_ALWAYS_EAGER', True)
CELERY_TASK_EAGER_PROPAGATES = True
