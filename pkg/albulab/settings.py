"""
Django settings for the albulab project.

The project has no web surface: Django provides the configuration layer, the
management-command CLI, the sqlite run ledger and the test runner.

Every value below can be overridden through the environment so sweeps can be
launched on another machine without editing this file.
"""

import os


# Build paths inside the project like this: os.path.join(BASE_DIR, ...)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


# SECURITY WARNING: keep the secret key used in production secret!
# No hay sesiones ni formularios, pero Django exige la clave para arrancar.
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'albulab-local-development-key')

DEBUG = os.environ.get('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = []


# Application definition
INSTALLED_APPS = [
    'topicmodels.apps.TopicmodelsConfig',
]


# Database
# El ledger de ejecuciones vive en sqlite; cada barrido registra aquí sus filas.
DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': os.environ.get('ALBU_DB_PATH', os.path.join(BASE_DIR, 'db.sqlite3')),
    }
}


# Internationalization
LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# === Logging ===
# Toda la app escribe en el logger 'topicmodels' (un logger por módulo vía __name__).
ALBU_LOG_LEVEL = os.environ.get('ALBU_LOG_LEVEL', 'INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'timestamped': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'timestamped',
        },
    },
    'loggers': {
        'topicmodels': {
            'handlers': ['console'],
            'level': ALBU_LOG_LEVEL,
            'propagate': False,
        },
    },
}


# === Topic-model settings ===

# Número de procesos para los barridos; ALBU_WORKERS tiene prioridad.
ALBU_WORKERS = int(os.environ.get('ALBU_WORKERS', os.cpu_count() or 1))

# Directorio por defecto para corpus y verdad de referencia generados.
ALBU_DATA_DIR = os.environ.get('ALBU_DATA_DIR', os.path.join(BASE_DIR, 'data'))

# CSV por defecto para evaluate y sweep.
ALBU_RESULTS_CSV = os.environ.get(
    'ALBU_RESULTS_CSV', os.path.join(BASE_DIR, 'results', 'results.csv'))

# Documentos con menos tokens se descartan al construir el corpus.
MIN_DOC_LEN = 4

# Ventana booleana de coherencia NPMI y número de palabras por tema.
NPMI_WINDOW = 15
TOP_N = 10

ALBU_DEFAULTS = {
    'alpha': 0.1,
    'beta': 0.1,
    'max_epochs': 150,
    'tol': 1e-4,
    'seed': 0,
    'restarts': 5,
}

GIBBS_DEFAULTS = {
    'alpha': 0.1,
    'beta': 0.1,
    'burn_in': 2000,
    'samples': 5000,
    'seed': 0,
}

# Número de ejecuciones (semillas) por configuración cuando un barrido no las fija.
SWEEP_DEFAULT_RUNS = 5
