"""
Django settings for the gridvol project.

gridvol is a batch toolkit: there is no web surface and no database. Settings carry the
numerical defaults of the modeling pipeline, logging, and the Celery configuration used
by the model-comparison harness.
"""

from dotenv import load_dotenv
from pathlib import Path
import os


BASE_DIR = Path(__file__).resolve().parent.parent.parent

# Load .env from GRIDVOL_ENV_PATH (system environment) or default to project root
ENV_PATH = os.getenv("GRIDVOL_ENV_PATH", BASE_DIR / ".env")
load_dotenv(ENV_PATH)

APP_VERSION = os.getenv("APP_VERSION", None)

# only used by Django internals (no sessions or signing happen in a batch run)
SECRET_KEY = os.getenv("SECRET_KEY", "gridvol-local-batch")

DEBUG = os.getenv("DEBUG", "False") == "True"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'timeseries',
    'diagnostics',
    'volatility',
    'garch',
    'estimation',
    'forecasting',
    'runs',
]

# No persistence: every run reads delimited files and writes reports
DATABASES = {}

USE_TZ = False

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Numerical defaults of the modeling pipeline
GRIDVOL = {
    'EWMA_LAMBDA': float(os.getenv("GRIDVOL_EWMA_LAMBDA", "0.94")),
    'ANNUALIZATION_DAYS': int(os.getenv("GRIDVOL_ANNUALIZATION_DAYS", "365")),
    'ROLLING_WINDOW': int(os.getenv("GRIDVOL_ROLLING_WINDOW", "30")),
    'FIT_MAX_ITERATIONS': int(os.getenv("GRIDVOL_FIT_MAX_ITERATIONS", "500")),
    'FIT_LOGLIK_TOLERANCE': float(os.getenv("GRIDVOL_FIT_LOGLIK_TOLERANCE", "1e-8")),
    'FIT_GRADIENT_TOLERANCE': float(os.getenv("GRIDVOL_FIT_GRADIENT_TOLERANCE", "1e-5")),
    'FIT_HESSIAN_STEP': float(os.getenv("GRIDVOL_FIT_HESSIAN_STEP", "1e-4")),
    'ARCH_TEST_LAGS': int(os.getenv("GRIDVOL_ARCH_TEST_LAGS", "7")),
    'LJUNG_BOX_LAGS': int(os.getenv("GRIDVOL_LJUNG_BOX_LAGS", "7")),
    'MONTE_CARLO_PATHS': int(os.getenv("GRIDVOL_MONTE_CARLO_PATHS", "10000")),
    'SIMULATION_BURN': int(os.getenv("GRIDVOL_SIMULATION_BURN", "500")),
    'COMPARE_BACKEND': os.getenv("GRIDVOL_COMPARE_BACKEND", "local"),
}


# Logging
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'simple': {
            'format': '{asctime} {levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'simple',
        },
    },
    'root': {
        'handlers': ['console'],
        'level': 'WARNING',
    },
    'loggers': {
        app: {'handlers': ['console'], 'level': LOG_LEVEL, 'propagate': False}
        for app in ['gridvol', 'timeseries', 'diagnostics', 'volatility', 'garch',
                    'estimation', 'forecasting', 'runs']
    },
}


# Celery settings (compare harness fans candidate fits out as tasks)
CELERY_BROKER_URL = os.getenv("CELERY_BROKER_URL", "redis://localhost:6379/0")
CELERY_RESULT_BACKEND = os.getenv("CELERY_RESULT_BACKEND", CELERY_BROKER_URL)
CELERY_TASK_ALWAYS_EAGER = os.getenv("CELERY_TASK_ALWAYS_EAGER", "True") == "True"
CELERY_TASK_EAGER_PROPAGATES = True
CELERY_TASK_SERIALIZER = 'json'
CELERY_RESULT_SERIALIZER = 'json'
CELERY_ACCEPT_CONTENT = ['json']
