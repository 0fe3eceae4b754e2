from .base import *

DEBUG = False

# Fits run on a worker pool instead of inline
CELERY_TASK_ALWAYS_EAGER = False
GRIDVOL['COMPARE_BACKEND'] = "celery"
