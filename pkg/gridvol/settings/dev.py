from .base import *

DEBUG = True
LOG_LEVEL = "DEBUG"

for logger_config in LOGGING['loggers'].values():
    logger_config['level'] = LOG_LEVEL
