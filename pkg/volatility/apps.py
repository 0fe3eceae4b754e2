from django.apps import AppConfig


class VolatilityConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'volatility'
