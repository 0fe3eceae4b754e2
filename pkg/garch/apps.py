from django.apps import AppConfig


class GarchConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'garch'
