import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "gridvol.settings.dev")
django.setup()
