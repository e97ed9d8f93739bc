from django.apps import AppConfig


class FraccionalConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fraccional'
    verbose_name = 'Difusion fraccional en el tiempo'
