from django.apps import AppConfig


class ScatteringConfig(AppConfig):
    name = 'scattering'
    verbose_name = 'Effective scattering length'
