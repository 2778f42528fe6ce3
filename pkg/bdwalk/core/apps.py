from django.apps import AppConfig


class CoreConfig(AppConfig):
    name = 'bdwalk.core'
    verbose_name = "Shared plumbing"

    def ready(self):
        from . import checks  # noqa: F401
