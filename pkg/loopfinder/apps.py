from django.apps import AppConfig


class LoopfinderConfig(AppConfig):
    name = "loopfinder"
    verbose_name = "Loop Finder"
