from django.apps import AppConfig


class DrivenConfig(AppConfig):
    name = 'driven'
    verbose_name = 'Управляемая бипартитная решётка'
