from django.apps import AppConfig


class TopicmodelsConfig(AppConfig):
    name = 'topicmodels'
    verbose_name = 'ALBU topic models'
