from hypothesis import settings

# Las suites aleatorias recorren al menos 100 casos cada una.
settings.register_profile('topicmodels', max_examples=100, deadline=None)
settings.load_profile('topicmodels')
