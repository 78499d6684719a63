# exceptions.py

# Jerarquía de errores de la app. Los comandos de gestión capturan TopicModelError
# y lo convierten en CommandError (salida distinta de cero).


class TopicModelError(Exception):
    """Clase base de todos los errores del núcleo de topicmodels."""


class EmptyCorpusError(TopicModelError):
    """Se lanza cuando ningún documento sobrevive al filtrado o el archivo de corpus no tiene ninguno."""

    def __init__(self, message="zero documents"):
        super().__init__(message)


class CorpusFormatError(TopicModelError):
    """Archivo de corpus mal formado; ``line`` es la línea (desde 1) que no se pudo leer."""

    def __init__(self, line, message):
        self.line = line
        super().__init__(f"line {line}: {message}")


class DimensionMismatchError(TopicModelError, ValueError):
    pass


class DegenerateStateError(TopicModelError):
    """Todos los productos por tópico de una rama se anularon; el posterior ya no se puede normalizar."""


class ConfigError(TopicModelError, ValueError):
    pass
