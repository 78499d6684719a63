# dirichlet.py

# Aritmética de parámetros de Dirichlet. Nunca se evalúan densidades aquí:
# el algoritmo sólo necesita vectores de parámetros.
import numpy as np

from .exceptions import DimensionMismatchError

# Suelo de positividad tras cualquier resta de incrementos.
POSITIVITY_FLOOR = 1e-10
# Suelo de q en la KLD.
KLD_FLOOR = 1e-12


def _check_same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"dimension mismatch: {a.shape} vs {b.shape}")


def floor_positive(params):
    return np.maximum(params, POSITIVITY_FLOOR)


def mean(params):
    """Media de Dir(params): ``params / sum(params)``; en matrices opera por filas."""
    params = np.asarray(params, dtype=float)
    return params / params.sum(axis=-1, keepdims=True)


def kld(p, q):
    """KL(p || q) entre distribuciones categóricas, con ``0 ln(0/q) = 0``."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    _check_same_shape(p, q)
    q = np.maximum(q, KLD_FLOOR)
    support = p > 0
    value = float(np.sum(p[support] * np.log(p[support] / q[support])))
    # Errores de redondeo pueden dar -1e-17 cuando p ~ q.
    return max(value, 0.0)


def add_counts(params, increment):
    params = np.asarray(params, dtype=float)
    increment = np.asarray(increment, dtype=float)
    _check_same_shape(params, increment)
    return params + increment


def subtract_counts(params, increment, floor=None):
    """Inverso de :func:`add_counts`, acotado en ``floor`` (si se da) y en el piso de positividad."""
    params = np.asarray(params, dtype=float)
    increment = np.asarray(increment, dtype=float)
    _check_same_shape(params, increment)
    result = params - increment
    if floor is not None:
        result = np.maximum(result, floor)
    return floor_positive(result)
