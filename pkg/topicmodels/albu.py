# albu.py

# Motor de inferencia ALBU (actualización aproximada de creencias en bucle) para LDA.
#
# Cada token (m, n) del corpus es una "rama" del grafo de factores. En cada época:
#   1. (fase 1) cada rama cancela su propia contribución de la época anterior en
#      alpha' y beta' (alpha'' y beta''), combina el mensaje de la Polya tema-documento
#      con el mensaje de la Polya condicional palabra-tema y normaliza sobre k;
#   2. (fase 2) las proporciones de todas las ramas se suman como cuentas fraccionarias
#      a las Dirichlet previas, reemplazando alpha' y beta'.
# Las dos fases son síncronas: el resultado no depende del orden en que se procesan las ramas.
# Sin proporciones iniciales explícitas se repite el ajuste desde `restarts` sorteos
# y se conserva el de mayor log-verosimilitud de entrenamiento.
import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.special import gammaln

from . import dirichlet
from .exceptions import ConfigError, DegenerateStateError, DimensionMismatchError
from .posterior import ALBU, PosteriorState, prior_to_json

logger = logging.getLogger(__name__)


# === Configuración ===

@dataclass
class AlbuConfig:
    K: int
    alpha: object = 0.1
    beta: object = 0.1
    max_epochs: int = 150
    tol: float = 1e-4
    seed: int = 0
    restarts: int = 5

    def validate(self):
        if int(self.K) != self.K or self.K < 2:
            raise ConfigError(f"K must be an integer >= 2, got {self.K}")
        if not np.all(np.asarray(self.alpha, dtype=float) > 0):
            raise ConfigError("alpha must be positive")
        if not np.all(np.asarray(self.beta, dtype=float) > 0):
            raise ConfigError("beta must be positive")
        if int(self.max_epochs) != self.max_epochs or self.max_epochs < 1:
            raise ConfigError(f"max_epochs must be an integer >= 1, got {self.max_epochs}")
        if not self.tol >= 0:
            raise ConfigError(f"tol must be >= 0, got {self.tol}")
        if int(self.restarts) != self.restarts or self.restarts < 1:
            raise ConfigError(f"restarts must be an integer >= 1, got {self.restarts}")

    def to_json(self):
        return {
            'K': self.K,
            'alpha': prior_to_json(self.alpha),
            'beta': prior_to_json(self.beta),
            'max_epochs': self.max_epochs,
            'tol': self.tol,
            'seed': self.seed,
            'restarts': self.restarts,
        }


# === Estado por rama ===

@dataclass
class BranchState:
    """Estado por token, indexado por el índice aplanado ``t = offset[m] + n``.

    ``proportions`` guarda las últimas proporciones normalizadas de cada rama
    (antes de la primera época, las muestras con semilla que rompen la simetría).
    Las dos matrices de incremento son lo que cada rama sumó por última vez a
    alpha' y beta'; se restan antes de que la rama calcule su siguiente mensaje.
    """

    doc_ids: np.ndarray
    word_ids: np.ndarray
    doc_offsets: np.ndarray
    proportions: np.ndarray
    last_alpha_increment: np.ndarray = field(repr=False)
    last_beta_increment: np.ndarray = field(repr=False)

    def index(self, m, n):
        start, stop = self.doc_offsets[m], self.doc_offsets[m + 1]
        if not 0 <= n < stop - start:
            raise IndexError(f"document {m} has no token {n}")
        return int(start + n)


def initial_draws(corpus, config):
    """Una muestra Dirichlet(1) de T x K por reinicio, todas de un único generador con semilla ``config.seed``."""
    rng = np.random.default_rng(config.seed)
    for _ in range(config.restarts):
        yield rng.dirichlet(np.ones(config.K), size=corpus.total_tokens)


def initialize(corpus, config, initial_proportions=None):
    """Posterior igual al prior más las ramas con las proporciones de la época 1.

    Con priors simétricos todos los tópicos quedarían idénticos para siempre;
    salvo que se pase ``initial_proportions`` (T x K), cada rama parte de la
    primera muestra Dirichlet(1) de la semilla de la configuración.
    """
    config.validate()
    K = config.K
    T = corpus.total_tokens
    state = PosteriorState.from_priors(corpus.M, K, corpus.V, config.alpha, config.beta, algorithm=ALBU)

    if initial_proportions is None:
        proportions = next(initial_draws(corpus, config))
    else:
        proportions = np.array(initial_proportions, dtype=float)
        if proportions.shape != (T, K):
            raise DimensionMismatchError(f"initial proportions must be {(T, K)}, got {proportions.shape}")

    branches = BranchState(
        doc_ids=corpus.doc_ids,
        word_ids=corpus.word_ids,
        doc_offsets=corpus.doc_offsets,
        proportions=proportions,
        last_alpha_increment=np.zeros((T, K)),
        last_beta_increment=np.zeros((T, K)),
    )
    return state, branches


# === Operaciones de una rama ===

def cancel_alpha(state, branches, m, n):
    """alpha''_{m,n}: alpha'_m sin el último incremento de esta rama, acotado abajo por el prior."""
    t = branches.index(m, n)
    return dirichlet.subtract_counts(
        state.alpha_post[m], branches.last_alpha_increment[t], floor=state.prior_alpha[m])


def cancel_beta(state, branches, k, v, m, n):
    """beta''_{k,v} y su suma por fila sum_v beta''_{k,v} para la rama (m, n)."""
    t = branches.index(m, n)
    if branches.word_ids[t] != v:
        raise ValueError(f"branch ({m}, {n}) observed word {branches.word_ids[t]}, not {v}")
    current = state.beta_post[k, v]
    cancelled = max(current - branches.last_beta_increment[t, k], state.prior_beta[k, v], dirichlet.POSITIVITY_FLOOR)
    row_sum = state.beta_post[k].sum() - (current - cancelled)
    return cancelled, row_sum


def z_prior_message(alpha_cancelled):
    # p(Z = k) tras integrar theta_m: la media de Dir(alpha'').
    return dirichlet.mean(alpha_cancelled)


def topic_proportions(z_prior, beta_ratios):
    """``z_prior_k * beta_ratio_k`` normalizado; sirve para una rama o para una pila (T x K)."""
    products = np.asarray(z_prior, dtype=float) * np.asarray(beta_ratios, dtype=float)
    totals = products.sum(axis=-1, keepdims=True)
    if np.any(totals <= 0) or not np.all(np.isfinite(totals)):
        raise DegenerateStateError("every topic product of a branch vanished")
    return products / totals


def alpha_update(proportions, alpha_cancelled, prior_alpha, doc_ids=None):
    """Actualización por conteos fraccionarios de las Dirichlet tópico-documento.

    ``increment_k = p_k alpha''_k / sum_i p_i alpha''_i`` por rama. Sin
    ``doc_ids`` las entradas son las ramas de un documento y ``prior_alpha`` es su
    fila del prior; con ``doc_ids`` son todas las ramas y ``prior_alpha`` es M x K.
    Devuelve el nuevo alpha' (fila o matriz) y los incrementos por rama.
    """
    weighted = np.asarray(proportions, dtype=float) * np.asarray(alpha_cancelled, dtype=float)
    increments = weighted / weighted.sum(axis=-1, keepdims=True)
    if doc_ids is None:
        return np.asarray(prior_alpha, dtype=float) + increments.sum(axis=0), increments

    counts = np.zeros_like(prior_alpha, dtype=float)
    # np.add.at acumula en orden de índice: documento, luego posición.
    np.add.at(counts, doc_ids, increments)
    return prior_alpha + counts, increments


def beta_update(word_ids, proportions, prior_beta):
    """Conteos parciales de todas las ramas sumados al prior palabra-tópico (K x V)."""
    proportions = np.asarray(proportions, dtype=float)
    increments = proportions / proportions.sum(axis=-1, keepdims=True)
    counts = np.zeros((prior_beta.shape[1], prior_beta.shape[0]))
    np.add.at(counts, word_ids, increments)
    return prior_beta + counts.T, increments


# === Época y ajuste ===

def run_epoch(corpus, state, branches):
    """Una época síncrona; devuelve el nuevo posterior y actualiza ``branches`` en sitio."""
    doc_ids = branches.doc_ids
    word_ids = branches.word_ids

    # --- Fase 1: mensajes de todas las ramas desde los posteriores de inicio de época ---
    alpha_cancelled = dirichlet.floor_positive(np.maximum(
        state.alpha_post[doc_ids] - branches.last_alpha_increment,
        state.prior_alpha[doc_ids]))

    beta_columns = state.beta_post[:, word_ids].T
    beta_cancelled = dirichlet.floor_positive(np.maximum(
        beta_columns - branches.last_beta_increment,
        state.prior_beta[:, word_ids].T))
    row_sums = state.beta_post.sum(axis=1)[np.newaxis, :] - (beta_columns - beta_cancelled)
    beta_ratios = beta_cancelled / row_sums

    if state.epoch == 0:
        # Los mensajes de vuelta aún no informan: se usan las proporciones sembradas.
        word_message = branches.proportions
    else:
        word_message = beta_ratios / beta_ratios.sum(axis=1, keepdims=True)

    proportions = topic_proportions(z_prior_message(alpha_cancelled), word_message)

    # --- Fase 2: reemplazo de alpha' y beta' con las cuentas agregadas ---
    alpha_post, alpha_increments = alpha_update(word_message, alpha_cancelled, state.prior_alpha, doc_ids)
    beta_post, beta_increments = beta_update(word_ids, proportions, state.prior_beta)

    branches.proportions = proportions
    branches.last_alpha_increment = alpha_increments
    branches.last_beta_increment = beta_increments

    return replace(state, alpha_post=alpha_post, beta_post=beta_post, epoch=state.epoch + 1, converged=False)


def fit(corpus, config, initial_proportions=None, callback=None):
    """Corre épocas hasta ``max_epochs`` o hasta que ninguna entrada de alpha'/beta' cambie en ``tol`` o más.

    Sin ``initial_proportions`` el ajuste se repite desde ``config.restarts``
    muestras con semilla y se conserva la corrida con mayor log-verosimilitud de
    entrenamiento (la primera en caso de empate). ``callback(state)`` se llama
    después de cada época, sólo para la corrida conservada.
    """
    config.validate()
    logger.info("ALBU fit: M=%d V=%d K=%d tokens=%d restarts=%d",
                corpus.M, corpus.V, config.K, corpus.total_tokens, config.restarts)
    if initial_proportions is not None or config.restarts == 1:
        state = _fit_once(corpus, config, initial_proportions, callback)
        logger.info("ALBU finished after %d epochs (converged=%s)", state.epoch, state.converged)
        return state

    best, best_score, best_epochs = None, -math.inf, []
    for restart, draws in enumerate(initial_draws(corpus, config)):
        epochs = []
        state = _fit_once(corpus, config, draws, epochs.append if callback is not None else None)
        score = state.log_likelihood(corpus)
        logger.debug("restart %d: log-likelihood %.6f after %d epochs", restart, score, state.epoch)
        if score > best_score:
            best, best_score, best_epochs = state, score, epochs

    if callback is not None:
        for state in best_epochs:
            callback(state)
    logger.info("ALBU finished after %d epochs (converged=%s, log-likelihood %.6f)",
                best.epoch, best.converged, best_score)
    return best


def _fit_once(corpus, config, initial_proportions, callback):
    state, branches = initialize(corpus, config, initial_proportions)
    for _ in range(config.max_epochs):
        previous = state
        state = run_epoch(corpus, previous, branches)
        change = max(
            float(np.max(np.abs(state.alpha_post - previous.alpha_post))),
            float(np.max(np.abs(state.beta_post - previous.beta_post))),
        )
        logger.debug("epoch %d: max parameter change %.3e", state.epoch, change)
        if callback is not None:
            callback(state)
        if change < config.tol:
            state.converged = True
            break
    return state


# === Diagnóstico: mensaje exacto theta ===
# El mensaje exacto de f_Z hacia theta_m no es conjugado con la Dirichlet; se tabula
# en una malla del símplex (K <= 3) para compararlo con la aproximación de cuentas
# fraccionarias.

@dataclass
class ThetaMessageGrid:
    points: np.ndarray
    weights: np.ndarray
    exact: np.ndarray
    approximate: np.ndarray

    def mass(self, which='exact'):
        return float(np.sum(self.weights * getattr(self, which)))

    def mean(self, which='exact'):
        density = getattr(self, which)
        return (self.weights * density) @ self.points


def _log_dirichlet_pdf(points, params):
    return (gammaln(params.sum()) - gammaln(params).sum()
            + np.sum((params - 1.0) * np.log(points), axis=1))


def _simplex_grid(K, resolution):
    n = resolution
    if K == 2:
        t = (np.arange(n) + 0.5) / n
        return np.column_stack((t, 1.0 - t)), np.full(n, 1.0 / n)

    # Centroides de la triangulación regular del símplex en coordenadas (theta_1, theta_2).
    i, j = np.meshgrid(np.arange(n), np.arange(n), indexing='ij')
    up = (i + j) <= n - 1
    down = (i + j) <= n - 2
    xs = np.concatenate(((i[up] + 1.0 / 3) / n, (i[down] + 2.0 / 3) / n))
    ys = np.concatenate(((j[up] + 1.0 / 3) / n, (j[down] + 2.0 / 3) / n))
    points = np.column_stack((xs, ys, 1.0 - xs - ys))
    return points, np.full(len(points), 1.0 / (2 * n * n))


def exact_theta_message_diagnostic(alpha_cancelled, proportions, resolution=400):
    """Tabula el mensaje exacto sobre theta de una rama y su aproximación Dirichlet.

    Exacto: ``Dir(theta; a) * sum(a) * (p . theta) / (p . a)``;
    aproximado: ``Dir(theta; a + p*a / (p . a))``. Las densidades son respecto de
    la medida de Lebesgue sobre las primeras K-1 coordenadas.
    """
    alpha_cancelled = np.asarray(alpha_cancelled, dtype=float)
    proportions = np.asarray(proportions, dtype=float)
    K = alpha_cancelled.shape[0]
    if proportions.shape != (K,):
        raise DimensionMismatchError(f"proportions must have length {K}")
    if K < 2 or K > 3:
        raise ConfigError(f"the exact message is only tabulated for K <= 3, got K={K}")

    points, weights = _simplex_grid(K, resolution)
    weighted_total = float(proportions @ alpha_cancelled)
    log_prior = _log_dirichlet_pdf(points, alpha_cancelled)
    exact = np.exp(log_prior) * alpha_cancelled.sum() * (points @ proportions) / weighted_total

    increment = proportions * alpha_cancelled / weighted_total
    approximate = np.exp(_log_dirichlet_pdf(points, alpha_cancelled + increment))
    logger.debug("theta message grid: K=%d, %d points, mass %.6f", K, len(points), math.fsum(weights * exact))
    return ThetaMessageGrid(points, weights, exact, approximate)
