# gibbs.py

# Muestreador de Gibbs colapsado para LDA (línea base).
# Protocolo: burn_in barridos descartados y luego `samples` barridos cuyas cuentas
# se promedian (estimador Rao-Blackwell de las cuentas posteriores).
import logging
from dataclasses import dataclass

import numpy as np
from numba import njit

from .exceptions import ConfigError
from .posterior import GIBBS, PosteriorState, expand_prior, prior_to_json

logger = logging.getLogger(__name__)


@dataclass
class GibbsConfig:
    K: int
    alpha: object = 0.1
    beta: object = 0.1
    burn_in: int = 2000
    samples: int = 5000
    seed: int = 0

    def validate(self):
        if int(self.K) != self.K or self.K < 2:
            raise ConfigError(f"K must be an integer >= 2, got {self.K}")
        if not np.all(np.asarray(self.alpha, dtype=float) > 0):
            raise ConfigError("alpha must be positive")
        if not np.all(np.asarray(self.beta, dtype=float) > 0):
            raise ConfigError("beta must be positive")
        if self.burn_in < 1 or self.samples < 1:
            raise ConfigError("burn_in and samples must both be >= 1")

    def to_json(self):
        return {
            'K': self.K,
            'alpha': prior_to_json(self.alpha),
            'beta': prior_to_json(self.beta),
            'burn_in': self.burn_in,
            'samples': self.samples,
            'seed': self.seed,
        }


@dataclass
class GibbsState:
    z: np.ndarray
    n_mk: np.ndarray
    n_kv: np.ndarray
    n_k: np.ndarray
    doc_ids: np.ndarray
    word_ids: np.ndarray
    prior_alpha: np.ndarray
    prior_beta: np.ndarray
    rng: np.random.Generator

    @property
    def K(self):
        return self.n_kv.shape[0]


def initialize(corpus, config):
    config.validate()
    K, V = config.K, corpus.V
    rng = np.random.default_rng(config.seed)
    doc_ids = corpus.doc_ids
    word_ids = corpus.word_ids

    # Asignación inicial uniforme de temas.
    z = rng.integers(0, K, size=corpus.total_tokens)
    n_mk = np.zeros((corpus.M, K), dtype=np.int64)
    n_kv = np.zeros((K, V), dtype=np.int64)
    np.add.at(n_mk, (doc_ids, z), 1)
    np.add.at(n_kv, (z, word_ids), 1)

    return GibbsState(
        z=z,
        n_mk=n_mk,
        n_kv=n_kv,
        n_k=n_kv.sum(axis=1),
        doc_ids=doc_ids,
        word_ids=word_ids,
        prior_alpha=expand_prior(config.alpha, (corpus.M, K), 'alpha'),
        prior_beta=expand_prior(config.beta, (K, V), 'beta'),
        rng=rng,
    )


def conditional(m, v, state):
    """Condicional completa del tópico de un token; su propia asignación ya debe estar quitada.

    ``p(k) ~ (n_mk + alpha_mk) (n_kv + beta_kv) / (n_k + sum_v beta_kv)``.
    """
    beta_totals = state.prior_beta.sum(axis=1)
    weights = ((state.n_mk[m] + state.prior_alpha[m])
               * (state.n_kv[:, v] + state.prior_beta[:, v])
               / (state.n_k + beta_totals))
    return weights / weights.sum()


def sweep(state):
    """Remuestrea cada token una vez, documento por documento y posición por posición."""
    beta_totals = state.prior_beta.sum(axis=1)
    uniforms = state.rng.random(len(state.z))
    sweep_tokens(state.z, state.doc_ids, state.word_ids, state.n_mk, state.n_kv, state.n_k,
                  state.prior_alpha, state.prior_beta, beta_totals, uniforms)
    return state


@njit(cache=True)
def sweep_tokens(z, doc_ids, word_ids, n_mk, n_kv, n_k, prior_alpha, prior_beta, beta_totals, uniforms):
    # Compilado con numba: sólo bucles y aritmética de arrays.
    K = n_k.shape[0]
    weights = np.empty(K)
    for t in range(z.shape[0]):
        m = doc_ids[t]
        v = word_ids[t]
        k = z[t]

        # Retirar la asignación actual.
        n_mk[m, k] -= 1
        n_kv[k, v] -= 1
        n_k[k] -= 1

        total = 0.0
        for j in range(K):
            total += (n_mk[m, j] + prior_alpha[m, j]) * (n_kv[j, v] + prior_beta[j, v]) / (n_k[j] + beta_totals[j])
            weights[j] = total

        # Primer tema cuya suma acumulada supera el uniforme escalado.
        target = uniforms[t] * total
        k = 0
        while k < K - 1 and weights[k] <= target:
            k += 1

        # Volver a añadir con el nuevo tema.
        z[t] = k
        n_mk[m, k] += 1
        n_kv[k, v] += 1
        n_k[k] += 1


def fit(corpus, config, callback=None):
    """Ajuste por Gibbs colapsado; alpha' y beta' son los priors más los conteos promediados tras el burn-in.

    ``callback(state, sweep_index)`` se ejecuta después de cada barrido (burn-in incluido).
    """
    state = initialize(corpus, config)
    logger.info("Gibbs fit: M=%d V=%d K=%d tokens=%d burn_in=%d samples=%d",
                corpus.M, corpus.V, config.K, corpus.total_tokens, config.burn_in, config.samples)

    n_mk_sum = np.zeros(state.n_mk.shape)
    n_kv_sum = np.zeros(state.n_kv.shape)
    total = config.burn_in + config.samples
    for index in range(total):
        sweep(state)
        if index >= config.burn_in:
            n_mk_sum += state.n_mk
            n_kv_sum += state.n_kv
        if callback is not None:
            callback(state, index + 1)
        if (index + 1) % 500 == 0:
            logger.debug("Gibbs sweep %d/%d", index + 1, total)

    posterior = PosteriorState(
        alpha_post=state.prior_alpha + n_mk_sum / config.samples,
        beta_post=state.prior_beta + n_kv_sum / config.samples,
        prior_alpha=state.prior_alpha,
        prior_beta=state.prior_beta,
        epoch=total,
        # Un número fijo de barridos: no hay criterio de convergencia.
        converged=False,
        algorithm=GIBBS,
    )
    logger.info("Gibbs finished after %d sweeps", total)
    return posterior
