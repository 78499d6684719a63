# posterior.py

# Estado posterior compartido por ALBU y Gibbs: matrices de parámetros de Dirichlet
# alpha' (M x K) y beta' (K x V), más su lectura/escritura como JSON.
import json
import logging
import os
from dataclasses import dataclass

import numpy as np

from . import dirichlet
from .corpus import file_sha256
from .exceptions import ConfigError, DimensionMismatchError

logger = logging.getLogger(__name__)

ALBU = 'albu'
GIBBS = 'gibbs'
ALGORITHMS = (ALBU, GIBBS)


def expand_prior(value, shape, name):
    """Expande un prior escalar o matricial a ``shape``; todas las entradas deben ser positivas."""
    prior = np.asarray(value, dtype=float)
    if prior.ndim == 0:
        prior = np.full(shape, float(prior))
    elif prior.shape != shape:
        raise DimensionMismatchError(f"{name} prior has shape {prior.shape}, expected {shape}")
    else:
        prior = prior.copy()
    if not np.all(prior > 0):
        raise ConfigError(f"{name} prior must be positive")
    return prior


def prior_to_json(value):
    prior = np.asarray(value, dtype=float)
    return float(prior) if prior.ndim == 0 else prior.tolist()


@dataclass
class PosteriorState:
    alpha_post: np.ndarray
    beta_post: np.ndarray
    prior_alpha: np.ndarray
    prior_beta: np.ndarray
    epoch: int = 0
    converged: bool = False
    algorithm: str = ALBU

    @classmethod
    def from_priors(cls, M, K, V, alpha, beta, algorithm=ALBU):
        prior_alpha = expand_prior(alpha, (M, K), 'alpha')
        prior_beta = expand_prior(beta, (K, V), 'beta')
        return cls(prior_alpha.copy(), prior_beta.copy(), prior_alpha, prior_beta, algorithm=algorithm)

    @property
    def K(self):
        return self.beta_post.shape[0]

    @property
    def V(self):
        return self.beta_post.shape[1]

    @property
    def M(self):
        return self.alpha_post.shape[0]

    def phi_means(self):
        return dirichlet.mean(self.beta_post)

    def theta_means(self):
        return dirichlet.mean(self.alpha_post)

    def log_likelihood(self, corpus):
        """Log-verosimilitud de entrenamiento ``sum_t log sum_k theta_mk phi_kv`` en las medias del posterior."""
        if (corpus.M, corpus.V) != (self.M, self.V):
            raise DimensionMismatchError(
                f"corpus is M={corpus.M} V={corpus.V} but the posterior is M={self.M} V={self.V}")
        theta = self.theta_means()[corpus.doc_ids]
        phi = self.phi_means()[:, corpus.word_ids].T
        return float(np.sum(np.log(np.einsum('tk,tk->t', theta, phi))))


@dataclass
class FittedModel:
    """Un posterior cargado de disco junto con los metadatos de la ejecución."""

    state: PosteriorState
    config: dict
    seed: int
    corpus_path: str
    corpus_sha256: str


# === JSON ===

def save_model(state, config, seed, corpus_path, path):
    payload = {
        'algorithm': state.algorithm,
        'config': config,
        'seed': seed,
        'epochs_run': state.epoch,
        'converged': state.converged,
        'alpha_post': state.alpha_post.tolist(),
        'beta_post': state.beta_post.tolist(),
        'corpus': {
            'path': os.path.abspath(corpus_path) if corpus_path else None,
            'sha256': file_sha256(corpus_path) if corpus_path else None,
        },
    }
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(payload, handle, sort_keys=True)
        handle.write('\n')
    logger.info("wrote %s model to %s", state.algorithm, path)


def load_model(path):
    with open(path, encoding='utf-8') as handle:
        payload = json.load(handle)

    try:
        alpha_post = np.asarray(payload['alpha_post'], dtype=float)
        beta_post = np.asarray(payload['beta_post'], dtype=float)
        config = payload['config']
        algorithm = payload['algorithm']
    except KeyError as exc:
        raise ConfigError(f"model file {path} lacks field {exc.args[0]}") from None
    if alpha_post.ndim != 2 or beta_post.ndim != 2 or alpha_post.shape[1] != beta_post.shape[0]:
        raise DimensionMismatchError(f"model file {path} has inconsistent matrix shapes")

    M, K = alpha_post.shape
    V = beta_post.shape[1]
    state = PosteriorState(
        alpha_post=alpha_post,
        beta_post=beta_post,
        prior_alpha=expand_prior(config.get('alpha', 0.1), (M, K), 'alpha'),
        prior_beta=expand_prior(config.get('beta', 0.1), (K, V), 'beta'),
        epoch=int(payload.get('epochs_run', 0)),
        converged=bool(payload.get('converged', False)),
        algorithm=algorithm,
    )
    corpus = payload.get('corpus') or {}
    return FittedModel(state, config, payload.get('seed'), corpus.get('path'), corpus.get('sha256'))
