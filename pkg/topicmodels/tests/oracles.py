# oracles.py

# Enumeración exacta de todas las asignaciones de temas de un corpus diminuto.
import itertools

import numpy as np
from scipy.special import gammaln

from topicmodels.corpus import Corpus, Document, Vocabulary


def tiny_corpus():
    """Dos documentos de dos tokens sobre un vocabulario de tres palabras."""
    return Corpus(Vocabulary.from_tokens(['apple', 'berry', 'cherry']),
                  (Document((0, 0)), Document((1, 2))))


def exact_expected_counts(corpus, prior_alpha, prior_beta):
    """Esperanzas posteriores de n_mk y n_kv sumando sobre las K^T asignaciones."""
    K, V = prior_beta.shape
    doc_ids = corpus.doc_ids
    word_ids = corpus.word_ids
    log_weights = []
    n_mk_list = []
    n_kv_list = []

    for z in itertools.product(range(K), repeat=len(word_ids)):
        z = np.array(z)
        n_mk = np.zeros((corpus.M, K))
        n_kv = np.zeros((K, V))
        np.add.at(n_mk, (doc_ids, z), 1)
        np.add.at(n_kv, (z, word_ids), 1)

        alpha_rows = prior_alpha + n_mk
        beta_rows = prior_beta + n_kv
        log_weight = (np.sum(gammaln(prior_alpha.sum(1)) - gammaln(alpha_rows.sum(1)))
                      + np.sum(gammaln(alpha_rows) - gammaln(prior_alpha))
                      + np.sum(gammaln(prior_beta.sum(1)) - gammaln(beta_rows.sum(1)))
                      + np.sum(gammaln(beta_rows) - gammaln(prior_beta)))
        log_weights.append(log_weight)
        n_mk_list.append(n_mk)
        n_kv_list.append(n_kv)

    log_weights = np.array(log_weights)
    weights = np.exp(log_weights - log_weights.max())
    weights /= weights.sum()
    expected_mk = np.tensordot(weights, np.array(n_mk_list), axes=1)
    expected_kv = np.tensordot(weights, np.array(n_kv_list), axes=1)
    return expected_mk, expected_kv


def exact_phi(corpus, prior_alpha, prior_beta):
    _, expected_kv = exact_expected_counts(corpus, prior_alpha, prior_beta)
    rows = prior_beta + expected_kv
    return rows / rows.sum(axis=1, keepdims=True)
