# evaluation.py

# Emparejamiento de temas, KLD promedio contra la verdad de referencia,
# palabras principales y coherencia NPMI con ventana deslizante booleana.
import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from gensim.corpora import Dictionary
from gensim.models import CoherenceModel
from scipy.optimize import linear_sum_assignment

from . import dirichlet
from .exceptions import ConfigError, DimensionMismatchError

logger = logging.getLogger(__name__)

NPMI_EPSILON = 1e-12

CSV_COLUMNS = ('run_id', 'algorithm', 'dataset', 'M', 'K', 'seed', 'epochs', 'avg_kld', 'coherence', 'runtime_ms')


@dataclass
class EvalResult:
    """Puntajes de un modelo ajustado; ``permutation[k]`` es el tópico aprendido emparejado con el tópico real k."""

    run_id: str
    algorithm: str
    dataset: str
    M: int
    K: int
    seed: int
    epochs: int
    permutation: list = field(default_factory=list)
    per_topic_kld: list = field(default_factory=list)
    avg_kld: float = None
    coherence: float = None
    runtime_ms: float = None

    def as_row(self):
        return {
            'run_id': self.run_id,
            'algorithm': self.algorithm,
            'dataset': self.dataset,
            'M': self.M,
            'K': self.K,
            'seed': self.seed,
            'epochs': self.epochs,
            'avg_kld': '' if self.avg_kld is None else repr(float(self.avg_kld)),
            'coherence': '' if self.coherence is None else repr(float(self.coherence)),
            'runtime_ms': '' if self.runtime_ms is None else f"{self.runtime_ms:.0f}",
        }


# === KLD ===

def kld_cost_matrix(learnt_means, true_means):
    learnt_means = np.asarray(learnt_means, dtype=float)
    true_means = np.asarray(true_means, dtype=float)
    if learnt_means.shape != true_means.shape:
        raise DimensionMismatchError(
            f"learnt topics {learnt_means.shape} do not match true topics {true_means.shape}")
    K = true_means.shape[0]
    cost = np.empty((K, K))
    for k in range(K):
        for j in range(K):
            cost[k, j] = dirichlet.kld(true_means[k], learnt_means[j])
    return cost


def match_topics(learnt_means, true_means):
    """Biyección real -> aprendido que minimiza la suma de KLD(true_k || learnt_j)."""
    cost = kld_cost_matrix(learnt_means, true_means)
    rows, cols = linear_sum_assignment(cost)
    permutation = np.empty(len(rows), dtype=int)
    permutation[rows] = cols
    return permutation.tolist()


def per_topic_kld(true_means, learnt_means, permutation):
    true_means = np.asarray(true_means, dtype=float)
    learnt_means = np.asarray(learnt_means, dtype=float)
    if sorted(permutation) != list(range(len(true_means))):
        raise ValueError(f"{permutation} is not a permutation of {len(true_means)} topics")
    return [dirichlet.kld(true_means[k], learnt_means[j]) for k, j in enumerate(permutation)]


def average_kld(true_means, learnt_means, permutation):
    return float(np.mean(per_topic_kld(true_means, learnt_means, permutation)))


# === Palabras principales ===

def top_words(row, n):
    """Ids de las ``n`` entradas mayores; en empate gana el id menor."""
    row = np.asarray(row, dtype=float)
    if n > len(row):
        raise ConfigError(f"cannot take {n} top words from {len(row)}")
    # El orden estable conserva los ids ascendentes dentro de cada empate.
    return np.argsort(-row, kind='stable')[:n].tolist()


def top_tokens(row, n, vocabulary):
    return [vocabulary.id_to_token[i] for i in top_words(row, n)]


# === Coherencia NPMI ===

def check_window(corpus, window):
    if window < 2:
        raise ConfigError(f"window must be >= 2, got {window}")
    if window > int(corpus.doc_lengths.max()):
        raise ConfigError(f"window {window} is larger than every document")


def npmi_pair(p_i, p_j, p_ij, epsilon=NPMI_EPSILON):
    if p_i == 0 or p_j == 0:
        return -1.0
    joint = p_ij + epsilon
    if joint >= 1.0:
        # Los dos ids aparecen en todas las ventanas.
        return 1.0
    value = np.log(joint / (p_i * p_j)) / -np.log(joint)
    return float(np.clip(value, -1.0, 1.0))


def npmi_coherence(corpus, topics, window, epsilon=NPMI_EPSILON, per_topic=False):
    """Media sobre los tópicos del NPMI medio por pares de los ids de palabras top.

    Los conteos por ventana y el log-cociente normalizado salen del pipeline
    ``c_npmi`` de gensim (ventanas deslizantes booleanas; un documento más corto
    que la ventana cuenta como una ventana). Los tópicos con algún par fuera del
    rango finito de gensim (una palabra que nunca aparece, o dos palabras presentes
    en todas las ventanas) se puntúan par a par con ``npmi_pair`` sobre los mismos
    conteos; un tópico de una sola palabra puntúa 0.
    """
    if not topics or any(len(words) == 0 for words in topics):
        raise ConfigError("top-word lists must be non-empty")
    check_window(corpus, window)
    if all(len(words) < 2 for words in topics):
        # Un tema de una sola palabra no tiene pares.
        return (0.0, [0.0] * len(topics)) if per_topic else 0.0

    tokens = corpus.vocabulary.id_to_token
    dictionary = Dictionary([list(tokens)])
    model = CoherenceModel(
        topics=[[tokens[word] for word in words] for words in topics],
        texts=[[tokens[word] for word in document.tokens] for document in corpus.documents],
        dictionary=dictionary, coherence='c_npmi', window_size=window,
        topn=max(len(words) for words in topics), processes=1,
    )
    accumulator = model.estimate_probabilities()
    n_windows = accumulator.num_docs

    def probability(*ids):
        return accumulator[ids[0] if len(ids) == 1 else ids] / n_windows

    scores = [0.0] * len(topics)
    regular = []
    for index, words in enumerate(topics):
        pairs = list(combinations([dictionary.token2id[tokens[word]] for word in words], 2))
        if not pairs:
            continue
        if epsilon == NPMI_EPSILON and all(
                probability(a) > 0 and probability(b) > 0 and probability(a, b) + epsilon < 1.0
                for a, b in pairs):
            regular.append(index)
        else:
            scores[index] = float(np.mean([
                npmi_pair(probability(a), probability(b), probability(a, b), epsilon) for a, b in pairs]))

    if regular:
        segmented = model.measure.seg([model.topics[index] for index in regular])
        for index, value in zip(regular, model.get_coherence_per_topic(segmented_topics=segmented)):
            scores[index] = float(np.clip(value, -1.0, 1.0))

    logger.debug("NPMI over %d windows of size %d: %s", n_windows, window, scores)
    corpus_score = float(np.mean(scores))
    return (corpus_score, scores) if per_topic else corpus_score


def evaluate_against_truth(state, ground_truth):
    """KLD por tópico emparejado entre las filas phi reales y las medias phi aprendidas."""
    learnt = state.phi_means()
    true = ground_truth.phi_true
    if learnt.shape[1] != true.shape[1]:
        raise DimensionMismatchError(f"model V={learnt.shape[1]} but ground truth V={true.shape[1]}")
    if learnt.shape[0] != true.shape[0]:
        raise DimensionMismatchError(f"model K={learnt.shape[0]} but ground truth K={true.shape[0]}")
    permutation = match_topics(learnt, true)
    per_topic = per_topic_kld(true, learnt, permutation)
    return permutation, per_topic, float(np.mean(per_topic))
