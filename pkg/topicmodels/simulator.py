# simulator.py

# Generador de corpus sintéticos con verdad de referencia conocida.
#
# Las palabras son números: el vocabulario se parte en bloques contiguos, uno por tema
# regular y uno para el tema de palabras vacías (stop words). Así, al ordenar los ids,
# las distribuciones palabra-tema se pueden inspeccionar visualmente.
import json
import logging
from dataclasses import asdict, dataclass, replace
from functools import cached_property

import numpy as np

from .corpus import Corpus, Document, Vocabulary
from .exceptions import ConfigError

logger = logging.getLogger(__name__)

# Concentración del bloque propio y de los vecinos inmediatos (relativas a beta_gen).
BLOCK_CONCENTRATION = 10.0
ADJACENT_CONCENTRATION = 0.1


@dataclass(frozen=True)
class SimSettings:
    V: int
    K_regular: int
    topics_per_doc: int
    doc_len: int
    M: int
    alpha_gen: float
    beta_gen: float
    seed: int = 0

    @property
    def K(self):
        # Temas regulares más el tema de palabras vacías.
        return self.K_regular + 1

    @property
    def stopword_topic(self):
        return self.K_regular

    def validate(self):
        if self.K_regular < 1:
            raise ConfigError("K_regular must be >= 1")
        if not 1 <= self.topics_per_doc <= self.K_regular:
            raise ConfigError(f"topics_per_doc must be in [1, {self.K_regular}], got {self.topics_per_doc}")
        if self.doc_len < 1 or self.M < 1:
            raise ConfigError("doc_len and M must be >= 1")
        if self.alpha_gen <= 0 or self.beta_gen <= 0:
            raise ConfigError("generation concentrations must be positive")
        if self.V < self.K:
            raise ConfigError(f"V={self.V} is too small to partition into {self.K} topic blocks")


@dataclass(frozen=True)
class Preset:
    """Ajustes del corpus más los ajustes de inferencia que se usan con ellos."""

    settings: SimSettings
    m_values: tuple
    alpha: float
    beta: float
    window: int
    epochs: int


PRESETS = {
    'smaller': Preset(
        settings=SimSettings(V=100, K_regular=6, topics_per_doc=3, doc_len=100, M=100,
                             alpha_gen=0.5, beta_gen=0.5),
        m_values=(50, 100, 200, 300, 500, 5000),
        alpha=0.5, beta=0.5, window=15, epochs=70,
    ),
    'bigger': Preset(
        settings=SimSettings(V=500, K_regular=9, topics_per_doc=6, doc_len=120, M=100,
                             alpha_gen=0.1, beta_gen=0.1),
        m_values=(100, 200, 300, 500),
        alpha=0.1, beta=0.1, window=10, epochs=200,
    ),
}


def preset_settings(name, **overrides):
    try:
        preset = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    overrides = {key: value for key, value in overrides.items() if value is not None}
    return replace(preset.settings, **overrides)


@dataclass
class GroundTruth:
    phi_true: np.ndarray
    theta_true: np.ndarray
    settings: SimSettings

    @cached_property
    def phi_cdf(self):
        return np.cumsum(self.phi_true, axis=1)

    def topic_blocks(self):
        return np.array_split(np.arange(self.settings.V), self.settings.K)


# === Generación ===

def generate_ground_truth(settings, rng=None):
    """Filas palabra-tópico; ``theta_true`` queda vacío hasta generar los documentos."""
    settings.validate()
    if rng is None:
        rng = np.random.default_rng(settings.seed)

    V, K = settings.V, settings.K
    blocks = np.array_split(np.arange(V), K)
    stop_start = blocks[-1][0]
    phi = np.zeros((K, V))

    for k, block in enumerate(blocks[:-1]):
        params = np.zeros(V)
        # Vecinos inmediatos a cada lado del bloque, sin invadir el bloque de palabras vacías.
        width = max(1, len(block) // 2)
        left = np.arange(max(0, block[0] - width), block[0])
        right = np.arange(block[-1] + 1, min(stop_start, block[-1] + 1 + width))
        params[left] = settings.beta_gen * ADJACENT_CONCENTRATION
        params[right] = settings.beta_gen * ADJACENT_CONCENTRATION
        params[block] = settings.beta_gen * BLOCK_CONCENTRATION
        support = np.flatnonzero(params)
        phi[k, support] = rng.dirichlet(params[support])

    stop_block = blocks[-1]
    phi[-1, stop_block] = rng.dirichlet(np.full(len(stop_block), settings.beta_gen * BLOCK_CONCENTRATION))

    return GroundTruth(phi_true=phi, theta_true=np.empty((0, K)), settings=settings)


def generate_document(ground_truth, settings, rng):
    """Elige ``topics_per_doc`` tópicos regulares más el tópico de stopwords y luego muestrea los tokens."""
    K = settings.K
    chosen = rng.choice(settings.K_regular, size=settings.topics_per_doc, replace=False)
    components = np.append(chosen, settings.stopword_topic)
    theta = np.zeros(K)
    theta[components] = rng.dirichlet(np.full(len(components), settings.alpha_gen))

    topics = rng.choice(K, size=settings.doc_len, p=theta)
    cdf = ground_truth.phi_cdf[topics]
    targets = rng.random(settings.doc_len) * cdf[:, -1]
    words = np.minimum((cdf <= targets[:, np.newaxis]).sum(axis=1), settings.V - 1)
    return Document(tuple(int(word) for word in words)), theta


def generate_corpus(settings):
    """M documentos con semilla y su verdad de referencia; un solo generador produce todo el corpus."""
    rng = np.random.default_rng(settings.seed)
    ground_truth = generate_ground_truth(settings, rng)

    documents = []
    thetas = []
    for _ in range(settings.M):
        document, theta = generate_document(ground_truth, settings, rng)
        documents.append(document)
        thetas.append(theta)
    ground_truth.theta_true = np.vstack(thetas)

    width = len(str(settings.V - 1))
    vocabulary = Vocabulary.from_tokens(f"w{v:0{width}d}" for v in range(settings.V))
    logger.info("simulated corpus: M=%d V=%d K=%d seed=%d", settings.M, settings.V, settings.K, settings.seed)
    return Corpus(vocabulary, tuple(documents)), ground_truth


# === JSON ===

def save_ground_truth(ground_truth, path, corpus_file=None):
    payload = {
        'settings': asdict(ground_truth.settings),
        'seed': ground_truth.settings.seed,
        'phi_true': ground_truth.phi_true.tolist(),
        'theta_true': ground_truth.theta_true.tolist(),
        'corpus': corpus_file,
    }
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(payload, handle, sort_keys=True)
        handle.write('\n')


def load_ground_truth(path):
    with open(path, encoding='utf-8') as handle:
        payload = json.load(handle)
    try:
        settings = SimSettings(**payload['settings'])
        phi = np.asarray(payload['phi_true'], dtype=float)
        theta = np.asarray(payload['theta_true'], dtype=float)
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"ground-truth file {path} is malformed: {exc}") from None
    return GroundTruth(phi_true=phi, theta_true=theta.reshape(-1, settings.K), settings=settings)
