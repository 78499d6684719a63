# experiments.py

# Arnés de barridos: expande un fichero de configuración JSON en ejecuciones
# independientes (dataset x algoritmo x K x alpha x beta x semilla), las ejecuta
# en paralelo y devuelve los resultados. No toca el ORM: los procesos hijos sólo
# hacen cálculo; el comando sweep registra las filas en el ledger.
import csv
import itertools
import logging
import os
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from functools import lru_cache

from . import albu, gibbs
from .corpus import build_corpus, load_stopwords, read_text_corpus
from .evaluation import CSV_COLUMNS, EvalResult, evaluate_against_truth, npmi_coherence, top_words
from .exceptions import ConfigError
from .posterior import ALBU, ALGORITHMS, GIBBS
from .simulator import PRESETS, generate_corpus, preset_settings

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ('run_id', 'epoch', 'avg_kld')


@dataclass(frozen=True)
class RunSpec:
    run_id: str
    algorithm: str
    dataset: str
    K: int
    seed: int
    alpha: float
    beta: float
    window: int
    top_n: int
    epochs: int = 150
    tol: float = 1e-4
    restarts: int = 5
    burn_in: int = 2000
    samples: int = 5000
    preset: str = None
    M: int = None
    text_path: str = None
    stopwords_path: str = None
    min_doc_len: int = 4
    trace_every: int = 0


def schedule_tag(algorithm, epochs=150, tol=1e-4, restarts=5, burn_in=2000, samples=5000):
    # Sólo los ajustes del algoritmo de la ejecución.
    if algorithm == ALBU:
        return f"e{epochs}-tol{tol:g}-r{restarts}"
    return f"bi{burn_in}-ns{samples}"


def make_run_id(dataset, algorithm, K, alpha, beta, seed, schedule, window, top_n):
    """Id estable de una ejecución; cambia con cualquier ajuste que altere sus resultados."""
    return f"{dataset}-{algorithm}-K{K}-a{alpha:g}-b{beta:g}-{schedule}-w{window}-top{top_n}-s{seed}"


def _as_list(value):
    return list(value) if isinstance(value, (list, tuple)) else [value]


def _k_values(value):
    if isinstance(value, dict):
        try:
            return list(range(int(value['from']), int(value['to']) + 1))
        except KeyError as exc:
            raise ConfigError(f"k range needs 'from' and 'to' (missing {exc.args[0]})") from None
    values = [int(k) for k in _as_list(value)]
    if not values:
        raise ConfigError("K range is empty")
    return values


def _seeds(config, default_runs):
    if 'seeds' in config:
        return [int(seed) for seed in _as_list(config['seeds'])]
    start = int(config.get('seed_start', 0))
    return list(range(start, start + int(config.get('n_seeds', default_runs))))


def expand_sweep(config, default_runs=5):
    """Todos los RunSpec de una configuración de barrido, ordenados por run_id."""
    algorithms = _as_list(config.get('algorithms', list(ALGORITHMS)))
    unknown = [name for name in algorithms if name not in ALGORITHMS]
    if unknown:
        raise ConfigError(f"unknown algorithm(s) {unknown}")
    datasets = config.get('datasets')
    if not datasets:
        raise ConfigError("a sweep needs at least one dataset")

    seeds = _seeds(config, default_runs)
    albu_options = config.get('albu', {})
    gibbs_options = config.get('gibbs', {})
    trace_every = int(config.get('trace_every', 0))

    specs = []
    for dataset in datasets:
        if 'preset' in dataset:
            preset = PRESETS.get(dataset['preset'])
            if preset is None:
                raise ConfigError(f"unknown preset {dataset['preset']!r}")
            names = [(f"{dataset['preset']}-M{m}", int(m)) for m in _as_list(dataset.get('m', preset.settings.M))]
            defaults = {
                'k': preset.settings.K, 'alpha': preset.alpha, 'beta': preset.beta,
                'window': preset.window, 'epochs': preset.epochs,
            }
        elif 'text' in dataset:
            if not os.path.exists(dataset['text']):
                raise ConfigError(f"text corpus {dataset['text']} does not exist")
            if dataset.get('stopwords') and not os.path.exists(dataset['stopwords']):
                raise ConfigError(f"stopword file {dataset['stopwords']} does not exist")
            name = dataset.get('name') or os.path.splitext(os.path.basename(dataset['text']))[0]
            names = [(name, None)]
            defaults = {'window': 15, 'epochs': 150}
        else:
            raise ConfigError(f"dataset entry needs 'preset' or 'text': {dataset}")

        if 'k' not in config and 'k' not in defaults:
            raise ConfigError(f"dataset {names[0][0]} needs an explicit 'k'")
        k_values = _k_values(config.get('k', defaults.get('k')))
        alphas = [float(a) for a in _as_list(config.get('alpha', defaults.get('alpha', 0.1)))]
        betas = [float(b) for b in _as_list(config.get('beta', defaults.get('beta', 0.1)))]
        window = int(config.get('window', defaults['window']))
        top_n = int(config.get('top_n', 10))
        epochs = int(albu_options.get('epochs', defaults['epochs']))
        tol = float(albu_options.get('tol', 1e-4))
        restarts = int(albu_options.get('restarts', 5))
        burn_in = int(gibbs_options.get('burn_in', 2000))
        samples = int(gibbs_options.get('samples', 5000))

        for (name, M), algorithm, K, alpha, beta, seed in itertools.product(
                names, algorithms, k_values, alphas, betas, seeds):
            specs.append(RunSpec(
                run_id=make_run_id(name, algorithm, K, alpha, beta, seed,
                                   schedule_tag(algorithm, epochs, tol, restarts, burn_in, samples), window, top_n),
                algorithm=algorithm,
                dataset=name,
                K=K,
                seed=seed,
                alpha=alpha,
                beta=beta,
                window=window,
                top_n=top_n,
                epochs=epochs,
                tol=tol,
                restarts=restarts,
                burn_in=burn_in,
                samples=samples,
                preset=dataset.get('preset'),
                M=M,
                text_path=dataset.get('text'),
                stopwords_path=dataset.get('stopwords'),
                min_doc_len=int(dataset.get('min_doc_len', 4)),
                trace_every=trace_every if algorithm == ALBU and M is not None else 0,
            ))

    run_ids = [spec.run_id for spec in specs]
    if len(set(run_ids)) != len(run_ids):
        raise ConfigError("sweep expands to duplicate run_ids")
    return sorted(specs, key=lambda spec: spec.run_id)


@lru_cache(maxsize=8)
def _text_corpus(path, stopwords_path, min_doc_len):
    stopwords = load_stopwords(stopwords_path) if stopwords_path else frozenset()
    return build_corpus(read_text_corpus(path, stopwords), min_doc_len)


def execute_run(spec):
    """Genera o carga el corpus, ajusta y puntúa. Devuelve (EvalResult, filas de traza)."""
    ground_truth = None
    if spec.preset is not None:
        corpus, ground_truth = generate_corpus(preset_settings(spec.preset, M=spec.M, seed=spec.seed))
    else:
        corpus = _text_corpus(spec.text_path, spec.stopwords_path, spec.min_doc_len)

    traces = []
    # La traza de KLD sólo tiene sentido si K coincide con la verdad de referencia.
    tracing = bool(spec.trace_every) and ground_truth is not None and ground_truth.settings.K == spec.K

    def trace(state):
        if state.epoch % spec.trace_every == 0:
            _, _, avg = evaluate_against_truth(state, ground_truth)
            traces.append({'run_id': spec.run_id, 'epoch': state.epoch, 'avg_kld': repr(avg)})

    started = time.perf_counter()
    if spec.algorithm == ALBU:
        config = albu.AlbuConfig(K=spec.K, alpha=spec.alpha, beta=spec.beta,
                                 max_epochs=spec.epochs, tol=spec.tol, seed=spec.seed,
                                 restarts=spec.restarts)
        state = albu.fit(corpus, config, callback=trace if tracing else None)
    elif spec.algorithm == GIBBS:
        config = gibbs.GibbsConfig(K=spec.K, alpha=spec.alpha, beta=spec.beta,
                                   burn_in=spec.burn_in, samples=spec.samples, seed=spec.seed)
        state = gibbs.fit(corpus, config)
    else:
        raise ConfigError(f"unknown algorithm {spec.algorithm!r}")
    runtime_ms = (time.perf_counter() - started) * 1000.0

    result = EvalResult(
        run_id=spec.run_id, algorithm=spec.algorithm, dataset=spec.dataset,
        M=corpus.M, K=spec.K, seed=spec.seed, epochs=state.epoch, runtime_ms=runtime_ms,
    )
    if ground_truth is not None and ground_truth.settings.K == spec.K:
        result.permutation, result.per_topic_kld, result.avg_kld = evaluate_against_truth(state, ground_truth)
    if spec.window <= int(corpus.doc_lengths.max()):
        topics = [top_words(row, min(spec.top_n, corpus.V)) for row in state.beta_post]
        result.coherence = npmi_coherence(corpus, topics, spec.window)
    return result, traces


def iter_results(specs, workers=1):
    """Entrega (spec, result, traces) según terminan las ejecuciones; en línea si ``workers`` es 1."""
    if workers <= 1 or len(specs) <= 1:
        for spec in specs:
            result, traces = execute_run(spec)
            yield spec, result, traces
        return

    with ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(execute_run, spec): spec for spec in specs}
        for future in as_completed(futures):
            result, traces = future.result()
            yield futures[future], result, traces


# === CSV ===

def read_csv_rows(path):
    if not path or not os.path.exists(path):
        return []
    with open(path, newline='', encoding='utf-8') as handle:
        return list(csv.DictReader(handle))


def write_csv_rows(path, rows, columns=CSV_COLUMNS):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as handle:
        writer = csv.DictWriter(handle, fieldnames=columns, lineterminator='\n')
        writer.writeheader()
        for row in rows:
            writer.writerow({column: row[column] for column in columns})

