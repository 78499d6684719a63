# evaluate.py

# Evalúa un modelo guardado: KLD emparejada contra la verdad de referencia y/o
# coherencia NPMI sobre el corpus. Imprime un resumen, registra la fila en el ledger y
# reescribe el CSV de resultados desde el ledger.
import logging
import os

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from topicmodels.cli import ensure_parent, require_file
from topicmodels.corpus import file_sha256, load_corpus
from topicmodels.evaluation import EvalResult, evaluate_against_truth, npmi_coherence, top_tokens, top_words
from topicmodels.exceptions import TopicModelError
from topicmodels.experiments import make_run_id, read_csv_rows, schedule_tag
from topicmodels.models import ExperimentRun
from topicmodels.posterior import ALBU, load_model
from topicmodels.simulator import load_ground_truth

logger = logging.getLogger(__name__)

KLD = 'kld'
NPMI = 'npmi'


class Command(BaseCommand):
    help = "Score a fitted model against ground truth (KLD) and/or by NPMI coherence."

    def add_arguments(self, parser):
        parser.add_argument('model', help="model JSON written by fit")
        parser.add_argument('--truth', help="ground-truth JSON written by simulate")
        parser.add_argument('--corpus', help="corpus file; defaults to the one the model was fitted on")
        parser.add_argument('--metric', choices=(KLD, NPMI), action='append',
                            help="repeatable; defaults to kld with --truth, npmi otherwise")
        parser.add_argument('--window', type=int, default=settings.NPMI_WINDOW)
        parser.add_argument('--top-n', type=int, default=settings.TOP_N)
        parser.add_argument('--show-top-words', action='store_true')
        parser.add_argument('--dataset', help="dataset label for the results row")
        parser.add_argument('--results', default=None, help="results CSV to append to")

    def handle(self, *args, **options):
        model_path = require_file(options['model'], "model file")
        metrics = options['metric'] or [KLD if options['truth'] else NPMI]
        try:
            model = load_model(model_path)
        except (TopicModelError, OSError, ValueError) as exc:
            raise CommandError(f"cannot read model {model_path}: {exc}") from exc
        state = model.state

        corpus_path = options['corpus'] or model.corpus_path
        corpus = None
        if NPMI in metrics or options['show_top_words']:
            corpus_path = require_file(corpus_path, "corpus file")
            if not options['corpus'] and model.corpus_sha256 and file_sha256(corpus_path) != model.corpus_sha256:
                logger.warning("corpus %s changed since the model was fitted", corpus_path)
            try:
                corpus = load_corpus(corpus_path)
            except (TopicModelError, OSError) as exc:
                raise CommandError(str(exc)) from exc
            if corpus.V != state.V:
                raise CommandError(f"model V={state.V} but corpus V={corpus.V}")

        dataset = options['dataset'] or os.path.splitext(os.path.basename(
            options['truth'] or corpus_path or model_path))[0].replace('.truth', '')
        result = EvalResult(
            run_id=make_run_id(dataset, state.algorithm, state.K,
                               _scalar(model.config.get('alpha')), _scalar(model.config.get('beta')),
                               model.seed or 0, _schedule(state.algorithm, model.config),
                               options['window'], options['top_n']),
            algorithm=state.algorithm, dataset=dataset, M=state.M, K=state.K,
            seed=model.seed or 0, epochs=state.epoch,
        )

        try:
            if KLD in metrics:
                ground_truth = load_ground_truth(require_file(options['truth'], "ground-truth file"))
                result.permutation, result.per_topic_kld, result.avg_kld = \
                    evaluate_against_truth(state, ground_truth)
            if NPMI in metrics:
                topics = [top_words(row, min(options['top_n'], state.V)) for row in state.beta_post]
                result.coherence = npmi_coherence(corpus, topics, options['window'])
        except (TopicModelError, OSError) as exc:
            raise CommandError(str(exc)) from exc

        results_path = options['results'] or settings.ALBU_RESULTS_CSV
        try:
            existing_rows = read_csv_rows(results_path)
            ExperimentRun.import_rows(existing_rows)
            ExperimentRun.record(result)
            ensure_parent(results_path)
            ExperimentRun.export_csv(results_path, [row['run_id'] for row in existing_rows] + [result.run_id])
        except OSError as exc:
            raise CommandError(f"cannot write results: {exc}") from exc

        self._summary(result, state, corpus, options)

    def _summary(self, result, state, corpus, options):
        if result.avg_kld is not None:
            self.stdout.write(f"avg_kld: {result.avg_kld:.6f}")
            for k, (j, value) in enumerate(zip(result.permutation, result.per_topic_kld)):
                self.stdout.write(f"  true topic {k} <- learnt topic {j}: KLD {value:.6f}")
        if result.coherence is not None:
            self.stdout.write(f"npmi (window {options['window']}, top {options['top_n']}): {result.coherence:.6f}")
        if options['show_top_words'] and corpus is not None:
            for k, row in enumerate(state.beta_post):
                words = top_tokens(row, min(options['top_n'], state.V), corpus.vocabulary)
                self.stdout.write(f"  topic {k}: {' '.join(words)}")


def _scalar(value):
    # Los priores asimétricos (listas) se etiquetan con su media.
    if isinstance(value, list):
        flat = [x for row in value for x in (row if isinstance(row, list) else [row])]
        return sum(flat) / len(flat)
    return float(value if value is not None else 0.0)


def _schedule(algorithm, config):
    defaults = settings.ALBU_DEFAULTS if algorithm == ALBU else settings.GIBBS_DEFAULTS
    values = {**defaults, **config}
    if algorithm == ALBU:
        return schedule_tag(algorithm, epochs=values['max_epochs'], tol=values['tol'], restarts=values['restarts'])
    return schedule_tag(algorithm, burn_in=values['burn_in'], samples=values['samples'])
