# fit.py

# Ajusta ALBU o Gibbs sobre un corpus serializado y escribe el modelo en JSON.
import os

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from topicmodels import albu, gibbs
from topicmodels.cli import ensure_parent, load_json_config, merge_options, require_file
from topicmodels.corpus import load_corpus
from topicmodels.exceptions import TopicModelError
from topicmodels.posterior import ALBU, ALGORITHMS, save_model

# Claves aceptadas en el JSON con el mismo nombre que las opciones.
FILE_KEYS = {'k': 'K', 'epochs': 'max_epochs', 'burn-in': 'burn_in'}


class Command(BaseCommand):
    help = "Fit an LDA posterior with ALBU or collapsed Gibbs sampling."

    def add_arguments(self, parser):
        parser.add_argument('corpus', help=".corpus file")
        parser.add_argument('--algo', choices=ALGORITHMS, default=None)
        parser.add_argument('--config', help="JSON file with any of the options below; flags win")
        parser.add_argument('--k', type=int)
        parser.add_argument('--alpha', type=float)
        parser.add_argument('--beta', type=float)
        parser.add_argument('--seed', type=int)
        # ALBU
        parser.add_argument('--epochs', type=int, dest='max_epochs')
        parser.add_argument('--tol', type=float)
        parser.add_argument('--restarts', type=int, help="seeded restarts; the best training log-likelihood is kept")
        # Gibbs
        parser.add_argument('--burn-in', type=int)
        parser.add_argument('--samples', type=int)
        parser.add_argument('--out', help="model JSON path")

    def handle(self, *args, **options):
        corpus_path = require_file(options['corpus'], "corpus file")
        file_values = load_json_config(options['config'])
        algorithm = options['algo'] or file_values.pop('algo', ALBU)
        file_values.pop('algo', None)
        if algorithm not in ALGORITHMS:
            raise CommandError(f"unknown algorithm {algorithm!r}")

        defaults = settings.ALBU_DEFAULTS if algorithm == ALBU else settings.GIBBS_DEFAULTS
        accepted = {'K', 'alpha', 'beta', 'seed'} | set(defaults)
        flags = {
            'K': options['k'], 'alpha': options['alpha'], 'beta': options['beta'], 'seed': options['seed'],
            'max_epochs': options['max_epochs'], 'tol': options['tol'], 'restarts': options['restarts'],
            'burn_in': options['burn_in'], 'samples': options['samples'],
        }
        file_values = {FILE_KEYS.get(key, key): value for key, value in file_values.items()}
        values = merge_options(defaults, file_values, flags)
        values = {key: value for key, value in values.items() if key in accepted}
        if values.get('K') is None:
            raise CommandError("the number of topics is required (--k)")

        try:
            corpus = load_corpus(corpus_path)
            if algorithm == ALBU:
                config = albu.AlbuConfig(**values)
                state = albu.fit(corpus, config)
            else:
                config = gibbs.GibbsConfig(**values)
                state = gibbs.fit(corpus, config)
        except (TopicModelError, OSError) as exc:
            raise CommandError(str(exc)) from exc

        stem = os.path.splitext(corpus_path)[0]
        out = options['out'] or f"{stem}.{algorithm}.model.json"
        try:
            ensure_parent(out)
            save_model(state, config.to_json(), config.seed, corpus_path, out)
        except OSError as exc:
            raise CommandError(f"cannot write model: {exc}") from exc

        self.stdout.write(self.style.SUCCESS(
            f"wrote {out}: {algorithm} K={config.K} epochs={state.epoch} converged={state.converged}"))
