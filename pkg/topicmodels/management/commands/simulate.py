# simulate.py

# Genera un corpus sintético y su verdad de referencia (corpus + JSON).
import os

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from topicmodels.corpus import save_corpus
from topicmodels.exceptions import TopicModelError
from topicmodels.simulator import PRESETS, SimSettings, generate_corpus, preset_settings, save_ground_truth


class Command(BaseCommand):
    help = "Simulate a corpus with known word-topic and topic-document distributions."

    def add_arguments(self, parser):
        parser.add_argument('--preset', choices=sorted(PRESETS),
                            help="start from a preset; explicit flags override its values")
        parser.add_argument('--m', type=int, help="number of documents")
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--v', type=int, help="vocabulary size")
        parser.add_argument('--k-regular', type=int, help="regular topics (a stop-word topic is added)")
        parser.add_argument('--topics-per-doc', type=int)
        parser.add_argument('--doc-len', type=int)
        parser.add_argument('--alpha-gen', type=float)
        parser.add_argument('--beta-gen', type=float)
        parser.add_argument('--out-dir', default=None)
        parser.add_argument('--name', help="file stem; defaults to <preset>-M<m>-s<seed>")

    def handle(self, *args, **options):
        values = {
            'V': options['v'],
            'K_regular': options['k_regular'],
            'topics_per_doc': options['topics_per_doc'],
            'doc_len': options['doc_len'],
            'M': options['m'],
            'alpha_gen': options['alpha_gen'],
            'beta_gen': options['beta_gen'],
            'seed': options['seed'],
        }
        try:
            if options['preset']:
                sim_settings = preset_settings(options['preset'], **values)
            else:
                missing = [key for key, value in values.items() if value is None]
                if missing:
                    raise CommandError(f"without --preset every setting is required; missing {missing}")
                sim_settings = SimSettings(**values)
            sim_settings.validate()
        except TopicModelError as exc:
            raise CommandError(str(exc)) from exc

        out_dir = options['out_dir'] or settings.ALBU_DATA_DIR
        name = options['name'] or f"{options['preset'] or 'custom'}-M{sim_settings.M}-s{sim_settings.seed}"
        corpus_path = os.path.join(out_dir, f"{name}.corpus")
        truth_path = os.path.join(out_dir, f"{name}.truth.json")

        corpus, ground_truth = generate_corpus(sim_settings)
        try:
            os.makedirs(out_dir, exist_ok=True)
            save_corpus(corpus, corpus_path)
            save_ground_truth(ground_truth, truth_path, corpus_file=os.path.basename(corpus_path))
        except OSError as exc:
            raise CommandError(f"cannot write simulation output: {exc}") from exc

        self.stdout.write(self.style.SUCCESS(
            f"wrote {corpus_path} and {truth_path}: M={corpus.M} V={corpus.V} K={sim_settings.K}"))
