# ingest.py

# Convierte un fichero de texto (un documento por línea) en un corpus serializado.
import os

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError

from topicmodels.cli import ensure_parent, require_file
from topicmodels.corpus import build_corpus, load_stopwords, read_text_corpus, save_corpus
from topicmodels.exceptions import TopicModelError


class Command(BaseCommand):
    help = "Tokenize a UTF-8 text file (one document per line) into a .corpus file."

    def add_arguments(self, parser):
        parser.add_argument('text', help="text file, one document per line")
        parser.add_argument('--stopwords', help="stopword file, one token per line")
        parser.add_argument('--min-doc-len', type=int, default=settings.MIN_DOC_LEN)
        parser.add_argument('--out', help="output .corpus path")

    def handle(self, *args, **options):
        text = require_file(options['text'], "text corpus")
        stem = os.path.splitext(os.path.basename(text))[0]
        out = options['out'] or os.path.join(settings.ALBU_DATA_DIR, f"{stem}.corpus")

        try:
            stopwords = load_stopwords(require_file(options['stopwords'], "stopword file")) \
                if options['stopwords'] else frozenset()
            token_lists = read_text_corpus(text, stopwords)
            corpus = build_corpus(token_lists, options['min_doc_len'])
            ensure_parent(out)
            save_corpus(corpus, out)
        except (TopicModelError, OSError, ValueError) as exc:
            raise CommandError(str(exc)) from exc

        dropped = len(token_lists) - corpus.M
        self.stdout.write(self.style.SUCCESS(
            f"wrote {out}: M={corpus.M} V={corpus.V} tokens={corpus.total_tokens} (dropped {dropped} short documents)"))
