# corpus.py

# Ingesta de texto, vocabulario y (de)serialización de corpus como secuencias de ids.
import hashlib
import logging
import re
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .exceptions import CorpusFormatError, EmptyCorpusError

logger = logging.getLogger(__name__)

# Todo lo que no sea a-z o espacio se elimina tras pasar a minúsculas (dígitos incluidos).
NON_ALPHA_RE = re.compile(r"[^a-z\s]")


# === Tipos del dominio ===

@dataclass(frozen=True)
class Vocabulary:
    """Biyección densa entre tokens e ids ``0..V-1``."""

    id_to_token: tuple
    token_to_id: dict = field(compare=False, repr=False)

    @classmethod
    def from_tokens(cls, tokens):
        id_to_token = tuple(tokens)
        token_to_id = {token: i for i, token in enumerate(id_to_token)}
        if len(token_to_id) != len(id_to_token):
            raise ValueError("vocabulary tokens must be unique")
        return cls(id_to_token, token_to_id)

    @property
    def size(self):
        return len(self.id_to_token)

    def __len__(self):
        return len(self.id_to_token)


@dataclass(frozen=True)
class Document:
    tokens: tuple

    @property
    def length(self):
        return len(self.tokens)


@dataclass(frozen=True, eq=False)
class Corpus:
    vocabulary: Vocabulary
    documents: tuple

    @property
    def M(self):
        return len(self.documents)

    @property
    def V(self):
        return self.vocabulary.size

    @property
    def total_tokens(self):
        return int(self.doc_lengths.sum())

    # Representación aplanada: un índice t por token (rama), en orden documento -> posición.
    @cached_property
    def doc_lengths(self):
        return np.array([doc.length for doc in self.documents], dtype=np.int64)

    @cached_property
    def doc_offsets(self):
        return np.concatenate(([0], np.cumsum(self.doc_lengths)))

    @cached_property
    def doc_ids(self):
        return np.repeat(np.arange(self.M, dtype=np.int64), self.doc_lengths)

    @cached_property
    def word_ids(self):
        return np.fromiter(
            (token for doc in self.documents for token in doc.tokens),
            dtype=np.int64, count=self.total_tokens)

    def __eq__(self, other):
        if not isinstance(other, Corpus):
            return NotImplemented
        return self.vocabulary == other.vocabulary and self.documents == other.documents

    def __hash__(self):
        return hash((self.vocabulary, self.documents))


# === Preprocesado ===

def tokenize(text, stopwords=frozenset()):
    """Pasa a minúsculas, quita todo carácter fuera de ``[a-z]``, separa por espacios y elimina stopwords."""
    cleaned = NON_ALPHA_RE.sub("", text.lower())
    return [token for token in cleaned.split() if token not in stopwords]


def load_stopwords(path):
    # Un token por línea; líneas vacías ignoradas.
    with open(path, encoding="utf-8") as handle:
        return frozenset(line.strip().lower() for line in handle if line.strip())


def read_text_corpus(path, stopwords=frozenset()):
    """Un documento por línea de texto UTF-8; devuelve los documentos tokenizados en el orden del archivo."""
    with open(path, encoding="utf-8") as handle:
        return [tokenize(line, stopwords) for line in handle]


def build_corpus(token_lists, min_doc_len=4):
    if min_doc_len < 1:
        raise ValueError("min_doc_len must be at least 1")

    kept = [tokens for tokens in token_lists if len(tokens) >= min_doc_len]
    logger.debug("kept %d of %d documents (min_doc_len=%d)", len(kept), len(token_lists), min_doc_len)
    if not kept:
        raise EmptyCorpusError()

    # Los ids se asignan por orden de primera aparición: determinista, sin hashing.
    token_to_id = {}
    documents = []
    for tokens in kept:
        ids = []
        for token in tokens:
            if token not in token_to_id:
                token_to_id[token] = len(token_to_id)
            ids.append(token_to_id[token])
        documents.append(Document(tuple(ids)))

    return Corpus(Vocabulary.from_tokens(token_to_id), tuple(documents))


# === Serialización ===
# Línea 1: "V M"; después V líneas de vocabulario en orden de id y M líneas de ids.

def save_corpus(corpus, path):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"{corpus.V} {corpus.M}\n")
        for token in corpus.vocabulary.id_to_token:
            handle.write(f"{token}\n")
        for doc in corpus.documents:
            handle.write(" ".join(str(token) for token in doc.tokens) + "\n")


def load_corpus(path):
    with open(path, encoding="utf-8") as handle:
        lines = handle.read().splitlines()

    if not lines or not lines[0].strip():
        raise EmptyCorpusError()

    header = lines[0].split()
    try:
        V, M = (int(value) for value in header)
    except ValueError:
        raise CorpusFormatError(1, f"expected header 'V M', got {lines[0]!r}") from None
    if M == 0:
        raise EmptyCorpusError()
    if V < 1 or M < 0:
        raise CorpusFormatError(1, f"invalid header sizes V={V} M={M}")
    if len(lines) < 1 + V + M:
        raise CorpusFormatError(len(lines) + 1, f"expected {V} vocabulary lines and {M} documents")

    tokens = [line.strip() for line in lines[1:1 + V]]
    for offset, token in enumerate(tokens):
        if not token or len(token.split()) != 1:
            raise CorpusFormatError(2 + offset, f"invalid vocabulary token {token!r}")
    try:
        vocabulary = Vocabulary.from_tokens(tokens)
    except ValueError as exc:
        raise CorpusFormatError(2, str(exc)) from None

    documents = []
    for index in range(1 + V, 1 + V + M):
        line_number = index + 1
        fields = lines[index].split()
        if not fields:
            raise CorpusFormatError(line_number, "empty document")
        try:
            ids = tuple(int(value) for value in fields)
        except ValueError:
            raise CorpusFormatError(line_number, "non-integer token id") from None
        unknown = [token for token in ids if token < 0 or token >= V]
        if unknown:
            raise CorpusFormatError(line_number, f"unknown token id {unknown[0]}")
        documents.append(Document(ids))

    trailing = [n for n in range(1 + V + M, len(lines)) if lines[n].strip()]
    if trailing:
        raise CorpusFormatError(trailing[0] + 1, f"more than {M} documents")

    return Corpus(vocabulary, tuple(documents))


def file_sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()
