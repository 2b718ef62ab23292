"""Tokenization and the token preprocessing pipeline used by the metrics.

Two pipeline configurations matter:

* the raw pipeline lowercases and nothing else, and
* the preprocessing pipeline additionally strips punctuation, removes
  stopwords, and maps tokens to lemmas.

Stopwords and lemmas come from files bundled with the package so results do
not drift with third-party NLP releases. The lemma table is a plain lookup:
tokens not in the table pass through unchanged.
"""
from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

STOPWORDS_ENGLISH = "english-core"
LEMMAS_CORE = "core-lemmas"


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(text: str) -> list[str]:
    """Split on whitespace and strip punctuation off token edges.

    Interior punctuation survives, so possessives and contractions stay one
    token ("user's", "I've") and slash compounds stay intact until the
    punctuation-stripping stage splits them.
    """
    tokens = []
    for chunk in text.split():
        start = 0
        end = len(chunk)
        while start < end and _is_punct(chunk[start]):
            start += 1
        while end > start and _is_punct(chunk[end - 1]):
            end -= 1
        if end > start:
            tokens.append(chunk[start:end])
    return tokens


def word_count(text: str) -> int:
    """Whitespace word count, the measure behind the 150-word scenario rule."""
    return len(text.split())


@lru_cache(maxsize=None)
def stopword_list(list_id: str = STOPWORDS_ENGLISH) -> frozenset[str]:
    if list_id != STOPWORDS_ENGLISH:
        raise KeyError(f"unknown stopword list: {list_id!r}")
    raw = resources.files("uccx").joinpath("data/stopwords.txt").read_text("utf-8")
    words = {line.strip() for line in raw.splitlines()}
    return frozenset(w for w in words if w and not w.startswith("#"))


@lru_cache(maxsize=None)
def lemma_table(table_id: str = LEMMAS_CORE) -> dict[str, str]:
    if table_id != LEMMAS_CORE:
        raise KeyError(f"unknown lemma table: {table_id!r}")
    raw = resources.files("uccx").joinpath("data/lemmas.tsv").read_text("utf-8")
    table: dict[str, str] = {}
    for line in raw.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        inflected, _, lemma = line.partition("\t")
        table[inflected.strip()] = lemma.strip()
    return table


@dataclass(frozen=True)
class TokenPipeline:
    """Flags applied, in field order, to every token of a tokenized string."""

    lowercase: bool = True
    strip_punctuation: bool = False
    remove_stopwords: bool = False
    lemmatize: bool = False
    stopword_list_id: str = STOPWORDS_ENGLISH
    lemma_table_id: str = LEMMAS_CORE

    def apply(self, text: str) -> list[str]:
        tokens = tokenize(text)
        if self.lowercase:
            tokens = [t.lower() for t in tokens]
        if self.strip_punctuation:
            tokens = _strip_token_punctuation(tokens)
        if self.remove_stopwords:
            stops = stopword_list(self.stopword_list_id)
            tokens = [t for t in tokens if t not in stops]
        if self.lemmatize:
            table = lemma_table(self.lemma_table_id)
            tokens = [table.get(t, t) for t in tokens]
        return tokens


def _strip_token_punctuation(tokens: list[str]) -> list[str]:
    """Drop interior punctuation, keeping apostrophes.

    Apostrophes are exempt so possessives and contractions remain single
    tokens; anything else ("view/change", "promo-code") splits where the
    punctuation was.
    """
    out: list[str] = []
    for tok in tokens:
        chars = []
        for ch in tok:
            if ch == "’":
                chars.append("'")
            elif _is_punct(ch) and ch != "'":
                chars.append(" ")
            else:
                chars.append(ch)
        out.extend(part for part in "".join(chars).split() if part)
    return out


def raw_pipeline() -> TokenPipeline:
    """Lowercase-only pipeline: the no-preprocessing configuration."""
    return TokenPipeline()


def preprocessing_pipeline() -> TokenPipeline:
    """Full pipeline: lowercase, strip punctuation, drop stopwords, lemmatize."""
    return TokenPipeline(
        strip_punctuation=True, remove_stopwords=True, lemmatize=True
    )
