"""Pure text-analytics primitives for review comments.

Tokenization, sentence ratios, readability, code-token detection, TF-IDF,
cosine similarity, lexicon sentiment and reply-signal detection. Everything
here is deterministic and side-effect free; lexicon data ships as versioned
text files under ``reviewlens/data``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np


class EmptyCorpus(ValueError):
    """Vectorizer fit called with zero documents."""


class DimensionMismatch(ValueError):
    """Cosine similarity over vectors of different lengths."""


_TOKEN_RE = re.compile(r"[A-Za-z0-9_]+")
_CAMEL_RE = re.compile(r"[a-z][A-Z]")
_SNAKE_RE = re.compile(r"[A-Za-z0-9]_[A-Za-z0-9]")
_VOWEL_RUN_RE = re.compile(r"[aeiouy]+")


def tokenize_cased(text: str) -> list[str]:
    """Word tokens in original case: runs of letters, digits and ``_``."""
    return _TOKEN_RE.findall(text)


def tokenize(text: str) -> list[str]:
    """Lowercased word tokens; same segmentation as :func:`tokenize_cased`."""
    return [t.lower() for t in tokenize_cased(text)]


def _load_terms(filename: str) -> frozenset[str]:
    raw = resources.files("reviewlens.data").joinpath(filename).read_text("utf-8")
    return frozenset(
        line.strip().lower() for line in raw.splitlines() if line.strip() and not line.startswith("#")
    )


@lru_cache(maxsize=None)
def default_stopwords() -> frozenset[str]:
    return _load_terms("stopwords.txt")


@lru_cache(maxsize=None)
def default_keywords() -> frozenset[str]:
    return _load_terms("keywords.txt")


@dataclass(frozen=True)
class SentimentLexicon:
    positive: frozenset[str]
    negative: frozenset[str]
    negation: frozenset[str]

    def __post_init__(self) -> None:
        overlap = self.positive & self.negative
        if overlap:
            raise ValueError(f"terms in both polarities: {sorted(overlap)}")


@lru_cache(maxsize=None)
def default_sentiment_lexicon() -> SentimentLexicon:
    return SentimentLexicon(
        positive=_load_terms("sentiment_pos.txt"),
        negative=_load_terms("sentiment_neg.txt"),
        negation=_load_terms("sentiment_negation.txt"),
    )


@lru_cache(maxsize=None)
def default_confirmatory_terms() -> frozenset[str]:
    return _load_terms("confirmatory.txt")


@lru_cache(maxsize=None)
def default_gratitude_terms() -> frozenset[str]:
    return _load_terms("gratitude.txt")


def split_sentences(text: str) -> list[tuple[str, str | None]]:
    """Segments split on ``.``, ``!``, ``?``.

    Returns (segment, terminator) pairs for non-empty segments; a trailing
    unterminated segment gets terminator ``None``.
    """
    out: list[tuple[str, str | None]] = []
    start = 0
    for i, ch in enumerate(text):
        if ch in ".!?":
            seg = text[start:i].strip()
            if seg:
                out.append((seg, ch))
            start = i + 1
    tail = text[start:].strip()
    if tail:
        out.append((tail, None))
    return out


def question_ratio(text: str) -> float:
    """Fraction of sentences terminated by ``?``; 0 for empty text."""
    sentences = split_sentences(text)
    if not sentences:
        return 0.0
    questions = sum(1 for _, term in sentences if term == "?")
    return questions / len(sentences)


def _is_code_token(token: str, keywords: frozenset[str]) -> bool:
    if token.lower() in keywords:
        return True
    if _CAMEL_RE.search(token):
        return True
    if _SNAKE_RE.search(token):
        return True
    has_alpha = any(c.isalpha() for c in token)
    has_digit = any(c.isdigit() for c in token)
    return has_alpha and has_digit


def code_element_stats(text: str, keywords: frozenset[str] | None = None) -> tuple[int, float]:
    """(count, ratio) of tokens that look like source-code elements.

    A token counts if it is a known programming keyword, camelCase,
    snake_case, or a letters+digits mix.
    """
    if keywords is None:
        keywords = default_keywords()
    tokens = tokenize_cased(text)
    if not tokens:
        return 0, 0.0
    count = sum(1 for t in tokens if _is_code_token(t, keywords))
    return count, count / len(tokens)


def stop_word_ratio(text: str, stopwords: frozenset[str] | None = None) -> float:
    if stopwords is None:
        stopwords = default_stopwords()
    tokens = tokenize(text)
    if not tokens:
        return 0.0
    return sum(1 for t in tokens if t in stopwords) / len(tokens)


def count_syllables(word: str) -> int:
    """Vowel-group heuristic: consecutive vowels (incl. y) form one syllable,
    a trailing silent ``e`` is dropped, and every word has at least one."""
    w = "".join(c for c in word.lower() if c.isalpha())
    if not w:
        return 1 if word else 0
    if w.endswith("e"):
        w = w[:-1]
    return max(1, len(_VOWEL_RUN_RE.findall(w)))


def readability(text: str) -> float:
    """Flesch Reading Ease: 206.835 - 1.015*(words/sentences) - 84.6*(syllables/words)."""
    words = tokenize(text)
    if not words:
        return 0.0
    sentences = max(1, len(split_sentences(text)))
    syllables = sum(count_syllables(w) for w in words)
    return 206.835 - 1.015 * (len(words) / sentences) - 84.6 * (syllables / len(words))


def sentiment(text: str, lexicon: SentimentLexicon | None = None) -> int:
    """Lexicon polarity in {-1, 0, +1}.

    A negation term within the two tokens preceding a sentiment term flips
    that term's polarity.
    """
    if lexicon is None:
        lexicon = default_sentiment_lexicon()
    tokens = tokenize(text)
    pos_hits = 0
    neg_hits = 0
    for i, tok in enumerate(tokens):
        if tok in lexicon.positive:
            polarity = 1
        elif tok in lexicon.negative:
            polarity = -1
        else:
            continue
        window = tokens[max(0, i - 2):i]
        if any(t in lexicon.negation for t in window):
            polarity = -polarity
        if polarity > 0:
            pos_hits += 1
        else:
            neg_hits += 1
    if pos_hits > neg_hits:
        return 1
    if neg_hits > pos_hits:
        return -1
    return 0


class SentimentScorer:
    """Scorer interface; swap in a learned model without touching callers."""

    def score(self, text: str) -> int:
        raise NotImplementedError


class LexiconSentimentScorer(SentimentScorer):
    def __init__(self, lexicon: SentimentLexicon | None = None):
        self.lexicon = lexicon or default_sentiment_lexicon()

    def score(self, text: str) -> int:
        return sentiment(text, self.lexicon)


MAX_VOCABULARY = 500


@dataclass(frozen=True)
class Vectorizer:
    """TF-IDF vectorizer with a document-frequency-capped vocabulary.

    idf(term) = ln((1+N)/(1+df)) + 1; transform output is L2-normalized.
    Immutable after fit.
    """

    vocabulary: dict[str, int]
    idf: np.ndarray

    @property
    def size(self) -> int:
        return len(self.vocabulary)


def fit_vectorizer(corpus: list[str], max_terms: int = MAX_VOCABULARY) -> Vectorizer:
    if not corpus:
        raise EmptyCorpus("cannot fit vectorizer on an empty corpus")
    df: dict[str, int] = {}
    for doc in corpus:
        for term in set(tokenize(doc)):
            df[term] = df.get(term, 0) + 1
    # highest document frequency first, lexicographic tie-break
    selected = sorted(df, key=lambda t: (-df[t], t))[:max_terms]
    vocabulary = {term: i for i, term in enumerate(sorted(selected))}
    n_docs = len(corpus)
    idf = np.zeros(len(vocabulary))
    for term, i in vocabulary.items():
        idf[i] = math.log((1 + n_docs) / (1 + df[term])) + 1.0
    return Vectorizer(vocabulary=vocabulary, idf=idf)


def transform(vectorizer: Vectorizer, text: str) -> np.ndarray:
    """Dense tf*idf vector, L2-normalized; out-of-vocabulary terms ignored."""
    vec = np.zeros(vectorizer.size)
    for term in tokenize(text):
        idx = vectorizer.vocabulary.get(term)
        if idx is not None:
            vec[idx] += 1.0
    vec *= vectorizer.idf
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec


def cosine_similarity(v1: np.ndarray, v2: np.ndarray) -> float:
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if v1.shape != v2.shape:
        raise DimensionMismatch(f"vector shapes differ: {v1.shape} vs {v2.shape}")
    n1 = np.linalg.norm(v1)
    n2 = np.linalg.norm(v2)
    if n1 == 0 or n2 == 0:
        return 0.0
    return float(np.dot(v1, v2) / (n1 * n2))


@dataclass(frozen=True)
class ReplySignals:
    confirmatory: bool
    gratitude: bool
    reply_sentiment: int


def reply_signals(
    reply_texts: list[str],
    lexicon: SentimentLexicon | None = None,
    confirmatory_terms: frozenset[str] | None = None,
    gratitude_terms: frozenset[str] | None = None,
) -> ReplySignals:
    """Acknowledgement signals mined from the change author's replies."""
    if confirmatory_terms is None:
        confirmatory_terms = default_confirmatory_terms()
    if gratitude_terms is None:
        gratitude_terms = default_gratitude_terms()
    if not reply_texts:
        return ReplySignals(False, False, 0)
    confirmatory = False
    gratitude = False
    for text in reply_texts:
        tokens = set(tokenize(text))
        if tokens & confirmatory_terms:
            confirmatory = True
        if tokens & gratitude_terms:
            gratitude = True
    score = sentiment(" ".join(reply_texts), lexicon)
    return ReplySignals(confirmatory, gratitude, score)


@dataclass(frozen=True)
class Lexicons:
    """Bundle of all shipped term lists, loaded once per process."""

    stopwords: frozenset[str]
    keywords: frozenset[str]
    sentiment: SentimentLexicon
    confirmatory: frozenset[str]
    gratitude: frozenset[str]


def load_default_lexicons() -> Lexicons:
    return Lexicons(
        stopwords=default_stopwords(),
        keywords=default_keywords(),
        sentiment=default_sentiment_lexicon(),
        confirmatory=default_confirmatory_terms(),
        gratitude=default_gratitude_terms(),
    )
