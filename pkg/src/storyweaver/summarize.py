"""Per-section extractive summarization.

Rules: the section's opening sentence is always preserved verbatim;
sections under the word threshold pass through untouched; everything the
summary contains is a whole sentence from the source, in source order.
The selection engine is a deterministic frequency baseline, with an
optional external summarizer behind the same extractive contract.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import Literal, Sequence

from .article import Article, Section

logger = logging.getLogger(__name__)

SummaryOrigin = Literal["passthrough", "extractive_baseline", "external"]

DEFAULT_ABBREVIATIONS = frozenset(
    {
        "mr", "mrs", "ms", "dr", "prof", "rev", "hon", "sr", "jr", "st", "mt",
        "no", "nos", "vol", "vols", "pp", "ch", "e.g", "i.e", "cf", "ca",
        "al", "approx", "dept", "univ", "inc", "ltd", "co", "corp", "u.s", "u.k",
    }
)

STOPWORDS = frozenset(
    """a about above after again against all am an and any are as at be because
    been before being below between both but by could did do does doing down
    during each few for from further had has have having he her here hers
    herself him himself his how i if in into is it its itself just me more
    most my myself no nor not now of off on once only or other our ours
    ourselves out over own same she should so some such than that the their
    theirs them themselves then there these they this those through to too
    under until up very was we were what when where which while who whom why
    will with you your yours yourself yourselves""".split()
)

_WORD_RE = re.compile(r"[a-z0-9']+")
_CLOSERS = "\"')]”’»"
_OPENERS = "\"'([“‘«"


@dataclass(frozen=True)
class SummarizerConfig:
    min_words_to_summarize: int = 50
    target_sentence_count: int = 3
    external_endpoint: str | None = None
    external_timeout: float = 10.0
    max_in_flight: int = 4
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS
    single_letter_abbreviations: bool = True

    def __post_init__(self):
        if self.min_words_to_summarize < 1:
            raise ValueError("min_words_to_summarize must be >= 1")
        if self.target_sentence_count < 1:
            raise ValueError("target_sentence_count must be >= 1")


@dataclass
class Summary:
    """Ordered extractive summary of one section."""

    section_index: str
    sentences: list[str]
    origin: SummaryOrigin
    warnings: list[str] = field(default_factory=list, compare=False)

    @property
    def text(self) -> str:
        return " ".join(self.sentences)


def word_tokens(text: str) -> list[str]:
    return _WORD_RE.findall(text.lower())


def _starts_sentence(token: str) -> bool:
    for ch in token:
        if ch.isalnum():
            return ch.isupper() or ch.isdigit()
    return True


def _ends_sentence(
    token: str,
    next_token: str | None,
    abbreviations: frozenset[str],
    single_letter_abbreviations: bool,
) -> bool:
    core = token.rstrip(_CLOSERS)
    if not core or core[-1] not in ".!?":
        return False
    if core[-1] == ".":
        word = core.rstrip(".!?").lstrip(_OPENERS).lower()
        if word in abbreviations:
            return False
        if single_letter_abbreviations and len(word) == 1 and word.isalpha():
            return False
    if next_token is None:
        return True
    return _starts_sentence(next_token)


def segment_sentences(
    text: str,
    abbreviations: frozenset[str] = DEFAULT_ABBREVIATIONS,
    single_letter_abbreviations: bool = True,
) -> list[str]:
    """Split prose into sentences; whitespace inside a sentence collapses to
    single spaces, so joining the result preserves the word sequence."""
    tokens = text.split()
    sentences: list[str] = []
    current: list[str] = []
    for pos, token in enumerate(tokens):
        current.append(token)
        nxt = tokens[pos + 1] if pos + 1 < len(tokens) else None
        if _ends_sentence(token, nxt, abbreviations, single_letter_abbreviations):
            sentences.append(" ".join(current))
            current = []
    if current:
        sentences.append(" ".join(current))
    return sentences


def term_frequencies(sentences: Sequence[str]) -> dict[str, int]:
    freqs: dict[str, int] = {}
    for sentence in sentences:
        for token in word_tokens(sentence):
            freqs[token] = freqs.get(token, 0) + 1
    return freqs


def score_sentences_baseline(
    sentences: Sequence[str], doc_term_freqs: dict[str, int]
) -> list[float]:
    """Frequency score: sum of max-normalized document frequencies of the
    sentence's non-stopword terms, divided by its token count."""
    max_freq = max(doc_term_freqs.values(), default=0)
    scores = []
    for sentence in sentences:
        tokens = word_tokens(sentence)
        if not tokens or max_freq == 0:
            scores.append(0.0)
            continue
        weight = sum(
            doc_term_freqs.get(tok, 0) / max_freq for tok in tokens if tok not in STOPWORDS
        )
        scores.append(weight / len(tokens))
    return scores


def _select_baseline(rest: list[str], count: int) -> list[str]:
    scores = score_sentences_baseline(rest, term_frequencies(rest))
    # Ties break toward the earlier sentence; selection is re-ordered to
    # source order afterwards.
    ranked = sorted(range(len(rest)), key=lambda i: (-scores[i], i))
    chosen = sorted(ranked[:count])
    return [rest[i] for i in chosen]


def _validate_external(candidate: list[str], rest: list[str], count: int) -> bool:
    if not candidate or len(candidate) > count:
        return False
    cursor = 0
    for sentence in candidate:
        normalized = " ".join(sentence.split())
        while cursor < len(rest) and rest[cursor] != normalized:
            cursor += 1
        if cursor >= len(rest):
            return False
        cursor += 1
    return True


def summarize_section(section: Section, cfg: SummarizerConfig, client=None) -> Summary:
    """Summarize one text-bearing section.

    `client` is an optional external summarizer exposing
    ``summarize(text, max_sentences) -> list[str]``; on any failure or
    contract violation the extractive baseline takes over with a warning.
    """
    sentences = segment_sentences(
        section.text, cfg.abbreviations, cfg.single_letter_abbreviations
    )
    warnings: list[str] = []
    if len(section.text.split()) < cfg.min_words_to_summarize:
        return Summary(section.index, sentences, "passthrough")

    first, rest = sentences[0], sentences[1:]
    if not rest:
        return Summary(section.index, [first], "extractive_baseline")

    if client is not None:
        try:
            candidate = client.summarize(" ".join(rest), cfg.target_sentence_count)
        except Exception as exc:  # provider trouble must never sink a section
            warnings.append(f"external summarizer failed for section {section.index or 'root'}: {exc}")
            logger.warning(warnings[-1])
            candidate = None
        if candidate is not None:
            normalized = [" ".join(s.split()) for s in candidate]
            if _validate_external(normalized, rest, cfg.target_sentence_count):
                return Summary(section.index, [first] + normalized, "external", warnings)
            warnings.append(
                f"external summarizer broke the extractive contract for section "
                f"{section.index or 'root'}; using baseline"
            )
            logger.warning(warnings[-1])

    selected = _select_baseline(rest, cfg.target_sentence_count)
    return Summary(section.index, [first] + selected, "extractive_baseline", warnings)


def summarize_article(
    article: Article, cfg: SummarizerConfig, client=None
) -> dict[str, Summary]:
    """Summaries for every text-bearing section, keyed by section index."""
    summaries: dict[str, Summary] = {}
    for section in article.sections():
        if section.is_text_bearing():
            summaries[section.index] = summarize_section(section, cfg, client)
    return summaries
