"""Deterministic text ingestion.

Sentence splitting, tokenization, document truncation, and tf-idf vectors
over the sentences of a document set. Everything here is a pure function
of its inputs; all produced objects are immutable.
"""

from __future__ import annotations

import json
import math
import re
import warnings
from collections import Counter
from dataclasses import dataclass, field

# Embedded English stopword list (~150 words). Single-letter words are
# deliberately absent: ubiquitous ones get zero weight through idf anyway,
# and symbolic corpora stay meaningful.
STOPWORDS = frozenset("""
    about above after again against all am an and any are aren't as at be
    because been before being below between both but by can cannot could
    couldn't did didn't do does doesn't doing don't down during each few for
    from further had hadn't has hasn't have haven't having he he'd he'll
    he's her here here's hers herself him himself his how how's i'd i'll
    i'm i've if in into is isn't it it's its itself let's me more most
    mustn't my myself no nor not of off on once only or other ought our
    ours ourselves out over own same shan't she she'd she'll she's should
    shouldn't so some such than that that's the their theirs them
    themselves then there there's these they they'd they'll they're they've
    this those through to too under until up very was wasn't we we'd we'll
    we're we've were weren't what what's when when's where where's which
    while who who's whom why why's with won't would wouldn't you you'd
    you'll you're you've your yours yourself yourselves
""".split())

# Words whose trailing period does not end a sentence.
_ABBREVIATIONS = frozenset("""
    dr mr mrs ms prof rev gen rep sen gov sgt col lt capt st jr sr vs etc
    inc ltd co corp dept univ assn bros approx appt apt est min max misc
    no al fig eq sec pp vol ed eds trans ca cf e.g i.e u.s u.k u.n a.m p.m
    jan feb mar apr jun jul aug sep sept oct nov dec mon tue wed thu fri
    sat sun
""".split())

_SENT_BOUNDARY = re.compile(r"([.?!]+)(\s+)")
# Token classes: acronyms with interior periods, words with interior
# apostrophes, any other single non-space character.
_TOKEN = re.compile(r"(?:[a-z0-9]\.){2,}|[a-z0-9]+(?:'[a-z0-9]+)*|[^\sa-z0-9]")
_WORD_CHARS = re.compile(r"[a-z0-9]")


@dataclass(frozen=True)
class Sentence:
    """One source sentence with its position inside the document set."""

    doc_index: int
    sent_index: int
    global_index: int
    tokens: tuple[str, ...]
    raw_text: str


@dataclass(frozen=True)
class DocumentSet:
    """Ordered documents of ordered sentences; the unit of input.

    A single-document set is the SDS case and flows through every code
    path unchanged. ``gold_summary`` holds one or more reference
    summaries, each a list of raw sentence strings.
    """

    id: str
    docs: tuple[tuple[Sentence, ...], ...]
    gold_summary: tuple[tuple[str, ...], ...] | None = None

    def __post_init__(self):
        if len(self.docs) < 1:
            raise ValueError(f"document set {self.id!r} has no documents")

    @property
    def sentences(self) -> list[Sentence]:
        """All sentences in (doc_index, sent_index) order."""
        return [s for doc in self.docs for s in doc]

    @property
    def size(self) -> int:
        return sum(len(doc) for doc in self.docs)

    def gold_token_lists(self) -> list[list[str]]:
        """Tokenized references, one flat token list per reference."""
        if self.gold_summary is None:
            raise ValueError(f"document set {self.id!r} has no gold summary")
        refs = []
        for ref in self.gold_summary:
            tokens: list[str] = []
            for sent in ref:
                tokens.extend(tokenize(sent))
            refs.append(tokens)
        return refs


def split_sentences(text: str) -> list[str]:
    """Split raw text on terminal punctuation with an abbreviation guard.

    The concatenation of the output equals the input modulo whitespace;
    text without a terminator comes back as a single sentence.
    """
    pieces = []
    start = 0
    for match in _SENT_BOUNDARY.finditer(text):
        marks = match.group(1)
        if marks == ".":
            prev = text[start:match.start()].split()
            last = prev[-1].lower().strip("\"'()[]{}<>,;:") if prev else ""
            if last in _ABBREVIATIONS:
                continue
        pieces.append(text[start:match.end(1)])
        start = match.end()
    pieces.append(text[start:])
    return [p.strip() for p in pieces if p.strip()]


def tokenize(sentence: str) -> list[str]:
    """Lowercase tokens with punctuation split off as separate tokens."""
    return _TOKEN.findall(sentence.lower())


def make_document_set(set_id, raw_docs, summary=None) -> DocumentSet:
    """Build a DocumentSet from raw documents.

    Each document may be a single string (sentence-split here) or a list
    of pre-split sentence strings. Sentences that tokenize to nothing are
    dropped. ``summary`` is one reference (list of sentence strings) or a
    list of such references.
    """
    docs = []
    global_index = 0
    for doc_index, raw_doc in enumerate(raw_docs):
        raw_sentences = split_sentences(raw_doc) if isinstance(raw_doc, str) else raw_doc
        sentences = []
        for raw in raw_sentences:
            tokens = tokenize(raw)
            if not tokens:
                continue
            sentences.append(Sentence(
                doc_index=doc_index,
                sent_index=len(sentences),
                global_index=global_index,
                tokens=tuple(tokens),
                raw_text=raw,
            ))
            global_index += 1
        docs.append(tuple(sentences))
    gold = _normalize_summary(summary)
    return DocumentSet(id=str(set_id), docs=tuple(docs), gold_summary=gold)


def _normalize_summary(summary):
    if summary is None:
        return None
    if all(isinstance(s, str) for s in summary):
        return (tuple(summary),)
    return tuple(tuple(ref) for ref in summary)


def truncate_set(doc_set: DocumentSet, max_tokens: int) -> DocumentSet:
    """Cap each document at ``max_tokens`` tokens, whole sentences only.

    A sentence that would cross the limit is dropped entirely, except a
    first sentence longer than the whole budget, which is kept truncated
    at token level (with a warning).
    """
    if max_tokens <= 0:
        raise ValueError(f"max_tokens must be positive, got {max_tokens}")
    docs = []
    global_index = 0
    for doc_index, doc in enumerate(doc_set.docs):
        kept = []
        used = 0
        for sent in doc:
            n = len(sent.tokens)
            if used + n > max_tokens:
                if not kept and n > max_tokens:
                    warnings.warn(
                        f"set {doc_set.id!r} doc {doc_index}: first sentence has "
                        f"{n} tokens, truncated to {max_tokens}")
                    sent = Sentence(sent.doc_index, sent.sent_index,
                                    sent.global_index, sent.tokens[:max_tokens],
                                    sent.raw_text)
                    kept.append(sent)
                    used = max_tokens
                continue
            kept.append(sent)
            used += n
        reindexed = []
        for sent_index, sent in enumerate(kept):
            reindexed.append(Sentence(doc_index, sent_index, global_index,
                                      sent.tokens, sent.raw_text))
            global_index += 1
        docs.append(tuple(reindexed))
    return DocumentSet(id=doc_set.id, docs=tuple(docs),
                       gold_summary=doc_set.gold_summary)


def content_terms(tokens) -> list[str]:
    """Tokens that carry content: not stopwords, at least one alphanumeric."""
    return [t for t in tokens
            if t not in STOPWORDS and _WORD_CHARS.search(t) is not None]


def build_tfidf(doc_set: DocumentSet) -> list[dict[str, float]]:
    """Per-sentence tf-idf vectors with sentences as the idf unit.

    tf is the raw in-sentence count, idf(term) = ln(L / df(term)) over the
    L sentences of the set, stopwords removed. All-stopword sentences get
    the zero vector.
    """
    sentences = doc_set.sentences
    if not sentences:
        raise ValueError(f"document set {doc_set.id!r} has no sentences")
    per_sentence = [Counter(content_terms(s.tokens)) for s in sentences]
    df = Counter()
    for counts in per_sentence:
        df.update(counts.keys())
    n = len(sentences)
    idf = {term: math.log(n / count) for term, count in df.items()}
    return [{term: tf * idf[term] for term, tf in counts.items()}
            for counts in per_sentence]


def tfidf_cosine(u: dict[str, float], v: dict[str, float]) -> float:
    """Cosine of two sparse vectors; zero vectors give 0 by definition."""
    if len(u) > len(v):
        u, v = v, u
    dot = sum(weight * v.get(term, 0.0) for term, weight in u.items())
    if dot == 0.0:
        return 0.0
    nu = math.sqrt(sum(w * w for w in u.values()))
    nv = math.sqrt(sum(w * w for w in v.values()))
    return dot / (nu * nv)


def read_jsonl_dataset(path) -> list[DocumentSet]:
    """Load document sets from JSONL, one per line.

    Schema: {"id": str, "docs": [[sentence, ...], ...], "summary": [...]}
    where "summary" is optional and may be one reference or a list of
    references.
    """
    sets = []
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                sets.append(make_document_set(
                    record["id"], record["docs"], record.get("summary")))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}: malformed record on line {lineno}: {exc}") from exc
    return sets
