"""Sentence relation graphs over a document set.

Three constructions: lexical similarity (tf-idf cosine), topic similarity
(LDA topic-distribution cosine), and a discourse graph from marker /
entity / rare-term indicators. All graphs are dense symmetric matrices
with entries in [0, 1] and unit diagonal, so the self-attention bias
derived from them vanishes on the diagonal.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

import numpy as np

from ._kernels import lda_gibbs
from .textproc import DocumentSet, STOPWORDS, build_tfidf, content_terms, tfidf_cosine

GRAPH_KINDS = ("similarity", "topic", "discourse")

# Connectives that mark a discourse relation when they open a sentence.
DISCOURSE_MARKERS = frozenset("""
    however moreover therefore thus hence meanwhile instead furthermore
    additionally consequently nevertheless nonetheless still also besides
    accordingly afterwards alternatively anyway certainly conversely
    earlier eventually finally further indeed initially later likewise
    next otherwise overall particularly previously rather similarly
    simultaneously specifically subsequently then though ultimately yet
""".split())

_CAPITALIZED = re.compile(r"^[A-Z][A-Za-z'.-]*$")
_ALPHA = re.compile(r"[A-Za-z]")


@dataclass(frozen=True)
class SentenceGraph:
    """Dense symmetric affinity matrix over the sentences of one set."""

    kind: str
    weights: np.ndarray

    def __post_init__(self):
        w = self.weights
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"graph weights must be square, got shape {w.shape}")
        if not np.allclose(w, w.T, atol=1e-9):
            raise ValueError("graph weights must be symmetric")
        if w.size and (w.min() < 0.0 or w.max() > 1.0):
            raise ValueError("graph weights must lie in [0, 1]")
        if not np.all(np.diag(w) == 1.0):
            raise ValueError("graph diagonal must be 1")

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    def restrict(self, nodes) -> "SentenceGraph":
        """Principal submatrix over ``nodes``, in the given node order."""
        nodes = list(nodes)
        if not nodes:
            raise ValueError("cannot restrict a graph to an empty node set")
        for node in nodes:
            if not 0 <= node < self.size:
                raise ValueError(f"node {node} out of range [0, {self.size})")
        idx = np.asarray(nodes, dtype=np.intp)
        return SentenceGraph(self.kind, self.weights[np.ix_(idx, idx)].copy())


@dataclass(frozen=True)
class TopicModel:
    """Fitted LDA state: count tables plus smoothing hyperparameters."""

    num_topics: int
    alpha: float
    beta: float
    doc_topic: np.ndarray   # (n_sentences, num_topics) assignment counts
    topic_word: np.ndarray  # (num_topics, vocab) assignment counts
    vocab: dict[str, int]

    def sentence_distributions(self) -> np.ndarray:
        """Smoothed per-sentence topic distributions (rows sum to 1)."""
        counts = self.doc_topic.astype(np.float64)
        totals = counts.sum(axis=1, keepdims=True)
        return (counts + self.alpha) / (totals + self.num_topics * self.alpha)


def build_similarity_graph(vectors, threshold: float = 0.0) -> SentenceGraph:
    """Pairwise tf-idf cosine graph; weights below ``threshold`` become 0."""
    if len(vectors) < 1:
        raise ValueError("need at least one sentence vector")
    n = len(vectors)
    weights = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            w = tfidf_cosine(vectors[i], vectors[j])
            w = min(1.0, max(0.0, w))
            if w < threshold:
                w = 0.0
            weights[i, j] = weights[j, i] = w
    return SentenceGraph("similarity", weights)


def fit_lda(doc_set: DocumentSet, num_topics: int = 20, iterations: int = 200,
            seed: int = 0, alpha: float | None = None, beta: float = 0.01) -> TopicModel:
    """Collapsed Gibbs LDA with each sentence as one document.

    Deterministic for a fixed seed (bit-identical across runs and kernel
    backends). alpha defaults to 50/num_topics.
    """
    if num_topics < 2:
        raise ValueError(f"num_topics must be >= 2, got {num_topics}")
    if iterations < 1:
        raise ValueError(f"iterations must be >= 1, got {iterations}")
    sentences = doc_set.sentences
    vocab: dict[str, int] = {}
    doc_ids, word_ids = [], []
    for sent in sentences:
        for term in content_terms(sent.tokens):
            word_ids.append(vocab.setdefault(term, len(vocab)))
            doc_ids.append(sent.global_index)
    if len(vocab) < num_topics:
        raise ValueError(
            f"vocabulary of set {doc_set.id!r} has {len(vocab)} terms, "
            f"fewer than num_topics={num_topics}")
    if alpha is None:
        alpha = 50.0 / num_topics
    doc_topic, topic_word, _, _ = lda_gibbs(
        np.asarray(doc_ids, dtype=np.int32),
        np.asarray(word_ids, dtype=np.int32),
        len(sentences), len(vocab), num_topics,
        float(alpha), float(beta), int(iterations), int(seed) & (2**64 - 1))
    return TopicModel(num_topics, float(alpha), float(beta),
                      doc_topic, topic_word, vocab)


def build_topic_graph(model: TopicModel, doc_set: DocumentSet) -> SentenceGraph:
    """Cosine similarities between smoothed sentence topic distributions."""
    n = doc_set.size
    if model.doc_topic.shape[0] != n:
        raise ValueError(
            f"topic model covers {model.doc_topic.shape[0]} sentences but the "
            f"set has {n}")
    theta = model.sentence_distributions()
    norms = np.linalg.norm(theta, axis=1)
    weights = (theta @ theta.T) / np.outer(norms, norms)
    weights = np.clip((weights + weights.T) / 2.0, 0.0, 1.0)
    np.fill_diagonal(weights, 1.0)
    return SentenceGraph("topic", weights)


def _entity_strings(raw_text: str) -> set[str]:
    """Capitalized words used as a cheap stand-in for entity/coreference links.

    A sentence-initial word only counts when the following word is also
    capitalized, so ordinary sentence case does not create entities.
    """
    words = [w.strip("\"'()[]{},;:!?") for w in raw_text.split()]
    words = [w for w in words if w and _ALPHA.search(w)]
    entities = set()
    for pos, word in enumerate(words):
        if not _CAPITALIZED.match(word):
            continue
        if pos == 0 and not (len(words) > 1 and _CAPITALIZED.match(words[1])):
            continue
        entities.add(word.rstrip(".'-"))
    return entities


def build_discourse_graph(doc_set: DocumentSet,
                          marker_lexicon=DISCOURSE_MARKERS) -> SentenceGraph:
    """Edge weight = (marker + entity + rare-term indicators) / 3.

    The marker indicator fires for within-document adjacent pairs whose
    latter sentence opens with a discourse connective; the entity indicator
    for a shared capitalized string; the rare-term indicator for a shared
    content term appearing in at most 2 sentences of the set.
    """
    sentences = doc_set.sentences
    n = len(sentences)
    marker_set = frozenset(marker_lexicon)

    entities = [_entity_strings(s.raw_text) for s in sentences]
    terms = [set(content_terms(s.tokens)) for s in sentences]
    df = Counter()
    for term_set in terms:
        df.update(term_set)
    rare = [{t for t in term_set if df[t] <= 2} for term_set in terms]
    opens_with_marker = [s.tokens[0] in marker_set for s in sentences]

    weights = np.eye(n)
    for i in range(n):
        si = sentences[i]
        for j in range(i + 1, n):
            sj = sentences[j]
            adjacent = (si.doc_index == sj.doc_index
                        and sj.sent_index == si.sent_index + 1)
            marker = adjacent and opens_with_marker[j]
            entity = bool(entities[i] & entities[j])
            rare_term = bool(rare[i] & rare[j])
            w = (int(marker) + int(entity) + int(rare_term)) / 3.0
            weights[i, j] = weights[j, i] = w
    return SentenceGraph("discourse", weights)


def build_graph(doc_set: DocumentSet, kind: str, threshold: float = 0.0,
                num_topics: int = 20, iterations: int = 200,
                seed: int = 0) -> SentenceGraph:
    """Dispatch on graph kind; the entry point used by the CLI."""
    if kind == "similarity":
        return build_similarity_graph(build_tfidf(doc_set), threshold)
    if kind == "topic":
        model = fit_lda(doc_set, num_topics=num_topics, iterations=iterations,
                        seed=seed)
        return build_topic_graph(model, doc_set)
    if kind == "discourse":
        return build_discourse_graph(doc_set)
    raise ValueError(f"unknown graph kind {kind!r}; expected one of {GRAPH_KINDS}")
