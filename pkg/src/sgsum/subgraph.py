"""Candidate sub-graph generation, encoding, ranking, and assembly.

A candidate summary is a size-m subset of the top-K salient sentences,
viewed as a sub-graph of the sentence relation graph. Candidates are
encoded by a second stack of graph layers (same architecture as the
document graph encoder, separate weights), pooled to one vector, and
ranked by cosine similarity against a reference vector: the global
document vector at inference, the encoded oracle during training.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .encoder import EncoderConfig, Vocab, encode_set, graph_attention_layer, graph_pool
from .graphs import SentenceGraph
from .tensor import Tensor


@dataclass(frozen=True)
class SelectionConfig:
    """K candidate nodes, m sub-graph nodes (summary length in sentences)."""

    candidate_nodes: int = 10
    subgraph_nodes: int = 9

    def __post_init__(self):
        if not 1 <= self.subgraph_nodes <= self.candidate_nodes:
            raise ValueError(
                f"need 1 <= m <= K, got m={self.subgraph_nodes} "
                f"K={self.candidate_nodes}")


@dataclass(frozen=True)
class CandidateSummary:
    node_indices: tuple[int, ...]
    representation: np.ndarray
    score: float
    rouge_vs_gold: float | None = None


@dataclass(frozen=True)
class SummaryResult:
    """Final summary: raw sentence texts in discourse order."""

    sentences: tuple[str, ...]
    nodes: tuple[int, ...]   # same order as sentences
    score: float


def generate_candidates(salience, config: SelectionConfig) -> list[tuple[int, ...]]:
    """All size-m subsets of the top-K salient sentences.

    Deterministic: salience ties go to the lower index, and candidates come
    out in lexicographic order of their sorted index tuples. K shrinks to L
    (with a warning) when the set is small; m > L is an error.
    """
    length = len(salience)
    k, m = config.candidate_nodes, config.subgraph_nodes
    if length < m:
        raise ValueError(f"set has {length} sentences, fewer than m={m}")
    if length < k:
        warnings.warn(f"set has {length} sentences; shrinking K from {k} to {length}")
        k = length
    ranked = sorted(range(length), key=lambda i: (-salience[i], i))
    top = sorted(ranked[:k])
    return list(itertools.combinations(top, m))


def encode_subgraph(nodes, reps, graph: SentenceGraph, params,
                    config: EncoderConfig, train: bool = False, rng=None) -> Tensor:
    """Encode one candidate: restrict graph and reps, run the sub-graph
    encoder stack, pool to a single vector."""
    nodes = list(nodes)
    if not nodes:
        raise ValueError("cannot encode an empty sub-graph")
    sub_graph = graph.restrict(nodes)
    sub_reps = T.gather_rows(reps, nodes)
    for i in range(config.graph_layers):
        sub_reps = graph_attention_layer(sub_reps, sub_graph, config.sigma,
                                         params, f"sub.{i}", config, train, rng)
    return graph_pool(sub_reps, params, "subpool", config)


def rank_candidates(candidates, reference_vector, reps, graph, params,
                    config: EncoderConfig) -> list[CandidateSummary]:
    """Score candidates by cosine against the reference vector.

    Returns them sorted by descending score, ties broken by lexicographic
    node order.
    """
    if not candidates:
        raise ValueError("need at least one candidate")
    scored = []
    for nodes in candidates:
        vec = encode_subgraph(nodes, reps, graph, params, config)
        score = T.cosine(vec, reference_vector).item()
        scored.append(CandidateSummary(tuple(nodes), vec.data.copy(), score))
    scored.sort(key=lambda c: (-c.score, c.node_indices))
    return scored


def reorder_sentences(nodes, discourse_graph: SentenceGraph | None = None) -> list[int]:
    """Order the selected sentences by chaining discourse relations.

    Greedy: start from the node earliest in document order, then repeatedly
    append the unvisited node with the strongest discourse edge to the
    current tail (ties to the earlier node). Without a discourse graph, or
    when all edges are zero, this is plain document order.
    """
    ordered = sorted(nodes)
    if discourse_graph is None or len(ordered) <= 1:
        return ordered
    weights = discourse_graph.weights
    chain = [ordered[0]]
    remaining = ordered[1:]
    while remaining:
        tail = chain[-1]
        best = max(remaining, key=lambda u: (weights[tail, u], -u))
        chain.append(best)
        remaining.remove(best)
    return chain


def summarize(doc_set, graph: SentenceGraph, params, config: EncoderConfig,
              selection: SelectionConfig, vocab: Vocab,
              discourse_graph: SentenceGraph | None = None) -> SummaryResult:
    """End-to-end inference for one document set.

    Encode, take all size-m combinations of the top-K salient sentences,
    rank them against the global document vector, and return the best
    candidate's sentences in discourse order.
    """
    output = encode_set(doc_set, graph, params, config, vocab, train=False)
    candidates = generate_candidates(output.salience.data.tolist(), selection)
    ranked = rank_candidates(candidates, output.global_doc,
                             output.sentence_reps, graph, params, config)
    best = ranked[0]
    order = reorder_sentences(best.node_indices, discourse_graph)
    sentences = doc_set.sentences
    return SummaryResult(
        sentences=tuple(sentences[i].raw_text for i in order),
        nodes=tuple(order),
        score=best.score,
    )
