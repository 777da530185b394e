"""Lead, LexRank, and MMR extractive baselines."""

from __future__ import annotations

import math
import warnings

import numpy as np

from .graphs import SentenceGraph
from .textproc import DocumentSet, build_tfidf, tfidf_cosine


def lead(doc_set: DocumentSet, n: int) -> list[int]:
    """First ceil(n/|docs|) sentences of each document, capped at n total.

    Returns global sentence indices; fewer than n exist -> all of them.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    per_doc = math.ceil(n / len(doc_set.docs))
    picked = []
    for doc in doc_set.docs:
        picked.extend(s.global_index for s in doc[:per_doc])
    return sorted(picked)[:n] if len(picked) > n else sorted(picked)


def lexrank(graph: SentenceGraph, damping: float = 0.85,
            tol: float = 1e-8, max_iterations: int = 1000) -> np.ndarray:
    """Eigenvector centrality of the similarity graph, PageRank style.

    Power iteration on the row-normalized weight matrix with damping;
    the returned scores form a probability vector.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError(f"damping must be in (0, 1), got {damping}")
    w = graph.weights
    n = w.shape[0]
    row_sums = w.sum(axis=1, keepdims=True)   # >= 1 because of the unit diagonal
    stochastic = w / row_sums
    scores = np.full(n, 1.0 / n)
    teleport = (1.0 - damping) / n
    for _ in range(max_iterations):
        updated = teleport + damping * (stochastic.T @ scores)
        if np.abs(updated - scores).max() < tol:
            return updated
        scores = updated
    warnings.warn(f"lexrank did not converge within {max_iterations} iterations")
    return scores


def mmr(relevance, sim: SentenceGraph, lam: float, m: int) -> list[int]:
    """Maximal marginal relevance selection.

    Greedy argmax of lam*rel(s) - (1-lam)*max_sim(s, selected); ties go to
    the lower index. Returns min(m, L) distinct indices in pick order.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must be in [0, 1], got {lam}")
    relevance = np.asarray(relevance, dtype=np.float64)
    n = relevance.shape[0]
    if m > n:
        raise ValueError(f"m={m} exceeds sentence count {n}")
    weights = sim.weights
    selected: list[int] = []
    while len(selected) < m:
        best, best_score = -1, -np.inf
        for i in range(n):
            if i in selected:
                continue
            redundancy = max(weights[i, j] for j in selected) if selected else 0.0
            score = lam * relevance[i] - (1.0 - lam) * redundancy
            if score > best_score:
                best, best_score = i, score
        selected.append(best)
    return selected


def centroid_relevance(doc_set: DocumentSet) -> np.ndarray:
    """tf-idf cosine of each sentence to the set centroid; MMR's default
    relevance signal."""
    vectors = build_tfidf(doc_set)
    centroid: dict[str, float] = {}
    for vec in vectors:
        for term, weight in vec.items():
            centroid[term] = centroid.get(term, 0.0) + weight
    scale = 1.0 / len(vectors)
    centroid = {t: w * scale for t, w in centroid.items()}
    return np.array([tfidf_cosine(v, centroid) for v in vectors])
