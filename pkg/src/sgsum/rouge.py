"""ROUGE-1/2/L F1 scoring.

Used for oracle extraction, candidate ranking supervision, and evaluation.
No stemming and no stopword filtering: the same scorer is applied on both
sides of every comparison, so scores are internally consistent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from ._kernels import lcs_length


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float


_ZERO = RougeScore(0.0, 0.0, 0.0)


def _score(matches: int, n_candidate: int, n_reference: int) -> RougeScore:
    if n_candidate == 0 or n_reference == 0:
        return _ZERO
    precision = matches / n_candidate
    recall = matches / n_reference
    if precision + recall == 0.0:
        return RougeScore(precision, recall, 0.0)
    return RougeScore(precision, recall, 2.0 * precision * recall / (precision + recall))


def rouge_n(candidate, reference, n: int) -> RougeScore:
    """Clipped n-gram overlap F1 for n in {1, 2}."""
    if n not in (1, 2):
        raise ValueError(f"rouge_n supports n in {{1, 2}}, got {n}")
    cand_grams = Counter(zip(*(candidate[i:] for i in range(n)))) if len(candidate) >= n else Counter()
    ref_grams = Counter(zip(*(reference[i:] for i in range(n)))) if len(reference) >= n else Counter()
    matches = sum(min(count, ref_grams[gram]) for gram, count in cand_grams.items())
    return _score(matches, sum(cand_grams.values()), sum(ref_grams.values()))


def rouge_l(candidate, reference) -> RougeScore:
    """Longest-common-subsequence F1."""
    if not candidate or not reference:
        return _ZERO
    table: dict[str, int] = {}
    cand_ids = np.fromiter((table.setdefault(t, len(table)) for t in candidate),
                           dtype=np.int32, count=len(candidate))
    ref_ids = np.fromiter((table.setdefault(t, len(table)) for t in reference),
                          dtype=np.int32, count=len(reference))
    lcs = lcs_length(cand_ids, ref_ids)
    return _score(lcs, len(candidate), len(reference))


def mean_rouge(candidate, reference) -> float:
    """Arithmetic mean of ROUGE-1/2/L F1 against a single reference."""
    return (rouge_n(candidate, reference, 1).f1
            + rouge_n(candidate, reference, 2).f1
            + rouge_l(candidate, reference).f1) / 3.0


def rouge_max(candidate, references) -> tuple[float, float, float]:
    """Per-metric maximum F1 over several references (DUC convention)."""
    if not references:
        raise ValueError("at least one reference required")
    r1 = max(rouge_n(candidate, ref, 1).f1 for ref in references)
    r2 = max(rouge_n(candidate, ref, 2).f1 for ref in references)
    rl = max(rouge_l(candidate, ref).f1 for ref in references)
    return r1, r2, rl


def mean_rouge_max(candidate, references) -> float:
    """Mean of the per-metric maxima; the oracle/ranking aggregate."""
    r1, r2, rl = rouge_max(candidate, references)
    return (r1 + r2 + rl) / 3.0
