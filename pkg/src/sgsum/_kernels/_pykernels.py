"""Pure-Python kernels, used when the compiled extension is unavailable.

Kept in exact arithmetic lockstep with ``_ckernels.pyx`` (same RNG, same
operation order on IEEE doubles) so both backends return bit-identical
results and differ only in speed.
"""

import numpy as np

_MASK64 = (1 << 64) - 1
_INV_2_53 = 1.0 / 9007199254740992.0  # 2**-53


def _next_u64(state):
    # splitmix64
    state = (state + 0x9E3779B97F4A7C15) & _MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4B9B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    z = z ^ (z >> 31)
    return state, z


def _next_unit(state):
    state, z = _next_u64(state)
    return state, (z >> 11) * _INV_2_53


def lcs_length(a, b):
    """Length of the longest common subsequence of two int sequences."""
    if isinstance(a, np.ndarray):
        a = a.tolist()
    if isinstance(b, np.ndarray):
        b = b.tolist()
    n, m = len(a), len(b)
    if n == 0 or m == 0:
        return 0
    prev = [0] * (m + 1)
    for i in range(n):
        cur = [0] * (m + 1)
        ai = a[i]
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            elif cur[j] >= prev[j + 1]:
                cur[j + 1] = cur[j]
            else:
                cur[j + 1] = prev[j + 1]
        prev = cur
    return prev[m]


def lda_gibbs(doc_ids, word_ids, n_docs, n_vocab, n_topics, alpha, beta,
              iterations, seed):
    """Collapsed Gibbs sampling for LDA over a token stream.

    ``doc_ids``/``word_ids`` give the document and vocabulary index of each
    token. Returns (doc_topic, topic_word, topic_totals, assignments) count
    arrays after ``iterations`` full sweeps.
    """
    doc_list = doc_ids.tolist() if isinstance(doc_ids, np.ndarray) else list(doc_ids)
    word_list = word_ids.tolist() if isinstance(word_ids, np.ndarray) else list(word_ids)
    n = len(word_list)
    state = seed & _MASK64

    doc_topic = [[0] * n_topics for _ in range(n_docs)]
    topic_word = [[0] * n_topics for _ in range(n_vocab)]  # transposed for locality
    topic_tot = [0] * n_topics
    z = [0] * n

    for t in range(n):
        state, u = _next_unit(state)
        k = int(u * n_topics)
        if k >= n_topics:
            k = n_topics - 1
        z[t] = k
        doc_topic[doc_list[t]][k] += 1
        topic_word[word_list[t]][k] += 1
        topic_tot[k] += 1

    beta_sum = beta * n_vocab
    p = [0.0] * n_topics
    for _ in range(iterations):
        for t in range(n):
            d = doc_list[t]
            w = word_list[t]
            k = z[t]
            dt = doc_topic[d]
            tw = topic_word[w]
            dt[k] -= 1
            tw[k] -= 1
            topic_tot[k] -= 1

            total = 0.0
            for j in range(n_topics):
                pj = (tw[j] + beta) / (topic_tot[j] + beta_sum) * (dt[j] + alpha)
                p[j] = pj
                total += pj
            state, u = _next_unit(state)
            r = u * total
            acc = 0.0
            k = n_topics - 1
            for j in range(n_topics):
                acc += p[j]
                if r < acc:
                    k = j
                    break

            z[t] = k
            dt[k] += 1
            tw[k] += 1
            topic_tot[k] += 1

    doc_topic_arr = np.array(doc_topic, dtype=np.int64).reshape(n_docs, n_topics)
    topic_word_arr = np.array(topic_word, dtype=np.int64).reshape(n_vocab, n_topics).T.copy()
    topic_tot_arr = np.array(topic_tot, dtype=np.int64)
    z_arr = np.array(z, dtype=np.int32)
    return doc_topic_arr, topic_word_arr, topic_tot_arr, z_arr
