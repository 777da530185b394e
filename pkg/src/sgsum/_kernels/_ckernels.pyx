# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: LCS length and collapsed Gibbs sampling.

Arithmetic mirrors ``_pykernels`` exactly (same splitmix64 RNG, same IEEE
double operation order) so results are bit-identical across backends.
"""

import numpy as np


cdef inline unsigned long long _mix(unsigned long long state) nogil:
    cdef unsigned long long z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4B9B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _unit(unsigned long long z) nogil:
    return <double>(z >> 11) * (1.0 / 9007199254740992.0)


def lcs_length(int[::1] a, int[::1] b):
    """Length of the longest common subsequence of two int32 arrays."""
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    if n == 0 or m == 0:
        return 0
    prev_arr = np.zeros(m + 1, dtype=np.int64)
    cur_arr = np.zeros(m + 1, dtype=np.int64)
    cdef long long[::1] prev = prev_arr
    cdef long long[::1] cur = cur_arr
    cdef long long[::1] tmp
    cdef Py_ssize_t i, j
    cdef int ai
    for i in range(n):
        ai = a[i]
        cur[0] = 0
        for j in range(m):
            if ai == b[j]:
                cur[j + 1] = prev[j] + 1
            elif cur[j] >= prev[j + 1]:
                cur[j + 1] = cur[j]
            else:
                cur[j + 1] = prev[j + 1]
        tmp = prev
        prev = cur
        cur = tmp
    return int(prev[m])


def lda_gibbs(int[::1] doc_ids, int[::1] word_ids, int n_docs, int n_vocab,
              int n_topics, double alpha, double beta, int iterations,
              unsigned long long seed):
    """Collapsed Gibbs sampling for LDA; see the pure-Python twin for docs."""
    cdef Py_ssize_t n = word_ids.shape[0]
    doc_topic_arr = np.zeros((n_docs, n_topics), dtype=np.int64)
    topic_word_arr = np.zeros((n_vocab, n_topics), dtype=np.int64)
    topic_tot_arr = np.zeros(n_topics, dtype=np.int64)
    z_arr = np.zeros(n, dtype=np.int32)
    p_arr = np.zeros(n_topics, dtype=np.float64)

    cdef long long[:, ::1] doc_topic = doc_topic_arr
    cdef long long[:, ::1] topic_word = topic_word_arr
    cdef long long[::1] topic_tot = topic_tot_arr
    cdef int[::1] z = z_arr
    cdef double[::1] p = p_arr

    cdef unsigned long long state = seed
    cdef double u, total, acc, r, pj
    cdef double beta_sum = beta * n_vocab
    cdef Py_ssize_t t
    cdef int d, w, k, j, it

    for t in range(n):
        state = state + 0x9E3779B97F4A7C15ULL
        u = _unit(_mix(state))
        k = <int>(u * n_topics)
        if k >= n_topics:
            k = n_topics - 1
        z[t] = k
        doc_topic[doc_ids[t], k] += 1
        topic_word[word_ids[t], k] += 1
        topic_tot[k] += 1

    for it in range(iterations):
        for t in range(n):
            d = doc_ids[t]
            w = word_ids[t]
            k = z[t]
            doc_topic[d, k] -= 1
            topic_word[w, k] -= 1
            topic_tot[k] -= 1

            total = 0.0
            for j in range(n_topics):
                pj = (topic_word[w, j] + beta) / (topic_tot[j] + beta_sum) \
                    * (doc_topic[d, j] + alpha)
                p[j] = pj
                total += pj
            state = state + 0x9E3779B97F4A7C15ULL
            u = _unit(_mix(state))
            r = u * total
            acc = 0.0
            k = n_topics - 1
            for j in range(n_topics):
                acc += p[j]
                if r < acc:
                    k = j
                    break

            z[t] = k
            doc_topic[d, k] += 1
            topic_word[w, k] += 1
            topic_tot[k] += 1

    return doc_topic_arr, topic_word_arr.T.copy(), topic_tot_arr, z_arr
