"""Hot numeric kernels with a compiled fast path.

LCS length (the inner loop of ROUGE-L, hammered by oracle extraction) and
LDA collapsed Gibbs sampling dominate preprocessing time. The Cython
extension is used when built; otherwise the pure-Python twins take over.
Both backends are bit-identical, so the choice only affects speed —
``benchmarks/bench_kernels.py`` measures the gap.
"""

from . import _pykernels

try:
    from . import _ckernels as _impl
    BACKEND = "compiled"
except ImportError:
    _impl = _pykernels
    BACKEND = "python"

lcs_length = _impl.lcs_length
lda_gibbs = _impl.lda_gibbs


def available_backends():
    """Importable kernel backends, keyed by name."""
    backends = {"python": _pykernels}
    if _impl is not _pykernels:
        backends["compiled"] = _impl
    return backends
