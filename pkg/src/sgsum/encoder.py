"""Graph-based multi-document encoder.

Each document runs through a shared-weight token transformer; the hidden
state at a per-sentence boundary marker is that sentence's representation.
Stacked sentence vectors then pass through graph-informed attention layers
whose logits carry a Gaussian bias derived from the relation graph, and a
multi-head weighted pooling produces one global vector for the whole set.
A logistic head scores per-sentence salience.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import tensor as T
from .graphs import SentenceGraph
from .tensor import Tensor

UNK_ID = 0
MARKER_ID = 1
_RESERVED = ("<unk>", "<s>")


@dataclass(frozen=True)
class EncoderConfig:
    hidden: int = 256
    ffn_hidden: int = 1024
    heads: int = 8
    transformer_layers: int = 6
    graph_layers: int = 2
    dropout: float = 0.1
    sigma: float = 1.0
    max_tokens: int = 768

    def __post_init__(self):
        if self.hidden % self.heads != 0:
            raise ValueError(
                f"hidden ({self.hidden}) must be divisible by heads ({self.heads})")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "hidden", "ffn_hidden", "heads", "transformer_layers",
            "graph_layers", "dropout", "sigma", "max_tokens")}


@dataclass
class EncoderOutput:
    """Per-sentence representations, global set vector, salience scores."""

    sentence_reps: Tensor   # (L, hidden)
    global_doc: Tensor      # (hidden,)
    salience: Tensor        # (L,) in (0, 1)


@dataclass(frozen=True)
class Vocab:
    token_to_id: dict[str, int]

    @property
    def size(self) -> int:
        return len(self.token_to_id)

    def encode(self, tokens) -> list[int]:
        table = self.token_to_id
        return [table.get(t, UNK_ID) for t in tokens]


def build_vocab(doc_sets, min_count: int = 1) -> Vocab:
    """Corpus vocabulary with reserved unknown and boundary-marker slots."""
    counts: dict[str, int] = {}
    for doc_set in doc_sets:
        for sent in doc_set.sentences:
            for token in sent.tokens:
                counts[token] = counts.get(token, 0) + 1
    table = {token: i for i, token in enumerate(_RESERVED)}
    for token in sorted(counts):
        if counts[token] >= min_count and token not in table:
            table[token] = len(table)
    return Vocab(table)


def init_params(vocab_size: int, config: EncoderConfig, rng) -> dict[str, Tensor]:
    """All trainable weights, uniform(-0.1, 0.1) except layer-norm affines.

    Layer-norm gains start at 1 and biases at 0 so normalization is the
    identity-scale map at step zero.
    """
    h, ffn = config.hidden, config.ffn_hidden
    params: dict[str, Tensor] = {}

    def uniform(name, *shape):
        params[name] = Tensor(rng.uniform(-0.1, 0.1, shape), requires_grad=True)

    def norm_affine(name, dim):
        params[f"{name}_g"] = Tensor(np.ones(dim), requires_grad=True)
        params[f"{name}_b"] = Tensor(np.zeros(dim), requires_grad=True)

    def block(prefix):
        for w in ("wq", "wk", "wv", "wo"):
            uniform(f"{prefix}.{w}", h, h)
        norm_affine(f"{prefix}.ln1", h)
        uniform(f"{prefix}.ffn_w1", h, ffn)
        params[f"{prefix}.ffn_b1"] = Tensor(np.zeros(ffn), requires_grad=True)
        uniform(f"{prefix}.ffn_w2", ffn, h)
        params[f"{prefix}.ffn_b2"] = Tensor(np.zeros(h), requires_grad=True)
        norm_affine(f"{prefix}.ln2", h)

    def pool(prefix):
        dh = h // config.heads
        uniform(f"{prefix}.wa", h, config.heads)
        uniform(f"{prefix}.wb", h, h)
        for z in range(config.heads):
            uniform(f"{prefix}.wc{z}", dh, dh)
            norm_affine(f"{prefix}.ln{z}", dh)
        uniform(f"{prefix}.wd", h, h)

    uniform("tok_emb", vocab_size, h)
    for i in range(config.transformer_layers):
        block(f"doc.{i}")
    for i in range(config.graph_layers):
        block(f"graph.{i}")
        block(f"sub.{i}")
    pool("pool")
    pool("subpool")
    uniform("score.w", h, 1)
    params["score.b"] = Tensor(np.zeros(1), requires_grad=True)
    return params


def sinusoidal_positions(length: int, dim: int) -> np.ndarray:
    """Fixed sin/cos position table, one row per position."""
    positions = np.arange(length, dtype=np.float64)[:, None]
    index = np.arange(dim, dtype=np.float64)[None, :]
    angles = positions / np.power(10000.0, 2.0 * (index // 2) / dim)
    return np.where(index % 2 == 0, np.sin(angles), np.cos(angles))


def graph_bias(weights: np.ndarray, sigma: float) -> np.ndarray:
    """Attention-logit bias: -(1 - w)^2 / (2 sigma^2), zero where w = 1."""
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    return -((1.0 - weights) ** 2) / (2.0 * sigma * sigma)


def _attention_block(x, params, prefix, config, bias, train, rng):
    """One transformer block: (biased) self-attention + FFN, each followed
    by residual-then-layer-norm."""
    h = config.hidden
    dh = h // config.heads
    scale = 1.0 / math.sqrt(dh)

    q = x @ params[f"{prefix}.wq"]
    k = x @ params[f"{prefix}.wk"]
    v = x @ params[f"{prefix}.wv"]
    heads = []
    for z in range(config.heads):
        lo, hi = z * dh, (z + 1) * dh
        logits = (T.slice_cols(q, lo, hi) @ T.transpose(T.slice_cols(k, lo, hi))) * scale
        if bias is not None:
            logits = logits + bias
        attn = T.softmax(logits, axis=-1)
        attn = T.dropout(attn, config.dropout, train, rng)
        heads.append(attn @ T.slice_cols(v, lo, hi))
    attn_out = T.concat(heads, axis=1) @ params[f"{prefix}.wo"]
    x = T.layer_norm(x + T.dropout(attn_out, config.dropout, train, rng),
                     params[f"{prefix}.ln1_g"], params[f"{prefix}.ln1_b"])

    ff = T.relu(x @ params[f"{prefix}.ffn_w1"] + params[f"{prefix}.ffn_b1"])
    ff = ff @ params[f"{prefix}.ffn_w2"] + params[f"{prefix}.ffn_b2"]
    x = T.layer_norm(x + T.dropout(ff, config.dropout, train, rng),
                     params[f"{prefix}.ln2_g"], params[f"{prefix}.ln2_b"])
    return x


def encode_document(doc, params, config: EncoderConfig, vocab: Vocab,
                    train: bool = False, rng=None) -> Tensor:
    """Token transformer over one document; returns (n_sentences, hidden).

    A boundary marker token is prepended to every sentence and its final
    hidden state is taken as the sentence representation.
    """
    if not doc:
        return Tensor(np.zeros((0, config.hidden)))
    ids: list[int] = []
    marker_positions: list[int] = []
    for sent in doc:
        marker_positions.append(len(ids))
        ids.append(MARKER_ID)
        ids.extend(vocab.encode(sent.tokens))
    x = T.gather_rows(params["tok_emb"], ids)
    x = x + sinusoidal_positions(len(ids), config.hidden)
    x = T.dropout(x, config.dropout, train, rng)
    for i in range(config.transformer_layers):
        x = _attention_block(x, params, f"doc.{i}", config, None, train, rng)
    return T.gather_rows(x, marker_positions)


def graph_attention_layer(reps, graph: SentenceGraph, sigma: float, params,
                          prefix: str, config: EncoderConfig,
                          train: bool = False, rng=None) -> Tensor:
    """Graph-informed attention over sentence vectors."""
    if reps.shape[0] != graph.size:
        raise ValueError(
            f"graph has {graph.size} nodes but reps has {reps.shape[0]} rows")
    bias = graph_bias(graph.weights, sigma)
    return _attention_block(reps, params, prefix, config, bias, train, rng)


def graph_pool(reps, params, prefix: str, config: EncoderConfig) -> Tensor:
    """Multi-head weighted pooling of sentence vectors into one vector.

    Per head: scalar attention scores over sentences, softmax, weighted sum
    of per-head value vectors, linear + layer norm; heads are concatenated
    and mixed by a final linear map.
    """
    h = config.hidden
    dh = h // config.heads
    scores = reps @ params[f"{prefix}.wa"]   # (L, heads)
    values = reps @ params[f"{prefix}.wb"]   # (L, hidden)
    heads = []
    for z in range(config.heads):
        attn = T.softmax(T.slice_cols(scores, z, z + 1), axis=0)   # (L, 1)
        pooled = T.transpose(attn) @ T.slice_cols(values, z * dh, (z + 1) * dh)
        head = T.layer_norm(pooled @ params[f"{prefix}.wc{z}"],
                            params[f"{prefix}.ln{z}_g"], params[f"{prefix}.ln{z}_b"])
        heads.append(head)
    return T.ravel(T.concat(heads, axis=1) @ params[f"{prefix}.wd"])


def pooling_attention(reps_data: np.ndarray, params, prefix: str,
                      config: EncoderConfig) -> np.ndarray:
    """Per-head pooling attention distributions (heads, L); diagnostic view."""
    scores = reps_data @ params[f"{prefix}.wa"].data
    shifted = scores - scores.max(axis=0, keepdims=True)
    e = np.exp(shifted)
    return (e / e.sum(axis=0, keepdims=True)).T


def score_sentences(reps, params) -> Tensor:
    """Logistic salience score per sentence, strictly inside (0, 1)."""
    return T.sigmoid(T.ravel(reps @ params["score.w"] + params["score.b"]))


def encode_set(doc_set, graph: SentenceGraph, params, config: EncoderConfig,
               vocab: Vocab, train: bool = False, rng=None) -> EncoderOutput:
    """Full encoder: per-document transformer, graph layers, pooling, scores."""
    if doc_set.size == 0:
        raise ValueError(f"document set {doc_set.id!r} has no sentences")
    if graph.size != doc_set.size:
        raise ValueError(
            f"graph size {graph.size} does not match sentence count {doc_set.size} "
            f"for set {doc_set.id!r}")
    blocks = [encode_document(doc, params, config, vocab, train, rng)
              for doc in doc_set.docs]
    blocks = [b for b in blocks if b.shape[0] > 0]
    reps = blocks[0] if len(blocks) == 1 else T.concat(blocks, axis=0)
    for i in range(config.graph_layers):
        reps = graph_attention_layer(reps, graph, config.sigma, params,
                                     f"graph.{i}", config, train, rng)
    return EncoderOutput(
        sentence_reps=reps,
        global_doc=graph_pool(reps, params, "pool", config),
        salience=score_sentences(reps, params),
    )
