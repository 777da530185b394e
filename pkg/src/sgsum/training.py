"""Oracle extraction, losses, and the optimization loop.

Supervision comes from a greedily extracted oracle sub-graph: the loss is
(1) binary cross-entropy of per-sentence salience against oracle
membership, (2) one minus the cosine between the global document vector
and the encoded oracle, and (3) a pairwise margin loss pushing candidates
with better ROUGE to score higher cosine against the oracle. The margin
grows with the ranking gap by default ("scaled"); a fixed margin is
available behind the same switch.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import tensor as T
from .encoder import EncoderConfig, Vocab, encode_set
from .rouge import mean_rouge_max
from .subgraph import SelectionConfig, encode_subgraph, generate_candidates
from .tensor import Tensor, backward
from .textproc import DocumentSet

MARGIN_MODES = ("fixed", "scaled")


@dataclass(frozen=True)
class OracleLabels:
    """Greedy oracle sub-graph and its 0/1 per-sentence labels."""

    oracle_indices: tuple[int, ...]
    y_star: tuple[int, ...]


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.03              # 0.015 for DUC-sized corpora
    beta1: float = 0.9
    beta2: float = 0.999
    warmup_steps: int = 10000
    grad_clip_norm: float = 2.0
    dropout: float = 0.1
    gamma: float = 0.01
    margin_mode: str = "scaled"
    epochs: int = 10
    adam_eps: float = 1e-8

    def __post_init__(self):
        for name in ("lr", "beta1", "beta2", "warmup_steps", "grad_clip_norm",
                     "gamma", "epochs", "adam_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.margin_mode not in MARGIN_MODES:
            raise ValueError(
                f"margin_mode must be one of {MARGIN_MODES}, got {self.margin_mode!r}")

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in (
            "lr", "beta1", "beta2", "warmup_steps", "grad_clip_norm", "dropout",
            "gamma", "margin_mode", "epochs", "adam_eps")}


def _selected_tokens(sentences, indices) -> list[str]:
    tokens: list[str] = []
    for i in sorted(indices):
        tokens.extend(sentences[i].tokens)
    return tokens


def extract_oracle(doc_set: DocumentSet, gold=None,
                   max_size: int = 9) -> OracleLabels:
    """Greedy oracle: repeatedly add the sentence that most improves the
    mean ROUGE of the running selection against the reference(s); stop when
    nothing improves or ``max_size`` is reached.

    If no sentence improves over the empty selection, the single best
    sentence (lowest index on ties) is forced so the oracle is never empty.
    """
    if gold is None:
        refs = doc_set.gold_token_lists()
    else:
        refs = _normalize_gold(gold)
    if not refs or all(not r for r in refs):
        raise ValueError(f"set {doc_set.id!r}: gold summary is empty")
    sentences = doc_set.sentences
    length = len(sentences)

    selected: list[int] = []
    best = 0.0
    while len(selected) < max_size:
        pick = -1
        pick_score = best
        for i in range(length):
            if i in selected:
                continue
            score = mean_rouge_max(_selected_tokens(sentences, selected + [i]), refs)
            if score > pick_score:
                pick_score = score
                pick = i
        if pick == -1:
            break
        selected.append(pick)
        best = pick_score
    if not selected:
        scores = [mean_rouge_max(list(s.tokens), refs) for s in sentences]
        selected = [int(np.argmax(scores))]
    oracle = tuple(sorted(selected))
    y_star = tuple(1 if i in set(oracle) else 0 for i in range(length))
    return OracleLabels(oracle, y_star)


def _normalize_gold(gold):
    from .textproc import tokenize
    if all(isinstance(s, str) for s in gold):
        gold = [gold]
    refs = []
    for ref in gold:
        tokens: list[str] = []
        for sent in ref:
            tokens.extend(tokenize(sent))
        refs.append(tokens)
    return refs


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------

def loss_sum1(global_doc: Tensor, oracle_vec: Tensor) -> Tensor:
    """1 - cosine(global document vector, oracle sub-graph vector)."""
    if np.linalg.norm(global_doc.data) == 0.0 or np.linalg.norm(oracle_vec.data) == 0.0:
        raise ValueError("loss_sum1: zero vector")
    return 1.0 - T.cosine(global_doc, oracle_vec)


def loss_sum2(scores, gamma: float, margin_mode: str = "scaled") -> Tensor:
    """Pairwise margin loss over candidates sorted by descending ROUGE.

    For every pair i < j the worse candidate must score at least a margin
    below the better one: gamma * (j - i) in "scaled" mode, plain gamma in
    "fixed" mode. Normalized by the number of pairs.
    """
    if margin_mode not in MARGIN_MODES:
        raise ValueError(f"unknown margin_mode {margin_mode!r}")
    n = len(scores)
    if n < 2:
        return Tensor(0.0)
    total = None
    pairs = 0
    for i in range(n):
        for j in range(i + 1, n):
            margin = gamma * (j - i) if margin_mode == "scaled" else gamma
            term = T.relu(scores[j] - scores[i] + margin)
            total = term if total is None else total + term
            pairs += 1
    return total * (1.0 / pairs)


def loss_sent(salience: Tensor, y_star) -> Tensor:
    """Mean binary cross-entropy of salience against oracle membership."""
    labels = np.asarray(y_star, dtype=np.float64)
    if salience.data.shape != labels.shape:
        raise ValueError(
            f"salience shape {salience.data.shape} != labels shape {labels.shape}")
    clamped = T.clip(salience, 1e-7, 1.0 - 1e-7)
    return -T.mean(labels * T.log(clamped) + (1.0 - labels) * T.log(1.0 - clamped))


def total_loss(l_sent: Tensor, l_sum1: Tensor, l_sum2: Tensor) -> Tensor:
    """Unweighted sum of the three parts."""
    return l_sent + l_sum1 + l_sum2


# ---------------------------------------------------------------------------
# Optimization
# ---------------------------------------------------------------------------

def learning_rate(step: int, base_lr: float, warmup_steps: int) -> float:
    """Inverse-square-root decay with linear warmup."""
    return base_lr * min(step ** -0.5, step * warmup_steps ** -1.5)


def clip_gradients(params: dict[str, Tensor], max_norm: float) -> float:
    """Scale all gradients so their global norm is at most ``max_norm``.

    Returns the pre-clip global norm.
    """
    total = 0.0
    for p in params.values():
        if p.grad is not None:
            total += float((p.grad * p.grad).sum())
    norm = math.sqrt(total)
    if norm > max_norm and norm > 0.0:
        scale = max_norm / norm
        for p in params.values():
            if p.grad is not None:
                p.grad *= scale
    return norm


class Adam:
    """Adam with warmup + inverse-sqrt learning-rate schedule."""

    def __init__(self, params: dict[str, Tensor], config: TrainConfig):
        self.params = params
        self.config = config
        self.step_count = 0
        self._m = {name: np.zeros_like(p.data) for name, p in params.items()}
        self._v = {name: np.zeros_like(p.data) for name, p in params.items()}

    @property
    def current_lr(self) -> float:
        step = max(self.step_count, 1)
        return learning_rate(step, self.config.lr, self.config.warmup_steps)

    def zero_grad(self):
        for p in self.params.values():
            p.zero_grad()

    def step(self):
        self.step_count += 1
        cfg = self.config
        lr = learning_rate(self.step_count, cfg.lr, cfg.warmup_steps)
        b1, b2 = cfg.beta1, cfg.beta2
        bias1 = 1.0 - b1 ** self.step_count
        bias2 = 1.0 - b2 ** self.step_count
        for name, p in self.params.items():
            if p.grad is None:
                continue
            m = self._m[name]
            v = self._v[name]
            m *= b1
            m += (1.0 - b1) * p.grad
            v *= b2
            v += (1.0 - b2) * (p.grad * p.grad)
            p.data -= lr * (m / bias1) / (np.sqrt(v / bias2) + cfg.adam_eps)


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------

@dataclass
class TrainExample:
    doc_set: DocumentSet
    graph: object            # SentenceGraph
    oracle: OracleLabels


def candidate_losses(example: TrainExample, params, enc_config: EncoderConfig,
                     sel_config: SelectionConfig, train_config: TrainConfig,
                     vocab: Vocab, train: bool = False, rng=None,
                     rouge_cache: dict | None = None,
                     fixed_candidates=None) -> tuple[Tensor, dict]:
    """Build the full loss for one document set.

    Candidate selection and their ROUGE ordering are discrete and treated
    as constants; ``fixed_candidates`` pins them (gradient checking needs
    the selection frozen across re-evaluations).
    """
    doc_set, graph, oracle = example.doc_set, example.graph, example.oracle
    output = encode_set(doc_set, graph, params, enc_config, vocab, train, rng)

    if fixed_candidates is None:
        candidates = generate_candidates(output.salience.data.tolist(), sel_config)
    else:
        candidates = list(fixed_candidates)

    oracle_vec = encode_subgraph(oracle.oracle_indices, output.sentence_reps,
                                 graph, params, enc_config, train, rng)
    scores = [T.cosine(encode_subgraph(nodes, output.sentence_reps, graph,
                                       params, enc_config, train, rng), oracle_vec)
              for nodes in candidates]

    refs = doc_set.gold_token_lists()
    sentences = doc_set.sentences
    rouge_values = []
    for nodes in candidates:
        key = (doc_set.id, nodes)
        if rouge_cache is not None and key in rouge_cache:
            rouge_values.append(rouge_cache[key])
            continue
        value = mean_rouge_max(_selected_tokens(sentences, nodes), refs)
        if rouge_cache is not None:
            rouge_cache[key] = value
        rouge_values.append(value)
    order = sorted(range(len(candidates)),
                   key=lambda i: (-rouge_values[i], candidates[i]))

    l_sent = loss_sent(output.salience, oracle.y_star)
    l_sum1 = loss_sum1(output.global_doc, oracle_vec)
    l_sum2 = loss_sum2([scores[i] for i in order], train_config.gamma,
                       train_config.margin_mode)
    loss = total_loss(l_sent, l_sum1, l_sum2)
    parts = {"loss": loss.item(), "loss_sent": l_sent.item(),
             "loss_sum1": l_sum1.item(), "loss_sum2": l_sum2.item(),
             "candidates": candidates}
    return loss, parts


def train_step(example: TrainExample, params, optimizer: Adam,
               enc_config: EncoderConfig, sel_config: SelectionConfig,
               train_config: TrainConfig, vocab: Vocab, rng,
               rouge_cache: dict | None = None) -> dict:
    """One forward/backward/update on a single document set.

    A non-finite loss skips the update and reports it instead of poisoning
    the parameters.
    """
    loss, metrics = candidate_losses(example, params, enc_config, sel_config,
                                     train_config, vocab, train=True, rng=rng,
                                     rouge_cache=rouge_cache)
    metrics = {k: v for k, v in metrics.items() if k != "candidates"}
    metrics["set_id"] = example.doc_set.id
    if not math.isfinite(metrics["loss"]):
        warnings.warn(f"set {example.doc_set.id!r}: non-finite loss, update skipped")
        metrics.update(skipped=True, grad_norm=0.0, lr=optimizer.current_lr)
        return metrics
    optimizer.zero_grad()
    backward(loss)
    norm = clip_gradients(params, train_config.grad_clip_norm)
    optimizer.step()
    metrics.update(skipped=False, grad_norm=norm, lr=optimizer.current_lr)
    return metrics


def build_examples(doc_sets, graph_for, sel_config: SelectionConfig) -> list[TrainExample]:
    """Pair sets with graphs and greedy oracles; skip sets smaller than m."""
    examples = []
    for doc_set in doc_sets:
        if doc_set.size < sel_config.subgraph_nodes:
            warnings.warn(
                f"set {doc_set.id!r} has {doc_set.size} sentences, fewer than "
                f"m={sel_config.subgraph_nodes}; skipped")
            continue
        oracle = extract_oracle(doc_set, max_size=sel_config.subgraph_nodes)
        examples.append(TrainExample(doc_set, graph_for(doc_set), oracle))
    return examples


def train_model(examples, vocab: Vocab, enc_config: EncoderConfig,
                sel_config: SelectionConfig, train_config: TrainConfig,
                seed: int = 0, params: dict[str, Tensor] | None = None,
                metrics_sink=None) -> tuple[dict[str, Tensor], list[float]]:
    """Train for the configured number of epochs.

    Returns the parameters and the mean loss per epoch. Fully deterministic
    for a fixed seed: one generator drives init, epoch shuffling, and
    dropout.
    """
    from .encoder import init_params

    if not examples:
        raise ValueError("no trainable examples")
    rng = np.random.default_rng(seed)
    if params is None:
        params = init_params(vocab.size, enc_config, rng)
    optimizer = Adam(params, train_config)
    rouge_cache: dict = {}
    epoch_losses: list[float] = []
    step = 0
    for epoch in range(train_config.epochs):
        order = rng.permutation(len(examples))
        losses = []
        for idx in order:
            metrics = train_step(examples[idx], params, optimizer, enc_config,
                                 sel_config, train_config, vocab, rng, rouge_cache)
            step += 1
            metrics.update(step=step, epoch=epoch + 1)
            losses.append(metrics["loss"])
            if metrics_sink is not None:
                metrics_sink(metrics)
        epoch_losses.append(float(np.mean(losses)))
    return params, epoch_losses
