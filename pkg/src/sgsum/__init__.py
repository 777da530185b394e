"""Extractive multi-document summarization by sub-graph selection.

Document sets become sentence relation graphs; candidate summaries are
sub-graphs of that relation graph, encoded and ranked as whole units.
"""

__version__ = "0.1.0"

from ._kernels import BACKEND as KERNEL_BACKEND
from .encoder import EncoderConfig, EncoderOutput, Vocab, build_vocab
from .graphs import SentenceGraph, TopicModel, build_graph
from .rouge import RougeScore, mean_rouge, rouge_l, rouge_n
from .subgraph import CandidateSummary, SelectionConfig, SummaryResult, summarize
from .tensor import Tensor, backward, grad_check
from .textproc import DocumentSet, Sentence, make_document_set, read_jsonl_dataset
from .training import OracleLabels, TrainConfig, extract_oracle, train_model

__all__ = [
    "KERNEL_BACKEND", "EncoderConfig", "EncoderOutput", "Vocab", "build_vocab",
    "SentenceGraph", "TopicModel", "build_graph", "RougeScore", "mean_rouge",
    "rouge_l", "rouge_n", "CandidateSummary", "SelectionConfig", "SummaryResult",
    "summarize", "Tensor", "backward", "grad_check", "DocumentSet", "Sentence",
    "make_document_set", "read_jsonl_dataset", "OracleLabels", "TrainConfig",
    "extract_oracle", "train_model",
]
