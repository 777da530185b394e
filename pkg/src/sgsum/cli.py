"""Command-line surface: build-graph, oracle, train, summarize, evaluate.

Every subcommand is deterministic given --seed and its inputs. Diagnostics
go to stderr; data goes to the output file (or stdout for evaluate). The
effective configuration is echoed into every artifact for provenance.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import baselines, graphs, rouge, subgraph, textproc, training
from .encoder import EncoderConfig, Vocab, build_vocab
from .graphs import GRAPH_KINDS, SentenceGraph
from .subgraph import SelectionConfig
from .tensor import load_checkpoint, save_checkpoint
from .training import TrainConfig

METHODS = ("sgsum", "lead", "lexrank", "mmr")


def _load_sets(path, max_tokens):
    doc_sets = textproc.read_jsonl_dataset(path)
    return [textproc.truncate_set(s, max_tokens) for s in doc_sets]


def _write_jsonl(path, records):
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")


def _load_graph_cache(path) -> dict[str, SentenceGraph]:
    cache = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                graph = SentenceGraph(record["kind"],
                                      np.asarray(record["weights"], dtype=np.float64))
                if graph.size != record["size"]:
                    raise ValueError(f"size field {record['size']} != matrix size {graph.size}")
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"{path}: malformed graph on line {lineno}: {exc}") from exc
            cache[record["id"]] = graph
    return cache


def _graph_for_set(doc_set, cache, kind, args_config):
    if cache is not None:
        if doc_set.id not in cache:
            raise ValueError(f"graph cache has no entry for set {doc_set.id!r}")
        graph = cache[doc_set.id]
        if graph.kind != kind:
            raise ValueError(
                f"mismatched field 'kind': cache has {graph.kind!r}, expected {kind!r}")
        if graph.size != doc_set.size:
            raise ValueError(
                f"mismatched field 'size' for set {doc_set.id!r}: cache {graph.size}, "
                f"data {doc_set.size}")
        return graph
    return graphs.build_graph(doc_set, kind, **args_config)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_build_graph(args) -> int:
    doc_sets = _load_sets(args.data, args.max_tokens)
    config = {"kind": args.kind, "threshold": args.threshold,
              "num_topics": args.num_topics, "iterations": args.iterations,
              "seed": args.seed, "max_tokens": args.max_tokens}
    records = []
    for doc_set in doc_sets:
        graph = graphs.build_graph(doc_set, args.kind, threshold=args.threshold,
                                   num_topics=args.num_topics,
                                   iterations=args.iterations, seed=args.seed)
        records.append({"id": doc_set.id, "kind": graph.kind, "size": graph.size,
                        "weights": graph.weights.tolist(), "config": config})
    _write_jsonl(args.out, records)
    print(f"wrote {len(records)} graphs to {args.out}", file=sys.stderr)
    return 0


def cmd_oracle(args) -> int:
    doc_sets = _load_sets(args.data, args.max_tokens)
    config = {"m": args.m, "max_tokens": args.max_tokens}
    records = []
    for doc_set in doc_sets:
        labels = training.extract_oracle(doc_set, max_size=args.m)
        records.append({"id": doc_set.id, "oracle": list(labels.oracle_indices),
                        "config": config})
    _write_jsonl(args.out, records)
    print(f"wrote {len(records)} oracles to {args.out}", file=sys.stderr)
    return 0


def cmd_train(args) -> int:
    doc_sets = _load_sets(args.data, args.max_tokens)
    enc_config = EncoderConfig(
        hidden=args.hidden, ffn_hidden=args.ffn_hidden, heads=args.heads,
        transformer_layers=args.transformer_layers, graph_layers=args.graph_layers,
        dropout=args.dropout, sigma=args.sigma, max_tokens=args.max_tokens)
    sel_config = SelectionConfig(candidate_nodes=args.k, subgraph_nodes=args.m)
    train_config = TrainConfig(
        lr=args.lr, warmup_steps=args.warmup, dropout=args.dropout,
        gamma=args.gamma, margin_mode=args.margin_mode, epochs=args.epochs)

    cache = _load_graph_cache(args.graphs) if args.graphs else None
    graph_config = {"threshold": args.threshold, "num_topics": args.num_topics,
                    "iterations": args.iterations, "seed": args.seed}
    vocab = build_vocab(doc_sets)
    examples = training.build_examples(
        doc_sets, lambda s: _graph_for_set(s, cache, args.graph_kind, graph_config),
        sel_config)

    meta = {"encoder": enc_config.to_dict(),
            "selection": {"candidate_nodes": args.k, "subgraph_nodes": args.m},
            "train": train_config.to_dict(),
            "graph_kind": args.graph_kind,
            "graph_config": graph_config,
            "seed": args.seed,
            "vocab": vocab.token_to_id}

    sink = None
    metrics_handle = None
    if args.metrics_out:
        metrics_handle = open(args.metrics_out, "w", encoding="utf-8")
        metrics_handle.write(json.dumps({"config": meta_without_vocab(meta)},
                                        sort_keys=True) + "\n")

        def sink(record):
            metrics_handle.write(json.dumps(record, sort_keys=True) + "\n")

    try:
        params, epoch_losses = training.train_model(
            examples, vocab, enc_config, sel_config, train_config,
            seed=args.seed, metrics_sink=sink)
    finally:
        if metrics_handle is not None:
            metrics_handle.close()

    save_checkpoint(args.checkpoint_out, params, meta)
    for epoch, loss in enumerate(epoch_losses, start=1):
        print(f"epoch {epoch}: mean loss {loss:.4f}", file=sys.stderr)
    print(f"wrote checkpoint to {args.checkpoint_out}", file=sys.stderr)
    return 0


def meta_without_vocab(meta: dict) -> dict:
    return {k: v for k, v in meta.items() if k != "vocab"}


def cmd_summarize(args) -> int:
    doc_sets = _load_sets(args.data, args.max_tokens)
    if args.method == "sgsum":
        records = _summarize_sgsum(args, doc_sets)
    else:
        records = _summarize_baseline(args, doc_sets)
    _write_jsonl(args.out, records)
    print(f"wrote {len(records)} summaries to {args.out}", file=sys.stderr)
    return 0


def _summarize_sgsum(args, doc_sets):
    if not args.checkpoint:
        raise ValueError("--method sgsum requires --checkpoint")
    params, meta = load_checkpoint(args.checkpoint)
    enc_config = EncoderConfig(**meta["encoder"])
    sel_config = SelectionConfig(**meta["selection"])
    vocab = Vocab(meta["vocab"])
    kind = meta["graph_kind"]
    cache = _load_graph_cache(args.graphs) if args.graphs else None
    config_echo = {"method": "sgsum", "graph_kind": kind,
                   "encoder": meta["encoder"], "selection": meta["selection"],
                   "max_tokens": args.max_tokens}
    records = []
    for doc_set in doc_sets:
        graph = _graph_for_set(doc_set, cache, kind, meta["graph_config"])
        discourse = graphs.build_discourse_graph(doc_set)
        result = subgraph.summarize(doc_set, graph, params, enc_config,
                                    sel_config, vocab, discourse_graph=discourse)
        records.append({"id": doc_set.id, "summary": list(result.sentences),
                        "nodes": list(result.nodes), "score": result.score,
                        "config": config_echo})
    return records


def _summarize_baseline(args, doc_sets):
    config_echo = {"method": args.method, "m": args.m,
                   "lambda": args.mmr_lambda, "max_tokens": args.max_tokens}
    records = []
    for doc_set in doc_sets:
        sentences = doc_set.sentences
        if args.method == "lead":
            nodes = baselines.lead(doc_set, args.m)
            score = 0.0
        elif args.method == "lexrank":
            graph = graphs.build_graph(doc_set, "similarity")
            centrality = baselines.lexrank(graph)
            m = min(args.m, len(sentences))
            nodes = sorted(sorted(range(len(sentences)),
                                  key=lambda i: (-centrality[i], i))[:m])
            score = float(np.mean(centrality[nodes]))
        elif args.method == "mmr":
            graph = graphs.build_graph(doc_set, "similarity")
            relevance = baselines.centroid_relevance(doc_set)
            m = min(args.m, len(sentences))
            nodes = sorted(baselines.mmr(relevance, graph, args.mmr_lambda, m))
            score = float(np.mean(relevance[nodes]))
        else:
            raise ValueError(f"unknown method {args.method!r}")
        records.append({"id": doc_set.id,
                        "summary": [sentences[i].raw_text for i in nodes],
                        "nodes": list(nodes), "score": score,
                        "config": config_echo})
    return records


def cmd_evaluate(args) -> int:
    doc_sets = {s.id: s for s in _load_sets(args.data, args.max_tokens)}
    per_set = []
    with open(args.system, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
                set_id, summary = record["id"], record["summary"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{args.system}: malformed record on line "
                                 f"{lineno}: {exc}") from exc
            if set_id not in doc_sets:
                raise ValueError(f"system output references unknown set {set_id!r}")
            refs = doc_sets[set_id].gold_token_lists()
            candidate = []
            for sentence in summary:
                candidate.extend(textproc.tokenize(sentence))
            r1, r2, rl = rouge.rouge_max(candidate, refs)
            per_set.append({"id": set_id, "rouge1": r1, "rouge2": r2, "rougeL": rl})
    if not per_set:
        raise ValueError(f"{args.system}: no system summaries found")
    corpus = {metric: float(np.mean([row[metric] for row in per_set]))
              for metric in ("rouge1", "rouge2", "rougeL")}
    report = {"config": {"system": args.system, "data": args.data,
                         "max_tokens": args.max_tokens},
              "per_set": per_set, "corpus": corpus}
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_data_options(parser, with_seed=True):
    parser.add_argument("--data", required=True, help="dataset JSONL")
    parser.add_argument("--max-tokens", type=int, default=768,
                        help="per-document token cap (default: 768)")
    if with_seed:
        parser.add_argument("--seed", type=int, default=0)


def _add_graph_options(parser):
    parser.add_argument("--threshold", type=float, default=0.0,
                        help="similarity-graph edge threshold")
    parser.add_argument("--num-topics", type=int, default=20)
    parser.add_argument("--iterations", type=int, default=200,
                        help="Gibbs sweeps for the topic graph")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sgsum",
        description="Extractive multi-document summarization by sub-graph selection")
    commands = parser.add_subparsers(dest="command", required=True)

    p = commands.add_parser("build-graph", help="build sentence relation graphs")
    _add_data_options(p)
    p.add_argument("--kind", required=True, choices=GRAPH_KINDS)
    _add_graph_options(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_graph)

    p = commands.add_parser("oracle", help="extract greedy oracle labels")
    _add_data_options(p, with_seed=False)
    p.add_argument("--m", type=int, default=9, help="maximum oracle size")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    p = commands.add_parser("train", help="train the ranker")
    _add_data_options(p)
    p.add_argument("--graph-kind", choices=GRAPH_KINDS, default="similarity")
    p.add_argument("--graphs", help="graph cache JSONL (built on the fly if absent)")
    _add_graph_options(p)
    p.add_argument("--k", type=int, default=10, help="candidate nodes")
    p.add_argument("--m", type=int, default=9, help="sub-graph nodes")
    p.add_argument("--gamma", type=float, default=0.01, help="ranking margin")
    p.add_argument("--sigma", type=float, default=1.0, help="graph bias width")
    p.add_argument("--margin-mode", choices=training.MARGIN_MODES, default="scaled")
    p.add_argument("--lr", type=float, default=0.03)
    p.add_argument("--warmup", type=int, default=10000)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--hidden", type=int, default=256)
    p.add_argument("--ffn-hidden", type=int, default=1024)
    p.add_argument("--heads", type=int, default=8)
    p.add_argument("--transformer-layers", type=int, default=6)
    p.add_argument("--graph-layers", type=int, default=2)
    p.add_argument("--dropout", type=float, default=0.1)
    p.add_argument("--checkpoint-out", required=True)
    p.add_argument("--metrics-out", help="per-step metrics JSONL")
    p.set_defaults(func=cmd_train)

    p = commands.add_parser("summarize", help="produce summaries")
    _add_data_options(p, with_seed=False)
    p.add_argument("--method", choices=METHODS, default="sgsum")
    p.add_argument("--checkpoint", help="trained model (sgsum method)")
    p.add_argument("--graphs", help="graph cache JSONL (built on the fly if absent)")
    p.add_argument("--m", type=int, default=9,
                   help="summary sentences for baseline methods")
    p.add_argument("--lambda", dest="mmr_lambda", type=float, default=0.7,
                   help="MMR relevance/redundancy trade-off")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_summarize)

    p = commands.add_parser("evaluate", help="score system output against gold")
    _add_data_options(p, with_seed=False)
    p.add_argument("--system", required=True, help="system summaries JSONL")
    p.add_argument("--out", help="report path (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
