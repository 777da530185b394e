"""Shared fixtures: tiny model configs and synthetic corpora."""

import numpy as np
import pytest

from sgsum import graphs, textproc
from sgsum.encoder import EncoderConfig, build_vocab, init_params
from sgsum.subgraph import SelectionConfig
from sgsum.training import TrainConfig

SALIENT_VOCAB = ["storm", "flood", "rescue", "evacuation", "damage", "homes",
                 "river", "rainfall", "emergency", "crews", "residents", "warning"]
NOISE_VOCAB = ["meeting", "schedule", "budget", "garden", "recipe", "music",
               "travel", "paint", "market", "lecture", "puzzle", "bicycle",
               "window", "coffee", "library", "printer"]


def tiny_encoder_config(**overrides):
    base = dict(hidden=8, ffn_hidden=16, heads=2, transformer_layers=1,
                graph_layers=1, dropout=0.0, sigma=1.0, max_tokens=64)
    base.update(overrides)
    return EncoderConfig(**base)


def small_encoder_config(**overrides):
    base = dict(hidden=32, ffn_hidden=64, heads=4, transformer_layers=1,
                graph_layers=1, dropout=0.1, sigma=1.0, max_tokens=128)
    base.update(overrides)
    return EncoderConfig(**base)


def random_sentence(rng, words, length=6):
    return " ".join(rng.choice(words, size=length, replace=True))


def planted_corpus(seed, n_sets=20, docs_per_set=2, sents_per_doc=5):
    """Sets whose gold summary is two planted salient sentences, never in
    lead position; salient and noise vocabularies are disjoint."""
    rng = np.random.default_rng(seed)
    sets = []
    for idx in range(n_sets):
        docs, gold = [], []
        for _ in range(docs_per_set):
            plant = int(rng.integers(1, sents_per_doc))
            sents = []
            for i in range(sents_per_doc):
                if i == plant:
                    text = random_sentence(rng, SALIENT_VOCAB)
                    gold.append(text)
                else:
                    text = random_sentence(rng, NOISE_VOCAB)
                sents.append(text)
            docs.append(sents)
        sets.append(textproc.make_document_set(f"toy{idx}", docs, summary=gold))
    return sets


def random_corpus(seed, n_sets, min_sents=4, max_sents=8):
    """Unstructured sets for wiring/oracle-equivalence tests."""
    rng = np.random.default_rng(seed)
    words = SALIENT_VOCAB + NOISE_VOCAB
    sets = []
    for idx in range(n_sets):
        total = int(rng.integers(min_sents, max_sents + 1))
        split = int(rng.integers(1, total))
        flat = [random_sentence(rng, words, length=int(rng.integers(3, 7)))
                for _ in range(total)]
        docs = [flat[:split], flat[split:]]
        gold = [str(rng.choice(flat))]
        sets.append(textproc.make_document_set(f"rand{idx}", docs, summary=gold))
    return sets


@pytest.fixture
def four_sentence_set():
    return textproc.make_document_set(
        "mini",
        [["the storm hit the coast", "crews worked all night"],
         ["flood water rose fast", "the mayor spoke today"]],
        summary=["the storm hit the coast", "flood water rose fast"])


@pytest.fixture
def tiny_model(four_sentence_set):
    config = tiny_encoder_config()
    vocab = build_vocab([four_sentence_set])
    params = init_params(vocab.size, config, np.random.default_rng(3))
    graph = graphs.build_graph(four_sentence_set, "similarity")
    return four_sentence_set, graph, vocab, config, params
