import logging
from collections import Counter
from dataclasses import dataclass
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
import scipy.sparse as sp

from event_geoloc.exception import InputError
from event_geoloc.gazetteer.base import Gazetteer
from event_geoloc.ingest.tokenizer import Tokenizer, tokenize
from event_geoloc.types import FeatureConfig, Message

logger = logging.getLogger(__name__)

Edge = Tuple[str, str]


@dataclass(frozen=True)
class HeteroGraph:
    """Message / word / user network.

    publish and interact edges are (user, message); contain edges are (message, word).
    Node tuples are in canonical order: messages in input order, words and users sorted.
    """

    message_nodes: Tuple[str, ...]
    word_nodes: Tuple[str, ...]
    user_nodes: Tuple[str, ...]
    publish_edges: Tuple[Edge, ...]
    contain_edges: Tuple[Edge, ...]
    interact_edges: Tuple[Edge, ...]

    def message_index(self) -> Dict[str, int]:
        return {message_id: i for i, message_id in enumerate(self.message_nodes)}

    def incidence(self, kind: Literal["word", "user"]) -> sp.csr_matrix:
        """W_mk: rows are messages, columns are nodes of type `kind`, entries 0/1."""
        rows_of = self.message_index()
        if kind == "word":
            nodes = self.word_nodes
            pairs = [(message, word) for message, word in self.contain_edges]
        elif kind == "user":
            nodes = self.user_nodes
            pairs = sorted(
                {(message, user) for user, message in self.publish_edges + self.interact_edges}
            )
        else:
            raise ValueError(f"unknown node type {kind!r}")
        cols_of = {node: j for j, node in enumerate(nodes)}
        rows = np.fromiter((rows_of[m] for m, _ in pairs), dtype=np.int64, count=len(pairs))
        cols = np.fromiter((cols_of[n] for _, n in pairs), dtype=np.int64, count=len(pairs))
        return sp.csr_matrix(
            (np.ones(len(pairs), dtype=np.int64), (rows, cols)),
            shape=(len(self.message_nodes), len(nodes)),
        )


def message_tokens(
    messages: List[Message], gazetteer: Gazetteer, tokenizer: Optional[Tokenizer] = None
) -> List[List[str]]:
    return [tokenize(message, gazetteer, tokenizer) for message in messages]


def build_hetero_graph(
    messages: List[Message],
    config: FeatureConfig,
    gazetteer: Gazetteer,
    tokenizer: Optional[Tokenizer] = None,
) -> HeteroGraph:
    if not messages:
        raise InputError("cannot build a graph from an empty message list", component="graph")
    message_ids = [message.id for message in messages]
    if len(set(message_ids)) != len(message_ids):
        raise InputError("duplicate message ids", component="graph")

    tokens = message_tokens(messages, gazetteer, tokenizer)
    frequency = Counter(token for toks in tokens for token in toks)

    def keep(token: str) -> bool:
        return frequency[token] >= config.word_min_freq or gazetteer.has_name(token)

    contain = sorted(
        {(message.id, token) for message, toks in zip(messages, tokens) for token in toks if keep(token)}
    )
    publish = sorted({(message.user_id, message.id) for message in messages})
    interact = sorted(
        {(user, message.id) for message in messages for user in message.mentioned_user_ids}
    )
    words = sorted({word for _, word in contain})
    users = sorted({user for user, _ in publish} | {user for user, _ in interact})

    graph = HeteroGraph(
        message_nodes=tuple(message_ids),
        word_nodes=tuple(words),
        user_nodes=tuple(users),
        publish_edges=tuple(publish),
        contain_edges=tuple(contain),
        interact_edges=tuple(interact),
    )
    logger.info(
        "heterogeneous graph: %d messages, %d words, %d users, %d edges",
        len(graph.message_nodes),
        len(graph.word_nodes),
        len(graph.user_nodes),
        len(publish) + len(contain) + len(interact),
    )
    return graph


def dump_hetero_edges(g: HeteroGraph, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for kind, edges in (
            ("publish", g.publish_edges),
            ("contain", g.contain_edges),
            ("interact", g.interact_edges),
        ):
            for src, dst in edges:
                f.write(f"{kind}\t{src}\t{dst}\n")
